"""Reference-image sources backed by the on-disk directory layout."""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from ..errors import BackendError


def _load_rgb(path: Path) -> np.ndarray:
    image = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if image is None:
        raise BackendError(f"could not read reference image {path}")
    return cv2.cvtColor(image, cv2.COLOR_BGR2RGB)


class DirectoryReferenceSource:
    """Serves `<root>/<prompt_id>/{1..N1}.png` and `<root>/celebs/<name>/{1..N3}.png`."""

    deterministic = True

    def __init__(self, root: str | Path, prompt_count: int = 5, celebrity_count: int = 3) -> None:
        self.root = Path(root)
        self.prompt_count = prompt_count
        self.celebrity_count = celebrity_count

    def _load_set(self, directory: Path, count: int, what: str) -> tuple[np.ndarray, ...]:
        if not directory.is_dir():
            raise BackendError(f"missing {what} directory {directory}")
        images = []
        for index in range(1, count + 1):
            path = directory / f"{index}.png"
            if not path.is_file():
                raise BackendError(f"missing {what} image {path}")
            images.append(_load_rgb(path))
        return tuple(images)

    def prompt_references(self, prompt_id: str) -> tuple[np.ndarray, ...]:
        return self._load_set(self.root / prompt_id, self.prompt_count, "reference")

    def celebrity_references(self, name: str) -> tuple[np.ndarray, ...]:
        return self._load_set(self.root / "celebs" / name, self.celebrity_count, "gallery")
