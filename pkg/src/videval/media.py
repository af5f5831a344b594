"""Video decoding and pairing of generated videos with benchmark prompts."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from .benchmark import Benchmark, PromptRecord
from .errors import ConfigurationError, ParseError, ValidationError

VIDEO_EXTENSIONS = (".avi", ".mp4", ".mkv", ".mov", ".webm", ".npz")


@dataclass(frozen=True)
class FrameSamplingPolicy:
    """Which frames to keep at ingest: all, or K uniformly spaced."""

    mode: str = "all"
    k: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("all", "uniform"):
            raise ConfigurationError(f"sampling mode must be 'all' or 'uniform', got {self.mode!r}")
        if self.mode == "uniform" and (self.k is None or self.k < 1):
            raise ConfigurationError("uniform sampling requires k >= 1")

    @classmethod
    def parse(cls, text: str) -> "FrameSamplingPolicy":
        """Parse the `all|uniform:K` flag syntax."""
        if text == "all":
            return cls(mode="all")
        if text.startswith("uniform:"):
            try:
                return cls(mode="uniform", k=int(text.split(":", 1)[1]))
            except ValueError as exc:
                raise ConfigurationError(f"bad sampling spec {text!r}") from exc
        raise ConfigurationError(f"bad sampling spec {text!r}; expected all or uniform:K")

    def describe(self) -> str:
        return "all" if self.mode == "all" else f"uniform:{self.k}"

    def select(self, n: int) -> np.ndarray:
        if self.mode == "all" or self.k >= n:
            return np.arange(n)
        return np.unique(np.linspace(0, n - 1, self.k).round().astype(int))


@dataclass(frozen=True)
class FrameSequence:
    """Ordered RGB frames of one generated video."""

    frames: np.ndarray
    fps: float
    source_path: str
    prompt_id: str
    model_id: str

    def __post_init__(self) -> None:
        frames = np.asarray(self.frames)
        if frames.ndim != 4 or frames.shape[0] < 1 or frames.shape[3] != 3:
            raise ValidationError(
                f"frames must have shape (N, H, W, 3) with N >= 1, got {frames.shape}",
                record_id=self.prompt_id,
                field="frames",
            )
        if not self.fps > 0:
            raise ValidationError(f"fps must be positive, got {self.fps}", record_id=self.prompt_id, field="fps")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return int(self.frames.shape[0])


@dataclass(frozen=True)
class EvaluationSet:
    """One model's videos paired with their prompts."""

    model_id: str
    items: tuple[tuple[PromptRecord, FrameSequence], ...]
    missing: tuple[str, ...] = ()
    item_errors: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for record, sequence in self.items:
            if record.id in seen:
                raise ValidationError("duplicate prompt id in evaluation set", record_id=record.id)
            seen.add(record.id)
            if sequence.prompt_id != record.id:
                raise ValidationError(
                    f"frame sequence prompt_id {sequence.prompt_id!r} does not match record",
                    record_id=record.id,
                )

    def __len__(self) -> int:
        return len(self.items)


def decode_video(path: str | Path, sampling: FrameSamplingPolicy | None = None) -> tuple[np.ndarray, float]:
    """Decode a video file (or .npz frame bundle) into RGB frames plus fps."""
    path = Path(path)
    sampling = sampling or FrameSamplingPolicy()
    if path.suffix == ".npz":
        return _decode_npz(path, sampling)
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise ParseError("decoder could not open file", path=str(path))
    try:
        fps = capture.get(cv2.CAP_PROP_FPS) or 0.0
        frames = []
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
    finally:
        capture.release()
    if not frames:
        raise ParseError("no decodable frames", path=str(path))
    stacked = np.stack(frames)
    return stacked[sampling.select(len(stacked))], float(fps) if fps > 0 else 8.0


def _decode_npz(path: Path, sampling: FrameSamplingPolicy) -> tuple[np.ndarray, float]:
    try:
        with np.load(path) as bundle:
            frames = np.asarray(bundle["frames"])
            fps = float(bundle["fps"]) if "fps" in bundle else 8.0
    except (KeyError, ValueError, OSError) as exc:
        raise ParseError(f"bad frame bundle: {exc}", path=str(path)) from exc
    if frames.ndim != 4 or frames.shape[0] < 1:
        raise ParseError(f"frame bundle must be (N, H, W, 3), got {frames.shape}", path=str(path))
    return frames[sampling.select(len(frames))], fps


def save_frame_bundle(path: str | Path, frames: np.ndarray, fps: float) -> None:
    """Write frames losslessly as a .npz bundle decode_video understands."""
    np.savez_compressed(Path(path), frames=np.asarray(frames, dtype=np.uint8), fps=np.float64(fps))


@dataclass
class IngestReport:
    matched: list[str] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    errors: list[tuple[str, str]] = field(default_factory=list)


def find_video_file(model_dir: Path, prompt_id: str) -> Path | None:
    for extension in VIDEO_EXTENSIONS:
        candidate = model_dir / f"{prompt_id}{extension}"
        if candidate.is_file():
            return candidate
    return None


def ingest(
    model_dir: str | Path,
    benchmark: Benchmark,
    sampling: FrameSamplingPolicy | None = None,
    model_id: str | None = None,
) -> tuple[EvaluationSet, IngestReport]:
    """Pair `<prompt_id>.<ext>` files under model_dir with benchmark records.

    Unmatched prompts land in the report's `missing` list; undecodable files
    land in `errors` and are excluded. An empty or absent directory is fatal.
    """
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise ConfigurationError(f"model directory {model_dir} does not exist")
    model_id = model_id or model_dir.name
    sampling = sampling or FrameSamplingPolicy()
    report = IngestReport()
    items = []
    for record in benchmark.records:
        path = find_video_file(model_dir, record.id)
        if path is None:
            report.missing.append(record.id)
            continue
        try:
            frames, fps = decode_video(path, sampling)
        except ParseError as exc:
            report.errors.append((record.id, str(exc)))
            continue
        items.append(
            (
                record,
                FrameSequence(
                    frames=frames,
                    fps=fps,
                    source_path=str(path),
                    prompt_id=record.id,
                    model_id=model_id,
                ),
            )
        )
        report.matched.append(record.id)
    if not items:
        raise ConfigurationError(f"no decodable videos for any benchmark prompt under {model_dir}")
    evaluation_set = EvaluationSet(
        model_id=model_id,
        items=tuple(items),
        missing=tuple(report.missing),
        item_errors=tuple(report.errors),
    )
    return evaluation_set, report
