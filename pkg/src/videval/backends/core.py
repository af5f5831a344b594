"""Slot protocols and shared domain types for feature-extraction backends."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import BackendError, ConfigurationError
from ..kernels import cosine_similarity

# Registry slot names, in the order metrics consume them.
SLOT_NAMES = (
    "text_image_embedder",
    "captioner",
    "detector_tracker",
    "face_analyzer",
    "ocr_engine",
    "action_classifier",
    "flow_estimator",
    "vqa_scorer",
    "inception_classifier",
    "reference_image_source",
)


@dataclass(frozen=True)
class Embedding:
    """A vector in a named joint text/image space."""

    vector: np.ndarray
    space_id: str

    def __post_init__(self) -> None:
        vec = np.asarray(self.vector, dtype=np.float64)
        if vec.ndim != 1 or vec.size == 0:
            raise BackendError(f"embedding vector must be 1-D and non-empty, got shape {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise BackendError("embedding vector contains non-finite entries")
        object.__setattr__(self, "vector", vec)

    def cosine(self, other: "Embedding") -> float:
        """Cosine similarity; embeddings from different spaces never compare."""
        if self.space_id != other.space_id:
            raise ConfigurationError(
                f"cannot compare embeddings across spaces {self.space_id!r} and {other.space_id!r}"
            )
        try:
            return cosine_similarity(self.vector, other.vector)
        except ValueError as exc:
            raise BackendError(str(exc)) from exc


@dataclass(frozen=True)
class DetectionFrameResult:
    """Per-frame detector output for one target object."""

    present: bool
    count: int
    color_match: bool | None = None

    def __post_init__(self) -> None:
        if self.count < 0:
            raise BackendError(f"detection count must be non-negative, got {self.count}")
        if not self.present and self.count != 0:
            raise BackendError("absent object must have count 0")


def validate_flow_field(flow: np.ndarray, frame_shape: tuple[int, ...]) -> np.ndarray:
    """Check a flow field is (H, W, 2), finite, and matches the frame size."""
    flow = np.asarray(flow, dtype=np.float64)
    expected = (frame_shape[0], frame_shape[1], 2)
    if flow.shape != expected:
        raise BackendError(f"flow field shape {flow.shape} does not match expected {expected}")
    if not np.all(np.isfinite(flow)):
        raise BackendError("flow field contains non-finite entries")
    return flow


@runtime_checkable
class Backend(Protocol):
    deterministic: bool


class TextImageEmbedder(Backend, Protocol):
    def embed_text(self, text: str) -> Embedding: ...

    def embed_image(self, frame: np.ndarray) -> Embedding: ...


class Captioner(Backend, Protocol):
    def captions(self, frames: np.ndarray, n: int) -> tuple[str, ...]: ...


class DetectorTracker(Backend, Protocol):
    def vocabulary(self) -> tuple[str, ...]: ...

    def detect(self, frame: np.ndarray, target: str, color: str | None = None) -> DetectionFrameResult: ...


class FaceAnalyzer(Backend, Protocol):
    def face_distance(self, frame: np.ndarray, reference_image: np.ndarray) -> float | None:
        """Distance in [0, inf); None when no face is found in `frame`."""
        ...


class OcrEngine(Backend, Protocol):
    def recognize_text(self, frame: np.ndarray) -> str: ...


class ActionClassifier(Backend, Protocol):
    def classify_action(self, frames: np.ndarray) -> tuple[str, float]:
        """Top-1 label and its confidence for a clip of shape (N, H, W, 3)."""
        ...


class FlowEstimator(Backend, Protocol):
    def estimate_flow(self, frame_a: np.ndarray, frame_b: np.ndarray) -> np.ndarray:
        """Forward displacement field a→b, shape (H, W, 2) as (dx, dy)."""
        ...


class VqaScorer(Backend, Protocol):
    def vqa_scores(self, frames: np.ndarray) -> dict[str, float]:
        """Per-video quality scores keyed 'aesthetic' and 'technical'."""
        ...


class InceptionClassifier(Backend, Protocol):
    def class_probs(self, frame: np.ndarray) -> np.ndarray: ...


class ReferenceImageSource(Backend, Protocol):
    def prompt_references(self, prompt_id: str) -> tuple[np.ndarray, ...]: ...

    def celebrity_references(self, name: str) -> tuple[np.ndarray, ...]: ...


@dataclass
class BackendRegistry:
    """Named backend slots; metrics fail fast when a required slot is unbound."""

    text_image_embedder: TextImageEmbedder | None = None
    captioner: Captioner | None = None
    detector_tracker: DetectorTracker | None = None
    face_analyzer: FaceAnalyzer | None = None
    ocr_engine: OcrEngine | None = None
    action_classifier: ActionClassifier | None = None
    flow_estimator: FlowEstimator | None = None
    vqa_scorer: VqaScorer | None = None
    inception_classifier: InceptionClassifier | None = None
    reference_image_source: ReferenceImageSource | None = None

    def __post_init__(self) -> None:
        assert tuple(f.name for f in fields(self)) == SLOT_NAMES

    def bound_slots(self) -> tuple[str, ...]:
        return tuple(name for name in SLOT_NAMES if getattr(self, name) is not None)

    def is_bound(self, slot: str) -> bool:
        if slot not in SLOT_NAMES:
            raise ConfigurationError(f"unknown backend slot {slot!r}; valid slots: {', '.join(SLOT_NAMES)}")
        return getattr(self, slot) is not None

    def require(self, slot: str):
        if not self.is_bound(slot):
            raise ConfigurationError(f"backend slot {slot!r} is not bound")
        return getattr(self, slot)

    def all_deterministic(self) -> bool:
        return all(getattr(self, name).deterministic for name in self.bound_slots())
