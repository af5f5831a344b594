"""Deterministic mock backends driven by payload-tagged synthetic frames.

Every mock is a pure function of pixel/text content: behavior is either read
from the JSON payload embedded in a frame (see `videval.synthetic`) or seeded
from a content hash, so full pipeline runs reproduce byte-for-byte.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..benchmark import default_action_vocabulary, default_object_vocabulary
from ..errors import BackendError
from ..synthetic import canonical_payload, content_seed, read_payload
from .core import BackendRegistry, DetectionFrameResult, Embedding

MOCK_SPACE_ID = "mock-clip"


def _frame_digest(frame: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(frame).tobytes()).hexdigest()


def _unit_vector(seed: int, dim: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def _middle_payload(frames: np.ndarray) -> dict | None:
    return read_payload(frames[len(frames) // 2])


class MockEmbedder:
    """Embeds text by content hash; a frame tagged with text embeds near it.

    A frame payload's "tag" selects the text vector; optional "jitter" tilts
    the vector by a payload-seeded orthogonal component, giving a cosine of
    1/sqrt(1 + jitter^2) against the tag text.
    """

    deterministic = True

    def __init__(self, dim: int = 64) -> None:
        self.dim = dim

    def embed_text(self, text: str) -> Embedding:
        seed = content_seed("text-emb", text.strip().lower())
        return Embedding(vector=_unit_vector(seed, self.dim), space_id=MOCK_SPACE_ID)

    def embed_image(self, frame: np.ndarray) -> Embedding:
        payload = read_payload(frame)
        if payload is not None and "tag" in payload:
            base = self.embed_text(str(payload["tag"])).vector
            jitter = float(payload.get("jitter", 0.0))
            if jitter != 0.0:
                raw = _unit_vector(content_seed("jitter", canonical_payload(payload)), self.dim)
                perp = raw - np.dot(raw, base) * base
                perp /= np.linalg.norm(perp)
                tilted = base + jitter * perp
                return Embedding(vector=tilted / np.linalg.norm(tilted), space_id=MOCK_SPACE_ID)
            return Embedding(vector=base, space_id=MOCK_SPACE_ID)
        seed = content_seed("image-emb", _frame_digest(frame))
        return Embedding(vector=_unit_vector(seed, self.dim), space_id=MOCK_SPACE_ID)


class MockCaptioner:
    """Returns the frame's tagged text verbatim, then word-dropped paraphrases."""

    deterministic = True

    def captions(self, frames: np.ndarray, n: int) -> tuple[str, ...]:
        payload = _middle_payload(frames)
        base = ""
        if payload is not None:
            base = str(payload.get("caption") or payload.get("tag") or "")
        if not base:
            base = f"unlabeled scene {_frame_digest(frames[len(frames) // 2])[:8]}"
        out = []
        for k in range(n):
            words = base.split()
            if k == 0 or len(words) < 3:
                out.append(base)
            else:
                drop = (k - 1) % len(words)
                out.append(" ".join(w for i, w in enumerate(words) if i != drop))
        return tuple(out)


class MockDetector:
    """Reports the objects annotated in the frame payload's "objects" list."""

    deterministic = True

    def __init__(self, vocabulary: tuple[str, ...] | None = None) -> None:
        self._vocabulary = vocabulary if vocabulary is not None else default_object_vocabulary()

    def vocabulary(self) -> tuple[str, ...]:
        return self._vocabulary

    def detect(self, frame: np.ndarray, target: str, color: str | None = None) -> DetectionFrameResult:
        if target not in self._vocabulary:
            raise BackendError(
                f"target {target!r} not in detector vocabulary "
                f"({len(self._vocabulary)} classes: {', '.join(self._vocabulary[:5])}, ...)"
            )
        payload = read_payload(frame)
        entries = payload.get("objects", []) if payload is not None else []
        for entry in entries:
            if entry.get("name") == target:
                count = int(entry.get("count", 1))
                match: bool | None = None
                if color is not None:
                    match = entry.get("color") == color
                return DetectionFrameResult(present=count > 0, count=count, color_match=match)
        return DetectionFrameResult(present=False, count=0, color_match=False if color is not None else None)


class MockFaceAnalyzer:
    """Distance between payload face identities; None when the frame has none."""

    deterministic = True
    _DIM = 32

    def _identity_vector(self, image: np.ndarray) -> np.ndarray | None:
        payload = read_payload(image)
        if payload is not None:
            if "face" not in payload:
                return None
            seed = content_seed("face-emb", str(payload["face"]))
        else:
            seed = content_seed("face-emb", _frame_digest(image))
        return _unit_vector(seed, self._DIM)

    def face_distance(self, frame: np.ndarray, reference_image: np.ndarray) -> float | None:
        if frame.shape == reference_image.shape and np.array_equal(frame, reference_image):
            return 0.0
        face = self._identity_vector(frame)
        if face is None:
            return None
        ref = self._identity_vector(reference_image)
        if ref is None:
            ref = _unit_vector(content_seed("face-emb", _frame_digest(reference_image)), self._DIM)
        return float((1.0 - np.dot(face, ref)) / 2.0)


class MockOcr:
    deterministic = True

    def recognize_text(self, frame: np.ndarray) -> str:
        payload = read_payload(frame)
        if payload is None:
            return ""
        return str(payload.get("text", ""))


class MockActionClassifier:
    deterministic = True

    def __init__(self, vocabulary: tuple[str, ...] | None = None) -> None:
        self._vocabulary = vocabulary if vocabulary is not None else default_action_vocabulary()

    def classify_action(self, frames: np.ndarray) -> tuple[str, float]:
        payload = _middle_payload(frames)
        if payload is not None and "action" in payload:
            return str(payload["action"]), 0.99
        idx = content_seed("action", _frame_digest(frames[len(frames) // 2])) % len(self._vocabulary)
        return self._vocabulary[idx], 0.25


class MockVqaScorer:
    deterministic = True

    def vqa_scores(self, frames: np.ndarray) -> dict[str, float]:
        payload = read_payload(frames[0])
        if payload is not None and ("vqa_aesthetic" in payload or "vqa_technical" in payload):
            return {
                "aesthetic": float(payload.get("vqa_aesthetic", 0.5)),
                "technical": float(payload.get("vqa_technical", 0.5)),
            }
        rng = np.random.default_rng(content_seed("vqa", _frame_digest(frames[0])))
        return {"aesthetic": float(rng.uniform()), "technical": float(rng.uniform())}


class MockInceptionClassifier:
    """One-hot on the payload's "class_id"; seeded softmax for untagged frames."""

    deterministic = True

    def __init__(self, classes: int = 16) -> None:
        self.classes = classes

    def class_probs(self, frame: np.ndarray) -> np.ndarray:
        payload = read_payload(frame)
        if payload is not None and "class_probs" in payload:
            return np.asarray(payload["class_probs"], dtype=np.float64)
        if payload is not None and "class_id" in payload:
            k = int(payload.get("class_count", self.classes))
            probs = np.zeros(k, dtype=np.float64)
            probs[int(payload["class_id"]) % k] = 1.0
            return probs
        rng = np.random.default_rng(content_seed("inception", _frame_digest(frame)))
        logits = rng.standard_normal(self.classes)
        exp = np.exp(logits - logits.max())
        return exp / exp.sum()


class MockFlowEstimator:
    """Constant flow equal to the payload offset difference between frames."""

    deterministic = True

    def estimate_flow(self, frame_a: np.ndarray, frame_b: np.ndarray) -> np.ndarray:
        height, width = frame_a.shape[:2]
        flow = np.zeros((height, width, 2), dtype=np.float64)
        if np.array_equal(frame_a, frame_b):
            return flow
        payload_a = read_payload(frame_a)
        payload_b = read_payload(frame_b)
        if payload_a is not None and payload_b is not None:
            off_a = payload_a.get("offset", (0.0, 0.0))
            off_b = payload_b.get("offset", (0.0, 0.0))
            flow[..., 0] = float(off_b[0]) - float(off_a[0])
            flow[..., 1] = float(off_b[1]) - float(off_a[1])
        return flow


class MockReferenceSource:
    """Serves reference frames from in-memory mappings."""

    deterministic = True

    def __init__(
        self,
        prompt_refs: dict[str, tuple[np.ndarray, ...]] | None = None,
        celeb_refs: dict[str, tuple[np.ndarray, ...]] | None = None,
    ) -> None:
        self._prompt_refs = dict(prompt_refs or {})
        self._celeb_refs = dict(celeb_refs or {})

    def prompt_references(self, prompt_id: str) -> tuple[np.ndarray, ...]:
        if prompt_id not in self._prompt_refs:
            raise BackendError(f"no reference images for prompt {prompt_id!r}")
        return self._prompt_refs[prompt_id]

    def celebrity_references(self, name: str) -> tuple[np.ndarray, ...]:
        if name not in self._celeb_refs:
            raise BackendError(f"no gallery images for celebrity {name!r}")
        return self._celeb_refs[name]


def mock_registry(
    dim: int = 64,
    classes: int = 16,
    prompt_refs: dict[str, tuple[np.ndarray, ...]] | None = None,
    celeb_refs: dict[str, tuple[np.ndarray, ...]] | None = None,
) -> BackendRegistry:
    """A fully bound registry of deterministic mocks."""
    return BackendRegistry(
        text_image_embedder=MockEmbedder(dim=dim),
        captioner=MockCaptioner(),
        detector_tracker=MockDetector(),
        face_analyzer=MockFaceAnalyzer(),
        ocr_engine=MockOcr(),
        action_classifier=MockActionClassifier(),
        flow_estimator=MockFlowEstimator(),
        vqa_scorer=MockVqaScorer(),
        inception_classifier=MockInceptionClassifier(classes=classes),
        reference_image_source=MockReferenceSource(prompt_refs=prompt_refs, celeb_refs=celeb_refs),
    )
