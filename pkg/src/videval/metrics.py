"""The 17 objective metrics: pure aggregation math over backend outputs.

Each operation walks an EvaluationSet, scores applicable videos, and returns a
MetricResult whose aggregate is the mean of per-video values. Backend failures
become per-item errors carried on the result, never silent drops; a metric
with zero applicable or successful items raises MetricError instead of
emitting NaN.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from statistics import fmean
from typing import Callable, Iterable

import numpy as np

from .backends.core import BackendRegistry, validate_flow_field
from .benchmark import PromptRecord
from .errors import BackendError, ConfigurationError, MetricError
from .kernels import bleu, char_error_rate, inception_score as is_kernel, normalized_edit_distance, word_error_rate
from .media import EvaluationSet, FrameSequence

logger = logging.getLogger(__name__)

HIGHER_BETTER = "higher_better"
LOWER_BETTER = "lower_better"
TARGET_MATCH = "target_match"

# metric_id -> direction, fixed for all runs.
METRIC_DIRECTIONS: dict[str, str] = {
    "vqa_aesthetic": HIGHER_BETTER,
    "vqa_technical": HIGHER_BETTER,
    "inception_score": HIGHER_BETTER,
    "clip_score": HIGHER_BETTER,
    "sd_score": HIGHER_BETTER,
    "blip_bleu": HIGHER_BETTER,
    "detection_score": HIGHER_BETTER,
    "count_score": HIGHER_BETTER,
    "color_score": HIGHER_BETTER,
    "celebrity_id_score": LOWER_BETTER,
    "ocr_score": LOWER_BETTER,
    "action_score": HIGHER_BETTER,
    "flow_score": TARGET_MATCH,
    "motion_ac_score": TARGET_MATCH,
    "warping_error": LOWER_BETTER,
    "clip_temp": HIGHER_BETTER,
    "face_consistency": HIGHER_BETTER,
}

METRIC_IDS = tuple(METRIC_DIRECTIONS)

# Aspect grouping used by reporting breakdowns and alignment defaults.
ASPECT_METRICS: dict[str, tuple[str, ...]] = {
    "visual_quality": ("vqa_aesthetic", "vqa_technical", "inception_score"),
    "tv_alignment": (
        "clip_score",
        "sd_score",
        "blip_bleu",
        "detection_score",
        "count_score",
        "color_score",
        "celebrity_id_score",
        "ocr_score",
    ),
    "motion_quality": ("action_score", "flow_score", "motion_ac_score"),
    "temporal_consistency": ("warping_error", "clip_temp", "face_consistency"),
}

# Metrics whose raw values live in [0,1] (or [-1,1]); display scaling by 100
# applies to these only. VQA/IS/flow/warping scales are backend-defined.
PAPER_SCALED_METRICS = frozenset(
    {
        "clip_score",
        "sd_score",
        "blip_bleu",
        "detection_score",
        "count_score",
        "color_score",
        "celebrity_id_score",
        "ocr_score",
        "action_score",
        "motion_ac_score",
        "clip_temp",
        "face_consistency",
    }
)


@dataclass(frozen=True)
class MetricConfig:
    """Tunables shared across metric runs."""

    flow_threshold: float = 2.0
    paper_scale: bool = False
    inception_splits: int = 1

    def __post_init__(self) -> None:
        if not self.flow_threshold > 0:
            raise ConfigurationError(f"flow_threshold must be positive, got {self.flow_threshold}")
        if self.inception_splits < 1:
            raise ConfigurationError(f"inception_splits must be >= 1, got {self.inception_splits}")


@dataclass(frozen=True)
class MetricResult:
    """One metric over one model's evaluation set."""

    metric_id: str
    per_video: dict[str, float]
    aggregate: float
    direction: str
    applicable_count: int
    item_errors: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.direction not in (HIGHER_BETTER, LOWER_BETTER, TARGET_MATCH):
            raise MetricError(f"unknown direction {self.direction!r}")
        if self.per_video:
            expected = fmean(self.per_video.values())
            if abs(expected - self.aggregate) > 1e-12:
                raise MetricError(
                    f"{self.metric_id}: aggregate {self.aggregate} is not the mean of per_video ({expected})"
                )


def _finalize(metric_id: str, per_video: dict[str, float], errors: list[tuple[str, str]]) -> MetricResult:
    if not per_video:
        raise MetricError(f"{metric_id}: no applicable items produced a value", item_errors=tuple(errors))
    return MetricResult(
        metric_id=metric_id,
        per_video=dict(sorted(per_video.items())),
        aggregate=fmean(per_video.values()),
        direction=METRIC_DIRECTIONS[metric_id],
        applicable_count=len(per_video),
        item_errors=tuple(errors),
    )


def _per_video(
    metric_id: str,
    items: Iterable[tuple[PromptRecord, FrameSequence]],
    score_one: Callable[[PromptRecord, FrameSequence], float],
) -> MetricResult:
    per_video: dict[str, float] = {}
    errors: list[tuple[str, str]] = []
    for record, sequence in items:
        try:
            per_video[record.id] = float(score_one(record, sequence))
        except (BackendError, MetricError) as exc:
            errors.append((record.id, str(exc)))
    return _finalize(metric_id, per_video, errors)


def _require_items(evaluation_set: EvaluationSet, metric_id: str) -> None:
    if not evaluation_set.items:
        raise MetricError(f"{metric_id}: evaluation set is empty")


def _require_pairs(sequence: FrameSequence) -> None:
    if len(sequence) < 2:
        raise MetricError("undefined for a single-frame video")


# ---------------------------------------------------------------------------
# Text-video alignment


def clip_score(evaluation_set: EvaluationSet, embedder) -> MetricResult:
    """Mean over frames of cosine(frame embedding, prompt embedding)."""
    _require_items(evaluation_set, "clip_score")

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        prompt_embedding = embedder.embed_text(record.text)
        values = []
        for index, frame in enumerate(sequence.frames):
            try:
                values.append(embedder.embed_image(frame).cosine(prompt_embedding))
            except BackendError as exc:
                raise BackendError(f"frame {index}: {exc}") from exc
        return fmean(values)

    return _per_video("clip_score", evaluation_set.items, score_one)


def sd_score(evaluation_set: EvaluationSet, embedder, reference_source) -> MetricResult:
    """Mean over frames and reference images of frame/reference cosine."""
    _require_items(evaluation_set, "sd_score")

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        references = reference_source.prompt_references(record.id)
        if not references:
            raise BackendError("reference source returned no images")
        reference_embeddings = [embedder.embed_image(image) for image in references]
        values = []
        for index, frame in enumerate(sequence.frames):
            try:
                frame_embedding = embedder.embed_image(frame)
                values.append(fmean(frame_embedding.cosine(ref) for ref in reference_embeddings))
            except BackendError as exc:
                raise BackendError(f"frame {index}: {exc}") from exc
        return fmean(values)

    return _per_video("sd_score", evaluation_set.items, score_one)


def blip_bleu(evaluation_set: EvaluationSet, captioner, caption_count: int = 5) -> MetricResult:
    """Mean BLEU between the prompt and each generated caption."""
    _require_items(evaluation_set, "blip_bleu")

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        captions = captioner.captions(sequence.frames, n=caption_count)
        if len(captions) != caption_count:
            raise BackendError(f"captioner returned {len(captions)} captions, expected {caption_count}")
        values = []
        for caption in captions:
            if not caption.strip():
                logger.warning("empty caption for prompt %s; scoring 0", record.id)
                values.append(0.0)
            else:
                values.append(bleu(record.text, caption))
        return fmean(values)

    return _per_video("blip_bleu", evaluation_set.items, score_one)


def _object_metric(
    metric_id: str,
    evaluation_set: EvaluationSet,
    detector,
    wants,
    frame_term,
    query_color: bool,
) -> MetricResult:
    """Shared walk for detection/count/color: mean frame term per object, then over objects."""
    _require_items(evaluation_set, metric_id)
    applicable = [
        (record, sequence)
        for record, sequence in evaluation_set.items
        if any(wants(obj) for obj in record.attributes.objects)
    ]

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        object_scores = []
        for spec in record.attributes.objects:
            if not wants(spec):
                continue
            terms = []
            for frame in sequence.frames:
                detection = detector.detect(frame, spec.name, color=spec.color if query_color else None)
                terms.append(frame_term(detection, spec))
            object_scores.append(fmean(terms))
        return fmean(object_scores)

    return _per_video(metric_id, applicable, score_one)


def detection_score(evaluation_set: EvaluationSet, detector) -> MetricResult:
    """Mean object presence over frames, for prompts annotated with objects."""
    return _object_metric(
        "detection_score",
        evaluation_set,
        detector,
        wants=lambda spec: True,
        frame_term=lambda detection, spec: 1.0 if detection.present else 0.0,
        query_color=False,
    )


def count_score(evaluation_set: EvaluationSet, detector) -> MetricResult:
    """Mean of per-frame count accuracy 1 - |c_t - truth|/truth, clamped to [0,1]."""

    def term(detection, spec) -> float:
        return float(np.clip(1.0 - abs(detection.count - spec.count) / spec.count, 0.0, 1.0))

    return _object_metric(
        "count_score",
        evaluation_set,
        detector,
        wants=lambda spec: spec.count is not None,
        frame_term=term,
        query_color=False,
    )


def color_score(evaluation_set: EvaluationSet, detector) -> MetricResult:
    """Mean per-frame color correctness for prompts with color-annotated objects."""
    return _object_metric(
        "color_score",
        evaluation_set,
        detector,
        wants=lambda spec: spec.color is not None,
        frame_term=lambda detection, spec: 1.0 if detection.color_match else 0.0,
        query_color=True,
    )


def celebrity_id_score(evaluation_set: EvaluationSet, face_analyzer, reference_source) -> MetricResult:
    """Mean over frames of the min face distance to the identity gallery.

    Faceless frames are skipped; a video with no detected face at all records
    the worst-case distance 1.0. Lower is better (raw distance).
    """
    _require_items(evaluation_set, "celebrity_id_score")
    applicable = [
        (record, sequence)
        for record, sequence in evaluation_set.items
        if record.attributes.celebrity is not None
    ]

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        gallery = reference_source.celebrity_references(record.attributes.celebrity)
        if not gallery:
            raise BackendError(f"empty gallery for {record.attributes.celebrity!r}")
        frame_values = []
        for frame in sequence.frames:
            distances = [face_analyzer.face_distance(frame, image) for image in gallery]
            if any(d is None for d in distances):
                continue
            frame_values.append(min(distances))
        if not frame_values:
            return 1.0
        return fmean(frame_values)

    return _per_video("celebrity_id_score", applicable, score_one)


def ocr_score(evaluation_set: EvaluationSet, ocr_engine) -> MetricResult:
    """Mean of WER/NED/CER (each clamped to [0,1]) against the ground-truth text."""
    _require_items(evaluation_set, "ocr_score")
    applicable = [
        (record, sequence)
        for record, sequence in evaluation_set.items
        if record.attributes.render_text is not None
    ]

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        truth = record.attributes.render_text
        frame_values = []
        for frame in sequence.frames:
            recognized = ocr_engine.recognize_text(frame)
            if not recognized.strip():
                frame_values.append(1.0)
                continue
            components = (
                word_error_rate(truth, recognized),
                normalized_edit_distance(truth, recognized),
                char_error_rate(truth, recognized),
            )
            frame_values.append(fmean(components))
        return fmean(frame_values)

    return _per_video("ocr_score", applicable, score_one)


# ---------------------------------------------------------------------------
# Video quality


def vqa_scores(evaluation_set: EvaluationSet, vqa_backend) -> tuple[MetricResult, MetricResult]:
    """Backend aesthetic/technical quality scores, mean-aggregated per model."""
    _require_items(evaluation_set, "vqa_aesthetic")
    aesthetic: dict[str, float] = {}
    technical: dict[str, float] = {}
    errors: list[tuple[str, str]] = []
    for record, sequence in evaluation_set.items:
        try:
            scores = vqa_backend.vqa_scores(sequence.frames)
            aesthetic[record.id] = float(scores["aesthetic"])
            technical[record.id] = float(scores["technical"])
        except (BackendError, KeyError, TypeError) as exc:
            errors.append((record.id, f"vqa backend failure: {exc!r}"))
    return (
        _finalize("vqa_aesthetic", aesthetic, errors),
        _finalize("vqa_technical", technical, errors),
    )


def inception_score(evaluation_set: EvaluationSet, classifier, cfg: MetricConfig | None = None) -> MetricResult:
    """Diversity of all frames of one model as exp(mean KL to the marginal).

    This is a model-level quantity: per_video is empty and applicable_count
    reports how many videos contributed frames.
    """
    cfg = cfg or MetricConfig()
    _require_items(evaluation_set, "inception_score")
    rows = []
    width: int | None = None
    for record, sequence in evaluation_set.items:
        for index, frame in enumerate(sequence.frames):
            probs = np.asarray(classifier.class_probs(frame), dtype=np.float64)
            if width is None:
                width = probs.shape[-1]
            elif probs.shape[-1] != width:
                raise BackendError(
                    f"class_probs width changed from {width} to {probs.shape[-1]} "
                    f"at prompt {record.id} frame {index}"
                )
            rows.append(probs)
    try:
        value = is_kernel(np.stack(rows), splits=cfg.inception_splits)
    except ValueError as exc:
        raise BackendError(str(exc)) from exc
    return MetricResult(
        metric_id="inception_score",
        per_video={},
        aggregate=float(value),
        direction=METRIC_DIRECTIONS["inception_score"],
        applicable_count=len(evaluation_set.items),
    )


# ---------------------------------------------------------------------------
# Motion quality


def action_score(evaluation_set: EvaluationSet, classifier) -> MetricResult:
    """Top-1 accuracy of the action classifier against the annotated label."""
    _require_items(evaluation_set, "action_score")
    applicable = [
        (record, sequence)
        for record, sequence in evaluation_set.items
        if record.attributes.action_label is not None
    ]

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        label, _confidence = classifier.classify_action(sequence.frames)
        return 1.0 if label == record.attributes.action_label else 0.0

    return _per_video("action_score", applicable, score_one)


def _video_flow_magnitude(sequence: FrameSequence, flow_estimator) -> float:
    _require_pairs(sequence)
    pair_means = []
    for index in range(len(sequence) - 1):
        flow = validate_flow_field(
            flow_estimator.estimate_flow(sequence.frames[index], sequence.frames[index + 1]),
            sequence.frames.shape[1:3],
        )
        pair_means.append(float(np.mean(np.linalg.norm(flow, axis=-1))))
    return fmean(pair_means)


def flow_score(evaluation_set: EvaluationSet, flow_estimator) -> MetricResult:
    """Mean per-pixel flow magnitude, averaged over consecutive-frame pairs."""
    _require_items(evaluation_set, "flow_score")

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        return _video_flow_magnitude(sequence, flow_estimator)

    return _per_video("flow_score", evaluation_set.items, score_one)


def motion_ac_score(
    evaluation_set: EvaluationSet, flow_estimator, cfg: MetricConfig | None = None
) -> MetricResult:
    """Amplitude-class accuracy: large iff flow magnitude strictly exceeds the threshold."""
    cfg = cfg or MetricConfig()
    _require_items(evaluation_set, "motion_ac_score")
    applicable = [
        (record, sequence)
        for record, sequence in evaluation_set.items
        if record.attributes.amplitude is not None
    ]

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        magnitude = _video_flow_magnitude(sequence, flow_estimator)
        predicted = "large" if magnitude > cfg.flow_threshold else "small"
        return 1.0 if predicted == record.attributes.amplitude else 0.0

    return _per_video("motion_ac_score", applicable, score_one)


# ---------------------------------------------------------------------------
# Temporal consistency


def warp_frame(frame: np.ndarray, flow: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Warp `frame` forward along `flow` by bilinear backward sampling.

    Output pixel p takes the value of frame at p - flow(p); the returned mask
    marks pixels whose source position lies fully inside the frame.
    """
    height, width = frame.shape[:2]
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
    source_x = xs - flow[..., 0]
    source_y = ys - flow[..., 1]
    valid = (source_x >= 0) & (source_x <= width - 1) & (source_y >= 0) & (source_y <= height - 1)
    x0 = np.floor(source_x)
    y0 = np.floor(source_y)
    weight_x = source_x - x0
    weight_y = source_y - y0
    x0c = np.clip(x0, 0, width - 1).astype(int)
    x1c = np.clip(x0 + 1, 0, width - 1).astype(int)
    y0c = np.clip(y0, 0, height - 1).astype(int)
    y1c = np.clip(y0 + 1, 0, height - 1).astype(int)
    image = frame.astype(np.float64)
    warped = (
        image[y0c, x0c] * ((1 - weight_x) * (1 - weight_y))[..., None]
        + image[y0c, x1c] * (weight_x * (1 - weight_y))[..., None]
        + image[y1c, x0c] * ((1 - weight_x) * weight_y)[..., None]
        + image[y1c, x1c] * (weight_x * weight_y)[..., None]
    )
    return warped, valid


def warping_error(evaluation_set: EvaluationSet, flow_estimator) -> MetricResult:
    """Mean squared RGB error (0-255 scale) between flow-warped and real next frames."""
    _require_items(evaluation_set, "warping_error")

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        _require_pairs(sequence)
        pair_errors = []
        for index in range(len(sequence) - 1):
            flow = validate_flow_field(
                flow_estimator.estimate_flow(sequence.frames[index], sequence.frames[index + 1]),
                sequence.frames.shape[1:3],
            )
            warped, valid = warp_frame(sequence.frames[index], flow)
            if not valid.any():
                raise MetricError(f"pair {index}: flow moved every pixel out of bounds")
            target = sequence.frames[index + 1].astype(np.float64)
            squared = np.mean((warped - target) ** 2, axis=-1)
            pair_errors.append(float(squared[valid].mean()))
        return fmean(pair_errors)

    return _per_video("warping_error", evaluation_set.items, score_one)


def clip_temp(evaluation_set: EvaluationSet, embedder) -> MetricResult:
    """Mean cosine between embeddings of consecutive frames."""
    _require_items(evaluation_set, "clip_temp")

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        _require_pairs(sequence)
        embeddings = [embedder.embed_image(frame) for frame in sequence.frames]
        return fmean(embeddings[i].cosine(embeddings[i + 1]) for i in range(len(embeddings) - 1))

    return _per_video("clip_temp", evaluation_set.items, score_one)


def face_consistency(evaluation_set: EvaluationSet, embedder) -> MetricResult:
    """Mean cosine between each later frame's embedding and the first frame's."""
    _require_items(evaluation_set, "face_consistency")

    def score_one(record: PromptRecord, sequence: FrameSequence) -> float:
        _require_pairs(sequence)
        embeddings = [embedder.embed_image(frame) for frame in sequence.frames]
        first = embeddings[0]
        return fmean(later.cosine(first) for later in embeddings[1:])

    return _per_video("face_consistency", evaluation_set.items, score_one)


# ---------------------------------------------------------------------------
# Dispatch table used by the suite runner

METRIC_SLOTS: dict[str, tuple[str, ...]] = {
    "vqa_aesthetic": ("vqa_scorer",),
    "vqa_technical": ("vqa_scorer",),
    "inception_score": ("inception_classifier",),
    "clip_score": ("text_image_embedder",),
    "sd_score": ("text_image_embedder", "reference_image_source"),
    "blip_bleu": ("captioner",),
    "detection_score": ("detector_tracker",),
    "count_score": ("detector_tracker",),
    "color_score": ("detector_tracker",),
    "celebrity_id_score": ("face_analyzer", "reference_image_source"),
    "ocr_score": ("ocr_engine",),
    "action_score": ("action_classifier",),
    "flow_score": ("flow_estimator",),
    "motion_ac_score": ("flow_estimator",),
    "warping_error": ("flow_estimator",),
    "clip_temp": ("text_image_embedder",),
    "face_consistency": ("text_image_embedder",),
}


def compute_metric(
    metric_id: str,
    evaluation_set: EvaluationSet,
    registry: BackendRegistry,
    cfg: MetricConfig | None = None,
) -> MetricResult:
    """Run one metric by id with its required backends from the registry."""
    cfg = cfg or MetricConfig()
    if metric_id not in METRIC_SLOTS:
        raise ConfigurationError(f"unknown metric {metric_id!r}; known: {', '.join(METRIC_IDS)}")
    for slot in METRIC_SLOTS[metric_id]:
        registry.require(slot)
    if metric_id == "vqa_aesthetic":
        return vqa_scores(evaluation_set, registry.vqa_scorer)[0]
    if metric_id == "vqa_technical":
        return vqa_scores(evaluation_set, registry.vqa_scorer)[1]
    if metric_id == "inception_score":
        return inception_score(evaluation_set, registry.inception_classifier, cfg)
    if metric_id == "clip_score":
        return clip_score(evaluation_set, registry.text_image_embedder)
    if metric_id == "sd_score":
        return sd_score(evaluation_set, registry.text_image_embedder, registry.reference_image_source)
    if metric_id == "blip_bleu":
        return blip_bleu(evaluation_set, registry.captioner)
    if metric_id == "detection_score":
        return detection_score(evaluation_set, registry.detector_tracker)
    if metric_id == "count_score":
        return count_score(evaluation_set, registry.detector_tracker)
    if metric_id == "color_score":
        return color_score(evaluation_set, registry.detector_tracker)
    if metric_id == "celebrity_id_score":
        return celebrity_id_score(evaluation_set, registry.face_analyzer, registry.reference_image_source)
    if metric_id == "ocr_score":
        return ocr_score(evaluation_set, registry.ocr_engine)
    if metric_id == "action_score":
        return action_score(evaluation_set, registry.action_classifier)
    if metric_id == "flow_score":
        return flow_score(evaluation_set, registry.flow_estimator)
    if metric_id == "motion_ac_score":
        return motion_ac_score(evaluation_set, registry.flow_estimator, cfg)
    if metric_id == "warping_error":
        return warping_error(evaluation_set, registry.flow_estimator)
    if metric_id == "clip_temp":
        return clip_temp(evaluation_set, registry.text_image_embedder)
    return face_consistency(evaluation_set, registry.text_image_embedder)
