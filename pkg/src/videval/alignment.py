"""Human-rating aggregation, per-aspect linear alignment, and rank validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean

import numpy as np
from scipy import stats

from .errors import ConfigurationError, ParseError, UndefinedCorrelationError, ValidationError
from .metrics import LOWER_BETTER, METRIC_DIRECTIONS
from .suite import SuiteResult

ASPECTS = (
    "visual_quality",
    "tv_alignment",
    "motion_quality",
    "temporal_consistency",
    "subjective_likeness",
)
ALIGNED_ASPECTS = ASPECTS[:4]

# Default two-metric alignment inputs per aspect.
DEFAULT_ASPECT_METRICS: dict[str, tuple[str, ...]] = {
    "visual_quality": ("vqa_aesthetic", "vqa_technical"),
    "tv_alignment": ("sd_score", "clip_score"),
    "motion_quality": ("motion_ac_score", "flow_score"),
    "temporal_consistency": ("clip_temp", "warping_error"),
}

ALIGNMENT_MODEL_VERSION = "1"


@dataclass(frozen=True)
class HumanRating:
    """One rater's five 1-5 aspect scores for one (model, prompt) video."""

    rater_id: str
    model_id: str
    prompt_id: str
    scores: dict[str, int]

    def __post_init__(self) -> None:
        for aspect in ASPECTS:
            if aspect not in self.scores:
                raise ValidationError(f"missing aspect score {aspect!r}", field=aspect)
        for aspect, value in self.scores.items():
            if aspect not in ASPECTS:
                raise ValidationError(f"unknown aspect {aspect!r}", field=aspect)
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                raise ValidationError(
                    f"score for {aspect} must be an integer in [1,5], got {value!r}", field=aspect
                )


@dataclass(frozen=True)
class AspectLabel:
    """Rater-mean score for one (model, prompt, aspect), mapped to [0,1]."""

    model_id: str
    prompt_id: str
    aspect: str
    value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValidationError(f"label value {self.value} outside [0,1]", field="value")


def rating_from_dict(obj: dict) -> HumanRating:
    if not isinstance(obj, dict):
        raise ValidationError("rating record must be a JSON object")
    scores = obj.get("scores")
    if not isinstance(scores, dict):
        raise ValidationError("rating record must carry a scores object", field="scores")
    return HumanRating(
        rater_id=str(obj.get("rater_id", "")),
        model_id=str(obj.get("model_id", "")),
        prompt_id=str(obj.get("prompt_id", "")),
        scores={k: v for k, v in scores.items()},
    )


def load_ratings(path: str | Path) -> list[HumanRating]:
    """Read a line-delimited ratings file, skipping header records."""
    path = Path(path)
    ratings = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=line_no) from exc
            if isinstance(obj, dict) and obj.get("record_type") == "header":
                continue
            try:
                ratings.append(rating_from_dict(obj))
            except ValidationError as exc:
                raise ParseError(f"bad rating: {exc}", path=str(path), line=line_no) from exc
    return ratings


def save_ratings(ratings: list[HumanRating], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for rating in ratings:
            record = {
                "rater_id": rating.rater_id,
                "model_id": rating.model_id,
                "prompt_id": rating.prompt_id,
                "scores": dict(sorted(rating.scores.items())),
            }
            handle.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            handle.write("\n")


def aggregate_ratings(ratings: list[HumanRating]) -> list[AspectLabel]:
    """Mean over raters per (model, prompt, aspect), mapped from [1,5] to [0,1]."""
    if not ratings:
        raise ValidationError("no ratings to aggregate")
    grouped: dict[tuple[str, str], list[HumanRating]] = {}
    for rating in ratings:
        grouped.setdefault((rating.model_id, rating.prompt_id), []).append(rating)
    labels = []
    for (model_id, prompt_id), group in sorted(grouped.items()):
        for aspect in ASPECTS:
            mean_score = fmean(r.scores[aspect] for r in group)
            labels.append(
                AspectLabel(
                    model_id=model_id,
                    prompt_id=prompt_id,
                    aspect=aspect,
                    value=(mean_score - 1.0) / 4.0,
                )
            )
    return labels


@dataclass(frozen=True)
class AspectModel:
    metric_ids: tuple[str, ...]
    coefficients: tuple[float, ...]
    intercept: float

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(self.metric_ids):
            raise ValidationError("coefficient count must match metric count")
        values = (*self.coefficients, self.intercept)
        if not all(np.isfinite(values)):
            raise ValidationError("alignment model has non-finite parameters")


@dataclass(frozen=True)
class AlignmentModel:
    aspects: dict[str, AspectModel]
    fit_metadata: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        return {
            "version": ALIGNMENT_MODEL_VERSION,
            "aspects": {
                aspect: {
                    "metric_ids": list(model.metric_ids),
                    "coefficients": list(model.coefficients),
                    "intercept": model.intercept,
                }
                for aspect, model in sorted(self.aspects.items())
            },
            "fit_metadata": self.fit_metadata,
        }

    @classmethod
    def from_document(cls, document: dict) -> "AlignmentModel":
        if document.get("version") != ALIGNMENT_MODEL_VERSION:
            raise ValidationError(f"unsupported alignment model version {document.get('version')!r}")
        aspects = {
            aspect: AspectModel(
                metric_ids=tuple(entry["metric_ids"]),
                coefficients=tuple(float(c) for c in entry["coefficients"]),
                intercept=float(entry["intercept"]),
            )
            for aspect, entry in document.get("aspects", {}).items()
        }
        return cls(aspects=aspects, fit_metadata=document.get("fit_metadata", {}))


def save_alignment_model(model: AlignmentModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_document(), sort_keys=True, indent=1) + "\n", encoding="utf-8")


def load_alignment_model(path: str | Path) -> AlignmentModel:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path=str(path)) from exc
    return AlignmentModel.from_document(document)


@dataclass(frozen=True)
class FinalScore:
    """Aligned aspect scores for one model plus their mean."""

    model_id: str
    aspect_scores: dict[str, float | None]
    comprehensive: float
    subjective_likeness: float | None = None
    partial: bool = False


def _harmonize(value: float, metric_id: str, input_scale: float) -> float:
    scaled = value * input_scale
    return -scaled if METRIC_DIRECTIONS.get(metric_id) == LOWER_BETTER else scaled


def _metric_row_value(suite: SuiteResult, metric_id: str, prompt_id: str) -> float | None:
    result = suite.results.get(metric_id)
    if result is None:
        return None
    return result.per_video.get(prompt_id)


def _name_collinear(design: np.ndarray, metric_ids: tuple[str, ...]) -> tuple[str, ...]:
    """Best-effort naming of the columns causing rank deficiency."""
    names = []
    for index, metric_id in enumerate(metric_ids):
        if np.std(design[:, index]) == 0:
            names.append(metric_id)
    centered = design - design.mean(axis=0)
    for i in range(len(metric_ids)):
        for j in range(i + 1, len(metric_ids)):
            denom = np.std(centered[:, i]) * np.std(centered[:, j])
            if denom == 0:
                continue
            corr = float(np.mean(centered[:, i] * centered[:, j]) / denom)
            if abs(corr) > 1.0 - 1e-10:
                names.extend(m for m in (metric_ids[i], metric_ids[j]) if m not in names)
    return tuple(names) if names else metric_ids


def fit_alignment(
    labels: list[AspectLabel],
    suite_results: dict[str, SuiteResult],
    seed: int = 0,
    train_size: int = 300,
    holdout_size: int = 200,
    aspect_metrics: dict[str, tuple[str, ...]] | None = None,
    input_scale: float = 1.0,
) -> AlignmentModel:
    """Ordinary least squares per aspect on a seeded train split.

    Metric inputs are multiplied by input_scale (use 0.01 for values stored on
    a 0-100 display scale), lower-is-better metrics are negated, and labeled
    rows missing any required metric value are dropped with a recorded count.
    """
    aspect_metrics = dict(aspect_metrics or DEFAULT_ASPECT_METRICS)
    unknown = sorted(set(aspect_metrics) - set(ALIGNED_ASPECTS))
    if unknown or not aspect_metrics:
        raise ConfigurationError(
            f"aspect_metrics keys must be a non-empty subset of {ALIGNED_ASPECTS}, got {sorted(aspect_metrics)}"
        )
    label_map: dict[tuple[str, str, str], float] = {}
    for label in labels:
        label_map[(label.model_id, label.prompt_id, label.aspect)] = label.value
    row_keys = sorted({(label.model_id, label.prompt_id) for label in labels})

    # One shared split over (model, prompt) rows keeps aspects comparable.
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(row_keys))
    if train_size + holdout_size > len(row_keys):
        raise ValidationError(
            f"need {train_size + holdout_size} labeled rows for split, have {len(row_keys)}"
        )
    train_keys = [row_keys[i] for i in sorted(order[:train_size])]
    holdout_keys = [row_keys[i] for i in sorted(order[train_size : train_size + holdout_size])]

    aspects: dict[str, AspectModel] = {}
    dropped: dict[str, int] = {}
    negated = sorted(
        {
            metric_id
            for ids in aspect_metrics.values()
            for metric_id in ids
            if METRIC_DIRECTIONS.get(metric_id) == LOWER_BETTER
        }
    )
    for aspect in (a for a in ALIGNED_ASPECTS if a in aspect_metrics):
        metric_ids = tuple(aspect_metrics[aspect])
        design_rows = []
        targets = []
        skipped = 0
        for model_id, prompt_id in train_keys:
            target = label_map.get((model_id, prompt_id, aspect))
            suite = suite_results.get(model_id)
            if target is None or suite is None:
                skipped += 1
                continue
            values = [_metric_row_value(suite, metric_id, prompt_id) for metric_id in metric_ids]
            if any(v is None for v in values):
                skipped += 1
                continue
            design_rows.append(
                [_harmonize(v, metric_id, input_scale) for v, metric_id in zip(values, metric_ids)]
            )
            targets.append(target)
        if len(design_rows) <= len(metric_ids):
            raise ValidationError(
                f"aspect {aspect}: only {len(design_rows)} usable train rows for {len(metric_ids)} metrics"
            )
        dropped[aspect] = skipped
        design = np.asarray(design_rows, dtype=np.float64)
        target_vec = np.asarray(targets, dtype=np.float64)
        augmented = np.hstack([design, np.ones((design.shape[0], 1))])
        if np.linalg.matrix_rank(augmented) < augmented.shape[1]:
            culprits = _name_collinear(design, metric_ids)
            raise ValidationError(
                f"aspect {aspect}: design matrix is rank-deficient; collinear metrics: {', '.join(culprits)}"
            )
        solution, _, _, _ = np.linalg.lstsq(augmented, target_vec, rcond=None)
        aspects[aspect] = AspectModel(
            metric_ids=metric_ids,
            coefficients=tuple(float(c) for c in solution[:-1]),
            intercept=float(solution[-1]),
        )
    fit_metadata = {
        "train_size": train_size,
        "holdout_size": holdout_size,
        "seed": seed,
        "input_scale": input_scale,
        "negated_metrics": negated,
        "dropped_rows": dropped,
        "train_keys": [list(k) for k in train_keys],
        "holdout_keys": [list(k) for k in holdout_keys],
    }
    return AlignmentModel(aspects=aspects, fit_metadata=fit_metadata)


def predict_row(model: AlignmentModel, aspect: str, values: dict[str, float]) -> float:
    """Apply one aspect's linear model to harmonized raw metric values."""
    aspect_model = model.aspects[aspect]
    input_scale = float(model.fit_metadata.get("input_scale", 1.0))
    total = aspect_model.intercept
    for metric_id, coefficient in zip(aspect_model.metric_ids, aspect_model.coefficients):
        total += coefficient * _harmonize(values[metric_id], metric_id, input_scale)
    return float(total)


def apply_alignment(
    model: AlignmentModel,
    suite_results: dict[str, SuiteResult],
    labels: list[AspectLabel] | None = None,
) -> dict[str, FinalScore]:
    """Aligned per-aspect scores at per-model aggregate level, plus their mean.

    An aspect whose metrics are missing from a model's results is marked
    unavailable (None) and the comprehensive mean covers available aspects
    only, flagged partial. subjective_likeness passes through from labels.
    """
    subjective: dict[str, list[float]] = {}
    for label in labels or []:
        if label.aspect == "subjective_likeness":
            subjective.setdefault(label.model_id, []).append(label.value)
    out: dict[str, FinalScore] = {}
    for model_id, suite in sorted(suite_results.items()):
        aspect_scores: dict[str, float | None] = {}
        for aspect in ALIGNED_ASPECTS:
            aspect_model = model.aspects.get(aspect)
            if aspect_model is None:
                aspect_scores[aspect] = None
                continue
            aggregates = {}
            missing = False
            for metric_id in aspect_model.metric_ids:
                result = suite.results.get(metric_id)
                if result is None:
                    missing = True
                    break
                aggregates[metric_id] = result.aggregate
            aspect_scores[aspect] = None if missing else predict_row(model, aspect, aggregates)
        available = [v for v in aspect_scores.values() if v is not None]
        if not available:
            raise ValidationError(f"model {model_id}: no aspect could be aligned")
        out[model_id] = FinalScore(
            model_id=model_id,
            aspect_scores=aspect_scores,
            comprehensive=fmean(available),
            subjective_likeness=fmean(subjective[model_id]) if model_id in subjective else None,
            partial=len(available) < len(ALIGNED_ASPECTS),
        )
    return out


def _check_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError(f"correlation inputs must be equal-length vectors, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise ValidationError("correlation needs at least 2 observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelationError("correlation undefined for a constant vector")
    return x, y


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x, y = _check_pair(x, y)
    return float(stats.spearmanr(x, y).statistic)


def kendall(x, y) -> float:
    """Kendall rank correlation, tau-b (tie-corrected)."""
    x, y = _check_pair(x, y)
    return float(stats.kendalltau(x, y, variant="b").statistic)


@dataclass(frozen=True)
class CorrelationReport:
    """Holdout rank correlations per aspect for metrics, average, and fitted model."""

    aspects: dict[str, dict[str, tuple[float | None, float | None]]]
    row_counts: dict[str, int]


def evaluate_alignment(
    model: AlignmentModel,
    labels: list[AspectLabel],
    suite_results: dict[str, SuiteResult],
    holdout_only: bool = True,
) -> CorrelationReport:
    """Correlate each metric, the plain average, and the fitted prediction
    against human labels on the persisted holdout rows."""
    label_map = {(l.model_id, l.prompt_id, l.aspect): l.value for l in labels}
    keys = sorted({(l.model_id, l.prompt_id) for l in labels})
    if holdout_only and model.fit_metadata.get("holdout_keys"):
        holdout = {tuple(k) for k in model.fit_metadata["holdout_keys"]}
        keys = [k for k in keys if k in holdout]
    input_scale = float(model.fit_metadata.get("input_scale", 1.0))
    aspects: dict[str, dict[str, tuple[float | None, float | None]]] = {}
    row_counts: dict[str, int] = {}
    for aspect in ALIGNED_ASPECTS:
        aspect_model = model.aspects.get(aspect)
        if aspect_model is None:
            continue
        metric_ids = aspect_model.metric_ids
        rows = []
        for model_id, prompt_id in keys:
            target = label_map.get((model_id, prompt_id, aspect))
            suite = suite_results.get(model_id)
            if target is None or suite is None:
                continue
            values = [_metric_row_value(suite, metric_id, prompt_id) for metric_id in metric_ids]
            if any(v is None for v in values):
                continue
            harmonized = [
                _harmonize(v, metric_id, input_scale) for v, metric_id in zip(values, metric_ids)
            ]
            prediction = predict_row(model, aspect, dict(zip(metric_ids, values)))
            rows.append((harmonized, target, prediction))
        row_counts[aspect] = len(rows)
        entries: dict[str, tuple[float | None, float | None]] = {}
        if len(rows) >= 2:
            targets = [r[1] for r in rows]
            columns = {
                **{metric_id: [r[0][i] for r in rows] for i, metric_id in enumerate(metric_ids)},
                "average": [fmean(r[0]) for r in rows],
                "fitted": [r[2] for r in rows],
            }
            for name, column in columns.items():
                try:
                    entries[name] = (spearman(column, targets), kendall(column, targets))
                except UndefinedCorrelationError:
                    entries[name] = (None, None)
        aspects[aspect] = entries
    return CorrelationReport(aspects=aspects, row_counts=row_counts)
