"""Run all metrics over one model and serialize results deterministically."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .backends.core import BackendRegistry
from .errors import ConfigurationError, MetricError, ParseError
from .media import EvaluationSet
from .metrics import (
    METRIC_DIRECTIONS,
    METRIC_IDS,
    METRIC_SLOTS,
    MetricConfig,
    MetricResult,
    compute_metric,
    vqa_scores,
)


@dataclass(frozen=True)
class SuiteResult:
    """All metric results for one model plus run metadata."""

    model_id: str
    results: dict[str, MetricResult]
    skips: tuple[tuple[str, str], ...] = ()
    metadata: dict = field(default_factory=dict)

    def item_errors(self) -> tuple[tuple[str, str, str], ...]:
        out = []
        for metric_id in sorted(self.results):
            for prompt_id, message in self.results[metric_id].item_errors:
                out.append((metric_id, prompt_id, message))
        return tuple(out)


def run_suite(
    evaluation_set: EvaluationSet,
    registry: BackendRegistry,
    cfg: MetricConfig | None = None,
    metric_ids: tuple[str, ...] | None = None,
) -> SuiteResult:
    """Compute metrics over one evaluation set.

    With the default metric list, metrics whose backend slots are unbound are
    skipped with an explicit skip record. An explicit metric_ids list instead
    fails fast, before any video is processed, if any required slot is
    unbound. Metrics with no applicable prompts also become skip records.
    """
    cfg = cfg or MetricConfig()
    explicit = metric_ids is not None
    selected = tuple(metric_ids) if explicit else METRIC_IDS
    for metric_id in selected:
        if metric_id not in METRIC_SLOTS:
            raise ConfigurationError(f"unknown metric {metric_id!r}; known: {', '.join(METRIC_IDS)}")
    if explicit:
        for metric_id in selected:
            for slot in METRIC_SLOTS[metric_id]:
                registry.require(slot)

    results: dict[str, MetricResult] = {}
    skips: list[tuple[str, str]] = []
    for metric_id in selected:
        unbound = [slot for slot in METRIC_SLOTS[metric_id] if not registry.is_bound(slot)]
        if unbound:
            skips.append((metric_id, f"unbound backend slot(s): {', '.join(unbound)}"))
            continue
        if metric_id in results:
            continue
        try:
            if metric_id in ("vqa_aesthetic", "vqa_technical") and not explicit:
                aesthetic, technical = vqa_scores(evaluation_set, registry.vqa_scorer)
                results["vqa_aesthetic"] = aesthetic
                results["vqa_technical"] = technical
            else:
                results[metric_id] = compute_metric(metric_id, evaluation_set, registry, cfg)
        except MetricError as exc:
            reason = str(exc)
            if exc.item_errors:
                reason += "; item errors: " + "; ".join(f"{pid}: {msg}" for pid, msg in exc.item_errors)
            skips.append((metric_id, reason))

    metadata = {
        "model_id": evaluation_set.model_id,
        "item_count": len(evaluation_set.items),
        "missing_prompts": sorted(evaluation_set.missing),
        "ingest_errors": [list(pair) for pair in sorted(evaluation_set.item_errors)],
        "deterministic_backends": registry.all_deterministic(),
        "config": {
            "flow_threshold": cfg.flow_threshold,
            "paper_scale": cfg.paper_scale,
            "inception_splits": cfg.inception_splits,
        },
    }
    return SuiteResult(
        model_id=evaluation_set.model_id,
        results=results,
        skips=tuple(sorted(skips)),
        metadata=metadata,
    )


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def serialize_suite_result(suite: SuiteResult) -> str:
    """Line-delimited records in a fixed order, byte-deterministic on rerun."""
    lines = [_dump({"record_type": "meta", "model_id": suite.model_id, "metadata": suite.metadata})]
    for metric_id in sorted(suite.results):
        result = suite.results[metric_id]
        lines.append(
            _dump(
                {
                    "record_type": "aggregate",
                    "metric_id": metric_id,
                    "value": result.aggregate,
                    "direction": result.direction,
                    "applicable_count": result.applicable_count,
                }
            )
        )
    for metric_id in sorted(suite.results):
        for prompt_id in sorted(suite.results[metric_id].per_video):
            lines.append(
                _dump(
                    {
                        "record_type": "value",
                        "metric_id": metric_id,
                        "prompt_id": prompt_id,
                        "value": suite.results[metric_id].per_video[prompt_id],
                    }
                )
            )
    for metric_id, reason in suite.skips:
        lines.append(_dump({"record_type": "skip", "metric_id": metric_id, "reason": reason}))
    for metric_id, prompt_id, message in suite.item_errors():
        lines.append(
            _dump(
                {
                    "record_type": "item_error",
                    "metric_id": metric_id,
                    "prompt_id": prompt_id,
                    "message": message,
                }
            )
        )
    return "\n".join(lines) + "\n"


def save_suite_result(suite: SuiteResult, path: str | Path) -> None:
    Path(path).write_text(serialize_suite_result(suite), encoding="utf-8")


def load_suite_result(path: str | Path) -> SuiteResult:
    """Rebuild a SuiteResult from its line-delimited file."""
    path = Path(path)
    model_id = ""
    metadata: dict = {}
    aggregates: dict[str, dict] = {}
    per_video: dict[str, dict[str, float]] = {}
    skips: list[tuple[str, str]] = []
    item_errors: dict[str, list[tuple[str, str]]] = {}
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=line_no) from exc
            kind = obj.get("record_type")
            if kind == "meta":
                model_id = obj.get("model_id", "")
                metadata = obj.get("metadata", {})
            elif kind == "aggregate":
                aggregates[obj["metric_id"]] = obj
            elif kind == "value":
                per_video.setdefault(obj["metric_id"], {})[obj["prompt_id"]] = float(obj["value"])
            elif kind == "skip":
                skips.append((obj["metric_id"], obj["reason"]))
            elif kind == "item_error":
                item_errors.setdefault(obj["metric_id"], []).append((obj["prompt_id"], obj["message"]))
            else:
                raise ParseError(f"unknown record_type {kind!r}", path=str(path), line=line_no)
    results = {}
    for metric_id, obj in aggregates.items():
        results[metric_id] = MetricResult(
            metric_id=metric_id,
            per_video=per_video.get(metric_id, {}),
            aggregate=float(obj["value"]),
            direction=obj.get("direction", METRIC_DIRECTIONS.get(metric_id, "higher_better")),
            applicable_count=int(obj["applicable_count"]),
            item_errors=tuple(item_errors.get(metric_id, ())),
        )
    return SuiteResult(model_id=model_id, results=results, skips=tuple(skips), metadata=metadata)
