"""Leaderboards, per-group breakdowns, and radar-style normalized exports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from statistics import fmean

from .alignment import FinalScore
from .benchmark import Benchmark
from .errors import ConfigurationError, ValidationError
from .metrics import HIGHER_BETTER, LOWER_BETTER, METRIC_DIRECTIONS, PAPER_SCALED_METRICS
from .suite import SuiteResult

LEADERBOARD_NOTES = (
    "celebrity_id_score values are raw face distances; lower is better.",
    "target_match metrics are ranked by value descending and carry no best/second emphasis.",
)


@dataclass(frozen=True)
class LeaderboardRow:
    model_id: str
    metrics: dict[str, float | None]
    ranks: dict[str, int | None]
    aspect_scores: dict[str, float | None] = field(default_factory=dict)
    comprehensive: float | None = None
    subjective_likeness: float | None = None


@dataclass(frozen=True)
class Leaderboard:
    columns: tuple[str, ...]
    rows: tuple[LeaderboardRow, ...]
    emphasis: dict[str, dict[str, str | None]]
    directions: dict[str, str]
    notes: tuple[str, ...] = LEADERBOARD_NOTES
    paper_scale: bool = False


def _rank_models(values: dict[str, float], direction: str) -> list[str]:
    """Model ids best-first for one metric; ties break lexicographically."""
    reverse = direction != LOWER_BETTER
    return sorted(values, key=lambda m: ((-values[m]) if reverse else values[m], m))


def build_leaderboard(
    suite_results: dict[str, SuiteResult],
    final_scores: dict[str, FinalScore] | None = None,
    paper_scale: bool = False,
) -> Leaderboard:
    """Rank models per metric and order rows by comprehensive score.

    Ranks are permutations per metric column (missing values unranked); best
    and second-best emphasis marks cover directional metrics only.
    """
    if not suite_results:
        raise ValidationError("no suite results to report")
    if final_scores is not None and set(final_scores) != set(suite_results):
        only_suites = sorted(set(suite_results) - set(final_scores))
        only_scores = sorted(set(final_scores) - set(suite_results))
        raise ValidationError(
            "model sets differ between suite results and final scores; "
            f"suite-only: {only_suites}; score-only: {only_scores}"
        )
    columns = tuple(sorted({metric_id for suite in suite_results.values() for metric_id in suite.results}))
    per_metric_values: dict[str, dict[str, float]] = {
        metric_id: {
            model_id: suite.results[metric_id].aggregate
            for model_id, suite in suite_results.items()
            if metric_id in suite.results
        }
        for metric_id in columns
    }
    ranks: dict[str, dict[str, int]] = {}
    emphasis: dict[str, dict[str, str | None]] = {}
    for metric_id, values in per_metric_values.items():
        direction = METRIC_DIRECTIONS.get(metric_id, HIGHER_BETTER)
        ordered = _rank_models(values, direction)
        ranks[metric_id] = {model_id: position + 1 for position, model_id in enumerate(ordered)}
        if direction in (HIGHER_BETTER, LOWER_BETTER):
            emphasis[metric_id] = {
                "best": ordered[0],
                "second": ordered[1] if len(ordered) > 1 else None,
            }

    def row_key(model_id: str):
        if final_scores is not None:
            return (-final_scores[model_id].comprehensive, model_id)
        return (0.0, model_id)

    rows = []
    for model_id in sorted(suite_results, key=row_key):
        score = final_scores.get(model_id) if final_scores else None
        rows.append(
            LeaderboardRow(
                model_id=model_id,
                metrics={
                    metric_id: per_metric_values[metric_id].get(model_id) for metric_id in columns
                },
                ranks={metric_id: ranks[metric_id].get(model_id) for metric_id in columns},
                aspect_scores=dict(score.aspect_scores) if score else {},
                comprehensive=score.comprehensive if score else None,
                subjective_likeness=score.subjective_likeness if score else None,
            )
        )
    return Leaderboard(
        columns=columns,
        rows=tuple(rows),
        emphasis=emphasis,
        directions={metric_id: METRIC_DIRECTIONS.get(metric_id, HIGHER_BETTER) for metric_id in columns},
        paper_scale=paper_scale,
    )


@dataclass(frozen=True)
class RadarData:
    """Min-max normalized per-group metric values, lower_better inverted."""

    group_by: str
    metrics: tuple[str, ...]
    raw: dict[str, dict[str, dict[str, float | None]]]
    normalized: dict[str, dict[str, dict[str, float | None]]]
    inverted: tuple[str, ...]
    notes: tuple[str, ...] = (
        "normalization is min-max across models per metric within each group; "
        "a degenerate min=max group normalizes to 1.0",
        "target_match metrics are normalized as higher-is-better",
    )


def _group_prompts(benchmark: Benchmark, group_by: str) -> dict[str, set[str]]:
    groups: dict[str, set[str]] = {}
    for record in benchmark.records:
        if group_by == "all":
            key = "all"
        elif group_by == "meta_class":
            key = record.meta_class
        elif group_by == "sub_type":
            key = record.sub_type
        else:
            raise ConfigurationError(f"group_by must be meta_class, sub_type, or all, got {group_by!r}")
        groups.setdefault(key, set()).add(record.id)
    return groups


def build_breakdown(
    suite_results: dict[str, SuiteResult],
    benchmark: Benchmark,
    group_by: str = "meta_class",
) -> RadarData:
    """Per-group mean of per-video values, then min-max normalized across models.

    Model-level metrics without per-video values (diversity) are excluded
    because they cannot be restricted to a prompt group.
    """
    if not suite_results:
        raise ValidationError("no suite results to report")
    groups = _group_prompts(benchmark, group_by)
    metrics = tuple(
        sorted(
            {
                metric_id
                for suite in suite_results.values()
                for metric_id, result in suite.results.items()
                if result.per_video
            }
        )
    )
    raw: dict[str, dict[str, dict[str, float | None]]] = {}
    for group_name, prompt_ids in sorted(groups.items()):
        raw[group_name] = {}
        for model_id, suite in sorted(suite_results.items()):
            row: dict[str, float | None] = {}
            for metric_id in metrics:
                result = suite.results.get(metric_id)
                if result is None:
                    row[metric_id] = None
                    continue
                values = [v for pid, v in result.per_video.items() if pid in prompt_ids]
                row[metric_id] = fmean(values) if values else None
            raw[group_name][model_id] = row

    normalized: dict[str, dict[str, dict[str, float | None]]] = {}
    for group_name, per_model in raw.items():
        normalized[group_name] = {model_id: {} for model_id in per_model}
        for metric_id in metrics:
            available = {m: row[metric_id] for m, row in per_model.items() if row[metric_id] is not None}
            for model_id in per_model:
                value = per_model[model_id][metric_id]
                if value is None:
                    normalized[group_name][model_id][metric_id] = None
                    continue
                low = min(available.values())
                high = max(available.values())
                if high == low:
                    scaled = 1.0
                elif METRIC_DIRECTIONS.get(metric_id) == LOWER_BETTER:
                    scaled = (high - value) / (high - low)
                else:
                    scaled = (value - low) / (high - low)
                normalized[group_name][model_id][metric_id] = scaled
    inverted = tuple(m for m in metrics if METRIC_DIRECTIONS.get(m) == LOWER_BETTER)
    return RadarData(group_by=group_by, metrics=metrics, raw=raw, normalized=normalized, inverted=inverted)


def _display_value(metric_id: str, value: float | None, paper_scale: bool) -> float | None:
    if value is None:
        return None
    if paper_scale and metric_id in PAPER_SCALED_METRICS:
        return value * 100.0
    return value


def _format_cell(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def leaderboard_to_json(board: Leaderboard) -> str:
    document = {
        "kind": "leaderboard",
        "paper_scale": board.paper_scale,
        "columns": list(board.columns),
        "directions": board.directions,
        "emphasis": board.emphasis,
        "notes": list(board.notes),
        "rows": [
            {
                "model_id": row.model_id,
                "metrics": row.metrics,
                "ranks": row.ranks,
                "aspect_scores": row.aspect_scores,
                "comprehensive": row.comprehensive,
                "subjective_likeness": row.subjective_likeness,
            }
            for row in board.rows
        ],
    }
    return json.dumps(document, sort_keys=True, indent=1) + "\n"


def leaderboard_from_json(text: str) -> Leaderboard:
    document = json.loads(text)
    if document.get("kind") != "leaderboard":
        raise ValidationError("document is not a leaderboard export")
    rows = tuple(
        LeaderboardRow(
            model_id=entry["model_id"],
            metrics=entry["metrics"],
            ranks=entry["ranks"],
            aspect_scores=entry.get("aspect_scores", {}),
            comprehensive=entry.get("comprehensive"),
            subjective_likeness=entry.get("subjective_likeness"),
        )
        for entry in document["rows"]
    )
    return Leaderboard(
        columns=tuple(document["columns"]),
        rows=rows,
        emphasis=document["emphasis"],
        directions=document["directions"],
        notes=tuple(document["notes"]),
        paper_scale=document["paper_scale"],
    )


def _leaderboard_cells(board: Leaderboard, row: LeaderboardRow, markdown: bool) -> list[str]:
    cells = [row.model_id, _format_cell(row.comprehensive)]
    for metric_id in board.columns:
        text = _format_cell(_display_value(metric_id, row.metrics.get(metric_id), board.paper_scale))
        marks = board.emphasis.get(metric_id, {})
        if markdown and text:
            if marks.get("best") == row.model_id:
                text = f"**{text}**"
            elif marks.get("second") == row.model_id:
                text = f"*{text}*"
        cells.append(text)
    return cells


def leaderboard_to_markdown(board: Leaderboard) -> str:
    arrows = {HIGHER_BETTER: "(higher)", LOWER_BETTER: "(lower)", "target_match": "(target)"}
    header = ["model", "comprehensive"] + [
        f"{metric_id} {arrows[board.directions[metric_id]]}" for metric_id in board.columns
    ]
    lines = ["| " + " | ".join(header) + " |", "| " + " | ".join("---" for _ in header) + " |"]
    for row in board.rows:
        lines.append("| " + " | ".join(_leaderboard_cells(board, row, markdown=True)) + " |")
    for note in board.notes:
        lines.append("")
        lines.append(f"_{note}_")
    return "\n".join(lines) + "\n"


def leaderboard_to_csv(board: Leaderboard) -> str:
    header = ["model", "comprehensive"] + list(board.columns)
    lines = [",".join(header)]
    for row in board.rows:
        lines.append(",".join(_leaderboard_cells(board, row, markdown=False)))
    return "\n".join(lines) + "\n"


def radar_to_json(radar: RadarData) -> str:
    document = {
        "kind": "radar",
        "group_by": radar.group_by,
        "metrics": list(radar.metrics),
        "raw": radar.raw,
        "normalized": radar.normalized,
        "inverted": list(radar.inverted),
        "notes": list(radar.notes),
    }
    return json.dumps(document, sort_keys=True, indent=1) + "\n"


def radar_from_json(text: str) -> RadarData:
    document = json.loads(text)
    if document.get("kind") != "radar":
        raise ValidationError("document is not a radar export")
    return RadarData(
        group_by=document["group_by"],
        metrics=tuple(document["metrics"]),
        raw=document["raw"],
        normalized=document["normalized"],
        inverted=tuple(document["inverted"]),
        notes=tuple(document["notes"]),
    )


def radar_to_csv(radar: RadarData) -> str:
    lines = ["group,model," + ",".join(radar.metrics)]
    for group_name in sorted(radar.normalized):
        for model_id in sorted(radar.normalized[group_name]):
            row = radar.normalized[group_name][model_id]
            cells = [_format_cell(row.get(metric_id)) for metric_id in radar.metrics]
            lines.append(f"{group_name},{model_id}," + ",".join(cells))
    return "\n".join(lines) + "\n"


def radar_to_markdown(radar: RadarData) -> str:
    lines = []
    for group_name in sorted(radar.normalized):
        lines.append(f"### {group_name}")
        header = ["model"] + list(radar.metrics)
        lines.append("| " + " | ".join(header) + " |")
        lines.append("| " + " | ".join("---" for _ in header) + " |")
        for model_id in sorted(radar.normalized[group_name]):
            row = radar.normalized[group_name][model_id]
            cells = [model_id] + [_format_cell(row.get(metric_id)) for metric_id in radar.metrics]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    for note in radar.notes:
        lines.append(f"_{note}_")
    return "\n".join(lines) + "\n"


def export_report(report: Leaderboard | RadarData, fmt: str) -> str:
    """Render a leaderboard or radar breakdown as md, csv, or json text."""
    if fmt not in ("md", "csv", "json"):
        raise ConfigurationError(f"unknown format {fmt!r}; expected md, csv, or json")
    if isinstance(report, Leaderboard):
        return {"md": leaderboard_to_markdown, "csv": leaderboard_to_csv, "json": leaderboard_to_json}[fmt](report)
    return {"md": radar_to_markdown, "csv": radar_to_csv, "json": radar_to_json}[fmt](report)
