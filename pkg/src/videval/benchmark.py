"""Prompt benchmark: schema, validation, JSONL persistence, corpus statistics."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import ParseError, ValidationError

META_CLASSES = ("human", "animal", "object", "landscape")
SUB_TYPES = ("general", "style", "camera_motion")
AMPLITUDES = ("large", "small")

# Closed 11-term basic color vocabulary used for color-accuracy ground truth.
COLOR_PALETTE = (
    "black", "blue", "brown", "gray", "green", "orange",
    "pink", "purple", "red", "white", "yellow",
)

BENCHMARK_SCHEMA_VERSION = "1"


def _data_text(name: str) -> list[str]:
    text = resources.files("videval.data").joinpath(name).read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]


def default_action_vocabulary() -> tuple[str, ...]:
    """Action labels the shipped benchmark and mock classifier agree on."""
    return tuple(_data_text("action_labels.txt"))


def default_object_vocabulary() -> tuple[str, ...]:
    """Detector object vocabulary (COCO-style everyday classes)."""
    return tuple(_data_text("object_classes.txt"))


def builtin_benchmark_path() -> Path:
    """Filesystem path of the shipped 500-prompt benchmark."""
    return Path(str(resources.files("videval.data").joinpath("benchmark_v1.jsonl")))


@dataclass(frozen=True)
class ObjectSpec:
    """One annotated object: name plus optional ground-truth count and color."""

    name: str
    count: int | None = None
    color: str | None = None


@dataclass(frozen=True)
class AttributeSet:
    """Ground-truth attributes attached to a prompt for content metrics."""

    objects: tuple[ObjectSpec, ...] = ()
    celebrity: str | None = None
    action_label: str | None = None
    render_text: str | None = None
    amplitude: str | None = None


@dataclass(frozen=True)
class PromptRecord:
    """A single benchmark prompt plus its attribute metadata."""

    id: str
    text: str
    meta_class: str
    sub_type: str
    attributes: AttributeSet = field(default_factory=AttributeSet)
    style_tag: str | None = None
    camera_tag: str | None = None


@dataclass(frozen=True)
class Benchmark:
    records: tuple[PromptRecord, ...]
    version: str = BENCHMARK_SCHEMA_VERSION


@dataclass(frozen=True)
class StatsReport:
    total: int
    mean_words: float
    word_histogram: dict[int, int]
    meta_class_counts: dict[str, int]
    sub_type_counts: dict[str, int]
    attribute_counts: dict[str, int]


def validate_record(
    record: PromptRecord,
    *,
    action_vocabulary: Iterable[str] | None = None,
    color_palette: Iterable[str] = COLOR_PALETTE,
) -> None:
    """Raise ValidationError naming the offending field if `record` is invalid."""
    rid = record.id
    if not record.id or not isinstance(record.id, str):
        raise ValidationError("prompt id must be a non-empty string", record_id=rid, field="id")
    if not record.text or not record.text.strip():
        raise ValidationError("prompt text must be non-empty", record_id=rid, field="text")
    if record.meta_class not in META_CLASSES:
        raise ValidationError(
            f"meta_class {record.meta_class!r} not in {META_CLASSES}", record_id=rid, field="meta_class"
        )
    if record.sub_type not in SUB_TYPES:
        raise ValidationError(
            f"sub_type {record.sub_type!r} not in {SUB_TYPES}", record_id=rid, field="sub_type"
        )
    if (record.sub_type == "style") != (record.style_tag is not None):
        raise ValidationError(
            "style_tag must be present exactly when sub_type is 'style'", record_id=rid, field="style_tag"
        )
    if (record.sub_type == "camera_motion") != (record.camera_tag is not None):
        raise ValidationError(
            "camera_tag must be present exactly when sub_type is 'camera_motion'",
            record_id=rid,
            field="camera_tag",
        )
    attrs = record.attributes
    palette = set(color_palette)
    for obj in attrs.objects:
        if not obj.name:
            raise ValidationError("object name must be non-empty", record_id=rid, field="objects")
        if obj.count is not None and (not isinstance(obj.count, int) or obj.count < 1):
            raise ValidationError(
                f"object count must be a positive integer, got {obj.count!r}", record_id=rid, field="objects"
            )
        if obj.color is not None and obj.color not in palette:
            raise ValidationError(
                f"color {obj.color!r} not in configured palette", record_id=rid, field="objects"
            )
    if attrs.render_text is not None and not attrs.render_text.strip():
        raise ValidationError("render_text must be non-empty when present", record_id=rid, field="render_text")
    if attrs.amplitude is not None and attrs.amplitude not in AMPLITUDES:
        raise ValidationError(
            f"amplitude {attrs.amplitude!r} not in {AMPLITUDES}", record_id=rid, field="amplitude"
        )
    if attrs.action_label is not None:
        vocab = tuple(action_vocabulary) if action_vocabulary is not None else default_action_vocabulary()
        if attrs.action_label not in vocab:
            raise ValidationError(
                f"action_label {attrs.action_label!r} not in configured vocabulary",
                record_id=rid,
                field="action_label",
            )


def validate_benchmark(benchmark: Benchmark, *, action_vocabulary: Iterable[str] | None = None) -> None:
    if not benchmark.records:
        raise ValidationError("benchmark must contain at least one record")
    vocab = tuple(action_vocabulary) if action_vocabulary is not None else default_action_vocabulary()
    seen: set[str] = set()
    for record in benchmark.records:
        if record.id in seen:
            raise ValidationError("duplicate prompt id", record_id=record.id, field="id")
        seen.add(record.id)
        validate_record(record, action_vocabulary=vocab)


def record_from_dict(obj: dict, *, record_id_hint: str | None = None) -> PromptRecord:
    if not isinstance(obj, dict):
        raise ValidationError("record must be a JSON object", record_id=record_id_hint)
    attrs_obj = obj.get("attributes") or {}
    objects = tuple(
        ObjectSpec(name=o.get("name", ""), count=o.get("count"), color=o.get("color"))
        for o in attrs_obj.get("objects", ())
    )
    attributes = AttributeSet(
        objects=objects,
        celebrity=attrs_obj.get("celebrity"),
        action_label=attrs_obj.get("action_label"),
        render_text=attrs_obj.get("render_text"),
        amplitude=attrs_obj.get("amplitude"),
    )
    return PromptRecord(
        id=obj.get("id", ""),
        text=obj.get("text", ""),
        meta_class=obj.get("meta_class", ""),
        sub_type=obj.get("sub_type", ""),
        attributes=attributes,
        style_tag=obj.get("style_tag"),
        camera_tag=obj.get("camera_tag"),
    )


def record_to_dict(record: PromptRecord) -> dict:
    obj = asdict(record)
    attrs = obj["attributes"]
    attrs["objects"] = [
        {k: v for k, v in o.items() if v is not None} for o in attrs["objects"]
    ]
    obj["attributes"] = {k: v for k, v in attrs.items() if v not in (None, [])}
    return {k: v for k, v in obj.items() if v is not None}


def load_benchmark(path: str | Path, *, action_vocabulary: Iterable[str] | None = None) -> Benchmark:
    """Load and fully validate a line-delimited benchmark file."""
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=line_no) from exc
            records.append(record_from_dict(obj, record_id_hint=f"line {line_no}"))
    benchmark = Benchmark(records=tuple(records))
    validate_benchmark(benchmark, action_vocabulary=action_vocabulary)
    return benchmark


def save_benchmark(benchmark: Benchmark, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for record in benchmark.records:
            handle.write(json.dumps(record_to_dict(record), sort_keys=True, separators=(",", ":")))
            handle.write("\n")


def word_count(text: str) -> int:
    return len(text.split())


def benchmark_stats(benchmark: Benchmark) -> StatsReport:
    """Word-count histogram, mean prompt length, and partition counts."""
    lengths = [word_count(r.text) for r in benchmark.records]
    attribute_counts = Counter()
    for record in benchmark.records:
        attrs = record.attributes
        if attrs.objects:
            attribute_counts["objects"] += 1
        if any(o.count is not None for o in attrs.objects):
            attribute_counts["object_counts"] += 1
        if any(o.color is not None for o in attrs.objects):
            attribute_counts["object_colors"] += 1
        if attrs.celebrity is not None:
            attribute_counts["celebrity"] += 1
        if attrs.action_label is not None:
            attribute_counts["action_label"] += 1
        if attrs.render_text is not None:
            attribute_counts["render_text"] += 1
        if attrs.amplitude is not None:
            attribute_counts["amplitude"] += 1
    return StatsReport(
        total=len(benchmark.records),
        mean_words=float(sum(lengths)) / len(lengths),
        word_histogram=dict(sorted(Counter(lengths).items())),
        meta_class_counts=dict(sorted(Counter(r.meta_class for r in benchmark.records).items())),
        sub_type_counts=dict(sorted(Counter(r.sub_type for r in benchmark.records).items())),
        attribute_counts=dict(sorted(attribute_counts.items())),
    )
