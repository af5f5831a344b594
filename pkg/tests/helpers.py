"""Builders and programmable stub backends shared across the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import cv2
import numpy as np

from videval.backends.core import SLOT_NAMES, BackendRegistry, Embedding
from videval.backends.mocks import mock_registry
from videval.benchmark import AttributeSet, Benchmark, ObjectSpec, PromptRecord, save_benchmark
from videval.errors import BackendError
from videval.media import EvaluationSet, FrameSequence, save_frame_bundle
from videval.metrics import METRIC_DIRECTIONS
from videval.suite import SuiteResult
from videval.metrics import MetricResult
from videval.synthetic import frame_with_payload, read_payload

TABLE_SPACE = "table"
FIXTURE_CELEBRITY = "famous_person_a"
FIXTURE_MODEL_ID = "gen-alpha"


# ---------------------------------------------------------------------------
# Record / video / set builders


def make_record(
    record_id: str = "animal-0001",
    text: str = "a red dog runs in a park",
    meta_class: str = "animal",
    sub_type: str = "general",
    objects: tuple = (),
    celebrity: str | None = None,
    action_label: str | None = None,
    render_text: str | None = None,
    amplitude: str | None = None,
    style_tag: str | None = None,
    camera_tag: str | None = None,
) -> PromptRecord:
    specs = tuple(ObjectSpec(**o) if isinstance(o, dict) else o for o in objects)
    return PromptRecord(
        id=record_id,
        text=text,
        meta_class=meta_class,
        sub_type=sub_type,
        attributes=AttributeSet(
            objects=specs,
            celebrity=celebrity,
            action_label=action_label,
            render_text=render_text,
            amplitude=amplitude,
        ),
        style_tag=style_tag,
        camera_tag=camera_tag,
    )


def sequence_from_frames(
    frames, prompt_id: str = "animal-0001", model_id: str = "model-a", fps: float = 8.0
) -> FrameSequence:
    return FrameSequence(
        frames=np.asarray(frames),
        fps=fps,
        source_path="<memory>",
        prompt_id=prompt_id,
        model_id=model_id,
    )


def payload_video(
    payloads,
    prompt_id: str = "animal-0001",
    model_id: str = "model-a",
    fps: float = 8.0,
    size: tuple[int, int] = (48, 64),
) -> FrameSequence:
    frames = np.stack([frame_with_payload(p, size=size) for p in payloads])
    return sequence_from_frames(frames, prompt_id, model_id, fps)


def constant_video(
    n: int = 3,
    value: int = 57,
    prompt_id: str = "animal-0001",
    model_id: str = "model-a",
    size: tuple[int, int] = (32, 40),
) -> FrameSequence:
    frame = np.full((size[0], size[1], 3), value, dtype=np.uint8)
    return sequence_from_frames(np.stack([frame] * n), prompt_id, model_id)


def single_item_set(record: PromptRecord, sequence: FrameSequence, model_id: str = "model-a") -> EvaluationSet:
    return EvaluationSet(model_id=model_id, items=((record, sequence),))


def evaluation_set(items, model_id: str = "model-a") -> EvaluationSet:
    return EvaluationSet(model_id=model_id, items=tuple(items))


def registry_with(prompt_refs=None, celeb_refs=None, **slots) -> BackendRegistry:
    """Full mock registry with individual slots swapped for stubs."""
    registry = mock_registry(prompt_refs=prompt_refs, celeb_refs=celeb_refs)
    for slot, backend in slots.items():
        if slot not in SLOT_NAMES:
            raise ValueError(f"unknown registry slot {slot!r}")
        setattr(registry, slot, backend)
    return registry


# ---------------------------------------------------------------------------
# Programmable stub backends with hand-chosen outputs


class TableEmbedder:
    """Embeds texts by exact value and frames by payload tag, from one table.

    Integer-component vectors keep the resulting cosines exactly computable
    by hand (e.g. [1,0] vs [3,4] -> 3/5 == 0.6 in floats).
    """

    deterministic = True

    def __init__(self, table: dict[str, list[float]]):
        self.table = {key: np.asarray(vec, dtype=np.float64) for key, vec in table.items()}

    def _vector(self, key: str) -> Embedding:
        if key not in self.table:
            raise BackendError(f"no table vector for {key!r}")
        return Embedding(vector=self.table[key], space_id=TABLE_SPACE)

    def embed_text(self, text: str) -> Embedding:
        return self._vector(text)

    def embed_image(self, frame: np.ndarray) -> Embedding:
        payload = read_payload(frame)
        if payload is None or "tag" not in payload:
            raise BackendError("frame carries no tag payload")
        return self._vector(str(payload["tag"]))


class ScriptedCaptioner:
    """Returns a fixed caption list regardless of input frames."""

    deterministic = True

    def __init__(self, captions):
        self._captions = tuple(captions)

    def captions(self, frames, n: int) -> tuple[str, ...]:
        if len(self._captions) < n:
            raise BackendError(f"scripted captioner holds {len(self._captions)} captions, asked for {n}")
        return self._captions[:n]


class TableFaceAnalyzer:
    """face_distance looked up by (frame 'face' tag, reference 'face' tag)."""

    deterministic = True

    def __init__(self, distances: dict[tuple[str, str], float]):
        self.distances = dict(distances)

    def face_distance(self, frame: np.ndarray, reference_image: np.ndarray) -> float | None:
        payload = read_payload(frame)
        if payload is None or "face" not in payload:
            return None
        reference = read_payload(reference_image)
        if reference is None or "face" not in reference:
            raise BackendError("reference image carries no face tag")
        key = (str(payload["face"]), str(reference["face"]))
        if key not in self.distances:
            raise BackendError(f"no scripted distance for pair {key}")
        return float(self.distances[key])


# ---------------------------------------------------------------------------
# Frozen display-scale aggregates for five anonymized systems, used by the
# leaderboard replay tests. Values are stored exactly as published reports
# print them (0-100 scale).

LEADERBOARD_FIXTURE: dict[str, dict[str, float]] = {
    "m1": {
        "vqa_aesthetic": 97.72, "vqa_technical": 6.09, "inception_score": 15.99,
        "clip_score": 20.62, "blip_bleu": 22.42, "sd_score": 68.50,
        "detection_score": 49.59, "color_score": 40.10, "count_score": 47.67,
        "ocr_score": 83.74, "celebrity_id_score": 45.66, "action_score": 73.75,
        "motion_ac_score": 26.67, "flow_score": 2.28, "clip_temp": 99.72,
        "warping_error": 73.04, "face_consistency": 98.89,
    },
    "m2": {
        "vqa_aesthetic": 95.95, "vqa_technical": 6.50, "inception_score": 13.35,
        "clip_score": 20.20, "blip_bleu": 21.20, "sd_score": 67.79,
        "detection_score": 45.80, "color_score": 46.35, "count_score": 47.88,
        "ocr_score": 82.58, "celebrity_id_score": 45.96, "action_score": 71.74,
        "motion_ac_score": 53.33, "flow_score": 1.66, "clip_temp": 99.84,
        "warping_error": 80.32, "face_consistency": 99.33,
    },
    "m3": {
        "vqa_aesthetic": 98.11, "vqa_technical": 7.60, "inception_score": 15.10,
        "clip_score": 21.15, "blip_bleu": 23.67, "sd_score": 69.04,
        "detection_score": 55.00, "color_score": 35.07, "count_score": 57.63,
        "ocr_score": 81.09, "celebrity_id_score": 45.24, "action_score": 74.48,
        "motion_ac_score": 60.00, "flow_score": 2.23, "clip_temp": 99.58,
        "warping_error": 69.77, "face_consistency": 99.05,
    },
    "m4": {
        "vqa_aesthetic": 99.32, "vqa_technical": 8.69, "inception_score": 13.66,
        "clip_score": 20.72, "blip_bleu": 21.89, "sd_score": 69.14,
        "detection_score": 50.49, "color_score": 36.57, "count_score": 56.46,
        "ocr_score": 81.33, "celebrity_id_score": 43.43, "action_score": 69.84,
        "motion_ac_score": 40.00, "flow_score": 0.11, "clip_temp": 99.97,
        "warping_error": 66.88, "face_consistency": 99.64,
    },
    "m5": {
        "vqa_aesthetic": 99.04, "vqa_technical": 10.13, "inception_score": 12.57,
        "clip_score": 20.90, "blip_bleu": 22.33, "sd_score": 69.31,
        "detection_score": 52.44, "color_score": 32.29, "count_score": 57.19,
        "ocr_score": 92.94, "celebrity_id_score": 44.58, "action_score": 54.99,
        "motion_ac_score": 40.00, "flow_score": 0.18, "clip_temp": 99.92,
        "warping_error": 58.19, "face_consistency": 99.06,
    },
}


def fixture_suite_results() -> dict[str, SuiteResult]:
    """LEADERBOARD_FIXTURE values wrapped as stored model-level SuiteResults."""
    suites = {}
    for model_id, values in LEADERBOARD_FIXTURE.items():
        results = {
            metric_id: MetricResult(
                metric_id=metric_id,
                per_video={},
                aggregate=value,
                direction=METRIC_DIRECTIONS[metric_id],
                applicable_count=0,
            )
            for metric_id, value in values.items()
        }
        suites[model_id] = SuiteResult(model_id=model_id, results=results)
    return suites


# ---------------------------------------------------------------------------
# 12-prompt end-to-end fixture: 3 prompts per meta-class covering every
# sub-type and every attribute kind, plus tagged videos and reference images.


def fixture_records() -> tuple[PromptRecord, ...]:
    rec = make_record
    return (
        rec("human-0001", "a man running across a bridge at sunrise", "human", "general",
            action_label="running", amplitude="large"),
        rec("human-0002", "a famous person smiling at a gala dinner", "human", "general",
            celebrity=FIXTURE_CELEBRITY),
        rec("human-0003", "a portrait of a dancer in oil painting style", "human", "style",
            style_tag="oil painting"),
        rec("animal-0001", "two brown dogs playing in a garden", "animal", "general",
            objects=({"name": "dog", "count": 2, "color": "brown"},)),
        rec("animal-0002", "three cats sitting on a sofa", "animal", "general",
            objects=({"name": "cat", "count": 3},)),
        rec("animal-0003", "a horse in a field, camera zooms in slowly", "animal", "camera_motion",
            camera_tag="zoom in", amplitude="small"),
        rec("object-0001", "a neon sign that reads OPEN above a diner door", "object", "general",
            render_text="OPEN"),
        rec("object-0002", "a red car parked beside a blue bicycle", "object", "general",
            objects=({"name": "car", "color": "red"}, {"name": "bicycle", "color": "blue"})),
        rec("object-0003", "a teapot on a wooden table in watercolor style", "object", "style",
            style_tag="watercolor"),
        rec("landscape-0001", "waves gently lapping a quiet shore at dusk", "landscape", "general",
            amplitude="small"),
        rec("landscape-0002", "a misty mountain valley at dawn", "landscape", "general"),
        rec("landscape-0003", "a desert canyon, camera panning left", "landscape", "camera_motion",
            camera_tag="pan left"),
    )


def fixture_frames(record: PromptRecord, index: int) -> np.ndarray:
    """Four tagged frames per prompt; amplitude steers the embedded flow step."""
    amplitude = record.attributes.amplitude
    step = 4.0 if amplitude == "large" else 0.5 if amplitude == "small" else 1.0
    frames = []
    for t in range(4):
        payload: dict = {
            "tag": record.text,
            "jitter": 0.25 * (index % 3),
            "offset": [step * t, 0.0],
            "class_id": (index * 4 + t) % 12,
            "class_count": 16,
            "vqa_aesthetic": 0.4 + index / 40.0,
            "vqa_technical": 0.3 + index / 40.0,
            "caption": record.text,
        }
        if record.attributes.objects:
            entries = []
            for spec in record.attributes.objects:
                count = spec.count if spec.count is not None else 1
                if spec.count is not None and t == 2:
                    count = max(1, count - 1)  # one frame under-counts
                entry: dict = {"name": spec.name, "count": count}
                if spec.color is not None:
                    entry["color"] = spec.color
                entries.append(entry)
            payload["objects"] = entries
        if record.attributes.celebrity is not None:
            payload["face"] = record.attributes.celebrity
        if record.attributes.action_label is not None:
            payload["action"] = record.attributes.action_label
        if record.attributes.render_text is not None:
            text = record.attributes.render_text
            payload["text"] = text if t != 1 else "0" + text[1:]  # one noisy frame
        frames.append(frame_with_payload(payload))
    return np.stack(frames)


def write_payload_png(path: Path, payload: dict, size: tuple[int, int] = (48, 64)) -> None:
    frame = frame_with_payload(payload, size=size)
    if not cv2.imwrite(str(path), cv2.cvtColor(frame, cv2.COLOR_RGB2BGR)):
        raise OSError(f"could not write {path}")


def write_fixture_tree(root: Path) -> dict:
    """Materialize benchmark + model videos + reference images + run config."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    records = fixture_records()
    benchmark_path = root / "benchmark.jsonl"
    save_benchmark(Benchmark(records=records), benchmark_path)

    model_dir = root / FIXTURE_MODEL_ID
    model_dir.mkdir(parents=True, exist_ok=True)
    for index, record in enumerate(records):
        save_frame_bundle(model_dir / f"{record.id}.npz", fixture_frames(record, index), fps=8.0)

    refs = root / "refs"
    for record in records:
        prompt_dir = refs / record.id
        prompt_dir.mkdir(parents=True, exist_ok=True)
        for k in (1, 2):
            write_payload_png(prompt_dir / f"{k}.png", {"tag": record.text, "ref": k})
    gallery = refs / "celebs" / FIXTURE_CELEBRITY
    gallery.mkdir(parents=True, exist_ok=True)
    for k in (1, 2):
        write_payload_png(gallery / f"{k}.png", {"face": FIXTURE_CELEBRITY, "gallery": k})

    config_path = root / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "preset": "mock",
                "reference_image_source": {
                    "impl": "directory_reference",
                    "params": {"root": str(refs), "prompt_count": 2, "celebrity_count": 2},
                },
            },
            indent=1,
        ),
        encoding="utf-8",
    )
    return {
        "benchmark": benchmark_path,
        "model_dir": model_dir,
        "refs": refs,
        "config": config_path,
        "records": records,
    }
