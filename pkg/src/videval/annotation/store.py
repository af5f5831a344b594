"""File-backed study state with an append-only, crash-tolerant rating log.

The study definition lives in `study.json`; ratings append to `ratings.log`
with an fsync per record, so a crash can at worst leave one torn trailing
line, which recovery truncates (it was never acked). Raters only ever see
task ids: the task id is a salted hash of (model, prompt), so payloads
derived from it stay blinded.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..alignment import ASPECTS, HumanRating
from ..errors import ParseError, ValidationError

TARGET_RATINGS_PER_ITEM = 3
DEFAULT_INSTRUCTIONS = (
    "Watch the looping video, read the prompt, and compare with the reference "
    "images. Score each aspect from 1 (worst) to 5 (best)."
)


def task_id_for(salt: str, model_id: str, prompt_id: str) -> str:
    return hashlib.sha256(f"{salt}:{model_id}:{prompt_id}".encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class StudyItem:
    """One video to rate; model identity stays server-side."""

    task_id: str
    model_id: str
    prompt_id: str
    prompt_text: str
    video_path: str
    reference_paths: tuple[str, str, str]


@dataclass(frozen=True)
class Study:
    study_id: str
    salt: str
    items: tuple[StudyItem, ...]
    raters: tuple[str, ...] = ()
    instructions: str = DEFAULT_INSTRUCTIONS

    def __post_init__(self) -> None:
        seen = set()
        for item in self.items:
            if item.task_id in seen:
                raise ValidationError("duplicate task id", record_id=item.task_id)
            seen.add(item.task_id)

    @classmethod
    def build(
        cls,
        study_id: str,
        salt: str,
        entries: list[dict],
        raters: tuple[str, ...] = (),
        instructions: str = DEFAULT_INSTRUCTIONS,
    ) -> "Study":
        """Create a study from raw entries, deriving blinded task ids."""
        items = []
        for entry in entries:
            references = tuple(entry["reference_paths"])
            if len(references) != 3:
                raise ValidationError(
                    f"exactly 3 reference images required, got {len(references)}",
                    record_id=entry.get("prompt_id"),
                    field="reference_paths",
                )
            items.append(
                StudyItem(
                    task_id=task_id_for(salt, entry["model_id"], entry["prompt_id"]),
                    model_id=entry["model_id"],
                    prompt_id=entry["prompt_id"],
                    prompt_text=entry["prompt_text"],
                    video_path=entry["video_path"],
                    reference_paths=references,
                )
            )
        return cls(study_id=study_id, salt=salt, items=tuple(items), raters=raters, instructions=instructions)

    def to_document(self) -> dict:
        return {
            "study_id": self.study_id,
            "salt": self.salt,
            "instructions": self.instructions,
            "raters": list(self.raters),
            "items": [
                {
                    "task_id": item.task_id,
                    "model_id": item.model_id,
                    "prompt_id": item.prompt_id,
                    "prompt_text": item.prompt_text,
                    "video_path": item.video_path,
                    "reference_paths": list(item.reference_paths),
                }
                for item in self.items
            ],
        }

    @classmethod
    def from_document(cls, document: dict) -> "Study":
        items = tuple(
            StudyItem(
                task_id=entry["task_id"],
                model_id=entry["model_id"],
                prompt_id=entry["prompt_id"],
                prompt_text=entry["prompt_text"],
                video_path=entry["video_path"],
                reference_paths=tuple(entry["reference_paths"]),
            )
            for entry in document["items"]
        )
        return cls(
            study_id=document["study_id"],
            salt=document["salt"],
            items=items,
            raters=tuple(document.get("raters", ())),
            instructions=document.get("instructions", DEFAULT_INSTRUCTIONS),
        )


@dataclass(frozen=True)
class RatingAck:
    ack_id: str
    task_id: str
    rater_id: str


class DuplicateRating(Exception):
    """Resubmission of an already-stored (rater, task) pair."""

    def __init__(self, original: RatingAck) -> None:
        super().__init__(f"rating already stored as {original.ack_id}")
        self.original = original


def _validate_scores(scores: dict) -> dict[str, int]:
    if not isinstance(scores, dict):
        raise ValidationError("scores must be an object", field="scores")
    for aspect in ASPECTS:
        if aspect not in scores:
            raise ValidationError(f"missing aspect score {aspect!r}", field=aspect)
    clean: dict[str, int] = {}
    for aspect, value in scores.items():
        if aspect not in ASPECTS:
            raise ValidationError(f"unknown aspect {aspect!r}", field=aspect)
        if isinstance(value, bool) or not isinstance(value, int) or not 1 <= value <= 5:
            raise ValidationError(f"score for {aspect} must be an integer in [1,5], got {value!r}", field=aspect)
        clean[aspect] = value
    return clean


class AnnotationStore:
    """Durable study state under one directory."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self._lock = threading.Lock()
        self._study = self._load_study()
        self._items = {item.task_id: item for item in self._study.items}
        self._raters = set(self._study.raters)
        # (rater_id, task_id) -> ack; insertion order is log order.
        self._ratings: dict[tuple[str, str], dict] = {}
        self._replay_log()

    # -- persistence ---------------------------------------------------

    @property
    def study_path(self) -> Path:
        return self.directory / "study.json"

    @property
    def log_path(self) -> Path:
        return self.directory / "ratings.log"

    @classmethod
    def create(cls, directory: str | Path, study: Study) -> "AnnotationStore":
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        study_path = directory / "study.json"
        if study_path.exists():
            raise ValidationError(f"study already exists at {study_path}")
        study_path.write_text(
            json.dumps(study.to_document(), sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )
        return cls(directory)

    def _load_study(self) -> Study:
        if not self.study_path.is_file():
            raise ValidationError(f"no study definition at {self.study_path}")
        try:
            return Study.from_document(json.loads(self.study_path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, KeyError) as exc:
            raise ParseError(f"bad study definition: {exc}", path=str(self.study_path)) from exc

    def _replay_log(self) -> None:
        if not self.log_path.is_file():
            return
        raw = self.log_path.read_bytes()
        raw_lines = raw.split(b"\n")
        for index, line in enumerate(raw_lines):
            if not line:
                continue
            try:
                record = json.loads(line.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                if index == len(raw_lines) - 1:
                    # Torn trailing line from a crash mid-append; the rating
                    # was never acked, so truncating it keeps the ledger exact
                    # and keeps the next append from gluing onto the fragment.
                    with self.log_path.open("r+b") as handle:
                        handle.truncate(len(raw) - len(line))
                    break
                message = getattr(exc, "msg", "invalid utf-8")
                raise ParseError(f"corrupt rating log: {message}", path=str(self.log_path), line=index + 1) from exc
            key = (record["rater_id"], record["task_id"])
            self._ratings.setdefault(key, record)
            self._raters.add(record["rater_id"])

    def _append(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"
        with self.log_path.open("a", encoding="utf-8") as handle:
            handle.write(line)
            handle.flush()
            os.fsync(handle.fileno())

    # -- study surface ---------------------------------------------------

    @property
    def study(self) -> Study:
        return self._study

    def item(self, task_id: str) -> StudyItem:
        if task_id not in self._items:
            raise ValidationError(f"unknown task {task_id!r}", field="task_id")
        return self._items[task_id]

    def register_rater(self, rater_id: str) -> None:
        if not rater_id or not rater_id.strip():
            raise ValidationError("rater_id must be non-empty", field="rater_id")
        with self._lock:
            self._raters.add(rater_id)

    def is_registered(self, rater_id: str) -> bool:
        return rater_id in self._raters

    def rating_counts(self) -> dict[str, int]:
        counts = {task_id: 0 for task_id in self._items}
        for _, task_id in self._ratings:
            counts[task_id] += 1
        return counts

    def next_task(self, rater_id: str) -> StudyItem | None:
        """The unrated item with the fewest ratings; None when exhausted."""
        if not self.is_registered(rater_id):
            raise ValidationError(f"unknown rater {rater_id!r}; registration required", field="rater_id")
        with self._lock:
            counts = self.rating_counts()
            candidates = [
                item
                for item in self._study.items
                if (rater_id, item.task_id) not in self._ratings
            ]
            if not candidates:
                return None
            return min(candidates, key=lambda item: (counts[item.task_id], item.task_id))

    def submit_rating(self, rater_id: str, task_id: str, scores: dict) -> RatingAck:
        """Validate, persist with fsync, and ack; duplicates raise with the original ack."""
        if not self.is_registered(rater_id):
            raise ValidationError(f"unknown rater {rater_id!r}; registration required", field="rater_id")
        item = self.item(task_id)
        clean = _validate_scores(scores)
        with self._lock:
            key = (rater_id, task_id)
            if key in self._ratings:
                existing = self._ratings[key]
                raise DuplicateRating(
                    RatingAck(ack_id=existing["ack_id"], task_id=task_id, rater_id=rater_id)
                )
            ack_id = hashlib.sha256(
                f"{self._study.salt}:{rater_id}:{task_id}".encode("utf-8")
            ).hexdigest()[:16]
            record = {
                "ack_id": ack_id,
                "rater_id": rater_id,
                "task_id": task_id,
                "model_id": item.model_id,
                "prompt_id": item.prompt_id,
                "scores": dict(sorted(clean.items())),
            }
            self._append(record)
            self._ratings[key] = record
            return RatingAck(ack_id=ack_id, task_id=task_id, rater_id=rater_id)

    def ratings(self) -> list[HumanRating]:
        out = []
        for record in self._ratings.values():
            out.append(
                HumanRating(
                    rater_id=record["rater_id"],
                    model_id=record["model_id"],
                    prompt_id=record["prompt_id"],
                    scores=record["scores"],
                )
            )
        return out

    def export_text(self) -> str:
        """Header line plus HumanRating records, byte-identical across calls."""
        records = sorted(
            self._ratings.values(),
            key=lambda r: (r["model_id"], r["prompt_id"], r["rater_id"]),
        )
        lines = [
            json.dumps(
                {
                    "record_type": "header",
                    "study_id": self._study.study_id,
                    "total_ratings": len(records),
                },
                sort_keys=True,
                separators=(",", ":"),
            )
        ]
        for record in records:
            lines.append(
                json.dumps(
                    {
                        "rater_id": record["rater_id"],
                        "model_id": record["model_id"],
                        "prompt_id": record["prompt_id"],
                        "scores": record["scores"],
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines) + "\n"

    def progress(self) -> dict:
        counts = self.rating_counts()
        return {
            "study_id": self._study.study_id,
            "items": [
                {"task_id": task_id, "rating_count": counts[task_id]} for task_id in sorted(counts)
            ],
            "total_ratings": sum(counts.values()),
            "target_per_item": TARGET_RATINGS_PER_ITEM,
            "raters": sorted(self._raters),
        }
