"""Candidate prompt generation through an external LLM with a self-check pass.

The client is a JSON-in/JSON-out protocol so tests and offline runs can use
recorded responses; nothing here ever auto-accepts a candidate without the
self-check verdict.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, runtime_checkable

from .benchmark import META_CLASSES, PromptRecord, record_from_dict, validate_record
from .errors import RetryableClientError, ValidationError


@runtime_checkable
class LLMClient(Protocol):
    def complete(self, request: dict) -> dict:
        """Answer one JSON request; raises RetryableClientError on transport failure."""
        ...


def request_key(request: dict) -> str:
    """Stable filename stem for a request, used by the recorded client."""
    canonical = json.dumps(request, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


class RecordedLLMClient:
    """Replays responses from `<directory>/<request_key>.json`."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)

    def complete(self, request: dict) -> dict:
        path = self.directory / f"{request_key(request)}.json"
        if not path.is_file():
            raise RetryableClientError(f"no recorded response for request {request_key(request)} at {path}")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise RetryableClientError(f"unreadable recorded response {path}: {exc}") from exc

    def record(self, request: dict, response: dict) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / f"{request_key(request)}.json"
        path.write_text(json.dumps(response, sort_keys=True, indent=1), encoding="utf-8")
        return path


@dataclass(frozen=True)
class CandidateReport:
    """One generated candidate plus its self-check verdict."""

    candidate: PromptRecord | None
    accepted: bool
    reason: str | None = None
    manual_override: bool | None = None


def generate_prompts(
    meta_class: str,
    n: int,
    llm: LLMClient,
    sub_type: str = "general",
) -> list[CandidateReport]:
    """Ask the client for n candidates, then self-check each one's metadata.

    accepted=True requires both schema validity and a consistent self-check;
    malformed client output rejects the candidate with a reason instead of
    raising.
    """
    if meta_class not in META_CLASSES:
        raise ValidationError(f"meta_class {meta_class!r} not in {META_CLASSES}", field="meta_class")
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}", field="n")
    response = llm.complete({"task": "generate", "meta_class": meta_class, "sub_type": sub_type, "n": n})
    raw_candidates = response.get("candidates") if isinstance(response, dict) else None
    if not isinstance(raw_candidates, list):
        return [
            CandidateReport(candidate=None, accepted=False, reason="malformed client response: no candidate list")
            for _ in range(n)
        ]
    reports = []
    for index, raw in enumerate(raw_candidates[:n]):
        if not isinstance(raw, dict):
            reports.append(CandidateReport(candidate=None, accepted=False, reason="candidate is not an object"))
            continue
        raw = dict(raw)
        raw.setdefault("id", f"{meta_class}-gen-{index:04d}")
        raw.setdefault("meta_class", meta_class)
        raw.setdefault("sub_type", sub_type)
        try:
            candidate = record_from_dict(raw)
            validate_record(candidate)
        except ValidationError as exc:
            reports.append(CandidateReport(candidate=None, accepted=False, reason=f"schema: {exc}"))
            continue
        check = llm.complete(
            {
                "task": "self_check",
                "prompt": candidate.text,
                "metadata": {k: v for k, v in raw.items() if k not in ("id", "text")},
            }
        )
        if not isinstance(check, dict) or not isinstance(check.get("consistent"), bool):
            reports.append(
                CandidateReport(candidate=candidate, accepted=False, reason="malformed self-check response")
            )
            continue
        reports.append(
            CandidateReport(
                candidate=candidate,
                accepted=check["consistent"],
                reason=None if check["consistent"] else str(check.get("reason", "self-check failed")),
            )
        )
    # The client returned fewer candidates than requested.
    for _ in range(n - len(reports)):
        reports.append(CandidateReport(candidate=None, accepted=False, reason="missing candidate"))
    return reports
