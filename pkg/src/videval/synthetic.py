"""Deterministic synthetic frames carrying a machine-readable content tag.

A tagged frame embeds a small JSON payload in its leading pixel bytes; the
deterministic mock backends read the payload back instead of running real
perception models. Frames must travel through lossless storage (FFV1/png
video, .npz bundles, PNG stills) for the tag to survive.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

PAYLOAD_MAGIC = b"SYNF"
_HEADER_LEN = len(PAYLOAD_MAGIC) + 4


def canonical_payload(payload: dict) -> bytes:
    """Stable byte encoding of a payload dict (sorted keys, compact separators)."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("ascii")


def content_seed(*parts: str | bytes) -> int:
    """64-bit seed derived from the SHA-256 of the joined parts."""
    digest = hashlib.sha256()
    for part in parts:
        digest.update(part.encode("utf-8") if isinstance(part, str) else part)
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest()[:8], "big")


def frame_with_payload(payload: dict, size: tuple[int, int] = (48, 64)) -> np.ndarray:
    """Render an RGB uint8 frame of (height, width) carrying `payload`.

    The background is pseudo-random noise seeded by the payload itself, so
    equal payloads always produce pixel-identical frames.
    """
    height, width = size
    data = canonical_payload(payload)
    blob = PAYLOAD_MAGIC + len(data).to_bytes(4, "big") + data
    capacity = height * width * 3
    if len(blob) > capacity:
        raise ValueError(f"payload of {len(data)} bytes exceeds frame capacity {capacity - _HEADER_LEN}")
    rng = np.random.default_rng(content_seed(b"background", data))
    frame = rng.integers(0, 256, size=(height, width, 3), dtype=np.int64).astype(np.uint8)
    flat = frame.reshape(-1)
    flat[: len(blob)] = np.frombuffer(blob, dtype=np.uint8)
    return frame


def read_payload(frame: np.ndarray) -> dict | None:
    """Recover the payload from a tagged frame; None for untagged content."""
    flat = np.ascontiguousarray(frame, dtype=np.uint8).reshape(-1)
    if flat.size < _HEADER_LEN or flat[: len(PAYLOAD_MAGIC)].tobytes() != PAYLOAD_MAGIC:
        return None
    length = int.from_bytes(flat[len(PAYLOAD_MAGIC) : _HEADER_LEN].tobytes(), "big")
    if length < 0 or _HEADER_LEN + length > flat.size:
        return None
    raw = flat[_HEADER_LEN : _HEADER_LEN + length].tobytes()
    try:
        payload = json.loads(raw.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return None
    return payload if isinstance(payload, dict) else None
