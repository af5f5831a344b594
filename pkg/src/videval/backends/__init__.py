"""Model backends: slot protocols, deterministic mocks, and real adapters."""

from .core import (
    SLOT_NAMES,
    BackendRegistry,
    DetectionFrameResult,
    Embedding,
    validate_flow_field,
)
from .factory import registry_from_config
from .mocks import mock_registry
from .sources import DirectoryReferenceSource

__all__ = [
    "SLOT_NAMES",
    "BackendRegistry",
    "DetectionFrameResult",
    "DirectoryReferenceSource",
    "Embedding",
    "mock_registry",
    "registry_from_config",
    "validate_flow_field",
]
