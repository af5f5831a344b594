"""Build a BackendRegistry from a declarative slot → implementation config."""

from __future__ import annotations

from typing import Any, Callable

from ..errors import ConfigurationError
from .core import SLOT_NAMES, BackendRegistry
from .mocks import (
    MockActionClassifier,
    MockCaptioner,
    MockDetector,
    MockEmbedder,
    MockFaceAnalyzer,
    MockFlowEstimator,
    MockInceptionClassifier,
    MockOcr,
    MockReferenceSource,
    MockVqaScorer,
)
from .sources import DirectoryReferenceSource


def _farneback_flow(**params: Any):
    # Imported on demand: adapters are optional extras, not needed unless
    # a config actually selects them.
    from .adapters import FarnebackFlowEstimator

    return FarnebackFlowEstimator(**params)


# implementation name -> (constructor, slots it may fill)
IMPLEMENTATIONS: dict[str, tuple[Callable[..., Any], tuple[str, ...]]] = {
    "mock_embedder": (MockEmbedder, ("text_image_embedder",)),
    "mock_captioner": (MockCaptioner, ("captioner",)),
    "mock_detector": (MockDetector, ("detector_tracker",)),
    "mock_face_analyzer": (MockFaceAnalyzer, ("face_analyzer",)),
    "mock_ocr": (MockOcr, ("ocr_engine",)),
    "mock_action_classifier": (MockActionClassifier, ("action_classifier",)),
    "mock_flow": (MockFlowEstimator, ("flow_estimator",)),
    "mock_vqa": (MockVqaScorer, ("vqa_scorer",)),
    "mock_inception": (MockInceptionClassifier, ("inception_classifier",)),
    "mock_reference": (MockReferenceSource, ("reference_image_source",)),
    "directory_reference": (DirectoryReferenceSource, ("reference_image_source",)),
    "farneback_flow": (_farneback_flow, ("flow_estimator",)),
}

# Config preset expanding to a fully mocked registry.
MOCK_PRESET = {
    "text_image_embedder": "mock_embedder",
    "captioner": "mock_captioner",
    "detector_tracker": "mock_detector",
    "face_analyzer": "mock_face_analyzer",
    "ocr_engine": "mock_ocr",
    "action_classifier": "mock_action_classifier",
    "flow_estimator": "mock_flow",
    "vqa_scorer": "mock_vqa",
    "inception_classifier": "mock_inception",
    "reference_image_source": "mock_reference",
}


def registry_from_config(config: dict[str, Any]) -> BackendRegistry:
    """Instantiate backends from `{slot: impl_name | {impl, params}}`.

    A top-level `"preset": "mock"` fills every slot with the deterministic
    mocks first; explicit slot entries then override individual slots.
    """
    if not isinstance(config, dict):
        raise ConfigurationError("backend config must be a JSON object")
    config = dict(config)
    preset = config.pop("preset", None)
    slot_specs: dict[str, Any] = {}
    if preset is not None:
        if preset != "mock":
            raise ConfigurationError(f"unknown preset {preset!r}; valid presets: mock")
        slot_specs.update(MOCK_PRESET)
    slot_specs.update(config)

    bindings: dict[str, Any] = {}
    for slot, spec in slot_specs.items():
        if slot not in SLOT_NAMES:
            raise ConfigurationError(f"unknown backend slot {slot!r}; valid slots: {', '.join(SLOT_NAMES)}")
        if isinstance(spec, str):
            impl_name, params = spec, {}
        elif isinstance(spec, dict) and "impl" in spec:
            impl_name = spec["impl"]
            params = spec.get("params", {})
        else:
            raise ConfigurationError(f"slot {slot!r} must map to an impl name or {{impl, params}} object")
        if impl_name not in IMPLEMENTATIONS:
            raise ConfigurationError(
                f"unknown implementation {impl_name!r}; known: {', '.join(sorted(IMPLEMENTATIONS))}"
            )
        constructor, allowed = IMPLEMENTATIONS[impl_name]
        if slot not in allowed:
            raise ConfigurationError(f"implementation {impl_name!r} cannot fill slot {slot!r}")
        try:
            bindings[slot] = constructor(**params)
        except TypeError as exc:
            raise ConfigurationError(f"bad params for {impl_name!r}: {exc}") from exc
    return BackendRegistry(**bindings)
