"""Text-to-video evaluation harness: benchmark, metrics, alignment, reporting."""

__version__ = "0.1.0"
