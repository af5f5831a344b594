"""Adapters wrapping real feature extractors behind the slot protocols.

Heavyweight pretrained models are out of scope; the one adapter shipped here
is classical dense optical flow, which needs nothing beyond OpenCV.
"""

from __future__ import annotations

import cv2
import numpy as np


class FarnebackFlowEstimator:
    """Dense Farneback optical flow in the forward a→b convention."""

    deterministic = True

    def __init__(
        self,
        pyr_scale: float = 0.5,
        levels: int = 3,
        winsize: int = 15,
        iterations: int = 3,
        poly_n: int = 5,
        poly_sigma: float = 1.2,
    ) -> None:
        self.pyr_scale = pyr_scale
        self.levels = levels
        self.winsize = winsize
        self.iterations = iterations
        self.poly_n = poly_n
        self.poly_sigma = poly_sigma

    def estimate_flow(self, frame_a: np.ndarray, frame_b: np.ndarray) -> np.ndarray:
        gray_a = cv2.cvtColor(frame_a, cv2.COLOR_RGB2GRAY)
        gray_b = cv2.cvtColor(frame_b, cv2.COLOR_RGB2GRAY)
        flow = cv2.calcOpticalFlowFarneback(
            gray_a,
            gray_b,
            None,
            self.pyr_scale,
            self.levels,
            self.winsize,
            self.iterations,
            self.poly_n,
            self.poly_sigma,
            0,
        )
        return flow.astype(np.float64)
