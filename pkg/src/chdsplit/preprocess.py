"""SWIR/RGB band fusion that highlights hot ground such as active lava."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InvalidSpec, MissingBand, NonFiniteInput

FUSION_BANDS = ("B2", "B3", "B4", "SWIR1", "SWIR2")


@dataclass(frozen=True)
class BandFusionParams:
    alpha1: float = 2.5  # red (B4) gain
    alpha2: float = 2.5  # green (B3) gain
    alpha3: float = 2.5  # blue (B2) gain
    swir_offset: float = 0.1

    def __post_init__(self):
        if min(self.alpha1, self.alpha2, self.alpha3) <= 0:
            raise InvalidSpec("band gains must be positive")


def fuse_swir_rgb(b2: float, b3: float, b4: float, swir1: float, swir2: float, params: BandFusionParams = BandFusionParams()):
    """Return the fused ``(b2n, b3n, b4n)`` for one pixel. No clipping is applied."""
    if not all(math.isfinite(v) for v in (b2, b3, b4, swir1, swir2)):
        raise NonFiniteInput("band values must be finite")
    b4n = params.alpha1 * b4 + max(0.0, swir2 - params.swir_offset)
    b3n = params.alpha2 * b3 + max(0.0, swir1 - params.swir_offset)
    b2n = params.alpha3 * b2
    return b2n, b3n, b4n


def fuse_image(bands: Mapping[str, np.ndarray], params: BandFusionParams = BandFusionParams()) -> np.ndarray:
    """Apply :func:`fuse_swir_rgb` to every pixel of five named band planes.

    Returns an (H, W, 3) array in RGB order, i.e. ``(b4n, b3n, b2n)``.
    """
    for name in FUSION_BANDS:
        if name not in bands:
            raise MissingBand(name)
    b2, b3, b4, swir1, swir2 = (np.asarray(bands[name], dtype=np.float64) for name in FUSION_BANDS)
    for plane in (b2, b3, b4, swir1, swir2):
        if not np.all(np.isfinite(plane)):
            raise NonFiniteInput("band values must be finite")
    b4n = params.alpha1 * b4 + np.maximum(0.0, swir2 - params.swir_offset)
    b3n = params.alpha2 * b3 + np.maximum(0.0, swir1 - params.swir_offset)
    b2n = params.alpha3 * b2
    return np.stack([b4n, b3n, b2n], axis=-1)
