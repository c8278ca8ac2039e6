"""Cumulative histogram dissimilarity (CHD) and a KS sanity metric."""

from __future__ import annotations

import enum

import numpy as np

from .errors import DegenerateReference, MixedConfigs
from .histogram import CumulativeHistogram, MeanCumulativeSummary


class ChdMode(str, enum.Enum):
    SCALAR = "scalar"
    PER_BIN_L1 = "per-bin-L1"


def chd_index(
    reference: MeanCumulativeSummary,
    other: MeanCumulativeSummary,
    mode: ChdMode = ChdMode.SCALAR,
) -> float:
    """Relative gap between two mean cumulative summaries.

    ``reference`` is always the training side and supplies the denominator:
    ``|s_ref - s_other| / s_ref`` in scalar mode, ``sum|u - v| / sum(u)`` in
    per-bin mode.
    """
    if reference.config != other.config or reference.per_bin.shape != other.per_bin.shape:
        raise MixedConfigs("summaries were built with different histogram configs")
    mode = ChdMode(mode)
    if mode is ChdMode.SCALAR:
        if reference.scalar == 0:
            raise DegenerateReference("reference summary is zero")
        return abs(reference.scalar - other.scalar) / reference.scalar
    denom = float(reference.per_bin.sum())
    if denom == 0:
        raise DegenerateReference("reference summary is zero")
    return float(np.abs(reference.per_bin - other.per_bin).sum()) / denom


def ks_statistic(reference: CumulativeHistogram, other: CumulativeHistogram) -> float:
    """Largest gap between the two normalized cumulative histograms."""
    if reference.config != other.config or reference.cum.shape != other.cum.shape:
        raise MixedConfigs("cumulative histograms were built with different configs")
    if reference.cum[-1] == 0 or other.cum[-1] == 0:
        raise DegenerateReference("empty cumulative histogram")
    f_ref = reference.cum / reference.cum[-1]
    f_other = other.cum / other.cum[-1]
    return float(np.max(np.abs(f_ref - f_other)))
