"""Per-sample histograms, cumulative histograms and their K-sample mean summary."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyPixels, InvalidSpec, MixedConfigs

POOLED = "pooled"
PER_CHANNEL = "per-channel"


@dataclass(frozen=True)
class HistogramConfig:
    """Uniform binning over ``[low, high)``; values outside clamp to the end bins.

    ``channel_policy`` is ``"pooled"`` (all channels in one histogram) or
    ``"per-channel"`` (one block of ``n_bins`` per channel, concatenated in
    channel order).
    """

    n_bins: int = 256
    value_range: tuple[float, float] = (0.0, 1.0)
    channel_policy: str = POOLED

    def __post_init__(self):
        if self.n_bins < 2:
            raise InvalidSpec("n_bins must be at least 2")
        low, high = self.value_range
        if not low < high:
            raise InvalidSpec("value_range must satisfy low < high")
        if self.channel_policy not in (POOLED, PER_CHANNEL):
            raise InvalidSpec(f"unknown channel policy {self.channel_policy!r}")


@dataclass(frozen=True, eq=False)
class Histogram:
    counts: np.ndarray
    config: HistogramConfig


@dataclass(frozen=True, eq=False)
class CumulativeHistogram:
    cum: np.ndarray
    config: HistogramConfig

    @property
    def total(self) -> int:
        return int(self.cum[-1])


@dataclass(frozen=True, eq=False)
class MeanCumulativeSummary:
    scalar: float
    per_bin: np.ndarray
    k: int
    config: HistogramConfig


def bin_indices(values: np.ndarray, config: HistogramConfig) -> np.ndarray:
    low, high = config.value_range
    idx = np.floor((values - low) * (config.n_bins / (high - low)))
    return np.clip(idx, 0, config.n_bins - 1).astype(np.int64)


def sample_histogram(pixels, config: HistogramConfig) -> Histogram:
    """Bin one sample's pixel values.

    With the per-channel policy ``pixels`` must have channels on its last axis.
    """
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.size == 0:
        raise EmptyPixels("no pixel values to histogram")
    if config.channel_policy == POOLED or arr.ndim < 2:
        counts = np.bincount(bin_indices(arr.ravel(), config), minlength=config.n_bins)
    else:
        flat = arr.reshape(-1, arr.shape[-1])
        counts = np.concatenate(
            [np.bincount(bin_indices(flat[:, c], config), minlength=config.n_bins) for c in range(flat.shape[1])]
        )
    return Histogram(counts.astype(np.int64), config)


def cumulate(h: Histogram) -> CumulativeHistogram:
    return CumulativeHistogram(np.cumsum(h.counts, dtype=np.int64), h.config)


def summary_from_sum(cum_sum: np.ndarray, k: int, config: HistogramConfig) -> MeanCumulativeSummary:
    """Summary of ``k`` cumulative histograms given their exact integer sum.

    ``per_bin = sum / k / #bins`` and ``scalar = mean(per_bin)``; the integer
    sum makes the result independent of the order the histograms were added.
    """
    n_bins = cum_sum.shape[-1]
    per_bin = cum_sum / k / n_bins
    scalar = float(per_bin.sum()) / n_bins
    return MeanCumulativeSummary(scalar, per_bin, k, config)


def aggregate_mean_cumulative(hs: Sequence[CumulativeHistogram]) -> MeanCumulativeSummary:
    if len(hs) == 0:
        raise ValueError("need at least one cumulative histogram")
    config = hs[0].config
    length = hs[0].cum.shape
    for h in hs[1:]:
        if h.config != config or h.cum.shape != length:
            raise MixedConfigs("cumulative histograms were built with different configs")
    total = np.sum([h.cum for h in hs], axis=0, dtype=np.int64)
    return summary_from_sum(total, len(hs), config)


def cumulative_matrix(dataset, config: HistogramConfig) -> np.ndarray:
    """Cumulative histogram of every sample, one row per sample in dataset order."""
    rows = [cumulate(sample_histogram(dataset.pixels(sid), config)).cum for sid in dataset.ids]
    lengths = {r.shape for r in rows}
    if len(lengths) > 1:
        raise MixedConfigs("samples have different channel counts under the per-channel policy")
    return np.vstack(rows)
