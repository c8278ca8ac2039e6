"""Iterative CHD-minimizing split search.

Each iteration ``i`` owns the generator ``SplitMix64(substream_seed(seed, i))``.
It shuffles the canonical id order to draw a random (train, held-out)
partition, then draws ``k`` samples without replacement from the train side
and ``k`` from the held-out side, in that order. The held-out side is the
validation set in the first phase and the test set in the second. The
split with the lowest dissimilarity wins; ties go to the lowest iteration.

Because iterations only depend on ``(seed, i)``, running them in parallel or
with a larger iteration budget never changes the values already computed.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import (
    Dataset,
    PartitionSizes,
    SplitAssignment,
    SplitFractions,
    compute_partition_sizes,
)
from .dissimilarity import ChdMode, chd_index
from .errors import InvalidSpec, KTooLarge
from .histogram import HistogramConfig, cumulative_matrix, summary_from_sum
from .rng import SplitMix64, substream_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChdConfig:
    """Search settings for one phase.

    ``fractions.alpha`` is the train share and ``fractions.beta`` the
    held-out share of whatever dataset the phase runs on; ``gamma`` is
    ignored here (see :func:`phase_fractions` for the three-way conversion).
    """

    iterations: int = 100
    k: int = 16
    fractions: SplitFractions = field(default_factory=lambda: SplitFractions(0.9, 0.1))
    hist: HistogramConfig = field(default_factory=HistogramConfig)
    mode: ChdMode = ChdMode.SCALAR
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidSpec("iterations must be at least 1")
        if self.k < 1:
            raise InvalidSpec("k must be at least 1")
        object.__setattr__(self, "mode", ChdMode(self.mode))


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    d: float
    substream: int


@dataclass(frozen=True)
class IterationTrace:
    entries: tuple[TraceEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("a trace needs at least one iteration")
        if [e.iteration for e in self.entries] != list(range(len(self.entries))):
            raise ValueError("trace indices must run 0..S-1 in order")

    @property
    def d(self) -> np.ndarray:
        return np.array([e.d for e in self.entries])

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SplitResult:
    assignment: SplitAssignment
    best_d: float
    best_iteration: int
    trace: IterationTrace
    sizes: PartitionSizes
    config: ChdConfig


def phase_fractions(global_fractions: SplitFractions) -> tuple[SplitFractions, SplitFractions | None]:
    """Convert global (alpha, beta, gamma) into per-phase fractions.

    Phase one keeps ``alpha + gamma`` for training and ``beta`` for validation;
    phase two splits that training share into ``alpha`` and ``gamma`` relative
    to its own size. Returns ``None`` for phase two when ``gamma`` is zero.
    """
    a, b, g = global_fractions.alpha, global_fractions.beta, global_fractions.gamma
    if g == 0:
        return SplitFractions(a, b), None
    return SplitFractions(a + g, b), SplitFractions(a / (a + g), g / (a + g))


def _two_way_sizes(n: int, config: ChdConfig) -> PartitionSizes:
    sizes = compute_partition_sizes(n, SplitFractions(config.fractions.alpha, config.fractions.beta))
    if config.k > min(sizes.m, sizes.p):
        raise KTooLarge(f"k={config.k} exceeds min(train={sizes.m}, held-out={sizes.p})")
    return sizes


def _draw(n: int, sizes: PartitionSizes, k: int, stream: int) -> tuple[list[int], list[int], list[int], list[int]]:
    rng = SplitMix64(stream)
    order = list(range(n))
    rng.shuffle(order)
    train = order[: sizes.m]
    held = order[sizes.m : sizes.m + sizes.p]
    return train, held, rng.sample(train, k), rng.sample(held, k)


def _score(cums: np.ndarray, k: int, hist: HistogramConfig, mode: ChdMode, train_k, held_k) -> float:
    train_summary = summary_from_sum(cums[train_k].sum(axis=0), k, hist)
    held_summary = summary_from_sum(cums[held_k].sum(axis=0), k, hist)
    return chd_index(train_summary, held_summary, mode)


def _score_block(cums, sizes, config: ChdConfig, iterations) -> list[tuple[int, float, int]]:
    out = []
    for i in iterations:
        stream = substream_seed(config.seed, i)
        _, _, train_k, held_k = _draw(cums.shape[0], sizes, config.k, stream)
        out.append((i, _score(cums, config.k, config.hist, config.mode, train_k, held_k), stream))
    return out


def _search(dataset: Dataset, config: ChdConfig, held_role: str, workers: int, cums=None) -> SplitResult:
    sizes = _two_way_sizes(dataset.n, config)
    # k is validated before any pixel is read.
    if cums is None:
        cums = cumulative_matrix(dataset, config.hist)
    indices = list(range(config.iterations))
    if workers > 1 and config.iterations > 1:
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_score_block, [cums] * len(chunks), [sizes] * len(chunks), [config] * len(chunks), chunks)
            scored = sorted(entry for part in parts for entry in part)
    else:
        scored = _score_block(cums, sizes, config, indices)
    trace = IterationTrace(tuple(TraceEntry(i, d, s) for i, d, s in scored))
    best_iteration = min(range(len(scored)), key=lambda i: (scored[i][1], i))
    best = trace.entries[best_iteration]

    train, held, _, _ = _draw(dataset.n, sizes, config.k, best.substream)
    ids = dataset.ids
    train_ids = [ids[j] for j in train]
    held_ids = [ids[j] for j in held]
    if held_role == "val":
        assignment = SplitAssignment(train_ids, held_ids)
    else:
        assignment = SplitAssignment(train_ids, (), held_ids)
    logger.debug("%s search: best d=%r at iteration %d", held_role, best.d, best_iteration)
    return SplitResult(assignment, best.d, best_iteration, trace, sizes, config)


def split_train_val(dataset: Dataset, config: ChdConfig, workers: int = 1) -> SplitResult:
    """Pick the train/validation split with the lowest CHD among ``config.iterations`` draws."""
    return _search(dataset, config, "val", workers)


def split_train_test(train_subset: Dataset, config: ChdConfig, workers: int = 1) -> SplitResult:
    """Same search on a phase-one training subset; the held-out side becomes the test set."""
    return _search(train_subset, config, "test", workers)


def split_three_way(
    dataset: Dataset,
    phase1: ChdConfig,
    phase2: ChdConfig | None,
    val_equals_test: bool = False,
    workers: int = 1,
) -> tuple[SplitAssignment, SplitResult, SplitResult | None]:
    """Run both phases and combine them into (train, val, test).

    With ``val_equals_test`` only phase one runs and the validation set is
    reused as the test set.
    """
    sizes1 = _two_way_sizes(dataset.n, phase1)
    if not val_equals_test:
        if phase2 is None:
            raise InvalidSpec("phase-two config is required unless val_equals_test is set")
        _two_way_sizes(sizes1.m, phase2)
    cums = cumulative_matrix(dataset, phase1.hist)
    first = _search(dataset, phase1, "val", workers, cums)
    if val_equals_test:
        a = first.assignment
        return SplitAssignment(a.train_ids, a.val_ids, a.val_ids, val_equals_test=True), first, None
    row = {sid: j for j, sid in enumerate(dataset.ids)}
    train1 = first.assignment.train_ids
    sub_cums = cums[[row[sid] for sid in train1]] if phase2.hist == phase1.hist else None
    second = _search(dataset.subset(train1), phase2, "test", workers, sub_cums)
    combined = SplitAssignment(second.assignment.train_ids, first.assignment.val_ids, second.assignment.test_ids)
    return combined, first, second
