"""Reference splitters: plain random split, k-fold and stratified sampling."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

from .dataset import Dataset, SplitAssignment, SplitFractions, floor_share
from .errors import ClassTooSmall, InvalidK, PartitionTooSmall
from .rng import SplitMix64


@dataclass(frozen=True)
class FoldSet:
    """``folds[j]`` validates on fold ``j`` and trains on every other fold."""

    folds: tuple[SplitAssignment, ...]

    def __len__(self) -> int:
        return len(self.folds)


def random_split(dataset: Dataset, factor: float, seed: int) -> SplitAssignment:
    """Shuffle, then hold out ``floor(factor * n)`` ids for validation."""
    if not 0.0 < factor < 1.0:
        raise PartitionTooSmall(f"factor must lie in (0, 1), got {factor}")
    n_val = floor_share(factor, dataset.n)
    if n_val < 1 or n_val >= dataset.n:
        raise PartitionTooSmall(f"factor {factor} of n={dataset.n} leaves an empty partition")
    ids = list(dataset.ids)
    SplitMix64(seed).shuffle(ids)
    return SplitAssignment(ids[n_val:], ids[:n_val])


def kfold(dataset: Dataset, k: int, seed: int) -> FoldSet:
    """Deal shuffled ids round-robin into ``k`` folds (sizes differ by at most one)."""
    if not 2 <= k <= dataset.n:
        raise InvalidK(f"k must lie in [2, {dataset.n}], got {k}")
    ids = list(dataset.ids)
    SplitMix64(seed).shuffle(ids)
    buckets = [ids[j::k] for j in range(k)]
    folds = []
    for j, val in enumerate(buckets):
        train = [i for b, bucket in enumerate(buckets) if b != j for i in bucket]
        folds.append(SplitAssignment(train, val))
    return FoldSet(tuple(folds))


def largest_remainder(total: int, shares: list[float]) -> list[int]:
    """Hamilton apportionment of ``total`` items over ``shares`` (which sum to 1).

    Remainder ties go to the earlier share.
    """
    exact = [s * total for s in shares]
    quotas = [math.floor(x + 1e-9) for x in exact]
    left = total - sum(quotas)
    order = sorted(range(len(shares)), key=lambda i: (-(exact[i] - quotas[i]), i))
    for i in order[:left]:
        quotas[i] += 1
    return quotas


def stratified_split(dataset: Dataset, fractions: SplitFractions, seed: int) -> SplitAssignment:
    """Per-class largest-remainder quotas, filled by a seeded shuffle of each class.

    Any share left over when the fractions sum below one stays unassigned.
    Classes are processed in sorted label order from one generator.
    """
    by_label: dict[str, list[str]] = defaultdict(list)
    for s in dataset.samples:
        by_label[s.label].append(s.id)
    leftover = max(0.0, 1.0 - fractions.alpha - fractions.beta - fractions.gamma)
    shares = [fractions.alpha, fractions.beta, fractions.gamma, leftover]
    rng = SplitMix64(seed)
    train, val, test = [], [], []
    for label in sorted(by_label):
        members = by_label[label]
        m, p, q, _ = largest_remainder(len(members), shares)
        for size, frac, name in ((m, fractions.alpha, "train"), (p, fractions.beta, "val"), (q, fractions.gamma, "test")):
            if frac > 0 and size == 0:
                raise ClassTooSmall(label, f"class {label!r} ({len(members)} samples) gets no {name} samples")
        rng.shuffle(members)
        train += members[:m]
        val += members[m : m + p]
        test += members[m + p : m + p + q]
    return SplitAssignment(train, val, test)
