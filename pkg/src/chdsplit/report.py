"""Split manifests, iteration traces and strategy comparison reports.

A manifest is canonical JSON (sorted keys, two-space indent, trailing
newline). Real numbers are written as the shortest decimal string that
round-trips the double exactly, so identical splits give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, TextIO

import numpy as np

from .baselines import FoldSet
from .chd import IterationTrace, SplitResult
from .dataset import Dataset, SplitAssignment, SplitFractions
from .dissimilarity import ChdMode, chd_index, ks_statistic
from .errors import FingerprintMismatch, IoError, SchemaMismatch
from .histogram import CumulativeHistogram, HistogramConfig, cumulative_matrix, summary_from_sum
from .rng import GENERATOR_CONSTANTS, GENERATOR_NAME, SplitMix64, substream_seed

SCHEMA_VERSION = 1
STRATEGIES = ("chd", "random", "kfold", "stratified")
DEFAULT_EVAL_SEED = 0x5EED_E7A1
_REAL_KEYS = {"best_d", "factor"}
_REAL_DICT_KEYS = {"fractions"}


@dataclass
class SplitManifest:
    strategy: str
    seed: int
    fingerprint: str
    n_samples: int
    train_ids: list[str]
    val_ids: list[str]
    test_ids: list[str] = field(default_factory=list)
    unassigned_ids: list[str] = field(default_factory=list)
    val_equals_test: bool = False
    folds: list[list[str]] | None = None
    fractions: dict[str, float] | None = None
    factor: float | None = None
    sizes: dict[str, int] = field(default_factory=dict)
    k: int | None = None
    n_bins: int | None = None
    value_range: list[float] | None = None
    channel_policy: str | None = None
    mode: str | None = None
    iterations: int | None = None
    best_iteration: int | None = None
    best_d: float | None = None
    test_phase: dict[str, Any] | None = None
    generator: str = GENERATOR_NAME
    generator_constants: dict[str, str] = field(default_factory=lambda: dict(GENERATOR_CONSTANTS))
    schema_version: int = SCHEMA_VERSION

    def assignment(self) -> SplitAssignment:
        return SplitAssignment(self.train_ids, self.val_ids, self.test_ids, self.val_equals_test)

    def fold_assignments(self) -> list[SplitAssignment]:
        if self.folds is None:
            return []
        out = []
        for j, val in enumerate(self.folds):
            train = [i for b, fold in enumerate(self.folds) if b != j for i in fold]
            out.append(SplitAssignment(train, val))
        return out

    def hist_config(self) -> HistogramConfig | None:
        if self.n_bins is None:
            return None
        return HistogramConfig(self.n_bins, tuple(self.value_range), self.channel_policy)

    def verify(self, dataset: Dataset) -> None:
        """Raise :class:`FingerprintMismatch` unless ``dataset`` is the one this split was made on."""
        if dataset.fingerprint() != self.fingerprint or dataset.n != self.n_samples:
            raise FingerprintMismatch(
                f"dataset fingerprint {dataset.fingerprint()[:12]} != manifest {self.fingerprint[:12]}"
            )
        ids = set(self.train_ids) | set(self.val_ids) | set(self.test_ids) | set(self.unassigned_ids)
        for fold in self.folds or ():
            ids |= set(fold)
        missing = [i for i in ids if i not in dataset]
        if missing:
            raise FingerprintMismatch(f"{len(missing)} manifest ids are absent from the dataset, e.g. {missing[0]!r}")


def _fractions_dict(f: SplitFractions) -> dict[str, float]:
    return {"alpha": f.alpha, "beta": f.beta, "gamma": f.gamma}


def _sizes(a: SplitAssignment) -> dict[str, int]:
    return {"train": len(a.train_ids), "val": len(a.val_ids), "test": len(a.test_ids)}


def _unassigned(dataset: Dataset, a: SplitAssignment) -> list[str]:
    used = a.all_ids()
    return [i for i in dataset.ids if i not in used]


def chd_manifest(
    dataset: Dataset,
    assignment: SplitAssignment,
    first: SplitResult,
    second: SplitResult | None = None,
    fractions: SplitFractions | None = None,
) -> SplitManifest:
    """Manifest for a CHD split. ``fractions`` are the user's global shares."""
    cfg = first.config
    test_phase = None
    if second is not None:
        c2 = second.config
        test_phase = {
            "fractions": _fractions_dict(c2.fractions),
            "iterations": c2.iterations,
            "k": c2.k,
            "best_iteration": second.best_iteration,
            "best_d": second.best_d,
        }
    return SplitManifest(
        strategy="chd",
        seed=cfg.seed,
        fingerprint=dataset.fingerprint(),
        n_samples=dataset.n,
        train_ids=list(assignment.train_ids),
        val_ids=list(assignment.val_ids),
        test_ids=list(assignment.test_ids),
        unassigned_ids=_unassigned(dataset, assignment),
        val_equals_test=assignment.val_equals_test,
        fractions=_fractions_dict(fractions or cfg.fractions),
        sizes=_sizes(assignment),
        k=cfg.k,
        n_bins=cfg.hist.n_bins,
        value_range=list(cfg.hist.value_range),
        channel_policy=cfg.hist.channel_policy,
        mode=cfg.mode.value,
        iterations=cfg.iterations,
        best_iteration=first.best_iteration,
        best_d=first.best_d,
        test_phase=test_phase,
    )


def assignment_manifest(
    dataset: Dataset,
    assignment: SplitAssignment,
    strategy: str,
    seed: int,
    fractions: SplitFractions | None = None,
    factor: float | None = None,
) -> SplitManifest:
    """Manifest for a random or stratified split."""
    return SplitManifest(
        strategy=strategy,
        seed=seed,
        fingerprint=dataset.fingerprint(),
        n_samples=dataset.n,
        train_ids=list(assignment.train_ids),
        val_ids=list(assignment.val_ids),
        test_ids=list(assignment.test_ids),
        unassigned_ids=_unassigned(dataset, assignment),
        fractions=_fractions_dict(fractions) if fractions else None,
        factor=factor,
        sizes=_sizes(assignment),
    )


def kfold_manifest(dataset: Dataset, folds: FoldSet, seed: int) -> SplitManifest:
    return SplitManifest(
        strategy="kfold",
        seed=seed,
        fingerprint=dataset.fingerprint(),
        n_samples=dataset.n,
        train_ids=[],
        val_ids=[],
        folds=[list(f.val_ids) for f in folds.folds],
        sizes={f"fold_{j}": len(f.val_ids) for j, f in enumerate(folds.folds)},
    )


# -- serialization -------------------------------------------------------------


def _encode(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _decode_reals(data: dict[str, Any]) -> dict[str, Any]:
    out = dict(data)
    for key in _REAL_KEYS:
        if out.get(key) is not None:
            out[key] = float(out[key])
    for key in _REAL_DICT_KEYS:
        if out.get(key) is not None:
            out[key] = {k: float(v) for k, v in out[key].items()}
    if out.get("value_range") is not None:
        out["value_range"] = [float(v) for v in out["value_range"]]
    if out.get("test_phase") is not None:
        out["test_phase"] = _decode_reals(out["test_phase"])
    return out


def dumps_manifest(manifest: SplitManifest) -> str:
    return json.dumps(_encode(asdict(manifest)), sort_keys=True, indent=2) + "\n"


def loads_manifest(text: str) -> SplitManifest:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise SchemaMismatch("manifest must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported schema_version {data.get('schema_version')!r}")
    known = {f.name for f in fields(SplitManifest)}
    unknown = set(data) - known
    if unknown:
        raise SchemaMismatch(f"unknown manifest keys: {sorted(unknown)}")
    if data.get("strategy") not in STRATEGIES:
        raise SchemaMismatch(f"unknown strategy {data.get('strategy')!r}")
    try:
        return SplitManifest(**_decode_reals(data))
    except (TypeError, ValueError) as e:
        raise SchemaMismatch(f"malformed manifest: {e}") from e


def write_manifest(manifest: SplitManifest, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps_manifest(manifest), encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write manifest {path}: {e}") from e


def read_manifest(path: str | Path, dataset: Dataset | None = None) -> SplitManifest:
    """Load a manifest; when ``dataset`` is given, also check its fingerprint."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read manifest {path}: {e}") from e
    try:
        manifest = loads_manifest(text)
    except json.JSONDecodeError as e:
        raise SchemaMismatch(f"{path} is not valid JSON: {e}") from e
    if dataset is not None:
        manifest.verify(dataset)
    return manifest


def write_trace(trace: IterationTrace, path: str | Path) -> None:
    """CSV with header ``iteration,d``; values are exact decimal reprs."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iteration", "d"])
            for e in trace.entries:
                writer.writerow([e.iteration, repr(e.d)])
    except OSError as e:
        raise IoError(f"cannot write trace {path}: {e}") from e


def read_trace(path: str | Path) -> list[tuple[int, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [(int(row["iteration"]), float(row["d"])) for row in csv.DictReader(fh)]


# -- evaluation ----------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonRow:
    strategy: str
    config: str
    pair: str
    chd_scalar_mean: float
    chd_scalar_sd: float
    chd_per_bin_mean: float
    chd_per_bin_sd: float
    ks_mean: float
    ks_sd: float
    wall_time_s: float


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow] = field(default_factory=list)

    def extend(self, rows: Iterable[ComparisonRow]) -> None:
        self.rows.extend(rows)

    def write_csv(self, out: str | Path | TextIO) -> None:
        names = [f.name for f in fields(ComparisonRow)]
        if isinstance(out, (str, Path)):
            with open(out, "w", newline="", encoding="utf-8") as fh:
                self.write_csv(fh)
            return
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(names)
        for row in self.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in asdict(row).values()])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _config_summary(m: SplitManifest) -> str:
    if m.strategy == "chd":
        f = m.fractions
        return (
            f"S={m.iterations} k={m.k} bins={m.n_bins} mode={m.mode} "
            f"alpha={f['alpha']} beta={f['beta']} gamma={f['gamma']} seed={m.seed}"
        )
    if m.strategy == "random":
        return f"factor={m.factor} seed={m.seed}"
    if m.strategy == "kfold":
        return f"folds={len(m.folds or [])} seed={m.seed}"
    f = m.fractions or {}
    return f"alpha={f.get('alpha')} beta={f.get('beta')} gamma={f.get('gamma')} seed={m.seed}"


def _pairs(m: SplitManifest) -> list[tuple[str, tuple[str, ...], tuple[str, ...]]]:
    if m.strategy == "kfold":
        return [(f"fold_{j} train/val", a.train_ids, a.val_ids) for j, a in enumerate(m.fold_assignments())]
    pairs = [("train/val", tuple(m.train_ids), tuple(m.val_ids))]
    if m.test_ids and not m.val_equals_test:
        pairs.append(("train/test", tuple(m.train_ids), tuple(m.test_ids)))
    return pairs


def evaluate_manifest(
    manifest: SplitManifest,
    dataset: Dataset,
    hist: HistogramConfig | None = None,
    n_eval_draws: int = 10,
    k: int | None = None,
    eval_seed: int = DEFAULT_EVAL_SEED,
    cums: np.ndarray | None = None,
) -> list[ComparisonRow]:
    """Score a stored split with both CHD variants and KS.

    Each pair of partitions is scored ``n_eval_draws`` times; draw ``j`` of
    pair ``p`` samples ``k`` ids from each side with
    ``SplitMix64(substream_seed(eval_seed, p * n_eval_draws + j))``. ``k``
    defaults to the manifest's own ``k`` (16 when absent) and is capped by the
    smaller side. Returns one row per pair; k-fold manifests yield one row per
    fold.
    """
    manifest.verify(dataset)
    hist = hist or manifest.hist_config() or HistogramConfig()
    if cums is None:
        cums = cumulative_matrix(dataset, hist)
    row_of = {sid: j for j, sid in enumerate(dataset.ids)}
    config = _config_summary(manifest)
    rows = []
    for p, (name, left, right) in enumerate(_pairs(manifest)):
        start = time.perf_counter()
        kk = min(k or manifest.k or 16, len(left), len(right))
        left_rows = [row_of[i] for i in left]
        right_rows = [row_of[i] for i in right]
        scalar, per_bin, ks = [], [], []
        for j in range(n_eval_draws):
            rng = SplitMix64(substream_seed(eval_seed, p * n_eval_draws + j))
            ls = cums[rng.sample(left_rows, kk)].sum(axis=0)
            rs = cums[rng.sample(right_rows, kk)].sum(axis=0)
            a, b = summary_from_sum(ls, kk, hist), summary_from_sum(rs, kk, hist)
            scalar.append(chd_index(a, b, ChdMode.SCALAR))
            per_bin.append(chd_index(a, b, ChdMode.PER_BIN_L1))
            ks.append(ks_statistic(CumulativeHistogram(ls, hist), CumulativeHistogram(rs, hist)))
        rows.append(
            ComparisonRow(
                strategy=manifest.strategy,
                config=config,
                pair=name,
                chd_scalar_mean=float(np.mean(scalar)),
                chd_scalar_sd=float(np.std(scalar)),
                chd_per_bin_mean=float(np.mean(per_bin)),
                chd_per_bin_sd=float(np.std(per_bin)),
                ks_mean=float(np.mean(ks)),
                ks_sd=float(np.std(ks)),
                wall_time_s=time.perf_counter() - start,
            )
        )
    return rows
