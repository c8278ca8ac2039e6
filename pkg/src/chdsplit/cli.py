"""Command-line interface.

    chdsplit split chd --input DIR --alpha 0.8 --beta 0.1 --gamma 0.1 \\
        --iterations 100 --k 16 --seed 42 --out split.json
    chdsplit split random --input DIR --factor 0.15 --seed 1 --out random.json
    chdsplit split kfold --input DIR --folds 5 --seed 1 --out kfold.json
    chdsplit split stratified --input DIR --alpha 0.8 --beta 0.1 --gamma 0.1 --seed 1 --out strat.json
    chdsplit eval --input DIR split.json random.json --out report.csv
    chdsplit synth --input synth.json --out DIR
    chdsplit fuse --input DIR --out DIR

``--input`` is either a ``<label>/<image>`` directory tree or a synthetic
dataset spec (``.json``). Failures exit with status 1 and print
``error: <Category>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .baselines import kfold, random_split, stratified_split
from .chd import ChdConfig, phase_fractions, split_three_way, split_train_val
from .dataset import Dataset, IngestOptions, SplitFractions, load_dataset, synth_from_config, write_dataset, write_tiff
from .dissimilarity import ChdMode
from .errors import SplitError
from .histogram import PER_CHANNEL, POOLED, HistogramConfig
from .preprocess import BandFusionParams, fuse_image
from .report import (
    DEFAULT_EVAL_SEED,
    ComparisonReport,
    assignment_manifest,
    chd_manifest,
    evaluate_manifest,
    kfold_manifest,
    read_manifest,
    write_manifest,
    write_trace,
)

logger = logging.getLogger("chdsplit")


def _load_input(args) -> Dataset:
    path = Path(args.input)
    if path.suffix.lower() == ".json":
        return synth_from_config(path)
    fusion = BandFusionParams() if getattr(args, "fusion", False) else None
    dataset = load_dataset(path, IngestOptions(fusion=fusion))
    for bad, reason in dataset.warnings:
        print(f"warning: undecodable file {bad}: {reason}", file=sys.stderr)
    return dataset


def _hist(args) -> HistogramConfig:
    return HistogramConfig(n_bins=args.bins, channel_policy=args.channel_policy)


def _default_trace(out: Path) -> Path:
    return out.with_name(out.stem + ".trace.csv")


def cmd_split_chd(args) -> None:
    dataset = _load_input(args)
    fractions = SplitFractions(args.alpha, args.beta, args.gamma)
    f1, f2 = phase_fractions(fractions)
    hist = _hist(args)
    common = dict(iterations=args.iterations, k=args.k, hist=hist, mode=ChdMode(args.mode), seed=args.seed)
    phase1 = ChdConfig(fractions=f1, **common)
    if f2 is None and not args.val_equals_test:
        first, second = split_train_val(dataset, phase1, workers=args.workers), None
        assignment = first.assignment
    else:
        phase2 = None if args.val_equals_test else ChdConfig(fractions=f2, **common)
        assignment, first, second = split_three_way(dataset, phase1, phase2, args.val_equals_test, workers=args.workers)
    out = Path(args.out)
    write_manifest(chd_manifest(dataset, assignment, first, second, fractions), out)
    trace = Path(args.trace) if args.trace else _default_trace(out)
    write_trace(first.trace, trace)
    if second is not None:
        write_trace(second.trace, trace.with_name(trace.stem + ".test" + trace.suffix))
    print(f"chd split: train={len(assignment.train_ids)} val={len(assignment.val_ids)} "
          f"test={len(assignment.test_ids)} best_d={first.best_d!r} -> {out}")


def cmd_split_random(args) -> None:
    dataset = _load_input(args)
    assignment = random_split(dataset, args.factor, args.seed)
    write_manifest(assignment_manifest(dataset, assignment, "random", args.seed, factor=args.factor), args.out)
    print(f"random split: train={len(assignment.train_ids)} val={len(assignment.val_ids)} -> {args.out}")


def cmd_split_kfold(args) -> None:
    dataset = _load_input(args)
    folds = kfold(dataset, args.folds, args.seed)
    write_manifest(kfold_manifest(dataset, folds, args.seed), args.out)
    print(f"kfold: {len(folds)} folds -> {args.out}")


def cmd_split_stratified(args) -> None:
    dataset = _load_input(args)
    fractions = SplitFractions(args.alpha, args.beta, args.gamma)
    assignment = stratified_split(dataset, fractions, args.seed)
    write_manifest(assignment_manifest(dataset, assignment, "stratified", args.seed, fractions=fractions), args.out)
    print(f"stratified split: train={len(assignment.train_ids)} val={len(assignment.val_ids)} "
          f"test={len(assignment.test_ids)} -> {args.out}")


def cmd_eval(args) -> None:
    dataset = _load_input(args)
    hist = _hist(args) if args.bins else None
    report = ComparisonReport()
    for path in args.manifests:
        manifest = read_manifest(path, dataset)
        report.extend(evaluate_manifest(manifest, dataset, hist, args.draws, args.k, args.seed))
    if args.out:
        report.write_csv(args.out)
    else:
        report.write_csv(sys.stdout)


def cmd_synth(args) -> None:
    dataset = synth_from_config(args.input, seed=args.seed)
    written = write_dataset(dataset, args.out)
    print(f"synth: wrote {len(written)} images under {args.out}")


def cmd_fuse(args) -> None:
    params = BandFusionParams(args.gain, args.gain, args.gain, args.swir_offset)
    dataset = load_dataset(args.input)
    out_root = Path(args.out)
    count = 0
    for s in dataset.samples:
        if s.bands is None:
            logger.warning("skipping %s: not a five-band raster", s.id)
            continue
        arr = dataset.pixels(s.id)
        fused = fuse_image({b: arr[..., i] for i, b in enumerate(s.bands)}, params)
        target = out_root / Path(s.id).with_suffix(".tif")
        target.parent.mkdir(parents=True, exist_ok=True)
        write_tiff(target, fused)
        count += 1
    print(f"fuse: wrote {count} images under {out_root}")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="image tree directory or synthetic spec .json")
    p.add_argument("--fusion", action="store_true", help="fuse five-band rasters into SWIR-enhanced RGB")


def _add_hist(p: argparse.ArgumentParser, default_bins: int | None = 256) -> None:
    p.add_argument("--bins", type=int, default=default_bins)
    p.add_argument("--channel-policy", choices=[POOLED, PER_CHANNEL], default=POOLED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chdsplit", description="Cumulative histogram dissimilarity dataset splitting")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    split = sub.add_parser("split", help="split a dataset")
    strategies = split.add_subparsers(dest="strategy", required=True)

    chd = strategies.add_parser("chd", help="iterative CHD split search")
    _add_input(chd)
    _add_hist(chd)
    chd.add_argument("--alpha", type=float, default=0.9)
    chd.add_argument("--beta", type=float, default=0.1)
    chd.add_argument("--gamma", type=float, default=0.0)
    chd.add_argument("--iterations", type=int, default=100)
    chd.add_argument("--k", type=int, default=16)
    chd.add_argument("--mode", choices=[m.value for m in ChdMode], default=ChdMode.SCALAR.value)
    chd.add_argument("--seed", type=int, required=True)
    chd.add_argument("--out", required=True)
    chd.add_argument("--trace", help="trace CSV path (default: <out>.trace.csv)")
    chd.add_argument("--val-equals-test", action="store_true")
    chd.add_argument("--workers", type=int, default=1)
    chd.set_defaults(func=cmd_split_chd)

    rnd = strategies.add_parser("random", help="plain random split")
    _add_input(rnd)
    rnd.add_argument("--factor", type=float, required=True)
    rnd.add_argument("--seed", type=int, required=True)
    rnd.add_argument("--out", required=True)
    rnd.set_defaults(func=cmd_split_random)

    kf = strategies.add_parser("kfold", help="k-fold cross-validation folds")
    _add_input(kf)
    kf.add_argument("--folds", type=int, default=5)
    kf.add_argument("--seed", type=int, required=True)
    kf.add_argument("--out", required=True)
    kf.set_defaults(func=cmd_split_kfold)

    st = strategies.add_parser("stratified", help="per-class stratified split")
    _add_input(st)
    st.add_argument("--alpha", type=float, default=0.8)
    st.add_argument("--beta", type=float, default=0.1)
    st.add_argument("--gamma", type=float, default=0.1)
    st.add_argument("--seed", type=int, required=True)
    st.add_argument("--out", required=True)
    st.set_defaults(func=cmd_split_stratified)

    ev = sub.add_parser("eval", help="compare split manifests on their dataset")
    _add_input(ev)
    _add_hist(ev, default_bins=None)
    ev.add_argument("manifests", nargs="+")
    ev.add_argument("--k", type=int, help="samples per side per draw (default: manifest k or 16)")
    ev.add_argument("--draws", type=int, default=10)
    ev.add_argument("--seed", type=int, default=DEFAULT_EVAL_SEED, help="evaluation draw seed")
    ev.add_argument("--out", help="report CSV (default: stdout)")
    ev.set_defaults(func=cmd_eval)

    sy = sub.add_parser("synth", help="write a synthetic dataset tree")
    sy.add_argument("--input", required=True, help="synthetic spec .json")
    sy.add_argument("--seed", type=int, help="override the spec's seed")
    sy.add_argument("--out", required=True)
    sy.set_defaults(func=cmd_synth)

    fu = sub.add_parser("fuse", help="SWIR/RGB fusion of five-band rasters")
    fu.add_argument("--input", required=True)
    fu.add_argument("--out", required=True)
    fu.add_argument("--gain", type=float, default=2.5)
    fu.add_argument("--swir-offset", type=float, default=0.1)
    fu.set_defaults(func=cmd_fuse)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except SplitError as e:
        print(f"error: {e.category}: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())
