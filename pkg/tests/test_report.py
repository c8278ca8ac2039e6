import json

import numpy as np
import pytest

from chdsplit import (
    ChdConfig,
    ClassSpec,
    Dataset,
    SplitFractions,
    kfold,
    random_split,
    split_train_val,
    synth_dataset,
)
from chdsplit.report import (
    assignment_manifest,
    chd_manifest,
    dumps_manifest,
    evaluate_manifest,
    kfold_manifest,
    read_manifest,
    read_trace,
    write_manifest,
    write_trace,
)
from chdsplit.errors import FingerprintMismatch, IoError, SchemaMismatch

from conftest import constant_dataset

HALF = SplitFractions(0.5, 0.5)


@pytest.fixture
def chd_run(bimodal16):
    r = split_train_val(bimodal16, ChdConfig(iterations=8, k=4, fractions=HALF, seed=3))
    return bimodal16, r, chd_manifest(bimodal16, r.assignment, r)


def test_roundtrip(tmp_path, chd_run):
    ds, r, m = chd_run
    write_manifest(m, tmp_path / "m.json")
    back = read_manifest(tmp_path / "m.json", ds)
    assert back == m
    assert back.best_d == r.best_d
    raw = json.loads((tmp_path / "m.json").read_text())
    assert isinstance(raw["best_d"], str)
    assert raw["generator"] == "splitmix64"


def test_byte_identical_runs(tmp_path, bimodal16):
    paths = []
    for j in range(2):
        r = split_train_val(bimodal16, ChdConfig(iterations=8, k=4, fractions=HALF, seed=3))
        write_manifest(chd_manifest(bimodal16, r.assignment, r), tmp_path / f"{j}.json")
        write_trace(r.trace, tmp_path / f"{j}.csv")
        paths.append(tmp_path / f"{j}")
    assert (tmp_path / "0.json").read_bytes() == (tmp_path / "1.json").read_bytes()
    assert (tmp_path / "0.csv").read_bytes() == (tmp_path / "1.csv").read_bytes()


def test_fingerprint_mismatch(chd_run):
    ds, _, m = chd_run
    smaller = Dataset(ds.samples[1:])
    with pytest.raises(FingerprintMismatch):
        m.verify(smaller)


def test_schema_mismatch(tmp_path, chd_run):
    _, _, m = chd_run
    raw = json.loads(dumps_manifest(m))
    raw["schema_version"] = 99
    (tmp_path / "bad.json").write_text(json.dumps(raw))
    with pytest.raises(SchemaMismatch):
        read_manifest(tmp_path / "bad.json")
    (tmp_path / "junk.json").write_text("{nope")
    with pytest.raises(SchemaMismatch):
        read_manifest(tmp_path / "junk.json")
    with pytest.raises(IoError):
        read_manifest(tmp_path / "missing.json")


def test_trace_csv(tmp_path, chd_run):
    _, r, _ = chd_run
    short = split_train_val(constant_dataset(10), ChdConfig(iterations=3, k=2, fractions=HALF))
    write_trace(short.trace, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "iteration,d" and len(lines) == 4
    write_trace(r.trace, tmp_path / "t2.csv")
    assert read_trace(tmp_path / "t2.csv") == [(e.iteration, e.d) for e in r.trace.entries]


def test_empty_trace_rejected():
    from chdsplit import IterationTrace

    with pytest.raises(ValueError):
        IterationTrace(())


def test_evaluate_identical_dataset():
    ds = constant_dataset(40)
    r = split_train_val(ds, ChdConfig(iterations=5, k=4, fractions=SplitFractions(0.8, 0.2)))
    (row,) = evaluate_manifest(chd_manifest(ds, r.assignment, r), ds, n_eval_draws=5)
    assert row.chd_scalar_mean == 0 and row.chd_scalar_sd == 0
    assert row.chd_per_bin_mean == 0 and row.ks_mean == 0


def test_evaluate_kfold_one_row_per_fold(bimodal16):
    m = kfold_manifest(bimodal16, kfold(bimodal16, 4, seed=0), seed=0)
    rows = evaluate_manifest(m, bimodal16, n_eval_draws=3)
    assert [r.pair for r in rows] == [f"fold_{j} train/val" for j in range(4)]
    for r in rows:
        assert np.isfinite([r.chd_scalar_mean, r.chd_per_bin_mean, r.ks_mean]).all()
        assert min(r.chd_scalar_mean, r.chd_per_bin_mean, r.ks_mean) >= 0


def test_evaluate_three_way_has_test_row():
    ds = synth_dataset({"a": ClassSpec(low=0, high=0.4), "b": ClassSpec(low=0.6, high=1)}, 20, 0)
    a = random_split(ds, 0.2, 1)
    from chdsplit import SplitAssignment

    three = SplitAssignment(a.train_ids[:-4], a.val_ids, a.train_ids[-4:])
    m = assignment_manifest(ds, three, "stratified", 1, fractions=SplitFractions(0.7, 0.2, 0.1))
    rows = evaluate_manifest(m, ds, n_eval_draws=2)
    assert [r.pair for r in rows] == ["train/val", "train/test"]


def test_evaluate_rejects_other_dataset(chd_run):
    _, _, m = chd_run
    with pytest.raises(FingerprintMismatch):
        evaluate_manifest(m, constant_dataset(16))
