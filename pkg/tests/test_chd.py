import numpy as np
import pytest

from chdsplit import (
    ChdConfig,
    ClassSpec,
    HistogramConfig,
    SplitFractions,
    phase_fractions,
    split_three_way,
    split_train_test,
    split_train_val,
    synth_dataset,
)
from chdsplit import chd as chd_module
from chdsplit.errors import InvalidSpec, KTooLarge, PartitionTooSmall
from chdsplit.rng import substream_seed

from conftest import constant_dataset
from oracles import enumerate_best_d

HALF = SplitFractions(0.5, 0.5)


def test_identical_images_all_zero(identical16):
    r = split_train_val(identical16, ChdConfig(iterations=10, k=4, fractions=HALF, seed=3))
    assert all(e.d == 0.0 for e in r.trace.entries)
    assert r.best_iteration == 0 and r.best_d == 0.0


def test_argmin_contract(bimodal16):
    r = split_train_val(bimodal16, ChdConfig(iterations=20, k=4, fractions=HALF, seed=11))
    d = r.trace.d
    assert len(r.trace) == 20
    assert r.best_d == d.min()
    assert r.best_iteration == int(np.flatnonzero(d == d.min())[0])
    assert len(r.assignment.train_ids) == 8 and len(r.assignment.val_ids) == 8


def test_exhaustive_oracle_n6():
    ds = synth_dataset({"a": ClassSpec(low=0.0, high=0.5), "b": ClassSpec(low=0.3, high=1.0)}, 3, 5)
    hist = HistogramConfig(16)
    cfg = ChdConfig(iterations=600, k=3, fractions=HALF, hist=hist, seed=1)
    r = split_train_val(ds, cfg)

    oracle_min, scored = enumerate_best_d(ds, 3, hist)
    assert len(scored) == 20
    seen = set()
    for e in r.trace.entries:
        train, held, _, _ = chd_module._draw(ds.n, r.sizes, cfg.k, e.substream)
        seen.add(tuple(sorted(ds.ids[j] for j in train)))
        key = (tuple(sorted(ds.ids[j] for j in train)), tuple(sorted(ds.ids[j] for j in held)))
        assert e.d == pytest.approx(scored[key], abs=1e-12)
    assert len(seen) == 20
    assert r.best_d == pytest.approx(oracle_min, abs=1e-12)


def test_trace_substreams():
    ds = constant_dataset(10)
    r = split_train_val(ds, ChdConfig(iterations=5, k=2, fractions=HALF, seed=9))
    assert [e.substream for e in r.trace.entries] == [substream_seed(9, i) for i in range(5)]


def test_k_too_large_before_histograms(monkeypatch, bimodal16):
    def boom(*args, **kwargs):
        raise AssertionError("histograms computed before k was validated")

    monkeypatch.setattr(chd_module, "cumulative_matrix", boom)
    with pytest.raises(KTooLarge):
        split_train_val(bimodal16, ChdConfig(iterations=5, k=9, fractions=HALF))


def test_train_test_sizes_and_k():
    ds = constant_dataset(90)
    f2 = SplitFractions(8 / 9, 1 / 9)
    r = split_train_test(ds, ChdConfig(iterations=3, k=10, fractions=f2))
    assert (r.sizes.m, r.sizes.p) == (80, 10)
    assert len(r.assignment.test_ids) == 10 and not r.assignment.val_ids
    with pytest.raises(KTooLarge):
        split_train_test(ds, ChdConfig(iterations=3, k=11, fractions=f2))


def test_train_test_identical_subset():
    r = split_train_test(constant_dataset(20), ChdConfig(iterations=5, k=2, fractions=SplitFractions(0.8, 0.2)))
    assert r.best_d == 0.0


def test_partition_too_small_propagates():
    with pytest.raises(PartitionTooSmall):
        split_train_val(constant_dataset(7), ChdConfig(iterations=2, k=1, fractions=SplitFractions(0.9, 0.1)))


def test_phase_fractions():
    f1, f2 = phase_fractions(SplitFractions(0.8, 0.1, 0.1))
    assert f1 == SplitFractions(0.9, 0.1) and f2.alpha == pytest.approx(8 / 9) and f2.beta == pytest.approx(1 / 9)
    assert phase_fractions(SplitFractions(0.9, 0.1))[1] is None


def test_three_way_composition():
    ds = synth_dataset({"a": ClassSpec(low=0, high=0.4), "b": ClassSpec(low=0.6, high=1)}, 50, 1)
    f1, f2 = phase_fractions(SplitFractions(0.8, 0.1, 0.1))
    combined, first, second = split_three_way(
        ds, ChdConfig(iterations=10, k=5, fractions=f1, seed=4), ChdConfig(iterations=10, k=5, fractions=f2, seed=4)
    )
    assert combined.sizes().m == 80 and combined.sizes().p == 10 and combined.sizes().q == 10
    tr, va, te = map(set, (combined.train_ids, combined.val_ids, combined.test_ids))
    assert not (tr & va or tr & te or va & te)
    assert set(combined.val_ids) == set(first.assignment.val_ids)
    assert set(combined.test_ids) == set(second.assignment.test_ids)
    assert set(second.assignment.train_ids) | set(second.assignment.test_ids) == set(first.assignment.train_ids)


def test_three_way_val_equals_test():
    ds = constant_dataset(100)
    combined, first, second = split_three_way(
        ds, ChdConfig(iterations=4, k=5, fractions=SplitFractions(0.9, 0.1)), None, val_equals_test=True
    )
    assert second is None and combined.val_equals_test
    assert len(combined.train_ids) == 90 and combined.val_ids == combined.test_ids and len(combined.val_ids) == 10
    with pytest.raises(InvalidSpec):
        split_three_way(ds, ChdConfig(iterations=4, k=5), None)


def test_three_way_phase2_k_checked_before_histograms(monkeypatch):
    monkeypatch.setattr(chd_module, "cumulative_matrix", lambda *a, **k: pytest.fail("histograms computed"))
    f1, f2 = phase_fractions(SplitFractions(0.8, 0.1, 0.1))
    with pytest.raises(KTooLarge):
        split_three_way(constant_dataset(100), ChdConfig(k=10, fractions=f1), ChdConfig(k=11, fractions=f2))


def test_deterministic_and_parallel_equal(bimodal16):
    cfg = ChdConfig(iterations=30, k=4, fractions=HALF, seed=21)
    a = split_train_val(bimodal16, cfg)
    b = split_train_val(bimodal16, cfg)
    c = split_train_val(bimodal16, cfg, workers=3)
    assert a == b == c


def test_monotone_in_iterations(bimodal16):
    for seed in range(10):
        short = split_train_val(bimodal16, ChdConfig(iterations=15, k=4, fractions=HALF, seed=seed))
        long = split_train_val(bimodal16, ChdConfig(iterations=40, k=4, fractions=HALF, seed=seed))
        assert [e.d for e in long.trace.entries[:15]] == [e.d for e in short.trace.entries]
        assert long.best_d <= short.best_d


def test_per_bin_mode_runs(bimodal16):
    r = split_train_val(bimodal16, ChdConfig(iterations=10, k=4, fractions=HALF, mode="per-bin-L1"))
    assert r.best_d == r.trace.d.min() >= 0
