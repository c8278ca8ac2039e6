import numpy as np

from chdsplit.rng import SplitMix64, substream_seed, uniform_block


def test_splitmix64_reference_vector():
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


def test_uniform_block_matches_scalar_draws():
    rng = SplitMix64(99)
    scalar = [rng.random() for _ in range(257)]
    np.testing.assert_array_equal(uniform_block(99, 257), scalar)


def test_below_range_and_coverage():
    rng = SplitMix64(3)
    draws = [rng.below(7) for _ in range(2000)]
    assert set(draws) == set(range(7))


def test_sample_is_without_replacement():
    rng = SplitMix64(5)
    for k in range(11):
        s = rng.sample(range(10), k)
        assert len(s) == len(set(s)) == k


def test_substreams_differ():
    seeds = {substream_seed(42, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert substream_seed(42, 0) != substream_seed(43, 0)
