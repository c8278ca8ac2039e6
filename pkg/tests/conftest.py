import numpy as np
import pytest
from PIL import Image

from chdsplit import ClassSpec, Dataset, SampleRecord, synth_dataset


@pytest.fixture
def bimodal16():
    return synth_dataset(
        {"eruption": ClassSpec(low=0.8, high=1.0), "non_eruption": ClassSpec(low=0.0, high=0.2)},
        n_per_class=8,
        seed=7,
    )


def constant_dataset(n, value=0.5, shape=(4, 4, 1)):
    pixels = np.full(shape, value)
    pixels.setflags(write=False)
    return Dataset(
        SampleRecord(f"img_{i:03d}", "synthetic:constant", "x", shape[1], shape[0], shape[2], pixels.nbytes, pixels=pixels)
        for i in range(n)
    )


@pytest.fixture
def identical16():
    return constant_dataset(16)


@pytest.fixture
def image_tree(tmp_path):
    """eruption/ and non_eruption/ with three 8-bit PNGs each."""
    rng = np.random.default_rng(0)
    for label in ("eruption", "non_eruption"):
        (tmp_path / label).mkdir()
        for j in range(3):
            arr = rng.integers(0, 256, size=(6, 5, 3), dtype=np.uint8)
            Image.fromarray(arr).save(tmp_path / label / f"{label}_{j}.png")
    return tmp_path
