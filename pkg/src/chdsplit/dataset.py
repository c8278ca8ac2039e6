"""Dataset representation, ingestion, synthetic generation and raw partitioning."""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyDataset,
    InvalidSpec,
    IoError,
    PartitionTooSmall,
    SizesExceedDataset,
)
from .rng import SplitMix64, substream_seed, uniform_block

logger = logging.getLogger(__name__)

RASTER_SUFFIXES = {".png", ".jpg", ".jpeg", ".tif", ".tiff"}
DEFAULT_BAND_NAMES = ("B2", "B3", "B4", "SWIR1", "SWIR2")

# Absorbs binary representation error, e.g. 0.29 * 100 == 28.999999999999996.
FLOOR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SampleRecord:
    id: str
    source: str
    label: str
    width: int
    height: int
    channels: int
    byte_length: int = 0
    bands: tuple[str, ...] | None = None
    lat: float | None = None
    lon: float | None = None
    pixels: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if min(self.width, self.height, self.channels) < 1:
            raise InvalidSpec(f"sample {self.id!r} has a non-positive dimension")


@dataclass(frozen=True)
class SplitFractions:
    """Train, validation and test shares of a dataset."""

    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidSpec(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise InvalidSpec(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.0 <= self.gamma < 1.0:
            raise InvalidSpec(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.alpha + self.beta + self.gamma > 1.0 + 1e-9:
            raise InvalidSpec("alpha + beta + gamma exceeds 1")


@dataclass(frozen=True)
class PartitionSizes:
    m: int
    p: int
    q: int = 0

    @property
    def total(self) -> int:
        return self.m + self.p + self.q


@dataclass(frozen=True)
class SplitAssignment:
    """Disjoint id sets. Ids are kept sorted so equal assignments compare equal.

    ``val_equals_test`` marks the shortcut where the validation set doubles as
    the test set; ``test_ids`` then repeats ``val_ids``.
    """

    train_ids: tuple[str, ...]
    val_ids: tuple[str, ...]
    test_ids: tuple[str, ...] = ()
    val_equals_test: bool = False

    def __post_init__(self):
        for name in ("train_ids", "val_ids", "test_ids"):
            object.__setattr__(self, name, tuple(sorted(getattr(self, name))))
        train, val, test = set(self.train_ids), set(self.val_ids), set(self.test_ids)
        if len(train) != len(self.train_ids) or len(val) != len(self.val_ids) or len(test) != len(self.test_ids):
            raise ValueError("duplicate id inside a partition")
        if train & val or train & test:
            raise ValueError("partitions overlap")
        if self.val_equals_test:
            if self.test_ids != self.val_ids:
                raise ValueError("val_equals_test requires identical val and test ids")
        elif val & test:
            raise ValueError("partitions overlap")

    def all_ids(self) -> set[str]:
        return set(self.train_ids) | set(self.val_ids) | set(self.test_ids)

    def sizes(self) -> PartitionSizes:
        return PartitionSizes(len(self.train_ids), len(self.val_ids), len(self.test_ids))


@dataclass(frozen=True)
class IngestOptions:
    """Options for :func:`load_dataset`.

    ``band_names`` names the channels of five-band rasters, in file order.
    ``fusion`` (a :class:`chdsplit.preprocess.BandFusionParams`) turns
    five-band samples into fused three-band images whenever pixels are read.
    """

    band_names: tuple[str, ...] = DEFAULT_BAND_NAMES
    fusion: object | None = None


class Dataset:
    """Immutable, id-sorted collection of samples."""

    def __init__(
        self,
        samples: Iterable[SampleRecord],
        warnings: Sequence[tuple[str, str]] = (),
        options: IngestOptions | None = None,
    ):
        self.samples: tuple[SampleRecord, ...] = tuple(sorted(samples, key=lambda s: s.id))
        self._by_id = {s.id: s for s in self.samples}
        if len(self._by_id) != len(self.samples):
            raise InvalidSpec("sample ids are not unique")
        self.warnings = tuple(warnings)
        self.options = options or IngestOptions()

    @property
    def n(self) -> int:
        return len(self.samples)

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Dataset) and self.samples == other.samples

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, labels={self.labels()})"

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.samples)

    def labels(self) -> list[str]:
        return sorted({s.label for s in self.samples})

    def __getitem__(self, sample_id: str) -> SampleRecord:
        return self._by_id[sample_id]

    def __contains__(self, sample_id: object) -> bool:
        return sample_id in self._by_id

    def subset(self, ids: Iterable[str]) -> Dataset:
        return Dataset((self._by_id[i] for i in ids), options=self.options)

    def pixels(self, sample_id: str) -> np.ndarray:
        """Pixel buffer of shape (H, W, C) in the [0, 1] domain."""
        sample = self._by_id[sample_id]
        if sample.pixels is not None:
            arr = sample.pixels
        else:
            arr = _read_raster(Path(sample.source))
        fusion = self.options.fusion
        if fusion is not None and sample.bands is not None and arr.shape[-1] == len(sample.bands):
            from .preprocess import fuse_image

            arr = fuse_image({b: arr[..., i] for i, b in enumerate(sample.bands)}, fusion)
        return arr

    def fingerprint(self) -> str:
        """SHA-256 over the sorted ``id<TAB>byte_length`` lines."""
        h = hashlib.sha256()
        for s in self.samples:
            h.update(f"{s.id}\t{s.byte_length}\n".encode("utf-8"))
        return h.hexdigest()


def floor_share(fraction: float, n: int) -> int:
    return math.floor(fraction * n + FLOOR_TOLERANCE)


def compute_partition_sizes(n: int, fractions: SplitFractions) -> PartitionSizes:
    """Floor each share of ``n`` so that ``m + p + q <= n`` always holds."""
    if n < 1:
        raise EmptyDataset("dataset is empty")
    m = floor_share(fractions.alpha, n)
    p = floor_share(fractions.beta, n)
    q = floor_share(fractions.gamma, n) if fractions.gamma > 0 else 0
    for name, size, frac in (("train", m, fractions.alpha), ("val", p, fractions.beta), ("test", q, fractions.gamma)):
        if frac > 0 and size == 0:
            raise PartitionTooSmall(f"{name} fraction {frac} of n={n} rounds down to 0 samples")
    return PartitionSizes(m, p, q)


def random_partition(dataset: Dataset, sizes: PartitionSizes, rng: SplitMix64) -> SplitAssignment:
    """Shuffle the canonical id order and deal the first m, next p, next q ids."""
    if sizes.total > dataset.n or min(sizes.m, sizes.p, sizes.q) < 0:
        raise SizesExceedDataset(f"sizes {sizes} do not fit a dataset of {dataset.n}")
    ids = list(dataset.ids)
    rng.shuffle(ids)
    m, p, q = sizes.m, sizes.p, sizes.q
    return SplitAssignment(ids[:m], ids[m : m + p], ids[m + p : m + p + q])


# -- ingestion ---------------------------------------------------------------


def _normalize(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == bool:
        arr = arr.astype(np.float64)
    elif np.issubdtype(arr.dtype, np.integer):
        arr = arr.astype(np.float64) / np.iinfo(arr.dtype).max
    else:
        arr = arr.astype(np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    elif arr.ndim == 3 and arr.shape[0] <= 16 and arr.shape[2] > 16:
        # planar (C, H, W) TIFF layout
        arr = np.moveaxis(arr, 0, -1)
    if arr.ndim != 3:
        raise ValueError(f"unsupported raster shape {arr.shape}")
    return arr


def _read_raster(path: Path) -> np.ndarray:
    try:
        if path.suffix.lower() in (".tif", ".tiff"):
            import tifffile

            arr = tifffile.imread(path)
        else:
            from PIL import Image

            with Image.open(path) as im:
                im.load()
                arr = np.asarray(im)
    except FileNotFoundError as e:
        raise IoError(f"{path}: {e}") from e
    return _normalize(np.asarray(arr))


def load_dataset(root: str | Path, config: IngestOptions | None = None) -> Dataset:
    """Read a ``root/<label>/<image>`` tree.

    Undecodable files are logged and recorded in ``Dataset.warnings`` as
    ``(path, reason)`` pairs instead of aborting the load.
    """
    config = config or IngestOptions()
    root = Path(root)
    if not root.is_dir():
        raise IoError(f"{root}: not a directory")
    samples: list[SampleRecord] = []
    warnings: list[tuple[str, str]] = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for path in sorted(class_dir.rglob("*")):
            if not path.is_file() or path.suffix.lower() not in RASTER_SUFFIXES:
                continue
            try:
                arr = _read_raster(path)
            except Exception as e:  # decoder errors vary by backend
                logger.warning("skipping undecodable file %s: %s", path, e)
                warnings.append((str(path), f"{type(e).__name__}: {e}"))
                continue
            h, w, c = arr.shape
            bands = config.band_names if c == len(config.band_names) else None
            samples.append(
                SampleRecord(
                    id=path.relative_to(root).as_posix(),
                    source=str(path),
                    label=class_dir.name,
                    width=w,
                    height=h,
                    channels=c,
                    byte_length=path.stat().st_size,
                    bands=bands,
                )
            )
    if not samples:
        raise EmptyDataset(f"no decodable raster files under {root}")
    return Dataset(samples, warnings, config)


# -- synthetic data ----------------------------------------------------------


@dataclass(frozen=True)
class ClassSpec:
    """Pixel distribution of one synthetic class.

    ``distribution`` is ``"uniform"`` (values in ``[low, high)``) or
    ``"mixture"`` (``low`` with probability ``weight``, otherwise ``high``).
    """

    shape: tuple[int, int, int] = (8, 8, 1)
    distribution: str = "uniform"
    low: float = 0.0
    high: float = 1.0
    weight: float = 0.5

    def __post_init__(self):
        if len(self.shape) != 3 or min(self.shape) < 1:
            raise InvalidSpec(f"shape must be three positive ints, got {self.shape}")
        if self.distribution not in ("uniform", "mixture"):
            raise InvalidSpec(f"unknown distribution {self.distribution!r}")
        if self.low < 0 or self.high < self.low:
            raise InvalidSpec(f"invalid value range [{self.low}, {self.high}]")
        if not 0.0 <= self.weight <= 1.0:
            raise InvalidSpec("mixture weight must lie in [0, 1]")

    def draw(self, seed: int) -> np.ndarray:
        count = int(np.prod(self.shape))
        u = uniform_block(seed, count)
        if self.distribution == "uniform":
            values = self.low + (self.high - self.low) * u
        else:
            values = np.where(u < self.weight, self.low, self.high)
        return values.reshape(self.shape)


def synth_dataset(spec: Mapping[str, ClassSpec], n_per_class: int, seed: int) -> Dataset:
    """Deterministic in-memory dataset, ``n_per_class`` samples for each class.

    Sample ``j`` of the ``c``-th class (sorted by label) draws its pixels from
    substream ``c * n_per_class + j`` of ``seed``.
    """
    if not spec:
        raise InvalidSpec("no classes given")
    if n_per_class < 1:
        raise InvalidSpec("n_per_class must be at least 1")
    samples = []
    for c, label in enumerate(sorted(spec)):
        cls = spec[label]
        if not isinstance(cls, ClassSpec):
            cls = ClassSpec(**cls)
        for j in range(n_per_class):
            pixels = cls.draw(substream_seed(seed, c * n_per_class + j))
            pixels.setflags(write=False)
            h, w, ch = cls.shape
            samples.append(
                SampleRecord(
                    id=f"{label}/{label}_{j:05d}",
                    source=f"synthetic:{cls.distribution}[{cls.low},{cls.high}]",
                    label=label,
                    width=w,
                    height=h,
                    channels=ch,
                    byte_length=pixels.nbytes,
                    pixels=pixels,
                )
            )
    return Dataset(samples)


def synth_from_config(path: str | Path, seed: int | None = None) -> Dataset:
    """Build a synthetic dataset from a JSON file of the form::

        {"seed": 7, "n_per_class": 8,
         "classes": {"eruption": {"shape": [8, 8, 1], "distribution": "uniform",
                                  "low": 0.8, "high": 1.0}, ...}}
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise IoError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InvalidSpec(f"{path}: not valid JSON ({e})") from e
    try:
        classes = {
            label: ClassSpec(**{**cfg, "shape": tuple(cfg.get("shape", (8, 8, 1)))})
            for label, cfg in raw["classes"].items()
        }
        n_per_class = int(raw["n_per_class"])
        seed = int(raw.get("seed", 0)) if seed is None else seed
    except (KeyError, TypeError) as e:
        raise InvalidSpec(f"{path}: malformed synthetic spec ({e})") from e
    return synth_dataset(classes, n_per_class, seed)


def write_dataset(dataset: Dataset, root: str | Path) -> list[Path]:
    """Write every sample as a float32 TIFF under ``root/<label>/``."""
    root = Path(root)
    written = []
    for s in dataset.samples:
        path = root / (s.id + ".tif")
        path.parent.mkdir(parents=True, exist_ok=True)
        write_tiff(path, dataset.pixels(s.id))
        written.append(path)
    return written



def write_tiff(path: str | Path, pixels: np.ndarray) -> None:
    """Write an (H, W, C) buffer as a float32, channel-interleaved TIFF."""
    import tifffile

    arr = np.asarray(pixels, dtype=np.float32)
    if arr.shape[-1] == 1:
        tifffile.imwrite(path, arr[..., 0], photometric="minisblack")
    else:
        tifffile.imwrite(path, arr, photometric="minisblack", planarconfig="contig")
