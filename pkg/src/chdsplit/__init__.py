"""Dataset splitting by cumulative histogram dissimilarity, with baseline splitters."""

from .baselines import FoldSet, kfold, random_split, stratified_split
from .chd import (
    ChdConfig,
    IterationTrace,
    SplitResult,
    TraceEntry,
    phase_fractions,
    split_three_way,
    split_train_test,
    split_train_val,
)
from .dataset import (
    ClassSpec,
    Dataset,
    IngestOptions,
    PartitionSizes,
    SampleRecord,
    SplitAssignment,
    SplitFractions,
    compute_partition_sizes,
    load_dataset,
    random_partition,
    synth_dataset,
)
from .dissimilarity import ChdMode, chd_index, ks_statistic
from .histogram import (
    CumulativeHistogram,
    Histogram,
    HistogramConfig,
    MeanCumulativeSummary,
    aggregate_mean_cumulative,
    cumulate,
    sample_histogram,
)
from .preprocess import BandFusionParams, fuse_image, fuse_swir_rgb
from .report import (
    ComparisonReport,
    SplitManifest,
    evaluate_manifest,
    read_manifest,
    write_manifest,
    write_trace,
)
from .rng import SplitMix64, substream_seed

__version__ = "0.1.0"
