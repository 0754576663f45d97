"""Training-free multivariate time-series classification.

The heavy lifting lives in the compiled ``feta._core`` extension: UEA ``.ts``
parsing, per-channel normalization and subsampling, channel ranking, DTW
exemplar retrieval, channel-level reasoning backends, confidence-weighted
fusion, and the end-to-end ``evaluate`` entry point.
"""

from ._core import (  # noqa: F401
    AblationFlags,
    AggregateConfig,
    Backend,
    ChannelDecision,
    ChannelScore,
    ChannelSequence,
    Dataset,
    DatasetHalf,
    DtwConfig,
    DtwResult,
    FetaError,
    FinalDecision,
    FittedPipeline,
    FusionMode,
    LabeledSequence,
    LabeledSeries,
    Neighbor,
    NeighborSet,
    PreprocessConfig,
    ReasonerConfig,
    RunConfig,
    RunReport,
    SampleResult,
    SelectConfig,
    Split,
    aggregate,
    build_joint_prompt,
    build_prompt,
    dtw_distance,
    evaluate,
    fuse_and_rank,
    load_split,
    loo_1nn_accuracy,
    majority_vote,
    make_dataset,
    mock_reason,
    parse_decision,
    parse_ts_text,
    preprocess_channel,
    prototype_margin_score,
    random_exemplars,
    retrieve_neighbors,
    subsample,
    summary_path,
    to_ts_text,
    top1_reason,
    znormalize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
