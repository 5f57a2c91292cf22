from .aggregate import CATEGORIES, LEVELS, METRIC_ORDER, AggregateTable, Cell, MetricReport, aggregate
from .frames import DimensionMismatch, FrameBuffer, check_same_shape
from .kernels import PSNR_CAP_DB, SsimParams, TooSmall, psnr, ssim, ssim_plane
from .scores import (
    DEFAULT_DETECTION_THRESHOLD,
    InsufficientFrames,
    ZeroNormEmbedding,
    clip_frame_consistency,
    clip_text_alignment,
    grounding_score,
    judge_score,
)

__all__ = [
    "CATEGORIES",
    "LEVELS",
    "METRIC_ORDER",
    "AggregateTable",
    "Cell",
    "MetricReport",
    "aggregate",
    "DimensionMismatch",
    "FrameBuffer",
    "check_same_shape",
    "PSNR_CAP_DB",
    "SsimParams",
    "TooSmall",
    "psnr",
    "ssim",
    "ssim_plane",
    "DEFAULT_DETECTION_THRESHOLD",
    "InsufficientFrames",
    "ZeroNormEmbedding",
    "clip_frame_consistency",
    "clip_text_alignment",
    "grounding_score",
    "judge_score",
]
