from .model import (
    FrameTwin,
    MaskRef,
    NotParseable,
    ObjectInstance,
    RleMask,
    SchemaViolation,
    SpatialProps,
    TwinError,
    ValidationReport,
    VideoTwin,
    Violation,
    parse_edit,
    parse_twin,
    serialize_twin,
    validate_against_schema,
    with_instance,
    without_instance,
)
from .diff import ChangedField, TwinDiff, apply_diff, diff_twins, to_text_descriptions
from .rle import decode_mask, encode_mask, load_mask, mask_area_fraction, resolve_mask, save_mask

__all__ = [
    "FrameTwin",
    "MaskRef",
    "NotParseable",
    "ObjectInstance",
    "RleMask",
    "SchemaViolation",
    "SpatialProps",
    "TwinError",
    "ValidationReport",
    "VideoTwin",
    "Violation",
    "parse_edit",
    "parse_twin",
    "serialize_twin",
    "validate_against_schema",
    "with_instance",
    "without_instance",
    "ChangedField",
    "TwinDiff",
    "apply_diff",
    "diff_twins",
    "to_text_descriptions",
    "decode_mask",
    "encode_mask",
    "load_mask",
    "mask_area_fraction",
    "resolve_mask",
    "save_mask",
]
