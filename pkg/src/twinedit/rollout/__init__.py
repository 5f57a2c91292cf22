from .loop import (
    PROTOCOL_INSTRUCTIONS,
    STOP_SEQUENCES,
    ExecOutcome,
    LoopConfig,
    ReasonerUnreachable,
    build_prompt,
    drive_loop,
    run_execute_block,
)
from .parser import (
    NoEditSegment,
    ParseIssue,
    RolloutTranscript,
    Segment,
    SegmentKind,
    extract_edit,
    parse_rollout,
    validate_sequence,
)

__all__ = [
    "PROTOCOL_INSTRUCTIONS",
    "STOP_SEQUENCES",
    "ExecOutcome",
    "LoopConfig",
    "ReasonerUnreachable",
    "build_prompt",
    "drive_loop",
    "run_execute_block",
    "NoEditSegment",
    "ParseIssue",
    "RolloutTranscript",
    "Segment",
    "SegmentKind",
    "extract_edit",
    "parse_rollout",
    "validate_sequence",
]
