from .manifest import (
    BenchmarkManifest,
    BenchmarkSample,
    InvalidCategory,
    InvalidLevel,
    ManifestError,
    MissingVideo,
    NotParseable,
    dump_manifest,
    load_manifest,
)
from .report import render_report
from .runner import EvalRunReport, SampleResult, run_eval

__all__ = [
    "BenchmarkManifest",
    "BenchmarkSample",
    "InvalidCategory",
    "InvalidLevel",
    "ManifestError",
    "MissingVideo",
    "NotParseable",
    "dump_manifest",
    "load_manifest",
    "render_report",
    "EvalRunReport",
    "SampleResult",
    "run_eval",
]
