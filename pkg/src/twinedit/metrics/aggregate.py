"""Per-level / per-category aggregation of sample metric reports."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

METRIC_ORDER = ("psnr", "ssim", "clip_text", "clip_f", "musiq", "grounding", "judge")

LEVELS = (1, 2, 3)
CATEGORIES = ("semantic", "spatial", "temporal")


@dataclass(frozen=True)
class MetricReport:
    """Scores for one sample (percent scale except psnr dB), plus optional
    per-frame series for frame-wise metrics."""

    scores: tuple[tuple[str, float], ...]
    frame_series: tuple[tuple[str, tuple[float, ...]], ...] = ()

    @classmethod
    def from_dict(cls, scores: dict[str, float], series: dict[str, list[float]] | None = None):
        return cls(
            tuple(sorted(scores.items())),
            tuple(sorted((k, tuple(v)) for k, v in (series or {}).items())),
        )

    @property
    def scores_dict(self) -> dict[str, float]:
        return dict(self.scores)


@dataclass(frozen=True)
class Cell:
    mean: float
    std: float  # population
    n: int


@dataclass(frozen=True)
class AggregateTable:
    """Rows keyed (metric, group_kind, group_key); group_kind is "level",
    "category" or "all"."""

    cells: tuple[tuple[tuple[str, str, str], Cell], ...]

    def cell(self, metric: str, kind: str, key: str) -> Cell | None:
        return dict(self.cells).get((metric, kind, key))

    def metrics(self) -> list[str]:
        seen = {m for (m, _, _), _ in self.cells}
        ordered = [m for m in METRIC_ORDER if m in seen]
        return ordered + sorted(seen - set(ordered))


def _metric_sort_key(name: str):
    return (METRIC_ORDER.index(name), "") if name in METRIC_ORDER else (len(METRIC_ORDER), name)


def aggregate(tagged_reports: list[tuple[int, str, MetricReport]]) -> AggregateTable:
    """Aggregate (level, category, report) triples.

    Means and population stds per metric per level, per category and
    overall; groups with no samples simply have no cell.  Deterministic and
    permutation-invariant: accumulation is sorted before reduction.
    """
    buckets: dict[tuple[str, str, str], list[float]] = {}
    for level, category, report in tagged_reports:
        for metric, score in report.scores:
            buckets.setdefault((metric, "level", str(level)), []).append(score)
            buckets.setdefault((metric, "category", category), []).append(score)
            buckets.setdefault((metric, "all", "all"), []).append(score)
    cells = []
    for key in sorted(buckets, key=lambda k: (_metric_sort_key(k[0]), k[1], k[2])):
        vals = np.asarray(sorted(buckets[key]), dtype=np.float64)
        cells.append((key, Cell(float(vals.mean()), float(vals.std()), len(vals))))
    return AggregateTable(tuple(cells))
