"""Client-backed semantic scorers.

These are pure functions of already-obtained client responses (embeddings,
detections, judge verdicts); replaying recorded responses reproduces every
score bit-exactly.  All scores are on the 0..100 percent scale.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..rewards import JudgeVerdict

DEFAULT_DETECTION_THRESHOLD = 0.35


class InsufficientFrames(Exception):
    pass


class ZeroNormEmbedding(Exception):
    pass


def _unit(v: Sequence[float], where: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(arr)
    if n == 0:
        raise ZeroNormEmbedding(where)
    return arr / n


def clip_frame_consistency(frame_embeddings: Sequence[Sequence[float]]) -> float:
    """Mean cosine similarity of consecutive frame embeddings, x100."""
    if len(frame_embeddings) < 2:
        raise InsufficientFrames("frame consistency needs at least 2 frames")
    units = [_unit(e, f"frame {i}") for i, e in enumerate(frame_embeddings)]
    sims = [float(a @ b) for a, b in zip(units, units[1:])]
    return 100.0 * float(np.mean(sims))


def clip_text_alignment(
    frame_embeddings: Sequence[Sequence[float]], text_embedding: Sequence[float]
) -> float:
    """Mean cosine similarity between each frame and the query text, x100."""
    if not frame_embeddings:
        raise InsufficientFrames("text alignment needs at least 1 frame")
    t = _unit(text_embedding, "text")
    sims = [float(_unit(e, f"frame {i}") @ t) for i, e in enumerate(frame_embeddings)]
    return 100.0 * float(np.mean(sims))


def grounding_score(
    detections: Sequence[Sequence[dict] | None],
    target_labels: Sequence[str],
    threshold: float = DEFAULT_DETECTION_THRESHOLD,
) -> float:
    """Fraction of frames where every target label is detected at or above
    the confidence threshold, x100.  Missing frames count as failures."""
    if not detections:
        return 0.0
    hits = 0
    for frame_dets in detections:
        found = {
            d["label"]
            for d in (frame_dets or [])
            if d.get("confidence", 0.0) >= threshold
        }
        if all(label in found for label in target_labels):
            hits += 1
    return 100.0 * hits / len(detections)


def judge_score(verdicts: Sequence[JudgeVerdict]) -> float:
    """Percentage of judged-correct samples."""
    if not verdicts:
        return 0.0
    return 100.0 * sum(1 for v in verdicts if v.correct) / len(verdicts)
