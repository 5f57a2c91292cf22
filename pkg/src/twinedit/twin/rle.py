"""Run-length encoding of binary masks.

Row-major, alternating run lengths starting with zeros.  Decode is a hot
kernel when twins carry many per-frame masks, so it ships as a numba
``@njit`` loop with a pure-numpy fallback (see twinedit._accel).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .._accel import USE_NUMBA
from .model import MaskRef, RleMask

__all__ = ["encode_mask", "decode_mask", "load_mask", "save_mask", "resolve_mask", "mask_area_fraction"]


def encode_mask(mask: np.ndarray) -> RleMask:
    """Encode a 2-D 0/1 array; first run counts zeros."""
    h, w = mask.shape
    flat = np.asarray(mask, dtype=np.uint8).ravel()
    if flat.size == 0:
        return RleMask((), w, h)
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat[0] == 1:
        runs = [0] + runs
    return RleMask(tuple(runs), w, h)


def _decode_numpy(runs: np.ndarray, width: int, height: int) -> np.ndarray:
    values = np.arange(runs.size, dtype=np.uint8) & 1
    flat = np.repeat(values, runs)
    return flat.reshape(height, width)


if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _decode_flat(runs, n):  # pragma: no cover - jitted
        out = np.zeros(n, dtype=np.uint8)
        pos = 0
        val = np.uint8(0)
        for r in runs:
            if val:
                out[pos : pos + r] = 1
            pos += r
            val = np.uint8(1) - val
        return out

    def _decode(runs: np.ndarray, width: int, height: int) -> np.ndarray:
        return _decode_flat(runs, width * height).reshape(height, width)

else:
    _decode = _decode_numpy


def decode_mask(mask: RleMask) -> np.ndarray:
    """Decode to a (height, width) uint8 array of 0/1."""
    runs = np.asarray(mask.rle, dtype=np.int64)
    if runs.sum() != mask.width * mask.height:
        raise ValueError("run lengths do not cover width*height")
    return _decode(runs, mask.width, mask.height)


def mask_area_fraction(mask: RleMask) -> float:
    """Foreground pixels over frame pixels (the twin 'size' field)."""
    ones = sum(mask.rle[1::2])
    return ones / (mask.width * mask.height)


def save_mask(mask: RleMask, path: Path) -> None:
    path.write_text(
        json.dumps({"rle": list(mask.rle), "width": mask.width, "height": mask.height}),
        encoding="utf-8",
    )


def load_mask(path: Path) -> RleMask:
    doc = json.loads(path.read_text(encoding="utf-8"))
    return RleMask(tuple(doc["rle"]), doc["width"], doc["height"])


def resolve_mask(ref: MaskRef, base_dir: Path | None = None) -> RleMask:
    """Materialize a mask reference: inline payloads pass through, path
    references load the sidecar file relative to base_dir."""
    if isinstance(ref, RleMask):
        return ref
    if base_dir is None:
        raise FileNotFoundError(f"mask path {ref!r} needs a base directory")
    return load_mask(Path(base_dir) / ref)
