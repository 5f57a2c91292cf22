"""Full-reference quality kernels: PSNR and SSIM.

SSIM's local statistics are the hot loop (separable 11-tap Gaussian over
every pixel), so it ships as a numba ``@njit`` kernel with a pure-numpy
sliding-window fallback; see twinedit._accel for backend selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._accel import USE_NUMBA
from .frames import FrameBuffer, check_same_shape

PSNR_CAP_DB = 100.0


class TooSmall(Exception):
    pass


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 255.0


def psnr(a: FrameBuffer, b: FrameBuffer) -> float:
    """10*log10(255^2 / MSE) in dB, capped at 100 for identical frames."""
    check_same_shape(a, b)
    x = a.array().astype(np.float64)
    y = b.array().astype(np.float64)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * math.log10(255.0**2 / mse))


def _gaussian_kernel(window: int, sigma: float) -> np.ndarray:
    radius = window // 2
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def _filter_valid_numpy(img: np.ndarray, k: np.ndarray) -> np.ndarray:
    from numpy.lib.stride_tricks import sliding_window_view

    tmp = sliding_window_view(img, len(k), axis=1) @ k
    return sliding_window_view(tmp, len(k), axis=0) @ k


if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _filter_valid_numba(img, k):  # pragma: no cover - jitted
        h, w = img.shape
        m = k.size
        ow = w - m + 1
        oh = h - m + 1
        tmp = np.empty((h, ow))
        for i in range(h):
            for j in range(ow):
                acc = 0.0
                for u in range(m):
                    acc += img[i, j + u] * k[u]
                tmp[i, j] = acc
        out = np.empty((oh, ow))
        for i in range(oh):
            for j in range(ow):
                acc = 0.0
                for u in range(m):
                    acc += tmp[i + u, j] * k[u]
                out[i, j] = acc
        return out

    _filter_valid = _filter_valid_numba
else:
    _filter_valid = _filter_valid_numpy


def ssim_plane(x: np.ndarray, y: np.ndarray, params: SsimParams = SsimParams()) -> float:
    """Mean local SSIM of two single-channel float planes (population
    covariance, Gaussian window, valid region only)."""
    if x.shape != y.shape:
        raise ValueError("planes must share a shape")
    if min(x.shape) < params.window:
        raise TooSmall(f"plane smaller than the {params.window}x{params.window} window")
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    k = _gaussian_kernel(params.window, params.sigma)
    ux = _filter_valid(x, k)
    uy = _filter_valid(y, k)
    uxx = _filter_valid(x * x, k)
    uyy = _filter_valid(y * y, k)
    uxy = _filter_valid(x * y, k)
    vx = uxx - ux * ux
    vy = uyy - uy * uy
    vxy = uxy - ux * uy
    c1 = (params.k1 * params.data_range) ** 2
    c2 = (params.k2 * params.data_range) ** 2
    s = ((2 * ux * uy + c1) * (2 * vxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
    return float(s.mean())


def ssim(a: FrameBuffer, b: FrameBuffer, params: SsimParams = SsimParams()) -> float:
    """SSIM between two frames; RGB inputs are converted to BT.601 luma."""
    check_same_shape(a, b)
    return ssim_plane(a.luma(), b.luma(), params)
