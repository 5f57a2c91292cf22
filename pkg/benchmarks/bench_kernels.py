"""Timing comparison of the jitted kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``.  When numba is not
installed (or TWINEDIT_DISABLE_NUMBA=1), only the numpy path is timed.
"""

import time

import numpy as np

from twinedit._accel import USE_NUMBA, backend_name
from twinedit.metrics.kernels import _filter_valid_numpy, _gaussian_kernel
from twinedit.twin import RleMask, encode_mask
from twinedit.twin.rle import _decode_numpy


def timeit(fn, *args, repeat=20):
    fn(*args)  # warm up (and trigger JIT compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_ssim_filter():
    rng = np.random.default_rng(0)
    img = rng.random((480, 832))
    k = _gaussian_kernel(11, 1.5)
    rows = [("numpy", timeit(_filter_valid_numpy, img, k))]
    if USE_NUMBA:
        from twinedit.metrics.kernels import _filter_valid_numba

        rows.append(("numba", timeit(_filter_valid_numba, img, k)))
        a = _filter_valid_numpy(img, k)
        b = _filter_valid_numba(img, k)
        assert np.abs(a - b).max() < 1e-12, "backends disagree"
    return "ssim separable filter (480x832, 11-tap)", rows


def bench_rle_decode():
    rng = np.random.default_rng(1)
    mask = (rng.random((480, 832)) < 0.3).astype(np.uint8)
    rle = encode_mask(mask)
    runs = np.asarray(rle.rle, dtype=np.int64)
    rows = [("numpy", timeit(_decode_numpy, runs, rle.width, rle.height))]
    if USE_NUMBA:
        from twinedit.twin.rle import _decode

        rows.append(("numba", timeit(_decode, runs, rle.width, rle.height)))
        assert (_decode(runs, rle.width, rle.height) == mask).all(), "backends disagree"
    return f"rle decode (480x832, {len(rle.rle)} runs)", rows


def main():
    print(f"active backend: {backend_name()}")
    for title, rows in (bench_ssim_filter(), bench_rle_decode()):
        print(f"\n{title}")
        base = dict(rows).get("numpy")
        for name, secs in rows:
            speedup = f"  ({base / secs:.1f}x vs numpy)" if name != "numpy" and base else ""
            print(f"  {name:6s} {secs * 1e3:8.3f} ms{speedup}")


if __name__ == "__main__":
    main()
