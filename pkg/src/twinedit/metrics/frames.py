"""8-bit frame buffers and colorspace helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# ITU-R BT.601 luma weights
_LUMA = np.array([0.299, 0.587, 0.114])


class DimensionMismatch(Exception):
    pass


@dataclass(frozen=True)
class FrameBuffer:
    width: int
    height: int
    channels: int  # 1 or 3
    samples: bytes  # row-major uint8

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        if len(self.samples) != self.width * self.height * self.channels:
            raise ValueError("sample count must be width*height*channels")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "FrameBuffer":
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        h, w, c = arr.shape
        return cls(w, h, c, arr.tobytes())

    def array(self) -> np.ndarray:
        arr = np.frombuffer(self.samples, dtype=np.uint8)
        return arr.reshape(self.height, self.width, self.channels)

    def luma(self) -> np.ndarray:
        """Single-channel float64 plane; RGB converted with BT.601 weights."""
        arr = self.array().astype(np.float64)
        if self.channels == 1:
            return arr[:, :, 0]
        return arr @ _LUMA


def check_same_shape(a: FrameBuffer, b: FrameBuffer) -> None:
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels):
        raise DimensionMismatch(
            f"{a.width}x{a.height}x{a.channels} vs {b.width}x{b.height}x{b.channels}"
        )
