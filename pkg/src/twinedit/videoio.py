"""Frame-directory video I/O.

Videos are ingested as directories of zero-padded numbered image files plus
an ``index.json`` ({"frame_count": n, "pattern": "frame_{:04d}.png"}), so
no codec handling is needed.  See docs/video_ingest.md for converting real
videos into this layout.
"""

from __future__ import annotations

import base64
import io
import json
from pathlib import Path

import numpy as np
from PIL import Image

from .metrics import FrameBuffer

DEFAULT_PATTERN = "frame_{:04d}.png"


class MissingVideo(Exception):
    pass


def write_frame_dir(path: Path, frames: list[np.ndarray], pattern: str = DEFAULT_PATTERN) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    for t, arr in enumerate(frames):
        Image.fromarray(arr).save(path / pattern.format(t))
    (path / "index.json").write_text(
        json.dumps({"frame_count": len(frames), "pattern": pattern}), encoding="utf-8"
    )


def read_frame_dir(path: Path) -> list[FrameBuffer]:
    path = Path(path)
    index = path / "index.json"
    if not index.exists():
        raise MissingVideo(f"{path} has no index.json")
    doc = json.loads(index.read_text(encoding="utf-8"))
    pattern = doc.get("pattern", DEFAULT_PATTERN)
    frames = []
    for t in range(doc["frame_count"]):
        img = Image.open(path / pattern.format(t))
        arr = np.asarray(img.convert("L" if img.mode == "L" else "RGB"), dtype=np.uint8)
        frames.append(FrameBuffer.from_array(arr))
    return frames


def frame_to_b64(frame: FrameBuffer) -> str:
    buf = io.BytesIO()
    arr = frame.array()
    Image.fromarray(arr[:, :, 0] if frame.channels == 1 else arr).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def b64_to_frame(payload: str) -> FrameBuffer:
    img = Image.open(io.BytesIO(base64.b64decode(payload)))
    arr = np.asarray(img.convert("L" if img.mode == "L" else "RGB"), dtype=np.uint8)
    return FrameBuffer.from_array(arr)
