import json
from pathlib import Path

import numpy as np
import pytest

from twinedit.bench import dump_manifest, BenchmarkManifest, BenchmarkSample
from twinedit.twin import (
    FrameTwin,
    ObjectInstance,
    RleMask,
    SpatialProps,
    VideoTwin,
    serialize_twin,
)
from twinedit.videoio import write_frame_dir

_CATEGORIES = ["dog", "cat", "car", "bird", "cup", "ball"]
_ATTRS = ["brown", "red", "small", "shiny", "furry", "striped"]


def _spatial(rng) -> SpatialProps:
    return SpatialProps(
        x=round(float(rng.uniform(0, 1)), 6),
        y=round(float(rng.uniform(0, 1)), 6),
        depth=round(float(rng.uniform(0, 1)), 6),
        size=round(float(rng.uniform(0.01, 0.9)), 6),
    )


def _mask(rng) -> RleMask | str:
    if rng.random() < 0.5:
        return f"masks/{rng.integers(0, 100)}.rle"
    w, h = int(rng.integers(2, 6)), int(rng.integers(2, 6))
    total = w * h
    runs = []
    left = total
    while left > 0:
        r = int(rng.integers(1, left + 1))
        runs.append(r)
        left -= r
    return RleMask(tuple(runs), w, h)


def random_twin(rng, max_frames: int = 5, max_objects: int = 6) -> VideoTwin:
    """Random valid twin; ids may differ between frames."""
    t = int(rng.integers(1, max_frames + 1))
    frames = []
    for fi in range(t):
        n = int(rng.integers(0, max_objects + 1))
        ids = sorted(rng.choice(20, size=n, replace=False).tolist())
        frames.append(
            FrameTwin(
                fi,
                tuple(
                    ObjectInstance(
                        id=int(i),
                        category=str(rng.choice(_CATEGORIES)),
                        attributes=tuple(
                            str(a)
                            for a in rng.choice(_ATTRS, size=int(rng.integers(0, 3)), replace=False)
                        ),
                        mask_ref=_mask(rng),
                        spatial=_spatial(rng),
                    )
                    for i in ids
                ),
            )
        )
    meta = (("source", f"vid-{int(rng.integers(0, 999))}"),) if rng.random() < 0.5 else ()
    return VideoTwin(t, tuple(frames), meta)


def uniform_twin(rng, max_frames: int = 5, max_objects: int = 6) -> VideoTwin:
    """Random twin where ids 0..n-1 are present in every frame (tracked
    objects), convenient for temporal query programs."""
    t = int(rng.integers(1, max_frames + 1))
    n = int(rng.integers(1, max_objects + 1))
    cats = [str(rng.choice(_CATEGORIES)) for _ in range(n)]
    frames = []
    for fi in range(t):
        frames.append(
            FrameTwin(
                fi,
                tuple(
                    ObjectInstance(
                        id=i,
                        category=cats[i],
                        attributes=(str(rng.choice(_ATTRS)),),
                        mask_ref=f"masks/{fi}_{i}.rle",
                        spatial=_spatial(rng),
                    )
                    for i in range(n)
                ),
            )
        )
    return VideoTwin(t, tuple(frames))


MINIMAL_TWIN_TEXT = json.dumps(
    {
        "frame_count": 1,
        "metadata": {},
        "frames": [
            {
                "frame_index": 0,
                "instances": [
                    {
                        "id": 0,
                        "category": "dog",
                        "attributes": ["brown"],
                        "mask_ref": "m/0_0.rle",
                        "spatial": {"x": 0.5, "y": 0.5, "depth": 0.3, "size": 0.1},
                    }
                ],
            }
        ],
    }
)


@pytest.fixture
def minimal_twin_text():
    return MINIMAL_TWIN_TEXT


def two_object_twin() -> VideoTwin:
    """Objects A(x=0.2) and B(x=0.8) on one frame."""
    mk = lambda i, x, depth: ObjectInstance(
        i, "dog" if i == 0 else "cat", ("brown",), f"m/{i}.rle", SpatialProps(x, 0.5, depth, 0.1)
    )
    return VideoTwin(1, (FrameTwin(0, (mk(0, 0.2, 0.3), mk(1, 0.8, 0.7))),))


@pytest.fixture
def pair_twin():
    return two_object_twin()


def _pattern_frame(seed: int, t: int, size: int = 24) -> np.ndarray:
    rng = np.random.default_rng(seed * 101 + t)
    base = np.linspace(0, 200, size, dtype=np.float64)
    img = np.stack([np.tile(base, (size, 1))] * 3, axis=-1)
    img += rng.integers(0, 40, size=(size, size, 3))
    return np.clip(img, 0, 255).astype(np.uint8)


def build_bench_fixture(root: Path) -> Path:
    """3-sample benchmark fixture: frame dirs, fixture twins, manifest."""
    root = Path(root)
    specs = [
        ("s01", 1, "semantic", "make the dog golden", "dog"),
        ("s02", 2, "spatial", "brighten the cat on the left", "cat"),
        ("s03", 3, "temporal", "recolor the car that moves the most", "car"),
    ]
    samples = []
    for k, (sid, level, category, query, label) in enumerate(specs):
        vdir = root / f"videos/{sid}"
        write_frame_dir(vdir, [_pattern_frame(k, t) for t in range(3)])
        twin = VideoTwin(
            3,
            tuple(
                FrameTwin(
                    t,
                    (
                        ObjectInstance(
                            0,
                            label,
                            ("plain",),
                            RleMask((100, 44, 432), 24, 24),
                            SpatialProps(0.25 + 0.05 * t, 0.5, 0.4, 0.076389),
                        ),
                        ObjectInstance(
                            1,
                            "tree",
                            ("green",),
                            RleMask((300, 22, 254), 24, 24),
                            SpatialProps(0.75, 0.3, 0.8, 0.038194),
                        ),
                    ),
                )
                for t in range(3)
            ),
        )
        (vdir / "twin.json").write_text(serialize_twin(twin) + "\n", encoding="utf-8")
        samples.append(
            BenchmarkSample(
                sample_id=sid,
                video_ref=f"videos/{sid}",
                query=query,
                level=level,
                category=category,
                target_labels=(label,),
            )
        )
    manifest_path = root / "manifest.jsonl"
    manifest_path.write_text(
        dump_manifest(BenchmarkManifest("fixture", tuple(samples))), encoding="utf-8"
    )
    return manifest_path


@pytest.fixture
def bench_fixture(tmp_path):
    return build_bench_fixture(tmp_path)
