"""Benchmark manifest loading and validation.

Manifests are line-delimited JSON, one sample per line:
{"sample_id": str, "video_ref": str, "query": str, "level": 1|2|3,
 "category": "semantic"|"spatial"|"temporal", "target_masks": [ref...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..metrics import CATEGORIES, LEVELS


class ManifestError(Exception):
    pass


class NotParseable(ManifestError):
    pass


class InvalidLevel(ManifestError):
    def __init__(self, sample_id: str, level):
        super().__init__(f"{sample_id}: level {level!r} not in {LEVELS}")
        self.sample_id = sample_id


class InvalidCategory(ManifestError):
    def __init__(self, sample_id: str, category):
        super().__init__(f"{sample_id}: category {category!r} not in {CATEGORIES}")
        self.sample_id = sample_id


class MissingVideo(ManifestError):
    def __init__(self, sample_id: str, path: str):
        super().__init__(f"{sample_id}: video_ref {path} does not exist")
        self.sample_id = sample_id


@dataclass(frozen=True)
class BenchmarkSample:
    sample_id: str
    video_ref: str
    query: str
    level: int
    category: str
    target_masks: tuple[str, ...] = ()
    target_labels: tuple[str, ...] = ()


@dataclass(frozen=True)
class BenchmarkManifest:
    name: str
    samples: tuple[BenchmarkSample, ...]

    @property
    def counts(self) -> dict:
        by_level = {lv: 0 for lv in LEVELS}
        by_category = {c: 0 for c in CATEGORIES}
        for s in self.samples:
            by_level[s.level] += 1
            by_category[s.category] += 1
        return {"total": len(self.samples), "by_level": by_level, "by_category": by_category}


def load_manifest(path: Path, check_videos: bool = True) -> BenchmarkManifest:
    path = Path(path)
    samples = []
    seen = set()
    base = path.parent
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise NotParseable(f"{path}:{lineno}: {exc}") from exc
        sid = str(doc.get("sample_id", f"line-{lineno}"))
        if sid in seen:
            raise ManifestError(f"{sid}: duplicate sample_id")
        seen.add(sid)
        level = doc.get("level")
        if level not in LEVELS:
            raise InvalidLevel(sid, level)
        category = doc.get("category")
        if category not in CATEGORIES:
            raise InvalidCategory(sid, category)
        video_ref = str(doc.get("video_ref", ""))
        resolved = base / video_ref
        if check_videos and not resolved.exists():
            raise MissingVideo(sid, str(resolved))
        samples.append(
            BenchmarkSample(
                sample_id=sid,
                video_ref=str(resolved),
                query=str(doc.get("query", "")),
                level=level,
                category=category,
                target_masks=tuple(doc.get("target_masks", [])),
                target_labels=tuple(doc.get("target_labels", [])),
            )
        )
    return BenchmarkManifest(path.stem, tuple(samples))


def dump_manifest(manifest: BenchmarkManifest, base: Path | None = None) -> str:
    lines = []
    for s in manifest.samples:
        video_ref = s.video_ref
        if base is not None:
            try:
                video_ref = str(Path(s.video_ref).relative_to(base))
            except ValueError:
                pass
        lines.append(
            json.dumps(
                {
                    "sample_id": s.sample_id,
                    "video_ref": video_ref,
                    "query": s.query,
                    "level": s.level,
                    "category": s.category,
                    "target_masks": list(s.target_masks),
                    "target_labels": list(s.target_labels),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"
