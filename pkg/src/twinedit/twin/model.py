"""Digital twin representation of a video.

A twin describes a video frame by frame as a set of object instances, each
carrying a stable id, a category, free-text attributes, a segmentation mask
reference and normalized spatial properties.  Twins are immutable values;
every operation here is a pure function.

Wire format (UTF-8 JSON, canonical key order)::

    {"frame_count": T, "metadata": {...}, "frames": [
        {"frame_index": t, "instances": [
            {"id": i, "category": str, "attributes": [str...],
             "mask_ref": str | {"rle": [int...], "width": w, "height": h},
             "spatial": {"x": f, "y": f, "depth": f, "size": f}}]}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Union

__all__ = [
    "SpatialProps",
    "RleMask",
    "MaskRef",
    "ObjectInstance",
    "FrameTwin",
    "VideoTwin",
    "Violation",
    "ValidationReport",
    "TwinError",
    "NotParseable",
    "SchemaViolation",
    "parse_twin",
    "serialize_twin",
    "validate_against_schema",
]


class TwinError(Exception):
    """Base class for twin document errors."""


class NotParseable(TwinError):
    """The document is not syntactically valid JSON."""


class SchemaViolation(TwinError):
    """The document parses but violates the twin schema."""

    def __init__(self, path: str, kind: str, message: str):
        super().__init__(f"{path}: {kind}: {message}")
        self.path = path
        self.kind = kind
        self.message = message


@dataclass(frozen=True)
class SpatialProps:
    """Normalized centroid, relative depth and area fraction of an instance."""

    x: float
    y: float
    depth: float
    size: float


@dataclass(frozen=True)
class RleMask:
    """Row-major run-length encoded binary mask.

    Runs alternate zeros/ones and the first run counts zeros; run lengths
    sum to width * height.
    """

    rle: tuple[int, ...]
    width: int
    height: int


MaskRef = Union[str, RleMask]


@dataclass(frozen=True)
class ObjectInstance:
    id: int
    category: str
    attributes: tuple[str, ...]
    mask_ref: MaskRef
    spatial: SpatialProps


@dataclass(frozen=True)
class FrameTwin:
    frame_index: int
    instances: tuple[ObjectInstance, ...]

    def instance(self, obj_id: int) -> ObjectInstance | None:
        for inst in self.instances:
            if inst.id == obj_id:
                return inst
        return None


@dataclass(frozen=True)
class VideoTwin:
    frame_count: int
    frames: tuple[FrameTwin, ...]
    metadata: tuple[tuple[str, str], ...] = ()

    @property
    def metadata_dict(self) -> dict[str, str]:
        return dict(self.metadata)

    def frame(self, index: int) -> FrameTwin:
        return self.frames[index]


@dataclass(frozen=True)
class Violation:
    path: str
    kind: str  # not_parseable | missing_field | type_mismatch | range_violation | id_conflict
    message: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...] = ()


_SPATIAL_FIELDS = ("x", "y", "depth", "size")


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_spatial(obj, path: str, out: list[Violation], check_ranges: bool) -> SpatialProps | None:
    if not isinstance(obj, dict):
        out.append(Violation(path, "type_mismatch", "spatial must be an object"))
        return None
    vals = {}
    ok = True
    for name in _SPATIAL_FIELDS:
        p = f"{path}.{name}"
        if name not in obj:
            out.append(Violation(p, "missing_field", f"spatial field '{name}' is required"))
            ok = False
            continue
        v = obj[name]
        if not _is_num(v):
            out.append(Violation(p, "type_mismatch", f"expected number, got {type(v).__name__}"))
            ok = False
            continue
        vals[name] = float(v)
        if check_ranges:
            lo_ok = v > 0 if name == "size" else v >= 0
            if not (lo_ok and v <= 1):
                bound = "(0, 1]" if name == "size" else "[0, 1]"
                out.append(Violation(p, "range_violation", f"{name}={v} outside {bound}"))
                ok = False
    return SpatialProps(**vals) if ok else None


def _check_mask_ref(v, path: str, out: list[Violation]) -> MaskRef | None:
    if isinstance(v, str):
        if not v:
            out.append(Violation(path, "type_mismatch", "mask_ref path must be non-empty"))
            return None
        return v
    if isinstance(v, dict):
        for name, typ in (("rle", list), ("width", int), ("height", int)):
            if name not in v:
                out.append(Violation(f"{path}.{name}", "missing_field", f"inline mask requires '{name}'"))
                return None
            if not isinstance(v[name], typ) or isinstance(v[name], bool):
                out.append(Violation(f"{path}.{name}", "type_mismatch", f"expected {typ.__name__}"))
                return None
        runs = v["rle"]
        if not all(isinstance(r, int) and not isinstance(r, bool) and r >= 0 for r in runs):
            out.append(Violation(f"{path}.rle", "type_mismatch", "run lengths must be non-negative ints"))
            return None
        if sum(runs) != v["width"] * v["height"]:
            out.append(
                Violation(f"{path}.rle", "range_violation", "run lengths must sum to width*height")
            )
            return None
        return RleMask(tuple(runs), v["width"], v["height"])
    out.append(Violation(path, "type_mismatch", "mask_ref must be a path or an inline RLE object"))
    return None


def _check_instance(obj, path: str, out: list[Violation], check_ranges: bool) -> ObjectInstance | None:
    if not isinstance(obj, dict):
        out.append(Violation(path, "type_mismatch", "instance must be an object"))
        return None
    ok = True
    obj_id = None
    if "id" not in obj:
        out.append(Violation(f"{path}.id", "missing_field", "instance id is required"))
        ok = False
    elif not isinstance(obj["id"], int) or isinstance(obj["id"], bool):
        out.append(Violation(f"{path}.id", "type_mismatch", "id must be an integer"))
        ok = False
    elif obj["id"] < 0:
        out.append(Violation(f"{path}.id", "range_violation", "id must be non-negative"))
        ok = False
    else:
        obj_id = obj["id"]

    category = None
    if "category" not in obj:
        out.append(Violation(f"{path}.category", "missing_field", "category is required"))
        ok = False
    elif not isinstance(obj["category"], str):
        out.append(Violation(f"{path}.category", "type_mismatch", "category must be a string"))
        ok = False
    elif not obj["category"]:
        out.append(Violation(f"{path}.category", "range_violation", "category must be non-empty"))
        ok = False
    else:
        category = obj["category"]

    attributes = None
    if "attributes" not in obj:
        out.append(Violation(f"{path}.attributes", "missing_field", "attributes is required"))
        ok = False
    elif not isinstance(obj["attributes"], list) or not all(
        isinstance(a, str) for a in obj["attributes"]
    ):
        out.append(Violation(f"{path}.attributes", "type_mismatch", "attributes must be a list of strings"))
        ok = False
    elif any(not a for a in obj["attributes"]):
        out.append(Violation(f"{path}.attributes", "range_violation", "attribute text must be non-empty"))
        ok = False
    else:
        attributes = tuple(obj["attributes"])

    mask_ref = None
    if "mask_ref" not in obj:
        out.append(Violation(f"{path}.mask_ref", "missing_field", "mask_ref is required"))
        ok = False
    else:
        mask_ref = _check_mask_ref(obj["mask_ref"], f"{path}.mask_ref", out)
        ok = ok and mask_ref is not None

    spatial = None
    if "spatial" not in obj:
        out.append(Violation(f"{path}.spatial", "missing_field", "spatial is required"))
        ok = False
    else:
        spatial = _check_spatial(obj["spatial"], f"{path}.spatial", out, check_ranges)
        ok = ok and spatial is not None

    if not ok:
        return None
    return ObjectInstance(obj_id, category, attributes, mask_ref, spatial)


def _check_document(doc, out: list[Violation], check_ranges: bool) -> VideoTwin | None:
    if not isinstance(doc, dict):
        out.append(Violation("$", "type_mismatch", "top level must be an object"))
        return None
    ok = True
    if "frame_count" not in doc:
        out.append(Violation("$.frame_count", "missing_field", "frame_count is required"))
        ok = False
    elif not isinstance(doc["frame_count"], int) or isinstance(doc["frame_count"], bool):
        out.append(Violation("$.frame_count", "type_mismatch", "frame_count must be an integer"))
        ok = False
    elif doc["frame_count"] < 1:
        out.append(Violation("$.frame_count", "range_violation", "frame_count must be >= 1"))
        ok = False

    metadata: tuple[tuple[str, str], ...] = ()
    if "metadata" in doc:
        md = doc["metadata"]
        if not isinstance(md, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in md.items()
        ):
            out.append(Violation("$.metadata", "type_mismatch", "metadata must map strings to strings"))
            ok = False
        else:
            metadata = tuple(sorted(md.items()))

    frames: list[FrameTwin] = []
    if "frames" not in doc:
        out.append(Violation("$.frames", "missing_field", "frames is required"))
        ok = False
    elif not isinstance(doc["frames"], list):
        out.append(Violation("$.frames", "type_mismatch", "frames must be a list"))
        ok = False
    else:
        for pos, frame in enumerate(doc["frames"]):
            fpath = f"$.frames[{pos}]"
            if not isinstance(frame, dict):
                out.append(Violation(fpath, "type_mismatch", "frame must be an object"))
                ok = False
                continue
            if "frame_index" not in frame:
                out.append(Violation(f"{fpath}.frame_index", "missing_field", "frame_index is required"))
                ok = False
            elif not isinstance(frame["frame_index"], int) or isinstance(frame["frame_index"], bool):
                out.append(Violation(f"{fpath}.frame_index", "type_mismatch", "frame_index must be an integer"))
                ok = False
            elif frame["frame_index"] != pos:
                out.append(
                    Violation(
                        f"{fpath}.frame_index",
                        "range_violation",
                        f"frame_index {frame['frame_index']} must equal position {pos}",
                    )
                )
                ok = False
            insts: list[ObjectInstance] = []
            seen_ids: set[int] = set()
            if "instances" not in frame:
                out.append(Violation(f"{fpath}.instances", "missing_field", "instances is required"))
                ok = False
            elif not isinstance(frame["instances"], list):
                out.append(Violation(f"{fpath}.instances", "type_mismatch", "instances must be a list"))
                ok = False
            else:
                for ipos, inst in enumerate(frame["instances"]):
                    parsed = _check_instance(inst, f"{fpath}.instances[{ipos}]", out, check_ranges)
                    if parsed is None:
                        ok = False
                        continue
                    if parsed.id in seen_ids:
                        out.append(
                            Violation(
                                f"{fpath}.instances[{ipos}].id",
                                "id_conflict",
                                f"id {parsed.id} already used in frame {pos}",
                            )
                        )
                        ok = False
                        continue
                    seen_ids.add(parsed.id)
                    insts.append(parsed)
            insts.sort(key=lambda o: o.id)
            frames.append(FrameTwin(pos, tuple(insts)))

    if ok and doc.get("frame_count") != len(frames):
        out.append(
            Violation(
                "$.frame_count",
                "range_violation",
                f"frame_count {doc['frame_count']} != number of frames {len(frames)}",
            )
        )
        ok = False

    if not ok:
        return None
    return VideoTwin(len(frames), tuple(frames), metadata)


def parse_twin(text: str) -> VideoTwin:
    """Parse a twin document, raising on the first schema problem.

    Raises NotParseable for JSON syntax errors and SchemaViolation (with a
    document path) for missing fields, wrong types, out-of-range values and
    duplicate ids.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotParseable(str(exc)) from exc
    violations: list[Violation] = []
    twin = _check_document(doc, violations, check_ranges=True)
    if twin is None:
        v = violations[0]
        raise SchemaViolation(v.path, v.kind, v.message)
    return twin


def _round6(v: float):
    r = round(float(v), 6)
    return int(r) if r == int(r) and abs(r) < 1e15 else r


def _mask_ref_doc(ref: MaskRef):
    if isinstance(ref, str):
        return ref
    return {"rle": list(ref.rle), "width": ref.width, "height": ref.height}


def serialize_twin(twin: VideoTwin) -> str:
    """Canonical serialization: fixed key order, instances sorted by id,
    frames by index, numbers rounded to 6 fractional digits (half-to-even).
    """
    doc = {
        "frame_count": twin.frame_count,
        "metadata": {k: v for k, v in sorted(twin.metadata)},
        "frames": [
            {
                "frame_index": frame.frame_index,
                "instances": [
                    {
                        "id": inst.id,
                        "category": inst.category,
                        "attributes": list(inst.attributes),
                        "mask_ref": _mask_ref_doc(inst.mask_ref),
                        "spatial": {
                            "x": _round6(inst.spatial.x),
                            "y": _round6(inst.spatial.y),
                            "depth": _round6(inst.spatial.depth),
                            "size": _round6(inst.spatial.size),
                        },
                    }
                    for inst in sorted(frame.instances, key=lambda o: o.id)
                ],
            }
            for frame in sorted(twin.frames, key=lambda f: f.frame_index)
        ],
    }
    return json.dumps(doc, separators=(", ", ": "), ensure_ascii=False)


def validate_against_schema(candidate: str, reference: VideoTwin) -> ValidationReport:
    """Structural validity check used by the edit-format reward.

    Valid iff the candidate parses as JSON, every instance carries every
    schema-required field, and field types match the schema.  Added,
    removed or value-changed instances are edits, not violations, so the
    reference twin only anchors the schema; value ranges are not enforced
    here.  All failures are report entries, never exceptions.
    """
    del reference  # schema is fixed; the reference anchors the call site
    try:
        doc = json.loads(candidate)
    except json.JSONDecodeError as exc:
        return ValidationReport(False, (Violation("$", "not_parseable", str(exc)),))
    violations: list[Violation] = []
    # Spatial value ranges are skipped (an edit may move things anywhere);
    # structural rules (frame ordering, id uniqueness, frame_count
    # consistency) still apply.
    _check_document(doc, violations, check_ranges=False)
    if violations:
        return ValidationReport(False, tuple(violations))
    return ValidationReport(True, ())


def parse_edit(text: str) -> VideoTwin:
    """Lenient parse used on edited twins: schema structure and types are
    enforced, value ranges are not (mirrors validate_against_schema)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotParseable(str(exc)) from exc
    violations: list[Violation] = []
    twin = _check_document(doc, violations, check_ranges=False)
    if twin is None:
        v = violations[0]
        raise SchemaViolation(v.path, v.kind, v.message)
    return twin


def with_instance(twin: VideoTwin, frame_index: int, inst: ObjectInstance) -> VideoTwin:
    """Return a copy of the twin with one instance replaced or added."""
    frames = list(twin.frames)
    frame = frames[frame_index]
    others = tuple(o for o in frame.instances if o.id != inst.id)
    frames[frame_index] = replace(frame, instances=tuple(sorted(others + (inst,), key=lambda o: o.id)))
    return replace(twin, frames=tuple(frames))


def without_instance(twin: VideoTwin, frame_index: int, obj_id: int) -> VideoTwin:
    frames = list(twin.frames)
    frame = frames[frame_index]
    frames[frame_index] = replace(
        frame, instances=tuple(o for o in frame.instances if o.id != obj_id)
    )
    return replace(twin, frames=tuple(frames))
