"""Field-level diffs between twins and their conditioning-text rendering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .model import ObjectInstance, VideoTwin, with_instance, without_instance

__all__ = ["ChangedField", "TwinDiff", "diff_twins", "apply_diff", "to_text_descriptions"]

_FIELDS = ("category", "attributes", "mask_ref", "spatial.x", "spatial.y", "spatial.depth", "spatial.size")


@dataclass(frozen=True)
class ChangedField:
    frame_index: int
    id: int
    field_path: str
    old_value: Any
    new_value: Any


@dataclass(frozen=True)
class TwinDiff:
    changed: tuple[ChangedField, ...]
    removed: tuple[tuple[int, int], ...]  # (frame_index, id)
    added: tuple[tuple[int, ObjectInstance], ...]

    @property
    def empty(self) -> bool:
        return not (self.changed or self.removed or self.added)

    def modified_keys(self) -> set[tuple[int, int]]:
        """All (frame, id) pairs touched by the diff."""
        keys = {(c.frame_index, c.id) for c in self.changed}
        keys |= set(self.removed)
        keys |= {(f, inst.id) for f, inst in self.added}
        return keys


def _field_value(inst: ObjectInstance, path: str):
    if path.startswith("spatial."):
        return getattr(inst.spatial, path.split(".", 1)[1])
    return getattr(inst, path)


def diff_twins(original: VideoTwin, edited: VideoTwin) -> TwinDiff:
    """Minimal field-level delta keyed on (frame_index, id)."""
    changed: list[ChangedField] = []
    removed: list[tuple[int, int]] = []
    added: list[tuple[int, ObjectInstance]] = []
    n = max(original.frame_count, edited.frame_count)
    for t in range(n):
        orig = {o.id: o for o in original.frames[t].instances} if t < original.frame_count else {}
        edit = {o.id: o for o in edited.frames[t].instances} if t < edited.frame_count else {}
        for i in sorted(orig.keys() | edit.keys()):
            a, b = orig.get(i), edit.get(i)
            if a is None:
                added.append((t, b))
            elif b is None:
                removed.append((t, i))
            else:
                for path in _FIELDS:
                    va, vb = _field_value(a, path), _field_value(b, path)
                    if va != vb:
                        changed.append(ChangedField(t, i, path, va, vb))
    return TwinDiff(tuple(changed), tuple(removed), tuple(added))


def apply_diff(original: VideoTwin, diff: TwinDiff) -> VideoTwin:
    """Replay a diff; diff_twins(a, b) applied to a reconstructs b."""
    twin = original
    for t, i in diff.removed:
        twin = without_instance(twin, t, i)
    for t, inst in diff.added:
        twin = with_instance(twin, t, inst)
    for c in diff.changed:
        inst = twin.frames[c.frame_index].instance(c.id)
        if c.field_path.startswith("spatial."):
            from dataclasses import replace

            leaf = c.field_path.split(".", 1)[1]
            inst = replace(inst, spatial=replace(inst.spatial, **{leaf: c.new_value}))
        else:
            from dataclasses import replace

            inst = replace(inst, **{c.field_path: c.new_value})
        twin = with_instance(twin, c.frame_index, inst)
    return twin


def to_text_descriptions(edited: VideoTwin, diff: TwinDiff) -> list[str]:
    """One conditioning sentence per modified (frame, object), ordered by
    (frame, id): "In frame {t}, object {i} with category {c} has
    attributes {a1, a2, ...}."  Removed objects have no row here (they are
    carried as spatial guidance with a removal flag instead).
    """
    keys = sorted(k for k in diff.modified_keys() if k not in set(diff.removed))
    lines = []
    for t, i in keys:
        inst = edited.frames[t].instance(i)
        attrs = ", ".join(inst.attributes)
        lines.append(
            f"In frame {t}, object {i} with category {inst.category} has attributes {attrs}."
        )
    return lines
