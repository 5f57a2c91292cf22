import json

import numpy as np
import pytest

from twinedit.twin import (
    NotParseable,
    RleMask,
    SchemaViolation,
    apply_diff,
    decode_mask,
    diff_twins,
    encode_mask,
    mask_area_fraction,
    parse_twin,
    serialize_twin,
    to_text_descriptions,
    validate_against_schema,
)

from conftest import MINIMAL_TWIN_TEXT, random_twin, two_object_twin


class TestParse:
    def test_minimal_document(self):
        twin = parse_twin(MINIMAL_TWIN_TEXT)
        assert twin.frame_count == 1
        assert len(twin.frames[0].instances) == 1
        inst = twin.frames[0].instances[0]
        assert inst.category == "dog"
        assert inst.attributes == ("brown",)
        assert inst.spatial.x == 0.5

    def test_missing_category(self):
        doc = json.loads(MINIMAL_TWIN_TEXT)
        del doc["frames"][0]["instances"][0]["category"]
        with pytest.raises(SchemaViolation) as exc:
            parse_twin(json.dumps(doc))
        assert exc.value.kind == "missing_field"
        assert "category" in exc.value.path

    def test_type_mismatch_on_x(self):
        doc = json.loads(MINIMAL_TWIN_TEXT)
        doc["frames"][0]["instances"][0]["spatial"]["x"] = "left"
        with pytest.raises(SchemaViolation) as exc:
            parse_twin(json.dumps(doc))
        assert exc.value.kind == "type_mismatch"

    def test_range_violation(self):
        doc = json.loads(MINIMAL_TWIN_TEXT)
        doc["frames"][0]["instances"][0]["spatial"]["x"] = 1.5
        with pytest.raises(SchemaViolation) as exc:
            parse_twin(json.dumps(doc))
        assert exc.value.kind == "range_violation"

    def test_duplicate_id(self):
        doc = json.loads(MINIMAL_TWIN_TEXT)
        doc["frames"][0]["instances"].append(doc["frames"][0]["instances"][0])
        with pytest.raises(SchemaViolation) as exc:
            parse_twin(json.dumps(doc))
        assert exc.value.kind == "id_conflict"

    def test_not_json(self):
        with pytest.raises(NotParseable):
            parse_twin("{")

    def test_frame_count_mismatch(self):
        doc = json.loads(MINIMAL_TWIN_TEXT)
        doc["frame_count"] = 2
        with pytest.raises(SchemaViolation):
            parse_twin(json.dumps(doc))


class TestSerialize:
    def test_round_trip_idempotent(self):
        text = serialize_twin(parse_twin(MINIMAL_TWIN_TEXT))
        assert serialize_twin(parse_twin(text)) == text

    def test_instances_sorted_by_id(self):
        doc = json.loads(MINIMAL_TWIN_TEXT)
        second = json.loads(json.dumps(doc["frames"][0]["instances"][0]))
        second["id"] = 2
        doc["frames"][0]["instances"] = [second, doc["frames"][0]["instances"][0]]
        out = serialize_twin(parse_twin(json.dumps(doc)))
        ids = [i["id"] for i in json.loads(out)["frames"][0]["instances"]]
        assert ids == [0, 2]

    def test_six_digit_rounding(self):
        doc = json.loads(MINIMAL_TWIN_TEXT)
        doc["frames"][0]["instances"][0]["spatial"]["x"] = 0.1234567
        out = serialize_twin(parse_twin(json.dumps(doc)))
        assert '"x": 0.123457' in out

    @pytest.mark.parametrize("seed", range(25))
    def test_random_round_trip(self, seed):
        twin = random_twin(np.random.default_rng(seed))
        text = serialize_twin(twin)
        assert parse_twin(text) == twin
        assert serialize_twin(parse_twin(text)) == text


class TestValidate:
    def test_identity_edit_valid(self):
        twin = parse_twin(MINIMAL_TWIN_TEXT)
        assert validate_against_schema(serialize_twin(twin), twin).valid

    def test_attribute_change_is_an_edit(self):
        twin = parse_twin(MINIMAL_TWIN_TEXT)
        doc = json.loads(serialize_twin(twin))
        doc["frames"][0]["instances"][0]["attributes"] = ["golden"]
        assert validate_against_schema(json.dumps(doc), twin).valid

    def test_unparseable(self):
        twin = parse_twin(MINIMAL_TWIN_TEXT)
        report = validate_against_schema("{", twin)
        assert not report.valid
        assert report.violations[0].kind == "not_parseable"

    def test_missing_spatial(self):
        twin = parse_twin(MINIMAL_TWIN_TEXT)
        doc = json.loads(serialize_twin(twin))
        del doc["frames"][0]["instances"][0]["spatial"]
        report = validate_against_schema(json.dumps(doc), twin)
        assert not report.valid
        assert any(v.kind == "missing_field" and "spatial" in v.path for v in report.violations)

    def test_out_of_range_move_is_allowed(self):
        # edits may push values outside normal ranges; only structure counts
        twin = parse_twin(MINIMAL_TWIN_TEXT)
        doc = json.loads(serialize_twin(twin))
        doc["frames"][0]["instances"][0]["spatial"]["x"] = 1.7
        assert validate_against_schema(json.dumps(doc), twin).valid

    @pytest.mark.parametrize("seed", range(10))
    def test_serialized_twin_always_valid(self, seed):
        twin = random_twin(np.random.default_rng(seed))
        assert validate_against_schema(serialize_twin(twin), twin).valid

    def test_violations_carry_paths(self):
        twin = parse_twin(MINIMAL_TWIN_TEXT)
        doc = json.loads(serialize_twin(twin))
        del doc["frames"][0]["instances"][0]["mask_ref"]
        report = validate_against_schema(json.dumps(doc), twin)
        assert all(v.path.startswith("$") for v in report.violations)


class TestDiff:
    def test_identity(self):
        twin = two_object_twin()
        assert diff_twins(twin, twin).empty

    def test_removed_everywhere(self):
        import dataclasses

        base = random_twin(np.random.default_rng(3), max_frames=3)
        # force id 3 into frames 0..2
        from twinedit.twin import ObjectInstance, SpatialProps, with_instance

        twin = base
        for t in range(twin.frame_count):
            twin = with_instance(
                twin, t, ObjectInstance(99, "dog", (), "m.rle", SpatialProps(0.1, 0.1, 0.1, 0.1))
            )
        edited = base
        for t in range(edited.frame_count):
            edited = dataclasses.replace(edited)
        d = diff_twins(twin, base)
        assert set(d.removed) == {(t, 99) for t in range(twin.frame_count)}

    def test_changed_attributes(self, pair_twin):
        import dataclasses

        from twinedit.twin import with_instance

        inst = pair_twin.frames[0].instance(0)
        edited = with_instance(pair_twin, 0, dataclasses.replace(inst, attributes=("golden",)))
        d = diff_twins(pair_twin, edited)
        assert len(d.changed) == 1
        c = d.changed[0]
        assert (c.frame_index, c.id, c.field_path) == (0, 0, "attributes")
        assert c.old_value == ("brown",)
        assert c.new_value == ("golden",)

    @pytest.mark.parametrize("seed", range(20))
    def test_apply_diff_reconstructs(self, seed):
        rng = np.random.default_rng(seed)
        a = random_twin(rng)
        b = _mutate(a, rng)
        assert apply_diff(a, diff_twins(a, b)) == b


def _mutate(twin, rng):
    """Random structural mutation staying within the same frame count."""
    import dataclasses

    from twinedit.twin import ObjectInstance, SpatialProps, with_instance, without_instance

    out = twin
    for _ in range(int(rng.integers(1, 4))):
        t = int(rng.integers(0, out.frame_count))
        frame = out.frames[t]
        roll = rng.random()
        if roll < 0.33 and frame.instances:
            out = without_instance(out, t, int(rng.choice([o.id for o in frame.instances])))
        elif roll < 0.66:
            new_id = int(rng.integers(30, 60))
            out = with_instance(
                out,
                t,
                ObjectInstance(
                    new_id, "new", ("fresh",), "m/new.rle", SpatialProps(0.5, 0.5, 0.5, 0.5)
                ),
            )
        elif frame.instances:
            inst = frame.instances[int(rng.integers(0, len(frame.instances)))]
            out = with_instance(
                out, t, dataclasses.replace(inst, attributes=inst.attributes + ("mutated",))
            )
    return out


class TestDescriptions:
    def test_template(self):
        from twinedit.twin import FrameTwin, ObjectInstance, SpatialProps, VideoTwin, with_instance
        import dataclasses

        frames = tuple(FrameTwin(t, ()) for t in range(4))
        base = VideoTwin(4, frames)
        inst = ObjectInstance(2, "dog", ("brown", "furry"), "m.rle", SpatialProps(0.5, 0.5, 0.5, 0.5))
        edited = with_instance(base, 3, inst)
        lines = to_text_descriptions(edited, diff_twins(base, edited))
        assert lines == ["In frame 3, object 2 with category dog has attributes brown, furry."]

    def test_empty_diff(self, pair_twin):
        assert to_text_descriptions(pair_twin, diff_twins(pair_twin, pair_twin)) == []

    def test_ordering_by_object_id(self, pair_twin):
        import dataclasses

        from twinedit.twin import with_instance

        edited = pair_twin
        for i in (1, 0):
            inst = edited.frames[0].instance(i)
            edited = with_instance(edited, 0, dataclasses.replace(inst, attributes=("x",)))
        lines = to_text_descriptions(edited, diff_twins(pair_twin, edited))
        assert "object 0" in lines[0] and "object 1" in lines[1]


class TestRle:
    @pytest.mark.parametrize("seed", range(10))
    def test_encode_decode_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        mask = (rng.random((int(rng.integers(1, 20)), int(rng.integers(1, 20)))) < 0.4).astype(
            np.uint8
        )
        assert np.array_equal(decode_mask(encode_mask(mask)), mask)

    def test_first_run_counts_zeros(self):
        mask = np.array([[1, 1], [0, 0]], dtype=np.uint8)
        rle = encode_mask(mask)
        assert rle.rle[0] == 0

    def test_area_fraction(self):
        rle = encode_mask(np.eye(4, dtype=np.uint8))
        assert mask_area_fraction(rle) == pytest.approx(0.25)

    def test_bad_total_rejected(self):
        with pytest.raises(ValueError):
            decode_mask(RleMask((3,), 2, 2))
