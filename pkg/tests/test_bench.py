import json

import pytest
from click.testing import CliRunner

from twinedit.bench import (
    InvalidCategory,
    InvalidLevel,
    ManifestError,
    MissingVideo,
    NotParseable,
    load_manifest,
    render_report,
    run_eval,
)
from twinedit.cli import main, mock_clients
from twinedit.pipeline import PipelineConfig

from conftest import build_bench_fixture


def _write_manifest(tmp_path, lines):
    p = tmp_path / "m.jsonl"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


def _row(**kw):
    doc = {
        "sample_id": "s1",
        "video_ref": "v",
        "query": "q",
        "level": 1,
        "category": "semantic",
    }
    doc.update(kw)
    return json.dumps(doc)


class TestManifest:
    def test_loads_fixture(self, bench_fixture):
        m = load_manifest(bench_fixture)
        assert m.counts == {
            "total": 3,
            "by_level": {1: 1, 2: 1, 3: 1},
            "by_category": {"semantic": 1, "spatial": 1, "temporal": 1},
        }
        assert [s.sample_id for s in m.samples] == ["s01", "s02", "s03"]

    def test_bad_json(self, tmp_path):
        p = _write_manifest(tmp_path, ["{not json"])
        with pytest.raises(NotParseable):
            load_manifest(p)

    def test_invalid_level(self, tmp_path):
        p = _write_manifest(tmp_path, [_row(level=4)])
        with pytest.raises(InvalidLevel):
            load_manifest(p, check_videos=False)

    def test_invalid_category(self, tmp_path):
        p = _write_manifest(tmp_path, [_row(category="stylistic")])
        with pytest.raises(InvalidCategory):
            load_manifest(p, check_videos=False)

    def test_missing_video(self, tmp_path):
        p = _write_manifest(tmp_path, [_row()])
        with pytest.raises(MissingVideo):
            load_manifest(p)

    def test_duplicate_id(self, tmp_path):
        p = _write_manifest(tmp_path, [_row(), _row()])
        with pytest.raises(ManifestError):
            load_manifest(p, check_videos=False)

    def test_video_ref_resolved_relative(self, bench_fixture):
        m = load_manifest(bench_fixture)
        assert m.samples[0].video_ref.endswith("videos/s01")


class TestRunEval:
    def test_mock_stack_scores_all_samples(self, bench_fixture):
        m = load_manifest(bench_fixture)
        report = run_eval(m, PipelineConfig(), mock_clients())
        assert [r.sample_id for r in report.results] == ["s01", "s02", "s03"]
        assert all(r.error is None for r in report.results)
        for r in report.results:
            scores = r.report.scores_dict
            assert set(scores) == {"psnr", "ssim", "clip_text", "clip_f", "musiq", "grounding", "judge"}
            assert scores["judge"] == 100.0
            assert scores["grounding"] == 100.0
            assert scores["musiq"] == 62.5
            assert 20.0 < scores["psnr"] < 30.0
            assert r.reward["total"] == 1.5

    def test_deterministic(self, bench_fixture):
        m = load_manifest(bench_fixture)
        a = run_eval(m, PipelineConfig(), mock_clients())
        b = run_eval(m, PipelineConfig(), mock_clients())
        assert render_report(a, "csv") == render_report(b, "csv")

    def test_parallelism_invariance(self, bench_fixture):
        m = load_manifest(bench_fixture)
        serial = run_eval(m, PipelineConfig(), mock_clients(), parallelism=1)
        threaded = run_eval(m, PipelineConfig(), mock_clients(), parallelism=4)
        assert render_report(serial, "csv") == render_report(threaded, "csv")
        assert serial.to_records() == threaded.to_records()

    def test_sample_failure_becomes_error_row(self, tmp_path):
        build_bench_fixture(tmp_path)
        lines = [(tmp_path / "manifest.jsonl").read_text().splitlines()[0]]
        (tmp_path / "videos/ghost").mkdir()
        lines.append(_row(sample_id="ghost", video_ref="videos/ghost"))
        p = _write_manifest(tmp_path, lines)
        report = run_eval(load_manifest(p), PipelineConfig(), mock_clients())
        by_id = {r.sample_id: r for r in report.results}
        assert by_id["s01"].error is None
        assert by_id["ghost"].error is not None

    def test_malformed_edit_rows_score_reward_only(self, bench_fixture):
        m = load_manifest(bench_fixture)
        report = run_eval(m, PipelineConfig(), mock_clients(malformed_edit=True))
        for r in report.results:
            assert r.error is None
            assert r.report.scores_dict == {}
            assert r.reward["r_dt"] == -0.5


class TestRender:
    def test_csv_shape(self, bench_fixture):
        report = run_eval(load_manifest(bench_fixture), PipelineConfig(), mock_clients())
        csv_text = render_report(report, "csv")
        lines = csv_text.strip().splitlines()
        assert lines[0] == "metric,level,category,mean,std,n"
        # 7 metrics x (3 level rows + 3 category rows + 1 all row)
        assert len(lines) == 1 + 7 * 7
        first = lines[1].split(",")
        assert first[0] == "psnr" and first[1] == "1"
        assert first[3] == f"{float(first[3]):.4f}"

    def test_text_table(self, bench_fixture):
        report = run_eval(load_manifest(bench_fixture), PipelineConfig(), mock_clients())
        text = render_report(report, "text")
        head = text.splitlines()[0].split()
        assert head == ["metric", "L1", "L2", "L3", "all"]
        assert "±" in text
        assert "errors:" not in text

    def test_unknown_format(self, bench_fixture):
        report = run_eval(load_manifest(bench_fixture), PipelineConfig(), mock_clients())
        with pytest.raises(ValueError):
            render_report(report, "yaml")


class TestCli:
    def test_bench_run_writes_artifacts(self, bench_fixture, tmp_path):
        out = tmp_path / "out"
        runner = CliRunner()
        result = runner.invoke(
            main,
            ["bench", "run", "--manifest", str(bench_fixture), "--mock-all", "--out-dir", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert (out / "report.csv").exists()
        assert (out / "report.txt").exists()
        records = [json.loads(s) for s in (out / "samples.jsonl").read_text().splitlines()]
        assert [r["sample_id"] for r in records] == ["s01", "s02", "s03"]

    def test_report_render_round_trip(self, bench_fixture, tmp_path):
        out = tmp_path / "out"
        runner = CliRunner()
        runner.invoke(
            main,
            ["bench", "run", "--manifest", str(bench_fixture), "--mock-all", "--out-dir", str(out)],
        )
        csv_from_run = (out / "report.csv").read_text()
        rendered = runner.invoke(
            main, ["report", "render", str(out / "samples.jsonl"), "--format", "csv"]
        )
        assert rendered.exit_code == 0
        assert rendered.output == csv_from_run

    def test_twinql_eval(self, tmp_path, minimal_twin_text):
        twin_file = tmp_path / "t.json"
        twin_file.write_text(minimal_twin_text)
        runner = CliRunner()
        result = runner.invoke(
            main, ["twinql", "eval", "count(objects(frame=0))", "--twin", str(twin_file)]
        )
        assert result.exit_code == 0
        assert result.output.strip() == "1"

    def test_twin_validate_exit_codes(self, tmp_path, minimal_twin_text):
        good = tmp_path / "good.json"
        good.write_text(minimal_twin_text)
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        runner = CliRunner()
        assert runner.invoke(main, ["twin", "validate", str(good)]).exit_code == 0
        assert runner.invoke(main, ["twin", "validate", str(bad)]).exit_code == 1

    def test_train_toy(self):
        runner = CliRunner()
        result = runner.invoke(main, ["train", "toy", "--iterations", "30"])
        assert result.exit_code == 0
        assert "final mean reward" in result.output
