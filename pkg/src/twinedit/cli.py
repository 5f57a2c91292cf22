"""Command-line surface.

Exit codes: 0 success, 1 per-item failures (invalid documents, failed
samples), 2 fatal errors (unreadable inputs, bad usage).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from .clients import (
    BrightenEditor,
    MockDetection,
    MockEmbedding,
    MockJudge,
    MockQuality,
    RuleBasedReasoner,
)
from .grpo import GrpoConfig, make_toy_env, train_toy_policy
from .metrics import FrameBuffer, psnr, ssim
from .pipeline import Clients, ModelEndpoints, PipelineConfig, build_twin, edit_video
from .rewards import score_rollout
from .rollout import parse_rollout, run_execute_block
from .twin import TwinError, diff_twins, parse_twin, serialize_twin, validate_against_schema
from .twinql import EvalLimits, QlError, evaluate, parse_program, render_value
from .videoio import read_frame_dir


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        return PipelineConfig.from_file(Path(path))
    except Exception as exc:
        raise click.ClickException(f"cannot read config {path}: {exc}")


def _endpoints_from_env_and_flags(**urls) -> ModelEndpoints:
    import os

    def pick(flag_val, env_key):
        return flag_val or os.environ.get(env_key) or None

    return ModelEndpoints(
        reasoner_url=pick(urls.get("reasoner"), "TWINEDIT_REASONER_URL"),
        perception_url=pick(urls.get("perception"), "TWINEDIT_PERCEPTION_URL"),
        editor_url=pick(urls.get("editor"), "TWINEDIT_EDITOR_URL"),
        embedding_url=pick(urls.get("embedding"), "TWINEDIT_EMBEDDING_URL"),
        detection_url=pick(urls.get("detection"), "TWINEDIT_DETECTION_URL"),
        quality_url=pick(urls.get("quality"), "TWINEDIT_QUALITY_URL"),
        judge_url=pick(urls.get("judge"), "TWINEDIT_JUDGE_URL"),
    )


def mock_clients(malformed_edit: bool = False) -> Clients:
    """The full scripted mock stack used by --mock-all runs and tests."""
    return Clients(
        reasoner=RuleBasedReasoner(malformed_edit=malformed_edit),
        editor=BrightenEditor(16),
        embedding=MockEmbedding(),
        detection=MockDetection(default_confidence=0.9),
        quality=MockQuality(62.5),
        judge=MockJudge(),
    )


@click.group()
def main():
    """Digital-twin reasoning video editing toolkit."""


# -- twin ------------------------------------------------------------------


@main.group()
def twin():
    """Build, validate and diff twin documents."""


@twin.command("build")
@click.argument("video_ref", type=click.Path(exists=True))
@click.option("--perception-url", default=None)
@click.option("--out", "-o", type=click.Path(), default=None)
def twin_build(video_ref, perception_url, out):
    """Build a twin from a frame directory (fixture twin.json or perception service)."""
    endpoints = _endpoints_from_env_and_flags(perception=perception_url)
    try:
        t = build_twin(Path(video_ref), endpoints.clients().perception)
    except Exception as exc:
        raise click.ClickException(str(exc))
    text = serialize_twin(t)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


@twin.command("validate")
@click.argument("twin_file", type=click.Path(exists=True))
def twin_validate(twin_file):
    try:
        parse_twin(Path(twin_file).read_text(encoding="utf-8"))
    except TwinError as exc:
        click.echo(f"invalid: {exc}")
        sys.exit(1)
    click.echo("valid")


@twin.command("diff")
@click.argument("original", type=click.Path(exists=True))
@click.argument("edited", type=click.Path(exists=True))
def twin_diff(original, edited):
    try:
        a = parse_twin(Path(original).read_text(encoding="utf-8"))
        b = parse_twin(Path(edited).read_text(encoding="utf-8"))
    except TwinError as exc:
        raise click.ClickException(str(exc))
    d = diff_twins(a, b)
    for c in d.changed:
        click.echo(
            f"changed frame={c.frame_index} id={c.id} {c.field_path}: {c.old_value!r} -> {c.new_value!r}"
        )
    for t, i in d.removed:
        click.echo(f"removed frame={t} id={i}")
    for t, inst in d.added:
        click.echo(f"added frame={t} id={inst.id} category={inst.category}")


# -- twinql ----------------------------------------------------------------


@main.group(name="twinql")
def twinql_group():
    """Evaluate sandboxed query programs over a twin."""


@twinql_group.command("eval")
@click.argument("program")
@click.option("--twin", "twin_file", type=click.Path(exists=True), required=True)
@click.option("--step-budget", default=100_000, show_default=True)
def twinql_eval(program, twin_file, step_budget):
    try:
        t = parse_twin(Path(twin_file).read_text(encoding="utf-8"))
    except TwinError as exc:
        raise click.ClickException(str(exc))
    try:
        value = evaluate(parse_program(program), t, EvalLimits(step_budget=step_budget))
    except QlError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}")
        sys.exit(1)
    click.echo(render_value(value))


# -- rollout / reward ------------------------------------------------------


@main.group()
def rollout():
    """Drive or inspect reasoner rollouts."""


@rollout.command("run")
@click.argument("video_ref", type=click.Path(exists=True))
@click.argument("query")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--reasoner-url", default=None)
@click.option("--mock-all", is_flag=True, help="Use the scripted mock stack.")
@click.option("--no-editor", is_flag=True, help="Dry run: never contact the editor.")
@click.option("--artifacts", type=click.Path(), default=None)
def rollout_run(video_ref, query, config_path, reasoner_url, mock_all, no_editor, artifacts):
    cfg = _load_config(config_path)
    if mock_all:
        clients = mock_clients()
    else:
        clients = _endpoints_from_env_and_flags(reasoner=reasoner_url).clients()
    record = edit_video(
        Path(video_ref),
        query,
        cfg,
        clients,
        use_editor=not no_editor,
        artifact_dir=Path(artifacts) if artifacts else None,
    )
    click.echo(json.dumps(record.to_record(), indent=2, sort_keys=True))
    sys.exit(1 if record.failed_stage else 0)


@main.group()
def reward():
    """Score rollout transcripts."""


@reward.command("score")
@click.option("--transcript", "transcript_file", type=click.Path(exists=True), required=True)
@click.option("--twin", "twin_file", type=click.Path(exists=True), required=True)
@click.option("--judge-correct/--judge-incorrect", default=None, help="Scripted judge verdict.")
def reward_score(transcript_file, twin_file, judge_correct):
    from .rewards import JudgeVerdict

    try:
        reference = parse_twin(Path(twin_file).read_text(encoding="utf-8"))
    except TwinError as exc:
        raise click.ClickException(str(exc))
    text = Path(transcript_file).read_text(encoding="utf-8")
    transcript = parse_rollout(text)
    outcomes = [
        run_execute_block(s.body, reference, 100_000)
        for s in transcript.segments
        if s.kind.value == "execute"
    ]
    verdict = None if judge_correct is None else JudgeVerdict(judge_correct)
    breakdown = score_rollout(transcript, outcomes, reference, verdict)
    click.echo(json.dumps(breakdown.to_record(), indent=2, sort_keys=True))


# -- training --------------------------------------------------------------


@main.group()
def train():
    """GRPO training loops."""


@train.command("toy")
@click.option("--actions", default=4, show_default=True)
@click.option("--iterations", default=500, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--group-size", default=8, show_default=True)
@click.option("--log", "log_path", type=click.Path(), default=None)
def train_toy(actions, iterations, seed, group_size, log_path):
    env = make_toy_env(n_actions=actions, target=0, seed=seed)
    cfg = GrpoConfig(group_size=group_size)
    result = train_toy_policy(
        env, cfg, seed=seed, iterations=iterations, log_path=Path(log_path) if log_path else None
    )
    click.echo(f"final mean reward: {result.reward_curve[-1]:.4f}")
    click.echo(f"policy probs: {[round(p, 4) for p in result.policy.probs()]}")


# -- metrics / bench / report ---------------------------------------------


@main.group()
def metrics():
    """Native quality metrics."""


@metrics.command("compute")
@click.argument("original_dir", type=click.Path(exists=True))
@click.argument("edited_dir", type=click.Path(exists=True))
def metrics_compute(original_dir, edited_dir):
    import numpy as np

    a = read_frame_dir(Path(original_dir))
    b = read_frame_dir(Path(edited_dir))
    if len(a) != len(b):
        raise click.ClickException("frame counts differ")
    p = float(np.mean([psnr(x, y) for x, y in zip(a, b)]))
    s = float(np.mean([ssim(x, y) for x, y in zip(a, b)]))
    click.echo(f"psnr: {p:.4f}")
    click.echo(f"ssim: {s:.6f}")


@main.group()
def bench():
    """Benchmark manifests and evaluation runs."""


@bench.command("run")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mock-all", is_flag=True)
@click.option("--parallelism", default=1, show_default=True)
@click.option("--out-dir", type=click.Path(), default=None)
def bench_run(manifest_path, config_path, mock_all, parallelism, out_dir):
    cfg = _load_config(config_path)
    try:
        manifest = bench_mod.load_manifest(Path(manifest_path))
    except bench_mod.ManifestError as exc:
        raise click.ClickException(str(exc))
    clients = mock_clients() if mock_all else _endpoints_from_env_and_flags().clients()
    report = bench_mod.run_eval(manifest, cfg, clients, parallelism=parallelism)
    csv_text = bench_mod.render_report(report, "csv")
    txt_text = bench_mod.render_report(report, "text")
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(csv_text, encoding="utf-8")
        (out / "report.txt").write_text(txt_text, encoding="utf-8")
        with open(out / "samples.jsonl", "w", encoding="utf-8") as fh:
            for rec in report.to_records():
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    click.echo(txt_text)
    sys.exit(1 if any(r.error for r in report.results) else 0)


@main.group()
def report():
    """Render stored reports."""


@report.command("render")
@click.argument("samples_jsonl", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["csv", "text"]), default="text")
def report_render(samples_jsonl, fmt):
    from .bench.runner import EvalRunReport, SampleResult
    from .metrics import MetricReport, aggregate

    results = []
    for line in Path(samples_jsonl).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        rpt = MetricReport.from_dict(rec["scores"]) if rec.get("scores") else None
        results.append(
            SampleResult(
                rec["sample_id"], rec["level"], rec["category"], rpt, rec.get("reward"), rec.get("error")
            )
        )
    results.sort(key=lambda r: r.sample_id)
    tagged = [(r.level, r.category, r.report) for r in results if r.report is not None]
    run = EvalRunReport(Path(samples_jsonl).stem, tuple(results), aggregate(tagged))
    click.echo(bench_mod.render_report(run, fmt), nl=False)


if __name__ == "__main__":
    main()
