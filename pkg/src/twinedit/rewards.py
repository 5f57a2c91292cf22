"""Reward decomposition for a rollout and its resulting edit.

Total reward is alpha * (token + exec + dt) + beta * perf with the
constant table below.  Constants may be overridden from a config file but
doing so logs a warning; the defaults are the values the training
objective is defined with.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, fields
from pathlib import Path

from .rollout import ExecOutcome, RolloutTranscript, extract_edit, validate_sequence
from .twin import ValidationReport, VideoTwin, validate_against_schema

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewardConfig:
    alpha: float = 1.0
    beta: float = 1.0
    token_ok: float = 0.0
    token_bad: float = -1.0
    exec_ok: float = 0.0
    exec_bad: float = -0.5
    dt_ok: float = 0.5
    dt_bad: float = -0.5
    perf_ok: float = 1.0
    perf_bad: float = -1.0

    @classmethod
    def from_file(cls, path: Path) -> "RewardConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown reward config keys: {sorted(unknown)}")
        cfg = cls(**doc)
        if cfg != cls(alpha=cfg.alpha, beta=cfg.beta):
            log.warning("reward constants overridden from %s; totals deviate from the defaults", path)
        return cfg


@dataclass(frozen=True)
class JudgeVerdict:
    correct: bool
    rationale: str = ""


@dataclass(frozen=True)
class RewardBreakdown:
    r_token: float
    r_exec: float
    r_dt: float
    r_perf: float
    r_struct: float
    total: float
    provenance: tuple[tuple[str, str], ...] = ()

    def to_record(self) -> dict:
        return {
            "r_token": self.r_token,
            "r_exec": self.r_exec,
            "r_dt": self.r_dt,
            "r_struct": self.r_struct,
            "r_perf": self.r_perf,
            "total": self.total,
            "provenance": dict(self.provenance),
        }


def token_reward(transcript: RolloutTranscript, cfg: RewardConfig = RewardConfig()) -> float:
    """0 when all four token pairs appear correctly sequenced, else -1."""
    return cfg.token_ok if validate_sequence(transcript) else cfg.token_bad


def exec_reward(outcomes: list[ExecOutcome], cfg: RewardConfig = RewardConfig()) -> float:
    """0 when every execute block ran cleanly (vacuously for none), -0.5
    when any failed."""
    return cfg.exec_ok if all(o.ok for o in outcomes) else cfg.exec_bad


def dt_reward(
    edit_text: str, reference: VideoTwin, cfg: RewardConfig = RewardConfig()
) -> tuple[float, ValidationReport]:
    """+0.5 when the edited twin keeps the schema of the original, -0.5
    otherwise; the validation report is returned for diagnostics."""
    report = validate_against_schema(edit_text, reference)
    return (cfg.dt_ok if report.valid else cfg.dt_bad), report


def perf_reward(verdict: JudgeVerdict, cfg: RewardConfig = RewardConfig()) -> float:
    """+1 for a judged-correct edit, -1 otherwise; the rationale is not scored."""
    return cfg.perf_ok if verdict.correct else cfg.perf_bad


def total_reward(
    r_token: float,
    r_exec: float,
    r_dt: float,
    r_perf: float,
    cfg: RewardConfig = RewardConfig(),
    provenance: dict[str, str] | None = None,
) -> RewardBreakdown:
    r_struct = r_token + r_exec + r_dt
    total = cfg.alpha * r_struct + cfg.beta * r_perf
    return RewardBreakdown(
        r_token, r_exec, r_dt, r_perf, r_struct, total, tuple(sorted((provenance or {}).items()))
    )


def score_rollout(
    transcript: RolloutTranscript,
    outcomes: list[ExecOutcome],
    reference: VideoTwin,
    verdict: JudgeVerdict | None,
    cfg: RewardConfig = RewardConfig(),
) -> RewardBreakdown:
    """Full reward for one rollout.

    An incomplete transcript has no edit to validate or judge: dt is
    assessed on an empty candidate (always bad) and perf falls to the
    incorrect value, so every rollout gets a defined total.
    """
    r_token = token_reward(transcript, cfg)
    r_exec = exec_reward(outcomes, cfg)
    prov = {}
    try:
        edit_text = extract_edit(transcript)
    except Exception:
        edit_text = ""
        prov["edit"] = "missing edit block"
    r_dt, report = dt_reward(edit_text, reference, cfg)
    if not report.valid:
        prov["dt"] = "; ".join(f"{v.path}: {v.kind}" for v in report.violations[:3])
    if verdict is None:
        r_perf = cfg.perf_bad
        prov["perf"] = "no judge verdict (nothing to judge)"
    else:
        r_perf = perf_reward(verdict, cfg)
        if verdict.rationale:
            prov["perf"] = verdict.rationale
    return total_reward(r_token, r_exec, r_dt, r_perf, cfg, prov)
