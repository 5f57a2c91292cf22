"""Iterative reasoner loop: stream segments, run execute blocks, inject results.

The reasoner client is any callable taking the documented request dict and
returning ``{"content": str}``.  Responses include the stop sequence that
fired, so the driver sees closed blocks.  Results bodies are always
producer-injected here; a reasoner that fabricates its own results block
simply fails the token-format check downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..twin import VideoTwin, serialize_twin
from ..twinql import EvalLimits, QlError, evaluate, parse_program, render_value
from .parser import RolloutTranscript, parse_rollout

ReasonerClient = Callable[[dict], dict]

STOP_SEQUENCES = ("</execute>", "</edit>")

PROTOCOL_INSTRUCTIONS = (
    "You edit videos through their digital twin JSON. Reply with your "
    "reasoning inside <think>...</think>. When you need a spatial or "
    "temporal computation, emit a query inside <execute>...</execute> and "
    "wait: the result will be appended inside <results>...</results>. "
    "Finish with the full edited twin JSON inside <edit>...</edit>."
)


class ReasonerUnreachable(Exception):
    pass


@dataclass(frozen=True)
class LoopConfig:
    max_exec_rounds: int = 4
    step_budget: int = 100_000
    prompt_template_id: str = "default-v1"
    max_tokens: int = 4096
    temperature: float = 0.0


@dataclass(frozen=True)
class ExecOutcome:
    ok: bool
    source: str
    rendered: str | None = None
    error: str | None = None

    @property
    def results_body(self) -> str:
        return self.rendered if self.ok else f"error: {self.error}"


def run_execute_block(source: str, twin: VideoTwin, step_budget: int) -> ExecOutcome:
    """Evaluate one execute block in the sandbox; never raises."""
    try:
        value = evaluate(parse_program(source.strip()), twin, EvalLimits(step_budget=step_budget))
        return ExecOutcome(True, source, rendered=render_value(value))
    except QlError as exc:
        return ExecOutcome(False, source, error=f"{type(exc).__name__}: {exc}")


def build_prompt(twin: VideoTwin, query: str) -> list[dict]:
    return [
        {"role": "system", "content": PROTOCOL_INSTRUCTIONS},
        {
            "role": "user",
            "content": f"Digital twin:\n{serialize_twin(twin)}\n\nEditing query: {query}",
        },
    ]


def drive_loop(
    reasoner: ReasonerClient,
    twin: VideoTwin,
    query: str,
    cfg: LoopConfig | None = None,
    seed: int = 0,
) -> tuple[RolloutTranscript, list[ExecOutcome]]:
    """Run the rollout to a closed edit block or the round limit.

    Returns the stitched transcript (including injected results blocks) and
    one ExecOutcome per execute block in order.  Hitting max_exec_rounds
    returns a partial transcript with complete=False.
    """
    cfg = cfg or LoopConfig()
    messages = build_prompt(twin, query)
    transcript_text = ""
    outcomes: list[ExecOutcome] = []
    rounds = 0
    while True:
        request = {
            "messages": messages + [{"role": "assistant", "content": transcript_text}],
            "stop": list(STOP_SEQUENCES),
            "max_tokens": cfg.max_tokens,
            "temperature": cfg.temperature,
            "seed": seed,
        }
        try:
            response = reasoner(request)
        except Exception as exc:  # adapter-level failures surface uniformly
            raise ReasonerUnreachable(str(exc)) from exc
        chunk = response.get("content", "")
        transcript_text += chunk
        if not chunk or "</edit>" in chunk:
            break
        if "</execute>" not in chunk:
            break  # reasoner stalled without closing a block
        if rounds >= cfg.max_exec_rounds:
            break
        rounds += 1
        partial = parse_rollout(transcript_text)
        exec_segments = [s for s in partial.segments if s.kind.value == "execute"]
        if not exec_segments:
            break
        outcome = run_execute_block(exec_segments[-1].body, twin, cfg.step_budget)
        outcomes.append(outcome)
        transcript_text += f"\n<results>{outcome.results_body}</results>\n"
    return parse_rollout(transcript_text), outcomes
