"""Parser for the four-token rollout grammar.

A well-formed rollout is ``<think>...</think>`` followed by zero or more
``<execute>...</execute><results>...</results>`` pairs and a terminal
``<edit>...</edit>``, with nothing but whitespace between segments.
Parsing is total: arbitrary bytes yield a transcript whose issues are
recorded, never an exception.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class SegmentKind(Enum):
    THINK = "think"
    EXECUTE = "execute"
    RESULTS = "results"
    EDIT = "edit"


_OPENERS = {f"<{k.value}>": k for k in SegmentKind}
_KIND_LETTER = {
    SegmentKind.THINK: "T",
    SegmentKind.EXECUTE: "X",
    SegmentKind.RESULTS: "R",
    SegmentKind.EDIT: "E",
}
_GRAMMAR = re.compile(r"^T(XR)*E$")


@dataclass(frozen=True)
class Segment:
    kind: SegmentKind
    body: str
    span: tuple[int, int]  # (start, end) offsets of the full delimited block


@dataclass(frozen=True)
class ParseIssue:
    kind: str  # unclosed_token | stray_text
    position: int
    detail: str


@dataclass(frozen=True)
class RolloutTranscript:
    source: str
    segments: tuple[Segment, ...]
    issues: tuple[ParseIssue, ...]
    complete: bool

    def kinds(self) -> tuple[SegmentKind, ...]:
        return tuple(s.kind for s in self.segments)


class NoEditSegment(Exception):
    pass


def parse_rollout(text: str) -> RolloutTranscript:
    """Greedy left-to-right scan for delimited segments."""
    segments: list[Segment] = []
    issues: list[ParseIssue] = []
    pos = 0
    while True:
        hit = None
        for opener, kind in _OPENERS.items():
            at = text.find(opener, pos)
            if at != -1 and (hit is None or at < hit[0]):
                hit = (at, opener, kind)
        if hit is None:
            if text[pos:].strip():
                issues.append(ParseIssue("stray_text", pos, "text outside any segment"))
            break
        at, opener, kind = hit
        if text[pos:at].strip():
            issues.append(ParseIssue("stray_text", pos, "text outside any segment"))
        closer = f"</{kind.value}>"
        body_start = at + len(opener)
        end = text.find(closer, body_start)
        if end == -1:
            issues.append(ParseIssue("unclosed_token", at, f"missing {closer}"))
            break
        segments.append(Segment(kind, text[body_start:end], (at, end + len(closer))))
        pos = end + len(closer)
    complete = not issues and _sequence_ok(tuple(s.kind for s in segments))
    return RolloutTranscript(text, tuple(segments), tuple(issues), complete)


def _sequence_ok(kinds: tuple[SegmentKind, ...]) -> bool:
    return bool(_GRAMMAR.match("".join(_KIND_LETTER[k] for k in kinds)))


def validate_sequence(transcript: RolloutTranscript) -> bool:
    """True iff the transcript earns the token-format reward: correctly
    closed delimiters, no stray text, kinds matching Think (Execute
    Results)* Edit."""
    return not transcript.issues and _sequence_ok(transcript.kinds())


def extract_edit(transcript: RolloutTranscript) -> str:
    """Body of the final edit segment, byte-exact.

    Only complete transcripts carry a trustworthy edit; anything else
    raises NoEditSegment.
    """
    if not transcript.complete:
        raise NoEditSegment("transcript is incomplete")
    for seg in reversed(transcript.segments):
        if seg.kind is SegmentKind.EDIT:
            return seg.body
    raise NoEditSegment("transcript has no edit segment")
