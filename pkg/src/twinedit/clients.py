"""Model-service client contracts, HTTP adapters, and scripted mocks.

Every neural model (reasoner LLM, perception stack, diffusion editor,
embedding/detection/quality/judge scorers) sits behind a JSON-over-HTTP
contract.  A client is any callable taking the request dict and returning
the response dict, so tests use the scripted mocks below and deployments
use HttpEndpoint.

Contracts:
  reasoner   {"messages": [...], "stop": [...], "max_tokens": int,
              "temperature": num, "seed": int} -> {"content": str}
             (content includes the stop sequence that fired)
  perception {"frames": [b64...], "labels_hint": [str...]} ->
             {"frames": [{"instances": [{"id", "category", "attributes",
              "mask": {"rle", "width", "height"}, "centroid": [px, py],
              "depth": num}...]}...]}
  editor     {"frames": [b64...], "descriptions": [str...],
              "guidance": [{"frame", "mask", "spatial", "removed"}...]}
             -> {"frames": [b64...]}
  embedding  {"kind": "image"|"text", "payload": b64-or-text} -> {"vector": [num...]}
  detection  {"image": b64, "labels": [str...]} ->
             {"detections": [{"label", "confidence", "box"}...]}
  quality    {"frames": [b64...]} -> {"score": num}
  judge      {"query": str, "frames_original": [b64...],
              "frames_edited": [b64...]} -> {"correct": bool, "rationale": str}
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Client = Callable[[dict], dict]


class EndpointUnreachable(Exception):
    pass


@dataclass
class HttpEndpoint:
    """JSON-over-HTTP adapter for any of the contracts above."""

    url: str
    timeout: float = 30.0
    retries: int = 1

    def __call__(self, request: dict) -> dict:
        import requests

        last = None
        for _ in range(max(1, self.retries)):
            try:
                resp = requests.post(self.url, json=request, timeout=self.timeout)
                resp.raise_for_status()
                return resp.json()
            except requests.RequestException as exc:
                last = exc
        raise EndpointUnreachable(f"{self.url}: {last}")


# -- scripted mocks --------------------------------------------------------


@dataclass
class ScriptedReasoner:
    """Replays canned chunks in order; each chunk must already end with the
    stop sequence it would have triggered."""

    chunks: Sequence[str]
    calls: list[dict] = field(default_factory=list)

    def __call__(self, request: dict) -> dict:
        self.calls.append(request)
        idx = len(self.calls) - 1
        if idx >= len(self.chunks):
            return {"content": ""}
        return {"content": self.chunks[idx]}


@dataclass
class MockPerception:
    """Returns the same scripted per-frame instance lists for any video."""

    frames: Sequence[list[dict]]

    def __call__(self, request: dict) -> dict:
        n = len(request.get("frames", [])) or len(self.frames)
        return {"frames": [{"instances": self.frames[t % len(self.frames)]} for t in range(n)]}


@dataclass
class EchoEditor:
    """Returns the input frames unchanged; counts invocations."""

    calls: list[dict] = field(default_factory=list)

    def __call__(self, request: dict) -> dict:
        self.calls.append(request)
        return {"frames": list(request["frames"])}


@dataclass
class RefusingEditor:
    """Fails the test if the pipeline ever reaches the editor."""

    calls: list[dict] = field(default_factory=list)

    def __call__(self, request: dict) -> dict:
        self.calls.append(request)
        raise AssertionError("editor endpoint must not be called")


@dataclass
class RuleBasedReasoner:
    """Stateless mock reasoner for benchmark runs.

    Pure function of the request (thread-safe, parallelism-invariant): it
    reads the twin JSON and query out of the prompt, picks the first object
    whose category occurs in the query (falling back to the smallest id),
    emits one execute round, then an edit appending an "edited" attribute
    to the target.  With ``malformed_edit`` set, the final edit block is
    broken JSON instead.
    """

    malformed_edit: bool = False
    never_edit: bool = False

    def __call__(self, request: dict) -> dict:
        import json as _json

        user = next(m["content"] for m in request["messages"] if m["role"] == "user")
        twin_text = user.split("Digital twin:\n", 1)[1].split("\n\nEditing query:", 1)[0]
        query = user.split("Editing query: ", 1)[1]
        assistant = request["messages"][-1]["content"] if request["messages"][-1]["role"] == "assistant" else ""
        doc = _json.loads(twin_text)
        instances = doc["frames"][0]["instances"]
        target = next(
            (i for i in instances if i["category"] in query), instances[0] if instances else None
        )
        if "<results>" not in assistant:
            think = f"<think>query: {query!r}; scanning frame 0 for the target object</think>"
            return {"content": f"{think}\n<execute>count(objects(frame=0))</execute>"}
        if self.never_edit:
            return {"content": "\n<execute>count(objects(frame=0))</execute>"}
        if self.malformed_edit or target is None:
            return {"content": "\n<edit>{</edit>"}
        for frame in doc["frames"]:
            for inst in frame["instances"]:
                if inst["id"] == target["id"]:
                    inst["attributes"] = list(inst["attributes"]) + ["edited"]
        return {"content": f"\n<edit>{_json.dumps(doc)}</edit>"}


@dataclass
class BrightenEditor:
    """Mock diffusion editor: brightens every frame by a fixed delta so the
    output genuinely differs from the input."""

    delta: int = 16
    calls: list[dict] = field(default_factory=list)

    def __call__(self, request: dict) -> dict:
        import base64
        import io

        from PIL import Image

        self.calls.append(request)
        out = []
        for payload in request["frames"]:
            img = np.asarray(Image.open(io.BytesIO(base64.b64decode(payload))), dtype=np.int16)
            bright = np.clip(img + self.delta, 0, 255).astype(np.uint8)
            buf = io.BytesIO()
            Image.fromarray(bright).save(buf, format="PNG")
            out.append(base64.b64encode(buf.getvalue()).decode("ascii"))
        return {"frames": out}


def _hash_unit_vector(payload: str, dim: int = 8) -> list[float]:
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    raw = np.frombuffer(digest[: dim * 4], dtype=np.uint32).astype(np.float64)
    v = raw / np.iinfo(np.uint32).max - 0.5
    return list(v / np.linalg.norm(v))


@dataclass
class MockEmbedding:
    """Deterministic hash-derived unit vectors; equal payloads embed equal."""

    dim: int = 8

    def __call__(self, request: dict) -> dict:
        return {"vector": _hash_unit_vector(f"{request['kind']}:{request['payload']}", self.dim)}


@dataclass
class MockDetection:
    """Detects requested labels at fixed confidences in every frame;
    labels absent from the table fall back to default_confidence (None
    means undetected)."""

    confidences: dict[str, float] = field(default_factory=dict)
    default_confidence: float | None = None

    def __call__(self, request: dict) -> dict:
        dets = []
        for label in request.get("labels", []):
            conf = self.confidences.get(label, self.default_confidence)
            if conf is not None:
                dets.append({"label": label, "confidence": conf, "box": [0.0, 0.0, 1.0, 1.0]})
        return {"detections": dets}


@dataclass
class MockQuality:
    score: float = 50.0

    def __call__(self, request: dict) -> dict:
        return {"score": self.score}


@dataclass
class MockJudge:
    """Judges correct iff the edited frames differ from the originals, or
    always per the fixed verdict when one is set."""

    verdict: bool | None = None
    rationale: str = "scripted verdict"

    def __call__(self, request: dict) -> dict:
        if self.verdict is not None:
            correct = self.verdict
        else:
            correct = request["frames_edited"] != request["frames_original"]
        return {"correct": correct, "rationale": self.rationale}
