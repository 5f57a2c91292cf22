"""End-to-end orchestration: perception -> reasoning -> reward -> conditioning -> editing.

The editor is only ever invoked with a schema-valid edit; malformed edits
stop the chain after reward scoring so generation is never conditioned on
broken structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .clients import Client, HttpEndpoint
from .grpo import GrpoConfig
from .metrics import FrameBuffer
from .rewards import JudgeVerdict, RewardBreakdown, RewardConfig, score_rollout
from .rollout import LoopConfig, drive_loop, extract_edit
from .twin import (
    FrameTwin,
    MaskRef,
    NotParseable,
    ObjectInstance,
    RleMask,
    SpatialProps,
    TwinDiff,
    ValidationReport,
    VideoTwin,
    diff_twins,
    mask_area_fraction,
    parse_edit,
    parse_twin,
    serialize_twin,
    to_text_descriptions,
    validate_against_schema,
)
from .videoio import frame_to_b64, read_frame_dir

DEFAULT_RESOLUTION = (832, 480)


class PerceptionUnreachable(Exception):
    pass


class MalformedPerceptionResponse(Exception):
    pass


class FixtureMissing(Exception):
    pass


class InvalidEdit(Exception):
    def __init__(self, report: ValidationReport):
        super().__init__("edit fails schema validation")
        self.report = report


@dataclass(frozen=True)
class ModelEndpoints:
    reasoner_url: str | None = None
    perception_url: str | None = None
    editor_url: str | None = None
    embedding_url: str | None = None
    detection_url: str | None = None
    quality_url: str | None = None
    judge_url: str | None = None
    timeout: float = 30.0
    retries: int = 1

    def clients(self) -> "Clients":
        def mk(url):
            return HttpEndpoint(url, self.timeout, self.retries) if url else None

        return Clients(
            reasoner=mk(self.reasoner_url),
            perception=mk(self.perception_url),
            editor=mk(self.editor_url),
            embedding=mk(self.embedding_url),
            detection=mk(self.detection_url),
            quality=mk(self.quality_url),
            judge=mk(self.judge_url),
        )


@dataclass
class Clients:
    reasoner: Client | None = None
    perception: Client | None = None
    editor: Client | None = None
    embedding: Client | None = None
    detection: Client | None = None
    quality: Client | None = None
    judge: Client | None = None


@dataclass(frozen=True)
class PipelineConfig:
    resolution: tuple[int, int] = DEFAULT_RESOLUTION
    loop: LoopConfig = field(default_factory=LoopConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    grpo: GrpoConfig = field(default_factory=GrpoConfig)
    metric_names: tuple[str, ...] = ("psnr", "ssim", "clip_text", "clip_f", "musiq", "grounding", "judge")
    frame_stride: int = 1  # subsampling stride for client-backed scorers
    seed: int = 0

    @classmethod
    def from_file(cls, path: Path) -> "PipelineConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls()
        if "resolution" in doc:
            cfg = replace(cfg, resolution=tuple(doc["resolution"]))
        if "loop" in doc:
            cfg = replace(cfg, loop=LoopConfig(**doc["loop"]))
        if "reward" in doc:
            cfg = replace(cfg, reward=RewardConfig(**doc["reward"]))
        if "grpo" in doc:
            cfg = replace(cfg, grpo=GrpoConfig(**doc["grpo"]))
        if "metrics" in doc:
            cfg = replace(cfg, metric_names=tuple(doc["metrics"]))
        if "frame_stride" in doc:
            cfg = replace(cfg, frame_stride=int(doc["frame_stride"]))
        if "seed" in doc:
            cfg = replace(cfg, seed=int(doc["seed"]))
        return cfg


@dataclass(frozen=True)
class GuidanceEntry:
    frame_index: int
    id: int
    mask_ref: MaskRef
    spatial: SpatialProps
    removed: bool = False


@dataclass(frozen=True)
class ConditioningPayload:
    text_descriptions: tuple[str, ...]
    spatial_guidance: tuple[GuidanceEntry, ...]
    frame_count: int

    def covered_keys(self) -> set[tuple[int, int]]:
        return {(g.frame_index, g.id) for g in self.spatial_guidance}

    def to_editor_request(self, frames_b64: list[str]) -> dict:
        return {
            "frames": frames_b64,
            "descriptions": list(self.text_descriptions),
            "guidance": [
                {
                    "frame": g.frame_index,
                    "id": g.id,
                    "mask": (
                        g.mask_ref
                        if isinstance(g.mask_ref, str)
                        else {"rle": list(g.mask_ref.rle), "width": g.mask_ref.width, "height": g.mask_ref.height}
                    ),
                    "spatial": {
                        "x": g.spatial.x,
                        "y": g.spatial.y,
                        "depth": g.spatial.depth,
                        "size": g.spatial.size,
                    },
                    "removed": g.removed,
                }
                for g in self.spatial_guidance
            ],
        }


def _instance_from_response(doc: dict, path: str, resolution: tuple[int, int]) -> ObjectInstance:
    for key in ("id", "category", "attributes", "mask", "centroid", "depth"):
        if key not in doc:
            raise MalformedPerceptionResponse(f"{path}.{key}: missing")
    mask_doc = doc["mask"]
    try:
        mask = RleMask(tuple(mask_doc["rle"]), mask_doc["width"], mask_doc["height"])
    except (KeyError, TypeError) as exc:
        raise MalformedPerceptionResponse(f"{path}.mask: {exc}") from exc
    w, h = resolution
    cx, cy = doc["centroid"]
    size = mask_area_fraction(mask)
    return ObjectInstance(
        id=int(doc["id"]),
        category=str(doc["category"]),
        attributes=tuple(str(a) for a in doc["attributes"]),
        mask_ref=mask,
        spatial=SpatialProps(
            x=round(min(max(cx / w, 0.0), 1.0), 6),
            y=round(min(max(cy / h, 0.0), 1.0), 6),
            depth=round(min(max(float(doc["depth"]), 0.0), 1.0), 6),
            size=round(max(size, 1e-6), 6),
        ),
    )


def build_twin(
    video_ref: Path,
    perception: Client | None,
    resolution: tuple[int, int] = DEFAULT_RESOLUTION,
) -> VideoTwin:
    """Load the fixture twin next to the video if present, else ask the
    perception service for per-frame instances and assemble a twin with
    coordinates normalized by the frame dimensions."""
    video_ref = Path(video_ref)
    fixture = video_ref / "twin.json"
    if fixture.exists():
        return parse_twin(fixture.read_text(encoding="utf-8"))
    if perception is None:
        raise FixtureMissing(f"no perception client and no fixture at {fixture}")
    frames = read_frame_dir(video_ref)
    resolution = (frames[0].width, frames[0].height) if frames else resolution
    try:
        response = perception({"frames": [frame_to_b64(f) for f in frames], "labels_hint": []})
    except Exception as exc:
        raise PerceptionUnreachable(str(exc)) from exc
    if "frames" not in response:
        raise MalformedPerceptionResponse("$.frames: missing")
    twins = []
    for t, fdoc in enumerate(response["frames"]):
        insts = [
            _instance_from_response(idoc, f"$.frames[{t}].instances[{k}]", resolution)
            for k, idoc in enumerate(fdoc.get("instances", []))
        ]
        insts.sort(key=lambda o: o.id)
        twins.append(FrameTwin(t, tuple(insts)))
    twin = VideoTwin(
        len(twins),
        tuple(twins),
        metadata=(("resolution", f"{resolution[0]}x{resolution[1]}"), ("source", str(video_ref))),
    )
    return parse_twin(serialize_twin(twin))  # revalidate through the schema


def build_conditioning(original: VideoTwin, edit_text: str) -> ConditioningPayload:
    """Descriptions plus per-frame mask/position guidance for every object
    the edit modified; removed objects carry a removal flag and their
    original mask."""
    report = validate_against_schema(edit_text, original)
    if not report.valid:
        raise InvalidEdit(report)
    edited = parse_edit(edit_text)
    diff = diff_twins(original, edited)
    descriptions = to_text_descriptions(edited, diff)
    removed = set(diff.removed)
    guidance = []
    for t, i in sorted(diff.modified_keys()):
        src = original if (t, i) in removed else edited
        inst = src.frames[t].instance(i)
        guidance.append(GuidanceEntry(t, i, inst.mask_ref, inst.spatial, removed=(t, i) in removed))
    return ConditioningPayload(tuple(descriptions), tuple(guidance), edited.frame_count)


@dataclass
class RunRecord:
    video_ref: str
    query: str
    transcript: str = ""
    breakdown: RewardBreakdown | None = None
    payload: ConditioningPayload | None = None
    edited_frames_b64: list[str] | None = None
    verdict: JudgeVerdict | None = None
    artifact_dir: str | None = None
    failed_stage: str | None = None
    error: str | None = None

    def to_record(self) -> dict:
        return {
            "video_ref": self.video_ref,
            "query": self.query,
            "transcript": self.transcript,
            "reward": self.breakdown.to_record() if self.breakdown else None,
            "descriptions": list(self.payload.text_descriptions) if self.payload else None,
            "guidance_count": len(self.payload.spatial_guidance) if self.payload else None,
            "edited_frame_count": len(self.edited_frames_b64) if self.edited_frames_b64 else 0,
            "artifact_dir": self.artifact_dir,
            "failed_stage": self.failed_stage,
            "error": self.error,
        }


def edit_video(
    video_ref: Path,
    query: str,
    cfg: PipelineConfig,
    clients: Clients,
    use_editor: bool = True,
    artifact_dir: Path | None = None,
) -> RunRecord:
    """Full chain for one sample.  Stages record their failure instead of
    raising past the RunRecord; the editor is skipped entirely when the
    edit is invalid or use_editor is off."""
    record = RunRecord(str(video_ref), query)
    try:
        twin = build_twin(video_ref, clients.perception, cfg.resolution)
    except Exception as exc:
        record.failed_stage, record.error = "perception", str(exc)
        return record
    if clients.reasoner is None:
        record.failed_stage, record.error = "reasoning", "no reasoner client configured"
        return record
    transcript, outcomes = drive_loop(clients.reasoner, twin, query, cfg.loop, seed=cfg.seed)
    record.transcript = transcript.source

    frames = None
    edited_b64 = None
    verdict = None
    try:
        edit_text = extract_edit(transcript)
    except Exception:
        edit_text = ""
    payload = None
    if edit_text:
        try:
            payload = build_conditioning(twin, edit_text)
        except (InvalidEdit, NotParseable):
            payload = None
    record.payload = payload

    if payload is not None and use_editor and clients.editor is not None:
        try:
            frames = read_frame_dir(video_ref)
            originals_b64 = [frame_to_b64(f) for f in frames]
            response = clients.editor(payload.to_editor_request(originals_b64))
            edited_b64 = list(response["frames"])
            record.edited_frames_b64 = edited_b64
        except Exception as exc:
            record.failed_stage, record.error = "editing", str(exc)
    if clients.judge is not None and edited_b64 is not None:
        try:
            originals_b64 = [frame_to_b64(f) for f in (frames or read_frame_dir(video_ref))]
            v = clients.judge(
                {"query": query, "frames_original": originals_b64, "frames_edited": edited_b64}
            )
            verdict = JudgeVerdict(bool(v["correct"]), str(v.get("rationale", "")))
            record.verdict = verdict
        except Exception as exc:
            record.failed_stage, record.error = "judging", str(exc)

    record.breakdown = score_rollout(transcript, outcomes, twin, verdict, cfg.reward)
    if artifact_dir is not None:
        artifact_dir = Path(artifact_dir)
        artifact_dir.mkdir(parents=True, exist_ok=True)
        (artifact_dir / "run_record.json").write_text(
            json.dumps(record.to_record(), indent=2, sort_keys=True), encoding="utf-8"
        )
        record.artifact_dir = str(artifact_dir)
    return record
