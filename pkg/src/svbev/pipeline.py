"""Frame loop: detection records -> vectors -> ReID -> BEV boxes.

Stage order per frame:

    branch_adapters   per channel: contact points, type and heading branches
    reid_stage1       per channel: merge branches sharing a vehicle box
    reid_stage2       per channel: proximity ids, continued from the last frame
    reid_stage3       all channels: merge observations of one target
    bev_generator     per target: center, heading, corners
    reconcile         merge targets whose boxes contain each other's center

Errors on one target are recorded in the diagnostics and never abort the frame.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .adapters import AdapterConfig, AdapterStats, DetectionRecord, apply_type_fallback, branch_vectors, BRANCHES
from .bev import generate_bev_vector
from .camera import CHANNEL_ORDER, CameraRig, Channel
from .errors import MismatchedFrameIds, SvbevError
from .model import BevBox, MultidimensionalVector, TypeCatalog
from .reid import FusionConfig, IdAllocator, assign_channel_ids, fuse_branches, fuse_group, merge_bev_targets

STAGES = ("branch_adapters", "reid_stage1", "reid_stage2", "reid_stage3", "bev_generator", "reconcile")


@dataclass(frozen=True)
class PipelineConfig:
    adapter: AdapterConfig = AdapterConfig()
    fusion: FusionConfig = FusionConfig()
    reconcile: bool = True


@dataclass
class PipelineState:
    ids: IdAllocator = field(default_factory=IdAllocator)
    prior: list[MultidimensionalVector] = field(default_factory=list)
    frames_seen: int = 0


@dataclass
class FrameResult:
    frame_id: int
    bev_boxes: list[BevBox]
    vectors: list[MultidimensionalVector]
    stage_timings: dict[str, float] = field(compare=False)
    diagnostics: dict = field(default_factory=dict)


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}
        self._t = time.perf_counter_ns()

    def lap(self, stage: str) -> None:
        now = time.perf_counter_ns()
        self.timings[stage] = (now - self._t) / 1000.0
        self._t = now


def _normalize_records(records) -> dict[Channel, DetectionRecord]:
    if isinstance(records, Mapping):
        records = records.values()
    out: dict[Channel, DetectionRecord] = {}
    for r in records:
        if r.channel in out:
            raise ValueError(f"two records for channel {r.channel.value}")
        out[r.channel] = r
    return out


def process_frame(
    records: Mapping[Channel, DetectionRecord] | Iterable[DetectionRecord],
    state: PipelineState,
    rig: CameraRig,
    catalog: TypeCatalog,
    config: PipelineConfig = PipelineConfig(),
    frame_id: int | None = None,
) -> FrameResult:
    """Run one frame and update ``state`` for id continuity."""
    by_channel = _normalize_records(records)
    frame_ids = {r.frame_id for r in by_channel.values()} | ({frame_id} if frame_id is not None else set())
    if len(frame_ids) > 1:
        raise MismatchedFrameIds(f"records span frames {sorted(frame_ids)}")
    fid = frame_ids.pop() if frame_ids else state.frames_seen
    timer = _Timer()
    stats = AdapterStats()

    branches = {
        ch: branch_vectors(by_channel[ch], rig[ch], catalog, config.adapter, stats)
        for ch in CHANNEL_ORDER
        if ch in by_channel
    }
    timer.lap("branch_adapters")

    fused = {
        ch: apply_type_fallback(fuse_branches([b[name] for name in BRANCHES]), catalog, config.adapter, stats)
        for ch, b in branches.items()
    }
    timer.lap("reid_stage1")

    idd = {ch: assign_channel_ids(vs, state.prior, config.fusion, state.ids) for ch, vs in fused.items()}
    timer.lap("reid_stage2")

    targets = merge_bev_targets(idd, config.fusion, state.ids)
    timer.lap("reid_stage3")

    failures = []
    boxes: dict[int, BevBox] = {}
    for v in targets:
        if "untyped" in v.flags:
            failures.append({"obj_id": v.obj_id, "error": "Untyped", "message": "no type label in strict mode"})
            continue
        try:
            boxes[v.obj_id] = generate_bev_vector(v)
        except SvbevError as exc:
            failures.append({"obj_id": v.obj_id, "error": type(exc).__name__, "message": str(exc)})
    timer.lap("bev_generator")

    reconciled = 0
    if config.reconcile:
        targets, boxes, reconciled = _reconcile(targets, boxes, config.fusion)
    timer.lap("reconcile")

    bev_boxes = [boxes[v.obj_id] for v in targets if v.obj_id in boxes]
    diagnostics = {
        "dropped_parts": stats.dropped_parts,
        "dropped_points": stats.dropped_points,
        "flagged_vehicles": stats.flagged_vehicles,
        "unfused_vectors": sum(1 for v in targets if v.obj_id not in boxes),
        "reconciled": reconciled,
        "failures": failures,
    }
    state.prior = list(targets)
    state.frames_seen += 1
    return FrameResult(fid, bev_boxes, list(targets), timer.timings, diagnostics)


def _reconcile(targets, boxes, fusion_config):
    """Fuse targets whose boxes contain each other's center.

    Observations of one vehicle that share no contact point kind within the
    proximity gate (say wheels from a side camera and only the rear bumper
    from the rear camera) survive stage 3 as separate targets; their boxes
    then overlap almost exactly.
    """
    ids = [v.obj_id for v in targets if v.obj_id in boxes]
    parent = {i: i for i in ids}

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for a_idx, a in enumerate(ids):
        for b in ids[a_idx + 1 :]:
            ba, bb = boxes[a], boxes[b]
            if ba.contains(bb.center) or bb.contains(ba.center):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in ids:
        groups.setdefault(find(i), []).append(i)
    merged = {root: members for root, members in groups.items() if len(members) > 1}
    if not merged:
        return targets, boxes, 0

    by_id = {v.obj_id: v for v in targets}
    absorbed = {i for members in merged.values() for i in members}
    out_targets = [v for v in targets if v.obj_id not in absorbed]
    out_boxes = {k: b for k, b in boxes.items() if k not in absorbed}
    for root, members in merged.items():
        fused = fuse_group([by_id[i] for i in members], fusion_config).evolve(obj_id=root)
        try:
            box = generate_bev_vector(fused)
        except SvbevError:
            # keep the box built from the most geometry
            rank = {"two_wheels": 0, "wheel_plus_bumper": 1, "bumper_only": 2}
            best = min(members, key=lambda i: (rank.get(boxes[i].case, 3), i))
            box = replace(boxes[best], obj_id=root)
        out_targets.append(fused)
        out_boxes[root] = box
    out_targets.sort(key=lambda v: v.obj_id)
    return out_targets, out_boxes, sum(len(m) - 1 for m in merged.values())


class Pipeline:
    """Owns the calibration, catalog and id state for a stream of frames."""

    def __init__(self, rig: CameraRig, catalog: TypeCatalog, config: PipelineConfig = PipelineConfig()):
        self.rig = rig
        self.catalog = catalog
        self.config = config
        self.state = PipelineState()

    def process_frame(self, records, frame_id: int | None = None) -> FrameResult:
        return process_frame(records, self.state, self.rig, self.catalog, self.config, frame_id)

    def reset(self) -> None:
        self.state = PipelineState()
