"""Per-channel detection records -> Multidimensional Vectors.

A record carries what the three neural branches produced for one image:
boxes for vehicles, wheels and bumpers (contact-point branch), type labels
and regressed headings keyed by the vehicle box they were computed on.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

from .camera import Channel, FisheyeCamera, PixelPoint, pixel_to_ground
from .errors import GeometryError, UnknownVehicleType
from .model import (
    BBox,
    ContactPoint,
    ContactPointKind,
    MultidimensionalVector,
    TypeCatalog,
    bind_type,
    compute_azimuth,
    wrap_angle,
)

log = logging.getLogger(__name__)


class BoxClass(str, enum.Enum):
    VEHICLE = "vehicle"
    FRONT_WHEEL = "front_wheel"
    REAR_WHEEL = "rear_wheel"
    FRONT_BUMPER = "front_bumper"
    REAR_BUMPER = "rear_bumper"


PART_KIND = {
    BoxClass.FRONT_WHEEL: ContactPointKind.FW,
    BoxClass.REAR_WHEEL: ContactPointKind.RW,
    BoxClass.FRONT_BUMPER: ContactPointKind.FB,
    BoxClass.REAR_BUMPER: ContactPointKind.RB,
}

BRANCHES = ("contact", "type", "heading")


def _check_bbox(bbox) -> BBox:
    bbox = tuple(float(b) for b in bbox)
    if len(bbox) != 4 or not all(math.isfinite(b) for b in bbox):
        raise ValueError(f"bbox must be 4 finite numbers, got {bbox}")
    if bbox[2] <= 0 or bbox[3] <= 0:
        raise ValueError(f"bbox width and height must be positive, got {bbox}")
    return bbox


def _check_score(score: float) -> float:
    score = float(score)
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [0, 1]")
    return score


@dataclass(frozen=True)
class DetectedBox:
    cls: BoxClass
    bbox: BBox
    score: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "cls", BoxClass(self.cls))
        object.__setattr__(self, "bbox", _check_bbox(self.bbox))
        object.__setattr__(self, "score", _check_score(self.score))


@dataclass(frozen=True)
class TypeLabel:
    vehicle_bbox: BBox
    type_name: str
    score: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "vehicle_bbox", _check_bbox(self.vehicle_bbox))
        object.__setattr__(self, "score", _check_score(self.score))


@dataclass(frozen=True)
class HeadingEstimate:
    vehicle_bbox: BBox
    heading: float
    score: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "vehicle_bbox", _check_bbox(self.vehicle_bbox))
        object.__setattr__(self, "score", _check_score(self.score))
        if not math.isfinite(self.heading):
            raise ValueError("heading must be finite")


@dataclass(frozen=True)
class DetectionRecord:
    channel: Channel
    frame_id: int
    boxes: tuple[DetectedBox, ...] = ()
    type_labels: tuple[TypeLabel, ...] = ()
    heading_estimates: tuple[HeadingEstimate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "channel", Channel(self.channel))
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "type_labels", tuple(self.type_labels))
        object.__setattr__(self, "heading_estimates", tuple(self.heading_estimates))
        vehicles = {b.bbox for b in self.boxes if b.cls is BoxClass.VEHICLE}
        for ref in (*self.type_labels, *self.heading_estimates):
            if ref.vehicle_bbox not in vehicles:
                raise ValueError(f"label references vehicle bbox {ref.vehicle_bbox} absent from boxes")


@dataclass(frozen=True)
class AdapterConfig:
    score_threshold: float = 0.3
    # strict: untyped vehicles keep no dimensions and yield no BEV box
    strict_types: bool = False
    synthesize_bumpers: bool = False


@dataclass
class VehicleParts:
    vehicle: DetectedBox
    parts: dict[ContactPointKind, DetectedBox] = field(default_factory=dict)


@dataclass
class AdapterStats:
    dropped_parts: int = 0
    dropped_points: int = 0
    flagged_vehicles: int = 0


def contact_point_from_bbox(bbox: BBox) -> PixelPoint:
    """Midpoint of the bottom edge, top-left image origin."""
    x, y, w, h = bbox
    return PixelPoint(x + w / 2, y + h)


def _center(b: BBox) -> tuple[float, float]:
    return b[0] + b[2] / 2, b[1] + b[3] / 2


def _contains(outer: BBox, pt: tuple[float, float]) -> bool:
    x, y, w, h = outer
    return x <= pt[0] <= x + w and y <= pt[1] <= y + h


def _intersection(a: BBox, b: BBox) -> float:
    ix = min(a[0] + a[2], b[0] + b[2]) - max(a[0], b[0])
    iy = min(a[1] + a[3], b[1] + b[3]) - max(a[1], b[1])
    return max(ix, 0.0) * max(iy, 0.0)


def associate_parts(
    record: DetectionRecord, score_threshold: float = 0.3, stats: AdapterStats | None = None
) -> list[VehicleParts]:
    """Attach each wheel/bumper box to the vehicle box containing its center.

    Among containing vehicles the one with the largest intersection over the
    part's area wins, then the higher vehicle score, then the lower X. A
    vehicle keeps only the highest-scoring part of each kind.
    """
    stats = stats if stats is not None else AdapterStats()
    vehicles = sorted(
        (b for b in record.boxes if b.cls is BoxClass.VEHICLE and b.score >= score_threshold),
        key=lambda b: (b.bbox[0], b.bbox[1], b.bbox[2], b.bbox[3]),
    )
    groups = [VehicleParts(v) for v in vehicles]
    parts = sorted(
        (b for b in record.boxes if b.cls is not BoxClass.VEHICLE and b.score >= score_threshold),
        key=lambda b: (-b.score, b.bbox),
    )
    for part in parts:
        c = _center(part.bbox)
        area = part.bbox[2] * part.bbox[3]
        candidates = [g for g in groups if _contains(g.vehicle.bbox, c)]
        if not candidates:
            stats.dropped_parts += 1
            log.debug("channel %s: %s box %s matches no vehicle", record.channel.value, part.cls.value, part.bbox)
            continue
        best = min(
            candidates,
            key=lambda g: (-_intersection(g.vehicle.bbox, part.bbox) / area, -g.vehicle.score, g.vehicle.bbox[0]),
        )
        kind = PART_KIND[part.cls]
        if kind in best.parts:
            # parts arrive in descending score order, so the kept one wins
            stats.dropped_parts += 1
            continue
        best.parts[kind] = part
    return groups


def _best_for(bbox: BBox, labels):
    matching = [lab for lab in labels if lab.vehicle_bbox == bbox]
    if not matching:
        return None
    return max(matching, key=lambda lab: lab.score)


def branch_vectors(
    record: DetectionRecord,
    camera: FisheyeCamera,
    catalog: TypeCatalog,
    config: AdapterConfig = AdapterConfig(),
    stats: AdapterStats | None = None,
) -> dict[str, list[MultidimensionalVector]]:
    """Split a record into the three branch outputs, one vector per vehicle box each."""
    if camera.channel != record.channel:
        raise ValueError(f"camera {camera.channel.value} does not match record channel {record.channel.value}")
    stats = stats if stats is not None else AdapterStats()
    out: dict[str, list[MultidimensionalVector]] = {b: [] for b in BRANCHES}
    for group in associate_parts(record, config.score_threshold, stats):
        bbox = group.vehicle.bbox
        cps = []
        for kind, part in group.parts.items():
            px = contact_point_from_bbox(part.bbox)
            try:
                cps.append(ContactPoint(kind, px, pixel_to_ground(camera, px), camera.channel))
            except GeometryError as exc:
                stats.dropped_points += 1
                log.debug("channel %s: dropping %s point: %s", camera.channel.value, kind.value, exc)
        heading = _best_for(bbox, [h for h in record.heading_estimates if h.score >= config.score_threshold])
        if config.synthesize_bumpers and heading is not None and not {c.kind for c in cps} & {
            ContactPointKind.FB,
            ContactPointKind.RB,
        }:
            px = contact_point_from_bbox(bbox)
            try:
                g = pixel_to_ground(camera, px)
                cam = camera.center
                toward = math.cos(heading.heading - math.atan2(g.y - cam[1], g.x - cam[0]))
                kind = ContactPointKind.RB if toward > 0 else ContactPointKind.FB
                cps.append(ContactPoint(kind, px, g, camera.channel))
            except GeometryError as exc:
                stats.dropped_points += 1
                log.debug("channel %s: no synthesized bumper: %s", camera.channel.value, exc)
        cp_map = {c.kind: c for c in cps}
        out["contact"].append(
            MultidimensionalVector(
                channel=camera.channel,
                bbox=bbox,
                contact_points=cp_map,
                azimuth=compute_azimuth(cp_map),
                score=group.vehicle.score,
            )
        )
        label = _best_for(bbox, [t for t in record.type_labels if t.score >= config.score_threshold])
        if label is not None:
            base = MultidimensionalVector(channel=camera.channel, bbox=bbox, score=group.vehicle.score)
            try:
                out["type"].append(bind_type(base, catalog, label.type_name))
            except UnknownVehicleType as exc:
                log.warning("channel %s: %s", camera.channel.value, exc)
        if heading is not None:
            out["heading"].append(
                MultidimensionalVector(
                    channel=camera.channel,
                    bbox=bbox,
                    heading_regressed=wrap_angle(heading.heading),
                    score=group.vehicle.score,
                )
            )
    return out


def apply_type_fallback(
    vectors: list[MultidimensionalVector],
    catalog: TypeCatalog,
    config: AdapterConfig = AdapterConfig(),
    stats: AdapterStats | None = None,
) -> list[MultidimensionalVector]:
    """Give untyped vectors the catalog's fallback type, or flag them in strict mode."""
    stats = stats if stats is not None else AdapterStats()
    out = []
    for v in vectors:
        if v.vehicle_type is None:
            if config.strict_types or catalog.fallback_type is None:
                v = v.evolve(flags=v.flags | {"untyped"})
            else:
                v = bind_type(v, catalog, catalog.fallback_type).evolve(flags=v.flags | {"fallback_type"})
        if not v.contact_points and v.heading_regressed is None:
            v = v.evolve(flags=v.flags | {"no_geometry"})
        if v.flags & {"untyped", "no_geometry"}:
            stats.flagged_vehicles += 1
        out.append(v)
    return out


def assemble_channel_vectors(
    record: DetectionRecord,
    camera: FisheyeCamera,
    catalog: TypeCatalog,
    config: AdapterConfig = AdapterConfig(),
    stats: AdapterStats | None = None,
) -> list[MultidimensionalVector]:
    """One vector per vehicle box, sorted by bbox X then Y."""
    from .reid import fuse_branches

    stats = stats if stats is not None else AdapterStats()
    branches = branch_vectors(record, camera, catalog, config, stats)
    fused = fuse_branches([branches[b] for b in BRANCHES])
    return apply_type_fallback(fused, catalog, config, stats)
