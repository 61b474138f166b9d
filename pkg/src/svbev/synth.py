"""Synthetic scenes, forward rendering into detection records, and scoring.

The renderer is the inverse of the pipeline: ground-truth vehicles give
their true contact points, those are projected through the rig, and
nominal part boxes are placed so that their bottom-edge midpoints land on
the projected pixels. Optional noise perturbs pixels; a slope tilts the
true ground (``z = slope * (x - pivot)``, pivot under the middle of the ego
body by default) while the pipeline keeps assuming z = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import shapely

from .adapters import BoxClass, DetectedBox, DetectionRecord, HeadingEstimate, TypeLabel
from .camera import CHANNEL_ORDER, CameraRig, Channel, GroundPoint, PixelPoint, project_point
from .errors import GeometryError
from .model import BevBox, ContactPointKind, TypeCatalog, VehicleTypeSpec, lookup_type_attrs, wrap_angle

FW, RW, FB, RB = ContactPointKind.FW, ContactPointKind.RW, ContactPointKind.FB, ContactPointKind.RB
ALL_KINDS = frozenset(ContactPointKind)

# nominal part box sizes in pixels (W, L); only bottom-edge midpoints matter
WHEEL_BOX = (40.0, 40.0)
BUMPER_BOX = (120.0, 30.0)
VEHICLE_SCORE = 0.9
PART_SCORE = 0.8
LABEL_SCORE = 0.9
# a side counts as facing an observer only beyond this |sin| / distance margin
FACING_EPS = 1e-6
DETECTION_RANGE = 20.0  # m from the camera; detectors do not fire beyond

_PART_CLASS = {
    FW: BoxClass.FRONT_WHEEL,
    RW: BoxClass.REAR_WHEEL,
    FB: BoxClass.FRONT_BUMPER,
    RB: BoxClass.REAR_BUMPER,
}


@dataclass(frozen=True)
class GroundTruthVehicle:
    id: int
    center: GroundPoint
    heading: float
    type_name: str


@dataclass(frozen=True)
class NoiseSpec:
    pixel_sigma: float = 0.0
    quantize: bool = False
    drop_probability: float = 0.0
    drop_kinds: frozenset = ALL_KINDS
    slope_gradient: float = 0.0
    # x where the tilted true ground meets z = 0; the middle of the default ego body
    slope_pivot_x: float = 1.35
    heading_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "drop_kinds", frozenset(ContactPointKind(k) for k in self.drop_kinds))
        if self.pixel_sigma < 0 or self.heading_sigma < 0:
            raise ValueError("noise sigmas must be non-negative")
        if not 0 <= self.drop_probability <= 1:
            raise ValueError("drop_probability must lie in [0, 1]")
        if not (math.isfinite(self.slope_gradient) and math.isfinite(self.slope_pivot_x)):
            raise ValueError("slope_gradient and slope_pivot_x must be finite")


@dataclass(frozen=True)
class EgoFootprint:
    """Ego body rectangle in the ego frame (origin under the rear axle)."""

    x_min: float = -1.0
    x_max: float = 3.7
    y_min: float = -0.95
    y_max: float = 0.95

    def polygon(self) -> np.ndarray:
        return np.array(
            [[self.x_max, self.y_max], [self.x_min, self.y_max], [self.x_min, self.y_min], [self.x_max, self.y_min]]
        )


@dataclass(frozen=True)
class TrueContactPoints:
    fw_left: GroundPoint
    rw_left: GroundPoint
    fw_right: GroundPoint
    rw_right: GroundPoint
    fb: GroundPoint
    rb: GroundPoint

    def wheels(self, side: str) -> tuple[GroundPoint, GroundPoint]:
        """(FW, RW) on ``side`` ('left' or 'right')."""
        return (self.fw_left, self.rw_left) if side == "left" else (self.fw_right, self.rw_right)


def true_contact_points(v: GroundTruthVehicle, spec: VehicleTypeSpec) -> TrueContactPoints:
    c, s = math.cos(v.heading), math.sin(v.heading)

    def at(fwd: float, left: float) -> GroundPoint:
        return GroundPoint(v.center.x + fwd * c - left * s, v.center.y + fwd * s + left * c)

    front_axle = spec.l / 2 - spec.fo
    rear_axle = -(spec.l / 2 - spec.ro)
    hw = spec.w / 2
    return TrueContactPoints(
        fw_left=at(front_axle, hw),
        rw_left=at(rear_axle, hw),
        fw_right=at(front_axle, -hw),
        rw_right=at(rear_axle, -hw),
        fb=at(spec.l / 2, 0.0),
        rb=at(-spec.l / 2, 0.0),
    )


def footprint(v: GroundTruthVehicle, spec: VehicleTypeSpec) -> np.ndarray:
    """Corners A, B, D, C (counter-clockwise ring) of a vehicle's rectangle."""
    c, s = math.cos(v.heading), math.sin(v.heading)
    hl, hw = spec.l / 2, spec.w / 2
    ring = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
    return np.array([[v.center.x + f * c - l * s, v.center.y + f * s + l * c] for f, l in ring])


def polygon_gap(a, b) -> float:
    """Euclidean distance between two polygons given as vertex rings (0 when they overlap)."""
    return float(shapely.Polygon(a).distance(shapely.Polygon(b)))


def distance_to_ego(v: GroundTruthVehicle, spec: VehicleTypeSpec, ego: EgoFootprint = EgoFootprint()) -> float:
    return polygon_gap(footprint(v, spec), ego.polygon())


def center_distance_to_ego(center: GroundPoint, ego: EgoFootprint = EgoFootprint()) -> float:
    """Distance from a point to the ego rectangle (0 inside it)."""
    dx = max(ego.x_min - center.x, 0.0, center.x - ego.x_max)
    dy = max(ego.y_min - center.y, 0.0, center.y - ego.y_max)
    return math.hypot(dx, dy)


def sample_scene(
    rng: np.random.Generator,
    n_vehicles: int,
    catalog: TypeCatalog,
    types: Sequence[str] | None = None,
    radius: float = 5.0,
    min_gap: float = 0.3,
    clearance: float = 0.6,
    ego: EgoFootprint = EgoFootprint(),
    max_attempts: int = 200,
) -> list[GroundTruthVehicle]:
    """Place up to ``n_vehicles`` with centers within ``radius`` m of the ego body.

    Poses are uniform over the admissible region (rejection sampling): the
    footprint keeps ``min_gap`` from the ego body and ``clearance`` from
    every other vehicle. A vehicle that finds no free spot within
    ``max_attempts`` is skipped, so crowded requests may return fewer.
    """
    types = list(types or catalog.names())
    placed: list[GroundTruthVehicle] = []
    shapes: list[shapely.Polygon] = []
    radii: list[float] = []
    ego_shape = shapely.Polygon(ego.polygon())
    for _ in range(n_vehicles):
        type_name = types[rng.integers(len(types))]
        spec = lookup_type_attrs(catalog, type_name)
        # candidates are drawn and screened as one batch; the first admissible wins
        x = rng.uniform(ego.x_min - radius, ego.x_max + radius, max_attempts)
        y = rng.uniform(ego.y_min - radius, ego.y_max + radius, max_attempts)
        heading = rng.uniform(-math.pi, math.pi, max_attempts)
        dx = np.maximum.reduce([ego.x_min - x, np.zeros_like(x), x - ego.x_max])
        dy = np.maximum.reduce([ego.y_min - y, np.zeros_like(y), y - ego.y_max])
        keep = np.hypot(dx, dy) <= radius
        x, y, heading = x[keep], y[keep], heading[keep]
        if not len(x):
            continue
        c, s = np.cos(heading), np.sin(heading)
        hl, hw = spec.l / 2, spec.w / 2
        ring = np.array([(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)])
        rings = np.stack(
            [x[:, None] + ring[:, 0] * c[:, None] - ring[:, 1] * s[:, None],
             y[:, None] + ring[:, 0] * s[:, None] + ring[:, 1] * c[:, None]],
            axis=-1,
        )
        cand = shapely.polygons(rings)
        r = math.hypot(hl, hw)
        ok = shapely.distance(cand, ego_shape) >= min_gap
        if placed:
            # exact distances only where bounding circles come within the clearance
            px = np.array([v.center.x for v in placed])
            py = np.array([v.center.y for v in placed])
            near = np.hypot(x[:, None] - px, y[:, None] - py) - r - np.array(radii) < clearance
            rows, cols = np.nonzero(near & ok[:, None])
            if len(rows):
                d = shapely.distance(cand[rows], np.array(shapes, dtype=object)[cols])
                ok[rows[d < clearance]] = False
        hits = np.flatnonzero(ok)
        if not len(hits):
            continue
        i = hits[0]
        placed.append(
            GroundTruthVehicle(len(placed) + 1, GroundPoint(float(x[i]), float(y[i])), wrap_angle(float(heading[i])), type_name)
        )
        shapes.append(cand[i])
        radii.append(r)
    return placed


def sample_adjacent_lane(
    rng: np.random.Generator,
    catalog: TypeCatalog,
    type_name: str = "car",
    x_range: tuple[float, float] = (-2.5, 2.5),
    y_max: float = 3.5,
    min_gap: float = 0.3,
    heading_jitter: float = math.radians(15.0),
    ego: EgoFootprint = EgoFootprint(),
) -> GroundTruthVehicle:
    """One vehicle alongside the ego body, roughly parallel to it.

    The center lies in ``x_range`` measured from the middle of the ego body
    and at a lateral offset uniform between the closest admissible offset
    and ``y_max``, on a random side; the heading is 0 or pi plus a uniform
    jitter of up to ``heading_jitter``.
    """
    spec = lookup_type_attrs(catalog, type_name)
    y_min = ego.y_max + min_gap + spec.w / 2
    side = 1.0 if rng.random() < 0.5 else -1.0
    x = (ego.x_min + ego.x_max) / 2 + rng.uniform(*x_range)
    y = side * rng.uniform(y_min, max(y_min, y_max))
    heading = (0.0 if rng.random() < 0.5 else math.pi) + rng.uniform(-heading_jitter, heading_jitter)
    return GroundTruthVehicle(1, GroundPoint(x, y), wrap_angle(heading), type_name)


# ---------------------------------------------------------------------------
# rendering


@dataclass
class VehicleVisibility:
    """What the renderer emitted for one truth vehicle."""

    truth_id: int
    side: str | None
    kinds_by_channel: dict[Channel, frozenset] = field(default_factory=dict)

    @property
    def channels(self) -> list[Channel]:
        return [c for c in CHANNEL_ORDER if c in self.kinds_by_channel]

    @property
    def posable_channels(self) -> list[Channel]:
        """Channels whose points alone support a pose case."""
        return [c for c in self.channels if _posable(self.kinds_by_channel[c])]

    @property
    def visible(self) -> bool:
        """True when some single channel supports a pose case on its own."""
        return bool(self.posable_channels)


def _posable(kinds: frozenset) -> bool:
    # bumper-only relies on the regressed heading, which the renderer always emits
    return {FW, RW} <= kinds or {RW, RB} <= kinds or {FW, FB} <= kinds or bool(kinds & {FB, RB})


@dataclass
class RenderResult:
    records: dict[Channel, DetectionRecord]
    visibility: dict[int, VehicleVisibility]


def _cross(d: tuple[float, float], p: GroundPoint, q: np.ndarray) -> float:
    """z of d x (q - p): positive when q lies left of the line through p along d."""
    return d[0] * (q[1] - p.y) - d[1] * (q[0] - p.x)


def facing_side(v: GroundTruthVehicle, pts: TrueContactPoints) -> str | None:
    """Which wheel side faces the ego origin, by the sign test on each wheel line."""
    left = math.sin(v.heading - math.atan2(pts.rw_left.y, pts.rw_left.x))
    right = math.sin(v.heading - math.atan2(pts.rw_right.y, pts.rw_right.x))
    if left > FACING_EPS:
        return "left"
    if right < -FACING_EPS:
        return "right"
    return None


def visible_kinds(
    v: GroundTruthVehicle, pts: TrueContactPoints, side: str | None, camera_center: np.ndarray
) -> dict[ContactPointKind, GroundPoint]:
    """Contact points whose face is turned toward a camera.

    Wheels of the side facing the ego origin are seen by cameras on that
    same side of the wheel line; a bumper is seen by cameras beyond its face.
    """
    d = (math.cos(v.heading), math.sin(v.heading))
    out: dict[ContactPointKind, GroundPoint] = {}
    if side is not None:
        fw, rw = pts.wheels(side)
        sign = 1.0 if side == "left" else -1.0
        if sign * _cross(d, rw, camera_center) > FACING_EPS:
            out[FW], out[RW] = fw, rw
    if (camera_center[0] - pts.fb.x) * d[0] + (camera_center[1] - pts.fb.y) * d[1] > FACING_EPS:
        out[FB] = pts.fb
    if (camera_center[0] - pts.rb.x) * d[0] + (camera_center[1] - pts.rb.y) * d[1] < -FACING_EPS:
        out[RB] = pts.rb
    return out


def _part_box(kind: ContactPointKind, px: PixelPoint) -> tuple[float, float, float, float]:
    w, h = WHEEL_BOX if kind in (FW, RW) else BUMPER_BOX
    return (px.u - w / 2, px.v - h, w, h)


def _hull(boxes: Iterable[tuple[float, float, float, float]]) -> tuple[float, float, float, float]:
    boxes = list(boxes)
    x0 = min(b[0] for b in boxes)
    y0 = min(b[1] for b in boxes)
    x1 = max(b[0] + b[2] for b in boxes)
    y1 = max(b[1] + b[3] for b in boxes)
    return (x0, y0, x1 - x0, y1 - y0)


def _inside(box, pt) -> bool:
    return box[0] <= pt[0] <= box[0] + box[2] and box[1] <= pt[1] <= box[1] + box[3]


def render_detections(
    scene: Sequence[GroundTruthVehicle],
    rig: CameraRig,
    noise: NoiseSpec = NoiseSpec(),
    catalog: TypeCatalog | None = None,
    frame_id: int = 0,
    max_range: float = DETECTION_RANGE,
) -> RenderResult:
    """Project a scene through every camera into per-channel detection records.

    Parts whose box center falls inside another vehicle's box in the same
    image are treated as occluded and removed, so every emitted part
    belongs unambiguously to its own vehicle box. Points farther than
    ``max_range`` from a camera are not detected by it.
    """
    from .model import default_catalog

    catalog = catalog or default_catalog()
    rng = np.random.default_rng([noise.seed, frame_id])
    visibility = {v.id: VehicleVisibility(v.id, None) for v in scene}
    geometry = []
    for v in scene:
        spec = lookup_type_attrs(catalog, v.type_name)
        pts = true_contact_points(v, spec)
        side = facing_side(v, pts)
        visibility[v.id].side = side
        geometry.append((v, pts, side))

    records = {}
    for cam in rig:
        center = cam.center
        parts_by_vehicle: dict[int, dict[ContactPointKind, tuple]] = {}
        for v, pts, side in geometry:
            parts = {}
            for kind, gp in visible_kinds(v, pts, side, center).items():
                if math.hypot(gp.x - center[0], gp.y - center[1]) > max_range:
                    continue
                p3 = np.array([gp.x, gp.y, noise.slope_gradient * (gp.x - noise.slope_pivot_x)])
                try:
                    px = project_point(cam, p3)
                except GeometryError:
                    continue
                if not cam.in_image(px):
                    continue
                u, vv = px.u, px.v
                if noise.pixel_sigma > 0:
                    u += rng.normal(0.0, noise.pixel_sigma)
                    vv += rng.normal(0.0, noise.pixel_sigma)
                if noise.quantize:
                    u, vv = float(round(u)), float(round(vv))
                if kind in noise.drop_kinds and noise.drop_probability > 0 and rng.random() < noise.drop_probability:
                    continue
                parts[kind] = _part_box(kind, PixelPoint(u, vv))
            if parts:
                parts_by_vehicle[v.id] = parts

        hulls = {vid: _hull(p.values()) for vid, p in parts_by_vehicle.items()}
        for vid, parts in parts_by_vehicle.items():
            for kind in list(parts):
                b = parts[kind]
                c = (b[0] + b[2] / 2, b[1] + b[3] / 2)
                if any(_inside(h, c) for other, h in hulls.items() if other != vid):
                    del parts[kind]

        boxes, labels, headings = [], [], []
        for v, _, _ in geometry:
            parts = parts_by_vehicle.get(v.id)
            if not parts:
                continue
            vbox = _hull(parts.values())
            boxes.append(DetectedBox(BoxClass.VEHICLE, vbox, VEHICLE_SCORE))
            for kind, b in parts.items():
                boxes.append(DetectedBox(_PART_CLASS[kind], b, PART_SCORE))
            labels.append(TypeLabel(vbox, v.type_name, LABEL_SCORE))
            heading = v.heading + (rng.normal(0.0, noise.heading_sigma) if noise.heading_sigma > 0 else 0.0)
            headings.append(HeadingEstimate(vbox, wrap_angle(heading), LABEL_SCORE))
            visibility[v.id].kinds_by_channel[cam.channel] = frozenset(parts)
        records[cam.channel] = DetectionRecord(cam.channel, frame_id, tuple(boxes), tuple(labels), tuple(headings))
    return RenderResult(records, visibility)


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class EvalThresholds:
    x_gate: float = 0.25
    # y gates per distance interval [0, 2), [2, 3), [3, 5]
    y_gates: tuple[float, float, float] = (0.20, 0.40, 0.50)
    y_bounds: tuple[float, float, float, float] = (0.0, 2.0, 3.0, 5.0)
    match_gate: float = 2.0


@dataclass(frozen=True)
class TargetError:
    truth_id: int
    obj_id: int | None
    distance: float
    dx: float
    dy: float
    dheading: float
    interval: int | None
    x_ok: bool
    y_ok: bool | None


@dataclass
class ErrorReport:
    targets: list[TargetError]
    false_positives: list[int | None]
    misses: list[int]
    thresholds: EvalThresholds

    @property
    def x_rate(self) -> float:
        return _rate([t.x_ok for t in self.targets])

    def y_rate(self, interval: int) -> float:
        return _rate([t.y_ok for t in self.targets if t.interval == interval])

    def y_count(self, interval: int) -> int:
        return sum(1 for t in self.targets if t.interval == interval)

    @property
    def max_center_error(self) -> float:
        return max((math.hypot(t.dx, t.dy) for t in self.targets), default=0.0)

    @property
    def max_heading_error(self) -> float:
        return max((abs(t.dheading) for t in self.targets), default=0.0)

    def summary(self) -> dict:
        th = self.thresholds
        intervals = []
        for i in range(3):
            intervals.append(
                {
                    "range_m": [th.y_bounds[i], th.y_bounds[i + 1]],
                    "gate_m": th.y_gates[i],
                    "count": self.y_count(i),
                    "qualified_rate": self.y_rate(i),
                }
            )
        return {
            "matched": len(self.targets),
            "false_positives": len(self.false_positives),
            "misses": len(self.misses),
            "x_gate_m": th.x_gate,
            "x_qualified_rate": self.x_rate,
            "y_intervals": intervals,
            "max_center_error_m": self.max_center_error,
            "max_heading_error_rad": self.max_heading_error,
        }

    def extend(self, other: ErrorReport) -> None:
        self.targets.extend(other.targets)
        self.false_positives.extend(other.false_positives)
        self.misses.extend(other.misses)


def _rate(flags: list) -> float:
    return sum(1 for f in flags if f) / len(flags) if flags else 1.0


def y_interval(distance: float, th: EvalThresholds) -> int | None:
    b = th.y_bounds
    if distance < b[0] or distance > b[3]:
        return None
    if distance < b[1]:
        return 0
    if distance < b[2]:
        return 1
    return 2


def evaluate(
    estimates: Sequence[BevBox],
    truth: Sequence[GroundTruthVehicle],
    catalog: TypeCatalog,
    thresholds: EvalThresholds = EvalThresholds(),
    ego: EgoFootprint = EgoFootprint(),
) -> ErrorReport:
    """Match estimates to truth by nearest center and score the errors."""
    pairs = []
    for i, e in enumerate(estimates):
        for j, t in enumerate(truth):
            d = e.center.distance(t.center)
            if d <= thresholds.match_gate:
                pairs.append((d, i, j))
    pairs.sort()
    used_e, used_t = set(), set()
    targets = []
    for _, i, j in pairs:
        if i in used_e or j in used_t:
            continue
        used_e.add(i)
        used_t.add(j)
        e, t = estimates[i], truth[j]
        dist = distance_to_ego(t, lookup_type_attrs(catalog, t.type_name), ego)
        interval = y_interval(dist, thresholds)
        dx, dy = e.center.x - t.center.x, e.center.y - t.center.y
        targets.append(
            TargetError(
                truth_id=t.id,
                obj_id=e.obj_id,
                distance=dist,
                dx=dx,
                dy=dy,
                dheading=wrap_angle(e.heading - t.heading),
                interval=interval,
                x_ok=abs(dx) <= thresholds.x_gate,
                y_ok=None if interval is None else abs(dy) <= thresholds.y_gates[interval],
            )
        )
    targets.sort(key=lambda t: t.truth_id)
    fps = [estimates[i].obj_id for i in range(len(estimates)) if i not in used_e]
    misses = [truth[j].id for j in range(len(truth)) if j not in used_t]
    return ErrorReport(targets, fps, misses, thresholds)
