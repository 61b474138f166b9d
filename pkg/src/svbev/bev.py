"""Center and heading recovery from ground contact points.

Three cases, tried in order of how much geometry they use:

1. two wheels on one side (FW, RW): heading from the wheel line, corners
   from the overhangs, center half a width inward;
2. one wheel and the bumper on the same end (RW + RB, or FW + FB): the
   wheel-bumper line is offset from the heading by ``atan((w/2)/overhang)``;
3. a single bumper plus the regressed heading.

Visible side: the target's left side faces the ego origin when
``sin(heading - azimuth) > 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .camera import GroundPoint
from .errors import (
    DegenerateSide,
    InsufficientGeometry,
    MissingRegressedHeading,
    PointsCoincident,
    PoseError,
    WheelsCoincident,
)
from .model import (
    BevBox,
    ContactPoint,
    ContactPointKind,
    MultidimensionalVector,
    VehicleTypeSpec,
    wrap_angle,
)

MIN_POINT_SEPARATION = 0.1
SIDE_EPS = 1e-9

FW, RW, FB, RB = ContactPointKind.FW, ContactPointKind.RW, ContactPointKind.FB, ContactPointKind.RB


class VisibleSide(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> int:
        """+1 when the observed wheels sit on the target's left edge."""
        return 1 if self is VisibleSide.LEFT else -1

    def flipped(self) -> VisibleSide:
        return VisibleSide.RIGHT if self is VisibleSide.LEFT else VisibleSide.LEFT


class PoseCase(str, enum.Enum):
    TWO_WHEELS = "two_wheels"
    WHEEL_PLUS_BUMPER = "wheel_plus_bumper"
    BUMPER_ONLY = "bumper_only"


@dataclass(frozen=True)
class PoseEstimate:
    center: GroundPoint
    heading: float
    case_used: PoseCase
    side: VisibleSide | None = None


def _dir(phi: float) -> tuple[float, float]:
    return math.cos(phi), math.sin(phi)


def _offset(p: GroundPoint, phi: float, dist: float) -> GroundPoint:
    c, s = _dir(phi)
    return GroundPoint(p.x + dist * c, p.y + dist * s)


def visible_side(heading: float, azimuth: float) -> VisibleSide:
    s = math.sin(heading - azimuth)
    if abs(s) < SIDE_EPS:
        raise DegenerateSide(f"target axis points at the ego origin (sin={s:.3g})")
    return VisibleSide.LEFT if s > 0 else VisibleSide.RIGHT


def heading_from_two_wheels(fw: GroundPoint, rw: GroundPoint) -> float:
    if fw.distance(rw) <= MIN_POINT_SEPARATION:
        raise WheelsCoincident(f"wheels {fw.distance(rw):.3f} m apart")
    return wrap_angle(math.atan2(fw.y - rw.y, fw.x - rw.x))


def pose_case1(fw: GroundPoint, rw: GroundPoint, spec: VehicleTypeSpec, side: VisibleSide) -> PoseEstimate:
    phi = heading_from_two_wheels(fw, rw)
    a = _offset(fw, phi, spec.fo)
    b = _offset(rw, phi, -spec.ro)
    m = GroundPoint((a.x + b.x) / 2, (a.y + b.y) / 2)
    # observed edge is on the left: step right (phi - 90deg) to reach the center
    center = _offset(m, phi - side.sign * math.pi / 2, spec.w / 2)
    return PoseEstimate(center, phi, PoseCase.TWO_WHEELS, side)


def pose_case2(rw: GroundPoint, rb: GroundPoint, spec: VehicleTypeSpec, side: VisibleSide) -> PoseEstimate:
    if rw.distance(rb) <= MIN_POINT_SEPARATION:
        raise PointsCoincident(f"rear wheel and bumper {rw.distance(rb):.3f} m apart")
    gamma = math.atan2(rw.y - rb.y, rw.x - rb.x)
    phi_off = math.atan((spec.w / 2) / spec.ro)
    phi = wrap_angle(gamma - side.sign * phi_off)
    return PoseEstimate(_offset(rb, phi, spec.l / 2), phi, PoseCase.WHEEL_PLUS_BUMPER, side)


def pose_case2_front(fw: GroundPoint, fb: GroundPoint, spec: VehicleTypeSpec, side: VisibleSide) -> PoseEstimate:
    """Front-end mirror of case 2: the FB->FW line points backward, rotated by atan((w/2)/fo)."""
    if fw.distance(fb) <= MIN_POINT_SEPARATION:
        raise PointsCoincident(f"front wheel and bumper {fw.distance(fb):.3f} m apart")
    gamma = math.atan2(fw.y - fb.y, fw.x - fb.x)
    phi_off = math.atan((spec.w / 2) / spec.fo)
    phi = wrap_angle(gamma - math.pi + side.sign * phi_off)
    return PoseEstimate(_offset(fb, phi, -spec.l / 2), phi, PoseCase.WHEEL_PLUS_BUMPER, side)


def pose_case3(bumper: ContactPoint, heading_regressed: float | None, spec: VehicleTypeSpec) -> PoseEstimate:
    if heading_regressed is None:
        raise MissingRegressedHeading("bumper-only target without a regressed heading")
    phi = wrap_angle(heading_regressed)
    if bumper.kind is RB:
        center = _offset(bumper.physical, phi, spec.l / 2)
    elif bumper.kind is FB:
        center = _offset(bumper.physical, phi, -spec.l / 2)
    else:
        raise PoseError(f"case 3 needs a bumper, got {bumper.kind.value}")
    return PoseEstimate(center, phi, PoseCase.BUMPER_ONLY, None)


def corners_from_pose(pose: PoseEstimate, spec: VehicleTypeSpec, obj_id: int | None = None) -> BevBox:
    c, s = _dir(pose.heading)
    hl, hw = spec.l / 2, spec.w / 2
    px, py = pose.center.x, pose.center.y

    def corner(fwd: float, left: float) -> GroundPoint:
        return GroundPoint(px + fwd * c - left * s, py + fwd * s + left * c)

    corners = (corner(hl, hw), corner(-hl, hw), corner(hl, -hw), corner(-hl, -hw))
    return BevBox(obj_id, pose.center, pose.heading, corners, spec.type_name, pose.case_used.value)


def _azimuth_of(p: GroundPoint) -> float:
    return math.atan2(p.y, p.x)


def _side_for_wheel_bumper(
    v: MultidimensionalVector, wheel: GroundPoint, bumper: GroundPoint, spec: VehicleTypeSpec, solve
) -> VisibleSide:
    azimuth = v.azimuth if v.azimuth is not None else _azimuth_of(wheel)
    if v.heading_regressed is not None:
        return visible_side(v.heading_regressed, azimuth)
    # no regressed heading: keep whichever side hypothesis is self-consistent
    consistent = []
    for side in VisibleSide:
        pose = solve(wheel, bumper, spec, side)
        try:
            if visible_side(pose.heading, azimuth) is side:
                consistent.append(side)
        except DegenerateSide:
            pass
    if len(consistent) != 1:
        raise DegenerateSide("wheel-bumper geometry admits both sides; no regressed heading to decide")
    return consistent[0]


def estimate_pose(v: MultidimensionalVector, spec: VehicleTypeSpec | None = None) -> PoseEstimate:
    spec = spec or v.type_spec()
    if spec is None:
        raise InsufficientGeometry("vector carries no dimensions")
    fw, rw, fb, rb = (v.point(k) for k in (FW, RW, FB, RB))
    if fw is not None and rw is not None:
        phi = heading_from_two_wheels(fw, rw)
        azimuth = v.azimuth if v.azimuth is not None else _azimuth_of(rw)
        return pose_case1(fw, rw, spec, visible_side(phi, azimuth))
    if rw is not None and rb is not None:
        side = _side_for_wheel_bumper(v, rw, rb, spec, pose_case2)
        return pose_case2(rw, rb, spec, side)
    if fw is not None and fb is not None:
        side = _side_for_wheel_bumper(v, fw, fb, spec, pose_case2_front)
        return pose_case2_front(fw, fb, spec, side)
    bumper = v.contact_points.get(RB) or v.contact_points.get(FB)
    if bumper is not None and v.heading_regressed is not None:
        return pose_case3(bumper, v.heading_regressed, spec)
    raise InsufficientGeometry(
        f"no case applies to contact points {sorted(k.value for k in v.kinds)}"
        + ("" if v.heading_regressed is not None else " without a regressed heading")
    )


def generate_bev_vector(v: MultidimensionalVector) -> BevBox:
    spec = v.type_spec()
    if spec is None:
        raise InsufficientGeometry("vector carries no dimensions")
    pose = estimate_pose(v, spec)
    return corners_from_pose(pose, spec, v.obj_id)
