"""Fisheye camera model and ground-plane inverse perspective mapping.

Ego frame: x forward, y left, z up, origin on the ground under the rear-axle
center. Camera frame: z along the optical axis, x to the image right, y to
the image bottom. A camera's extrinsics map camera coordinates into the ego
frame, ``p_ego = R @ p_cam + t``, so ``t`` is the camera center.

The radial model maps the incidence angle ``theta`` (angle between the ray
and the optical axis) to a normalized radius ``rho`` on the distorted plane::

    rho = theta + k1*theta**3 + k2*theta**5 + ...     (polynomial)
    rho = interp(theta, table_theta, table_rho)       (table)

and pixels follow from ``u = cx + fx*rho*cos(psi)``, ``v = cy + fy*rho*sin(psi)``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterator, Mapping

import numpy as np
from scipy.optimize import brentq

from .errors import (
    AngleOutOfFov,
    BehindCamera,
    CalibrationError,
    FormatError,
    MissingChannel,
    NonMonotoneDistortion,
    NonOrthonormalRotation,
    OutOfFov,
    RadiusOutOfRange,
    RayHitsAboveHorizon,
    RayParallelToGround,
)

ORTHONORMAL_TOL = 1e-9
# |d_z| below this counts as a horizontal ray
HORIZON_EPS = 1e-9
_MONOTONE_SAMPLES = 4001


class Channel(str, enum.Enum):
    FRONT = "front"
    REAR = "rear"
    LEFT = "left"
    RIGHT = "right"

    @property
    def rank(self) -> int:
        return CHANNEL_ORDER.index(self)


CHANNEL_ORDER = (Channel.FRONT, Channel.REAR, Channel.LEFT, Channel.RIGHT)


@dataclass(frozen=True)
class GroundPoint:
    """A point on the ground plane, in meters in the ego frame."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if self.z != 0.0:
            raise ValueError(f"ground points have z == 0, got {self.z}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite ground point ({self.x}, {self.y})")

    def distance(self, other: GroundPoint) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class PixelPoint:
    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"non-finite pixel ({self.u}, {self.v})")


@dataclass(frozen=True)
class RadialDistortion:
    """Monotone mapping between incidence angle and normalized image radius.

    ``kind`` selects the path used for projection: ``"equidistant"``
    (rho = theta), ``"polynomial"`` (odd polynomial with ``coefficients``
    k1, k2, ...), or ``"table"`` (piecewise-linear over the sampled knots).
    A table may be shipped alongside coefficients; the two must then agree
    within ``table_tolerance`` at every knot.
    """

    kind: str = "equidistant"
    coefficients: tuple[float, ...] = ()
    table_theta: tuple[float, ...] | None = None
    table_rho: tuple[float, ...] | None = None
    table_tolerance: float = 1e-4

    def __post_init__(self):
        if self.kind not in ("equidistant", "polynomial", "table"):
            raise CalibrationError(f"unknown distortion kind {self.kind!r}")
        object.__setattr__(self, "coefficients", tuple(float(k) for k in self.coefficients))
        if self.kind == "equidistant" and self.coefficients:
            raise CalibrationError("equidistant distortion takes no coefficients")
        if self.kind == "table":
            if self.table_theta is None or self.table_rho is None:
                raise CalibrationError("table distortion needs table_theta and table_rho")
        if (self.table_theta is None) != (self.table_rho is None):
            raise CalibrationError("table_theta and table_rho come together")
        if self.table_theta is not None:
            theta = tuple(float(t) for t in self.table_theta)
            rho = tuple(float(r) for r in self.table_rho)
            if len(theta) != len(rho) or len(theta) < 2:
                raise CalibrationError("distortion table needs >= 2 matching knots")
            if theta[0] != 0.0 or rho[0] != 0.0:
                raise CalibrationError("distortion table must start at (0, 0)")
            if any(b <= a for a, b in zip(theta, theta[1:])):
                raise CalibrationError("distortion table angles must increase")
            object.__setattr__(self, "table_theta", theta)
            object.__setattr__(self, "table_rho", rho)

    def rho(self, theta: float) -> float:
        if self.kind == "table":
            return float(np.interp(theta, self.table_theta, self.table_rho))
        return self._poly(theta)

    def _poly(self, theta: float) -> float:
        t2 = theta * theta
        acc = 0.0
        for k in reversed(self.coefficients):
            acc = acc * t2 + k
        return theta + theta * t2 * acc

    def _poly_derivative(self, theta: np.ndarray) -> np.ndarray:
        out = np.ones_like(theta)
        for i, k in enumerate(self.coefficients):
            power = 2 * i + 3
            out = out + power * k * theta ** (power - 1)
        return out

    def theta(self, rho: float, theta_max: float) -> float:
        """Invert ``rho`` on ``[0, theta_max]``."""
        if rho == 0.0:
            return 0.0
        if self.kind == "equidistant":
            return rho
        if self.kind == "table":
            return float(np.interp(rho, self.table_rho, self.table_theta))
        return brentq(lambda t: self._poly(t) - rho, 0.0, theta_max, xtol=1e-15, rtol=1e-15, maxiter=200)

    def check(self, theta_max: float) -> None:
        """Raise NonMonotoneDistortion unless strictly increasing on [0, theta_max]."""
        if self.table_theta is not None:
            if self.table_theta[-1] < theta_max:
                raise CalibrationError(
                    f"distortion table ends at {self.table_theta[-1]} rad, before the FoV edge {theta_max}"
                )
            if any(b <= a for a, b in zip(self.table_rho, self.table_rho[1:])):
                raise NonMonotoneDistortion("distortion table radii are not strictly increasing")
        if self.kind != "table":
            grid = np.linspace(0.0, theta_max, _MONOTONE_SAMPLES)
            if np.any(self._poly_derivative(grid) <= 0.0):
                raise NonMonotoneDistortion("polynomial distortion is not increasing over the FoV")
        if self.kind == "table" and self.coefficients or (self.kind == "polynomial" and self.table_theta):
            for t, r in zip(self.table_theta, self.table_rho):
                if abs(self._poly(t) - r) > self.table_tolerance:
                    raise CalibrationError(
                        f"distortion table disagrees with polynomial at theta={t}: {r} vs {self._poly(t)}"
                    )


@dataclass(frozen=True)
class FisheyeCamera:
    channel: Channel
    focal: tuple[float, float]
    principal_point: tuple[float, float]
    image_size: tuple[int, int]
    distortion: RadialDistortion
    rotation: tuple[tuple[float, float, float], ...]
    translation: tuple[float, float, float]
    fov_half_angle: float
    _R: np.ndarray = field(init=False, repr=False, compare=False)
    _t: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "channel", Channel(self.channel))
        R = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        object.__setattr__(self, "rotation", tuple(tuple(float(x) for x in row) for row in R))
        object.__setattr__(self, "translation", tuple(float(x) for x in t))
        object.__setattr__(self, "focal", tuple(float(f) for f in self.focal))
        object.__setattr__(self, "principal_point", tuple(float(c) for c in self.principal_point))
        object.__setattr__(self, "image_size", tuple(int(s) for s in self.image_size))
        if np.max(np.abs(R.T @ R - np.eye(3))) > ORTHONORMAL_TOL or np.linalg.det(R) < 0:
            raise NonOrthonormalRotation(f"{self.channel.value}: rotation is not a proper orthonormal matrix")
        if not t[2] > 0:
            raise CalibrationError(f"{self.channel.value}: camera height must be positive, got {t[2]}")
        if min(self.focal) <= 0:
            raise CalibrationError(f"{self.channel.value}: focal lengths must be positive")
        if not 0 < self.fov_half_angle < math.pi:
            raise CalibrationError(f"{self.channel.value}: fov_half_angle must lie in (0, pi)")
        self.distortion.check(self.fov_half_angle)
        object.__setattr__(self, "_R", R)
        object.__setattr__(self, "_t", t)

    @property
    def center(self) -> np.ndarray:
        return self._t.copy()

    @property
    def max_rho(self) -> float:
        return self.distortion.rho(self.fov_half_angle)

    def in_image(self, px: PixelPoint) -> bool:
        w, h = self.image_size
        return 0.0 <= px.u <= w and 0.0 <= px.v <= h

    def ray(self, px: PixelPoint) -> np.ndarray:
        """Unit ray in the ego frame through pixel ``px``."""
        fx, fy = self.focal
        cx, cy = self.principal_point
        xd = (px.u - cx) / fx
        yd = (px.v - cy) / fy
        rho = math.hypot(xd, yd)
        if rho > self.max_rho * (1 + 1e-12):
            raise RadiusOutOfRange(f"radius {rho * fx:.3f} px beyond the FoV circle")
        theta = self.distortion.theta(min(rho, self.max_rho), self.fov_half_angle)
        psi = math.atan2(yd, xd)
        s = math.sin(theta)
        d_cam = np.array([s * math.cos(psi), s * math.sin(psi), math.cos(theta)])
        return self._R @ d_cam


@dataclass(frozen=True)
class CameraRig:
    cameras: Mapping[Channel, FisheyeCamera]

    def __post_init__(self):
        cams = {Channel(k): v for k, v in self.cameras.items()}
        missing = [c.value for c in CHANNEL_ORDER if c not in cams]
        if missing:
            raise MissingChannel(f"calibration lacks channel(s): {', '.join(missing)}")
        for ch, cam in cams.items():
            if cam.channel != ch:
                raise CalibrationError(f"camera under {ch.value} declares channel {cam.channel.value}")
        object.__setattr__(self, "cameras", {c: cams[c] for c in CHANNEL_ORDER})

    def __getitem__(self, channel) -> FisheyeCamera:
        return self.cameras[Channel(channel)]

    def __iter__(self) -> Iterator[FisheyeCamera]:
        return iter(self.cameras.values())

    def __len__(self) -> int:
        return len(self.cameras)


def distort(camera: FisheyeCamera, incidence_angle: float) -> float:
    """Image radius in pixels (x-focal units) for a ray at ``incidence_angle``."""
    if incidence_angle < 0 or incidence_angle > camera.fov_half_angle:
        raise AngleOutOfFov(
            f"incidence angle {incidence_angle} outside [0, {camera.fov_half_angle}]"
        )
    return camera.focal[0] * camera.distortion.rho(incidence_angle)


def undistort(camera: FisheyeCamera, image_radius: float) -> float:
    """Incidence angle for an image radius given in x-focal pixel units."""
    rho = image_radius / camera.focal[0]
    if rho < 0 or rho > camera.max_rho * (1 + 1e-12):
        raise RadiusOutOfRange(f"image radius {image_radius} px outside the FoV circle")
    return camera.distortion.theta(min(rho, camera.max_rho), camera.fov_half_angle)


def project_point(camera: FisheyeCamera, p: np.ndarray) -> PixelPoint:
    """Project a 3-D ego-frame point; the synthetic renderer uses this for tilted ground."""
    p_cam = camera._R.T @ (np.asarray(p, dtype=float) - camera._t)
    lateral = math.hypot(p_cam[0], p_cam[1])
    if lateral == 0.0 and p_cam[2] <= 0.0:
        raise BehindCamera("point coincides with or lies straight behind the camera")
    theta = math.atan2(lateral, p_cam[2])
    if theta > camera.fov_half_angle:
        if p_cam[2] < 0:
            raise BehindCamera(f"point behind {camera.channel.value} camera (theta={theta:.4f})")
        raise OutOfFov(f"point outside {camera.channel.value} FoV (theta={theta:.4f})")
    rho = camera.distortion.rho(theta)
    psi = math.atan2(p_cam[1], p_cam[0])
    fx, fy = camera.focal
    cx, cy = camera.principal_point
    return PixelPoint(cx + fx * rho * math.cos(psi), cy + fy * rho * math.sin(psi))


def project_ground_to_pixel(camera: FisheyeCamera, p: GroundPoint) -> PixelPoint:
    return project_point(camera, np.array([p.x, p.y, 0.0]))


def pixel_to_ground(camera: FisheyeCamera, px: PixelPoint) -> GroundPoint:
    """Intersect the ray through ``px`` with the ground plane z = 0."""
    d = camera.ray(px)
    if abs(d[2]) < HORIZON_EPS:
        raise RayParallelToGround(f"pixel ({px.u:.2f}, {px.v:.2f}) looks at the horizon")
    s = -camera._t[2] / d[2]
    if s <= 0:
        raise RayHitsAboveHorizon(f"pixel ({px.u:.2f}, {px.v:.2f}) looks above the horizon")
    return GroundPoint(float(camera._t[0] + s * d[0]), float(camera._t[1] + s * d[1]))


# ---------------------------------------------------------------------------
# calibration documents

CALIBRATION_FORMAT = "svbev.calibration"
CALIBRATION_VERSION = 1
_CAMERA_FIELDS = {
    "channel",
    "image_size",
    "focal",
    "principal_point",
    "distortion",
    "rotation",
    "translation",
    "fov_half_angle_deg",
}
_DISTORTION_FIELDS = {"kind", "coefficients", "table", "tolerance"}


def _strict_keys(obj: Any, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise FormatError(f"{where}: unknown field(s) {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise FormatError(f"{where}: missing field(s) {missing}")


def _numbers(value: Any, n: int, where: str) -> list[float]:
    if not isinstance(value, list) or len(value) != n:
        raise FormatError(f"{where}: expected a list of {n} numbers")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise FormatError(f"{where}: expected numbers")
    return [float(v) for v in value]


def _parse_distortion(obj: Any, where: str) -> RadialDistortion:
    _strict_keys(obj, _DISTORTION_FIELDS, {"kind"}, where)
    table = obj.get("table")
    theta = rho = None
    if table is not None:
        _strict_keys(table, {"theta", "rho"}, {"theta", "rho"}, where + ".table")
        theta = _numbers(table["theta"], len(table["theta"]), where + ".table.theta")
        rho = _numbers(table["rho"], len(table["rho"]), where + ".table.rho")
    coeffs = obj.get("coefficients", [])
    coeffs = _numbers(coeffs, len(coeffs), where + ".coefficients") if isinstance(coeffs, list) else coeffs
    kwargs = {}
    if "tolerance" in obj:
        kwargs["table_tolerance"] = float(obj["tolerance"])
    return RadialDistortion(
        kind=obj["kind"], coefficients=tuple(coeffs), table_theta=theta, table_rho=rho, **kwargs
    )


def _parse_camera(obj: Any, index: int) -> FisheyeCamera:
    where = f"cameras[{index}]"
    _strict_keys(obj, _CAMERA_FIELDS, _CAMERA_FIELDS, where)
    try:
        channel = Channel(obj["channel"])
    except ValueError:
        raise FormatError(f"{where}: unknown channel {obj['channel']!r}") from None
    rot = _numbers(obj["rotation"], 9, where + ".rotation")
    return FisheyeCamera(
        channel=channel,
        focal=tuple(_numbers(obj["focal"], 2, where + ".focal")),
        principal_point=tuple(_numbers(obj["principal_point"], 2, where + ".principal_point")),
        image_size=tuple(int(s) for s in _numbers(obj["image_size"], 2, where + ".image_size")),
        distortion=_parse_distortion(obj["distortion"], where + ".distortion"),
        rotation=(tuple(rot[0:3]), tuple(rot[3:6]), tuple(rot[6:9])),
        translation=tuple(_numbers(obj["translation"], 3, where + ".translation")),
        fov_half_angle=math.radians(_numbers([obj["fov_half_angle_deg"]], 1, where)[0]),
    )


def load_calibration(document: str | Mapping[str, Any]) -> CameraRig:
    """Parse and validate a calibration document (JSON text or parsed object)."""
    doc = json.loads(document) if isinstance(document, str) else document
    _strict_keys(doc, {"format", "version", "cameras"}, {"format", "version", "cameras"}, "calibration")
    if doc["format"] != CALIBRATION_FORMAT or doc["version"] != CALIBRATION_VERSION:
        raise FormatError(f"expected {CALIBRATION_FORMAT} v{CALIBRATION_VERSION}")
    if not isinstance(doc["cameras"], list):
        raise FormatError("calibration.cameras: expected a list")
    cams: dict[Channel, FisheyeCamera] = {}
    for i, obj in enumerate(doc["cameras"]):
        cam = _parse_camera(obj, i)
        if cam.channel in cams:
            raise FormatError(f"duplicate channel {cam.channel.value}")
        cams[cam.channel] = cam
    return CameraRig(cams)


def load_calibration_file(path: str | Path) -> CameraRig:
    return load_calibration(Path(path).read_text())


def calibration_document(rig: CameraRig) -> dict[str, Any]:
    cams = []
    for cam in rig:
        dist: dict[str, Any] = {"kind": cam.distortion.kind}
        if cam.distortion.coefficients:
            dist["coefficients"] = list(cam.distortion.coefficients)
        if cam.distortion.table_theta is not None:
            dist["table"] = {"theta": list(cam.distortion.table_theta), "rho": list(cam.distortion.table_rho)}
            dist["tolerance"] = cam.distortion.table_tolerance
        cams.append(
            {
                "channel": cam.channel.value,
                "image_size": list(cam.image_size),
                "focal": list(cam.focal),
                "principal_point": list(cam.principal_point),
                "distortion": dist,
                "rotation": [x for row in cam.rotation for x in row],
                "translation": list(cam.translation),
                "fov_half_angle_deg": math.degrees(cam.fov_half_angle),
            }
        )
    return {"format": CALIBRATION_FORMAT, "version": CALIBRATION_VERSION, "cameras": cams}


def look_rotation(yaw: float, pitch_down: float) -> np.ndarray:
    """Camera-to-ego rotation for an optical axis at ``yaw`` pitched down by ``pitch_down`` (radians)."""
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch_down), math.sin(pitch_down)
    z_axis = np.array([cp * cy, cp * sy, -sp])
    x_axis = np.array([sy, -cy, 0.0])
    y_axis = np.cross(z_axis, x_axis)
    return np.column_stack([x_axis, y_axis, z_axis])


def default_rig() -> CameraRig:
    """The surround-view rig shipped with the package."""
    text = resources.files("svbev").joinpath("data/default_rig.json").read_text()
    return load_calibration(text)
