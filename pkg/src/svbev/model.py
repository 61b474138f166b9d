"""Per-target records: contact points, the vehicle-type catalog, the
Multidimensional Vector aggregating every branch's output, and the BEV box."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

from .camera import Channel, GroundPoint, PixelPoint
from .errors import DuplicateContactPoint, FormatError, UnknownVehicleType

RECT_TOL = 1e-9


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    r = math.remainder(a, 2.0 * math.pi)
    return math.pi if r <= -math.pi else r


def angle_in_range(a: float) -> bool:
    return -math.pi < a <= math.pi


class ContactPointKind(str, enum.Enum):
    FW = "FW"
    RW = "RW"
    FB = "FB"
    RB = "RB"


# anchor priority for the azimuth of a target
AZIMUTH_PRIORITY = (ContactPointKind.RW, ContactPointKind.FW, ContactPointKind.RB, ContactPointKind.FB)


@dataclass(frozen=True)
class ContactPoint:
    kind: ContactPointKind
    pixel: PixelPoint | None
    physical: GroundPoint
    source_channel: Channel

    def __post_init__(self):
        object.__setattr__(self, "kind", ContactPointKind(self.kind))
        object.__setattr__(self, "source_channel", Channel(self.source_channel))


@dataclass(frozen=True)
class VehicleTypeSpec:
    type_name: str
    l: float
    w: float
    h: float
    fo: float
    ro: float

    def violations(self) -> list[str]:
        out = []
        if not 0 < self.w < self.l:
            out.append("width must satisfy 0 < w < l")
        if not 0 < self.fo + self.ro < self.l:
            out.append("overhangs must satisfy 0 < fo + ro < l")
        if not self.h > 0:
            out.append("height must be positive")
        return out

    @property
    def dims(self) -> tuple[float, float, float]:
        return (self.l, self.w, self.h)

    @property
    def overhangs(self) -> tuple[float, float]:
        return (self.fo, self.ro)


@dataclass(frozen=True)
class TypeCatalog:
    """Read-only mapping from type label to its dimensions and overhangs."""

    types: Mapping[str, VehicleTypeSpec]
    fallback_type: str | None = "car"

    def __post_init__(self):
        if not self.types:
            raise FormatError("a type catalog needs at least one entry")
        for name, spec in self.types.items():
            if spec.type_name != name:
                raise FormatError(f"catalog key {name!r} holds spec for {spec.type_name!r}")
            bad = spec.violations()
            if bad:
                raise FormatError(f"catalog entry {name!r}: {'; '.join(bad)}")
        if self.fallback_type is not None and self.fallback_type not in self.types:
            raise FormatError(f"fallback type {self.fallback_type!r} is not in the catalog")
        object.__setattr__(self, "types", dict(self.types))

    def __contains__(self, name: str) -> bool:
        return name in self.types

    def __len__(self) -> int:
        return len(self.types)

    def names(self) -> list[str]:
        return list(self.types)


def lookup_type_attrs(catalog: TypeCatalog, type_name: str) -> VehicleTypeSpec:
    try:
        return catalog.types[type_name]
    except KeyError:
        raise UnknownVehicleType(f"unknown vehicle type {type_name!r}") from None


CATALOG_FORMAT = "svbev.catalog"


def load_catalog(document: str | Mapping[str, Any]) -> TypeCatalog:
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict):
        raise FormatError("catalog: expected an object")
    unknown = set(doc) - {"format", "version", "fallback_type", "types"}
    if unknown:
        raise FormatError(f"catalog: unknown field(s) {sorted(unknown)}")
    if doc.get("format") != CATALOG_FORMAT or doc.get("version") != 1:
        raise FormatError(f"expected {CATALOG_FORMAT} v1")
    types = {}
    for name, entry in doc.get("types", {}).items():
        if not isinstance(entry, dict) or set(entry) != {"l", "w", "h", "fo", "ro"}:
            raise FormatError(f"catalog entry {name!r} needs exactly l, w, h, fo, ro")
        types[name] = VehicleTypeSpec(name, **{k: float(v) for k, v in entry.items()})
    return TypeCatalog(types, doc.get("fallback_type"))


def load_catalog_file(path: str | Path) -> TypeCatalog:
    return load_catalog(Path(path).read_text())


def catalog_document(catalog: TypeCatalog) -> dict[str, Any]:
    return {
        "format": CATALOG_FORMAT,
        "version": 1,
        "fallback_type": catalog.fallback_type,
        "types": {
            s.type_name: {"l": s.l, "w": s.w, "h": s.h, "fo": s.fo, "ro": s.ro}
            for s in catalog.types.values()
        },
    }


def default_catalog() -> TypeCatalog:
    return load_catalog(resources.files("svbev").joinpath("data/default_catalog.json").read_text())


BBox = tuple[float, float, float, float]  # (X, Y, W, L): top-left corner, width, height


@dataclass(frozen=True)
class MultidimensionalVector:
    """Everything known about one target from one or more observations.

    ``contact_points`` is keyed by kind, so a vector holds at most one point
    of each kind; passing a sequence with a repeated kind raises
    DuplicateContactPoint.
    """

    channel: Channel
    bbox: BBox
    obj_id: int | None = None
    vehicle_type: str | None = None
    dims: tuple[float, float, float] | None = None
    overhangs: tuple[float, float] | None = None
    heading_regressed: float | None = None
    heading_geometric: float | None = None
    azimuth: float | None = None
    contact_points: Mapping[ContactPointKind, ContactPoint] = field(default_factory=dict)
    score: float = 1.0
    flags: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "channel", Channel(self.channel))
        object.__setattr__(self, "bbox", tuple(float(b) for b in self.bbox))
        object.__setattr__(self, "flags", frozenset(self.flags))
        cps = self.contact_points
        if isinstance(cps, Mapping):
            for kind, cp in cps.items():
                if ContactPointKind(kind) != cp.kind:
                    raise ValueError(f"contact point of kind {cp.kind.value} stored under {kind}")
            items = list(cps.values())
        else:
            items = list(cps)
        by_kind: dict[ContactPointKind, ContactPoint] = {}
        for cp in items:
            if cp.kind in by_kind:
                raise DuplicateContactPoint(f"two {cp.kind.value} contact points in one vector")
            by_kind[cp.kind] = cp
        ordered = {k: by_kind[k] for k in ContactPointKind if k in by_kind}
        object.__setattr__(self, "contact_points", ordered)

    def point(self, kind: ContactPointKind) -> GroundPoint | None:
        cp = self.contact_points.get(ContactPointKind(kind))
        return None if cp is None else cp.physical

    @property
    def kinds(self) -> frozenset[ContactPointKind]:
        return frozenset(self.contact_points)

    def type_spec(self) -> VehicleTypeSpec | None:
        if self.dims is None or self.overhangs is None:
            return None
        l, w, h = self.dims
        fo, ro = self.overhangs
        return VehicleTypeSpec(self.vehicle_type or "unknown", l, w, h, fo, ro)

    def evolve(self, **changes) -> MultidimensionalVector:
        return replace(self, **changes)


def compute_azimuth(contact_points: Mapping[ContactPointKind, ContactPoint]) -> float | None:
    """Bearing of the target from the ego origin, anchored RW > FW > RB > FB."""
    for kind in AZIMUTH_PRIORITY:
        cp = contact_points.get(kind)
        if cp is not None:
            return math.atan2(cp.physical.y, cp.physical.x)
    return None


def bind_type(v: MultidimensionalVector, catalog: TypeCatalog, type_name: str) -> MultidimensionalVector:
    spec = lookup_type_attrs(catalog, type_name)
    return v.evolve(vehicle_type=type_name, dims=spec.dims, overhangs=spec.overhangs)


def validate_vector(v: MultidimensionalVector) -> list[str]:
    out = []
    if v.vehicle_type is not None:
        if v.dims is None:
            out.append("dims missing for typed vehicle")
        if v.overhangs is None:
            out.append("overhangs missing for typed vehicle")
    for name in ("heading_regressed", "heading_geometric", "azimuth"):
        a = getattr(v, name)
        if a is not None and not angle_in_range(a):
            out.append(f"{name} outside (-pi, pi]")
    for kind, cp in v.contact_points.items():
        if cp.kind != kind:
            out.append(f"contact point stored under {kind.value} has kind {cp.kind.value}")
    if v.bbox[2] <= 0 or v.bbox[3] <= 0:
        out.append("bbox must have positive width and height")
    spec = v.type_spec()
    if spec is not None:
        out.extend(spec.violations())
    return out


@dataclass(frozen=True)
class BevBox:
    """Recovered footprint. Corners: A left-front, B left-rear, C right-front, D right-rear."""

    obj_id: int | None
    center: GroundPoint
    heading: float
    corners: tuple[GroundPoint, GroundPoint, GroundPoint, GroundPoint]
    type_name: str
    case: str | None = None

    @property
    def A(self) -> GroundPoint:
        return self.corners[0]

    @property
    def B(self) -> GroundPoint:
        return self.corners[1]

    @property
    def C(self) -> GroundPoint:
        return self.corners[2]

    @property
    def D(self) -> GroundPoint:
        return self.corners[3]

    def contains(self, p: GroundPoint) -> bool:
        """True when ``p`` lies inside the footprint (boundary included)."""
        c, s = math.cos(self.heading), math.sin(self.heading)
        dx, dy = p.x - self.center.x, p.y - self.center.y
        half_l = self.A.distance(self.B) / 2
        half_w = self.A.distance(self.C) / 2
        return abs(dx * c + dy * s) <= half_l and abs(-dx * s + dy * c) <= half_w


def check_bev_box(box: BevBox, spec: VehicleTypeSpec, tol: float = RECT_TOL) -> list[str]:
    """Rectangle invariants of a BevBox against the type's l and w."""
    A, B, C, D = box.corners
    out = []
    if abs(A.distance(B) - spec.l) > tol or abs(C.distance(D) - spec.l) > tol:
        out.append("long sides differ from l")
    if abs(A.distance(C) - spec.w) > tol or abs(B.distance(D) - spec.w) > tol:
        out.append("short sides differ from w")
    diag = math.hypot(spec.l, spec.w)
    if abs(A.distance(D) - diag) > tol or abs(B.distance(C) - diag) > tol:
        out.append("diagonals are not those of an l x w rectangle")
    mx = (A.x + B.x + C.x + D.x) / 4
    my = (A.y + B.y + C.y + D.y) / 4
    if math.hypot(mx - box.center.x, my - box.center.y) > tol:
        out.append("corner midpoint differs from center")
    # A and B on the left of the heading direction
    c, s = math.cos(box.heading), math.sin(box.heading)
    left = lambda p: -(p.x - box.center.x) * s + (p.y - box.center.y) * c  # noqa: E731
    front = lambda p: (p.x - box.center.x) * c + (p.y - box.center.y) * s  # noqa: E731
    if not (left(A) > 0 and left(B) > 0 and left(C) < 0 and left(D) < 0):
        out.append("corner labels do not follow left/right order")
    if not (front(A) > 0 and front(C) > 0 and front(B) < 0 and front(D) < 0):
        out.append("corner labels do not follow front/rear order")
    if not angle_in_range(box.heading):
        out.append("heading outside (-pi, pi]")
    return out


def iter_points(vectors: Iterable[MultidimensionalVector]) -> Iterable[ContactPoint]:
    for v in vectors:
        yield from v.contact_points.values()
