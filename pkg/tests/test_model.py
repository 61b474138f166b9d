import json
import math

import pytest

from svbev.camera import Channel, GroundPoint, PixelPoint
from svbev.errors import DuplicateContactPoint, FormatError, UnknownVehicleType
from svbev.model import (
    BevBox,
    ContactPoint,
    ContactPointKind as K,
    MultidimensionalVector,
    TypeCatalog,
    VehicleTypeSpec,
    bind_type,
    catalog_document,
    check_bev_box,
    compute_azimuth,
    load_catalog,
    lookup_type_attrs,
    validate_vector,
    wrap_angle,
)


def cp(kind, x, y, channel=Channel.LEFT):
    return ContactPoint(kind, PixelPoint(0.0, 0.0), GroundPoint(x, y), channel)


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(0.25) == 0.25


def test_default_catalog_has_eight_valid_types(catalog):
    assert len(catalog) == 8
    for spec in catalog.types.values():
        assert spec.violations() == []
        assert 0 < spec.fo + spec.ro < spec.l


def test_lookup_echoes_configured_spec(catalog):
    doc = catalog_document(catalog)
    car = lookup_type_attrs(catalog, "car")
    assert {"l": car.l, "w": car.w, "h": car.h, "fo": car.fo, "ro": car.ro} == doc["types"]["car"]


def test_lookup_unknown_type(catalog):
    with pytest.raises(UnknownVehicleType):
        lookup_type_attrs(catalog, "tank")


def test_catalog_rejects_bad_overhangs():
    with pytest.raises(FormatError):
        TypeCatalog({"x": VehicleTypeSpec("x", 4.0, 2.0, 1.5, 2.5, 1.5)}, fallback_type="x")


def test_catalog_roundtrip(catalog):
    again = load_catalog(json.dumps(catalog_document(catalog)))
    assert again == catalog


def test_catalog_rejects_missing_field(catalog):
    doc = catalog_document(catalog)
    del doc["types"]["bus"]["ro"]
    with pytest.raises(FormatError):
        load_catalog(doc)


def test_consistent_vector_validates(catalog):
    v = MultidimensionalVector(
        Channel.LEFT, (0, 0, 10, 10), contact_points=[cp(K.FW, 1, 2), cp(K.RW, -1, 2)], heading_regressed=0.1
    )
    v = bind_type(v, catalog, "suv")
    assert validate_vector(v) == []


def test_duplicate_kind_rejected_at_construction():
    with pytest.raises(DuplicateContactPoint):
        MultidimensionalVector(Channel.LEFT, (0, 0, 10, 10), contact_points=[cp(K.FW, 1, 2), cp(K.FW, 1.1, 2)])


def test_typed_vector_without_dims():
    v = MultidimensionalVector(Channel.LEFT, (0, 0, 10, 10), vehicle_type="car", overhangs=(0.9, 1.0))
    assert validate_vector(v) == ["dims missing for typed vehicle"]


def test_angle_out_of_range_reported():
    v = MultidimensionalVector(Channel.FRONT, (0, 0, 10, 10), heading_regressed=4.0)
    assert validate_vector(v) == ["heading_regressed outside (-pi, pi]"]


def test_contact_points_are_kept_in_kind_order():
    v = MultidimensionalVector(Channel.LEFT, (0, 0, 1, 1), contact_points=[cp(K.RB, 0, 3), cp(K.FW, 1, 2)])
    assert list(v.contact_points) == [K.FW, K.RB]
    assert v.point(K.RW) is None


def test_azimuth_prefers_rear_wheel():
    pts = {K.FW: cp(K.FW, 1, 0), K.RW: cp(K.RW, 0, 1)}
    assert compute_azimuth(pts) == pytest.approx(math.pi / 2)
    assert compute_azimuth({}) is None


def _box(cx, cy, phi, l, w):
    c, s = math.cos(phi), math.sin(phi)

    def at(f, left):
        return GroundPoint(cx + f * c - left * s, cy + f * s + left * c)

    corners = (at(l / 2, w / 2), at(-l / 2, w / 2), at(l / 2, -w / 2), at(-l / 2, -w / 2))
    return BevBox(1, GroundPoint(cx, cy), phi, corners, "car")


def test_check_bev_box_accepts_rectangle(catalog):
    spec = catalog.types["car"]
    assert check_bev_box(_box(3.0, -2.0, 0.7, spec.l, spec.w), spec) == []


def test_check_bev_box_flags_swapped_corners(catalog):
    spec = catalog.types["car"]
    b = _box(0.0, 0.0, 0.0, spec.l, spec.w)
    swapped = BevBox(1, b.center, b.heading, (b.C, b.D, b.A, b.B), "car")
    assert "corner labels do not follow left/right order" in check_bev_box(swapped, spec)


def test_box_contains_its_center_and_not_far_points(catalog):
    spec = catalog.types["car"]
    b = _box(1.0, 1.0, 0.3, spec.l, spec.w)
    assert b.contains(b.center)
    inner = GroundPoint(0.999 * (b.A.x - 1.0) + 1.0, 0.999 * (b.A.y - 1.0) + 1.0)
    assert b.contains(inner)
    assert not b.contains(GroundPoint(10.0, 10.0))
