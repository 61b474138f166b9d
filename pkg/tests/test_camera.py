import copy
import json
import math

import numpy as np
import pytest

from svbev.camera import (
    CameraRig,
    Channel,
    GroundPoint,
    PixelPoint,
    RadialDistortion,
    calibration_document,
    distort,
    load_calibration,
    pixel_to_ground,
    project_ground_to_pixel,
    undistort,
)
from svbev.errors import (
    AngleOutOfFov,
    BehindCamera,
    MissingChannel,
    NonMonotoneDistortion,
    NonOrthonormalRotation,
    OutOfFov,
    RadiusOutOfRange,
    RayHitsAboveHorizon,
    RayParallelToGround,
)

from conftest import make_camera


def test_distort_axis_maps_to_zero():
    assert distort(make_camera(), 0.0) == 0.0


def test_equidistant_distort_and_undistort():
    cam = make_camera()
    assert distort(cam, 0.5) == pytest.approx(150.0, abs=1e-12)
    assert undistort(cam, 150.0) == pytest.approx(0.5, abs=1e-12)
    assert undistort(cam, 0.0) == 0.0


def test_polynomial_distort_matches_scalar_evaluation(rig):
    cam = rig[Channel.FRONT]
    k = cam.distortion.coefficients
    theta = 1.0
    expected = cam.focal[0] * (theta + k[0] * theta**3 + k[1] * theta**5)
    assert distort(cam, theta) == pytest.approx(expected, rel=1e-14)


def test_distort_rejects_angle_beyond_fov():
    cam = make_camera(fov_deg=80)
    with pytest.raises(AngleOutOfFov):
        distort(cam, math.radians(81))
    with pytest.raises(RadiusOutOfRange):
        undistort(cam, distort(cam, cam.fov_half_angle) + 1.0)


def test_undistort_roundtrip_polynomial(rig):
    for cam in rig:
        thetas = np.linspace(0.0, cam.fov_half_angle, 1000)
        err = max(abs(undistort(cam, distort(cam, t)) - t) for t in thetas)
        assert err < 1e-9


def test_distort_strictly_increasing(rig):
    for cam in rig:
        r = [distort(cam, t) for t in np.linspace(0, cam.fov_half_angle, 500)]
        assert all(b > a for a, b in zip(r, r[1:]))


def test_optical_axis_hits_principal_point():
    cam = make_camera(position=(0.0, 0.0, 1.0), pitch_down=math.pi / 4)
    px = project_ground_to_pixel(cam, GroundPoint(1.0, 0.0))
    assert px.u == pytest.approx(640.0, abs=1e-9)
    assert px.v == pytest.approx(480.0, abs=1e-9)
    g = pixel_to_ground(cam, PixelPoint(640.0, 480.0))
    assert (g.x, g.y, g.z) == (pytest.approx(1.0, abs=1e-12), pytest.approx(0.0, abs=1e-12), 0.0)


def test_horizon_pixel_is_parallel_to_ground():
    cam = make_camera(pitch_down=0.0)
    with pytest.raises(RayParallelToGround):
        pixel_to_ground(cam, PixelPoint(640.0, 480.0))


def test_sky_pixel_hits_above_horizon():
    cam = make_camera(pitch_down=0.0)
    with pytest.raises(RayHitsAboveHorizon):
        pixel_to_ground(cam, PixelPoint(640.0, 300.0))


def test_point_behind_camera():
    cam = make_camera(pitch_down=0.0, fov_deg=80)
    with pytest.raises(BehindCamera):
        project_ground_to_pixel(cam, GroundPoint(-5.0, 0.0))


def test_fov_boundary_is_inclusive():
    # camera looking straight down: incidence angle = atan(r / h)
    cam = make_camera(pitch_down=math.pi / 2, fov_deg=60)
    edge = math.tan(math.radians(60))
    px = project_ground_to_pixel(cam, GroundPoint(edge * (1 - 1e-12), 0.0))
    assert cam.in_image(px)
    with pytest.raises(OutOfFov):
        project_ground_to_pixel(cam, GroundPoint(edge * 1.001, 0.0))


def _in_fov_ground_points(cam, rng, n):
    pts = []
    while len(pts) < n:
        p = GroundPoint(*rng.uniform(-8, 8, 2))
        try:
            px = project_ground_to_pixel(cam, p)
        except (OutOfFov, BehindCamera):
            continue
        if cam.in_image(px):
            pts.append((p, px))
    return pts


def test_ground_roundtrip_polynomial(rig, rng):
    worst = 0.0
    for cam in rig:
        for p, px in _in_fov_ground_points(cam, rng, 250):
            g = pixel_to_ground(cam, px)
            assert g.z == 0.0
            worst = max(worst, g.distance(p))
    assert worst < 1e-6


def test_ground_roundtrip_table(rng):
    poly = RadialDistortion("polynomial", (-0.021, 0.0021))
    knots = np.linspace(0.0, math.radians(96), 400)
    table = RadialDistortion("table", (-0.021, 0.0021), tuple(knots), tuple(poly.rho(t) for t in knots))
    cam = make_camera(distortion=table, pitch_down=math.radians(30))
    for p, px in _in_fov_ground_points(cam, rng, 300):
        assert pixel_to_ground(cam, px).distance(p) < 1e-3


def test_nearer_ground_point_sits_farther_from_horizon():
    cam = make_camera(pitch_down=math.radians(20))
    vs = [project_ground_to_pixel(cam, GroundPoint(x, 0.5)).v for x in (1.5, 2.0, 4.0, 8.0)]
    # image v grows downward; nearer points are lower in the image
    assert vs == sorted(vs, reverse=True)


def test_load_calibration_happy_path(rig):
    doc = calibration_document(rig)
    again = load_calibration(json.dumps(doc))
    assert len(again) == 4
    assert calibration_document(again) == doc


def test_load_calibration_is_pure(rig):
    text = json.dumps(calibration_document(rig))
    a, b = load_calibration(text), load_calibration(text)
    for ch in Channel:
        assert a[ch] == b[ch]
        assert np.array_equal(a[ch]._R, b[ch]._R)


def test_calibration_rejects_reflection(rig):
    doc = calibration_document(rig)
    r = doc["cameras"][0]["rotation"]
    doc["cameras"][0]["rotation"] = [-v for v in r[:3]] + r[3:]
    with pytest.raises(NonOrthonormalRotation):
        load_calibration(doc)


def test_calibration_rejects_decreasing_table(rig):
    doc = calibration_document(rig)
    n = 50
    theta = list(np.linspace(0.0, math.radians(96), n))
    rho = list(np.linspace(0.0, 1.5, n))
    rho[30] = rho[29] - 0.01
    doc["cameras"][0]["distortion"] = {"kind": "table", "table": {"theta": theta, "rho": rho}}
    with pytest.raises(NonMonotoneDistortion):
        load_calibration(doc)


def test_calibration_missing_channel(rig):
    doc = calibration_document(rig)
    doc["cameras"] = doc["cameras"][:3]
    with pytest.raises(MissingChannel):
        load_calibration(doc)


def test_calibration_rejects_unknown_field(rig):
    from svbev.errors import FormatError

    doc = copy.deepcopy(calibration_document(rig))
    doc["cameras"][1]["skew"] = 0.0
    with pytest.raises(FormatError):
        load_calibration(doc)


def test_rig_requires_four_channels():
    with pytest.raises(MissingChannel):
        CameraRig({Channel.FRONT: make_camera()})
