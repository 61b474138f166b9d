"""End-to-end acceptance checks against the synthetic oracle.

Each test records one verdict line (see conftest) and then asserts it, so
the summary at the end of a run lists every criterion with its numbers.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from svbev.bev import VisibleSide, pose_case1, pose_case2, pose_case2_front
from svbev.camera import GroundPoint
from svbev.cli import main
from svbev.model import ContactPointKind as K, MultidimensionalVector, ContactPoint, lookup_type_attrs
from svbev.camera import Channel
from svbev.pipeline import Pipeline
from svbev.reid import FusionConfig, merge_bev_targets
from svbev.synth import (
    ErrorReport,
    EvalThresholds,
    GroundTruthVehicle,
    NoiseSpec,
    evaluate,
    facing_side,
    render_detections,
    sample_adjacent_lane,
    sample_scene,
    true_contact_points,
)

GOLDEN = Path(__file__).parent / "data" / "golden"


def _run_scene(rig, catalog, scene, noise, frame_id=0):
    rendered = render_detections(scene, rig, noise, catalog, frame_id=frame_id)
    result = Pipeline(rig, catalog).process_frame(rendered.records)
    visible = [v for v in scene if rendered.visibility[v.id].visible]
    return result, visible


def test_oracle_closure(rig, catalog, report):
    rng = np.random.default_rng(20240101)
    worst_c = worst_h = 0.0
    bad_scenes = targets = 0
    t0 = time.perf_counter()
    for s in range(1000):
        scene = sample_scene(rng, int(rng.integers(1, 13)), catalog)
        result, visible = _run_scene(rig, catalog, scene, NoiseSpec(), s)
        r = evaluate(result.bev_boxes, visible, catalog)
        if r.misses or r.false_positives or len(result.bev_boxes) != len(visible):
            bad_scenes += 1
        worst_c = max(worst_c, r.max_center_error)
        worst_h = max(worst_h, r.max_heading_error)
        targets += len(visible)
    ok = bad_scenes == 0 and worst_c < 1e-6 and worst_h < 1e-6
    report(
        "1 oracle closure",
        ok,
        f"1000 zero-noise scenes, {targets} visible targets, {bad_scenes} scenes with a box-count mismatch, "
        f"max center error {worst_c:.2e} m, max heading error {worst_h:.2e} rad ({time.perf_counter() - t0:.1f} s)",
    )
    assert ok


@pytest.fixture(scope="module")
def noisy_run(rig, catalog):
    """>= 5000 visible targets, 1 px Gaussian noise then integer pixels."""
    rng = np.random.default_rng(7)
    total = ErrorReport([], [], [], EvalThresholds())
    n_visible = s = 0
    t0 = time.perf_counter()
    while n_visible < 5000:
        scene = sample_scene(rng, int(rng.integers(1, 13)), catalog)
        noise = NoiseSpec(pixel_sigma=1.0, quantize=True, seed=s)
        result, visible = _run_scene(rig, catalog, scene, noise, s)
        total.extend(evaluate(result.bev_boxes, visible, catalog))
        n_visible += len(visible)
        s += 1
    return total, n_visible, s, time.perf_counter() - t0


def test_x_budget(noisy_run, report):
    total, n_visible, scenes, secs = noisy_run
    ok = total.x_rate >= 0.99 and secs < 60
    report(
        "2 x budget",
        ok,
        f"{n_visible} targets in {scenes} scenes, {total.x_rate:.2%} within 0.25 m "
        f"(misses {len(total.misses)}, false positives {len(total.false_positives)}, {secs:.1f} s)",
    )
    assert ok


def test_y_budget(noisy_run, report):
    total = noisy_run[0]
    rates = [total.y_rate(i) for i in range(3)]
    counts = [total.y_count(i) for i in range(3)]
    ok = all(r >= 0.99 for r in rates)
    detail = ", ".join(
        f"{lo:g}-{hi:g} m gate {g:.2f}: {r:.2%} of {n}"
        for lo, hi, g, r, n in zip((0, 2, 3), (2, 3, 5), (0.2, 0.4, 0.5), rates, counts)
    )
    report("3 y budget", ok, detail)
    assert ok


def _slope_draw(rig, catalog, seed, n=12, gradient=0.05, pivot=NoiseSpec.slope_pivot_x):
    """Worst |dx| over one set of ``n`` adjacent-lane targets and worst |dy| over a second set.

    Both sets come from one generator seeded with ``seed``; only targets
    the renderer makes visible are counted.
    """
    rng = np.random.default_rng(seed)
    worst = []
    for axis in ("dx", "dy"):
        errs = []
        while len(errs) < n:
            v = sample_adjacent_lane(rng, catalog)
            result, visible = _run_scene(rig, catalog, [v], NoiseSpec(slope_gradient=gradient, slope_pivot_x=pivot))
            if not visible:
                continue
            r = evaluate(result.bev_boxes, visible, catalog)
            errs.append(abs(getattr(r.targets[0], axis)) if r.targets else math.inf)
        worst.append(max(errs))
    return tuple(worst)


def test_slope_robustness(rig, catalog, report):
    wx, wy = _slope_draw(rig, catalog, seed=0)
    ok = wx < 0.30 and wy < 0.20
    report(
        "4 slope 5%",
        ok,
        f"seed 0: 12 targets with x in +-2.5 m of the ego middle, max |x err| {wx:.3f} m (gate 0.30); "
        f"12 targets at |y| 2.15-3.5 m, max |y err| {wy:.3f} m (gate 0.20)",
    )
    sweep = np.array([_slope_draw(rig, catalog, seed=s) for s in range(1, 51)])
    report(
        "4 slope 5% sweep",
        None,
        f"seeds 1-50: x set passes in {np.mean(sweep[:, 0] < 0.30):.0%}, y set in {np.mean(sweep[:, 1] < 0.20):.0%}, "
        f"both in {np.mean((sweep[:, 0] < 0.30) & (sweep[:, 1] < 0.20)):.0%}; "
        f"worst x {sweep[:, 0].max():.3f} m, worst y {sweep[:, 1].max():.3f} m",
    )
    rear = _slope_draw(rig, catalog, seed=0, pivot=0.0)
    report("4 slope 5% rear-axle pivot", None, f"same seed 0 with the slope pivoting under the rear axle: x {rear[0]:.3f} m, y {rear[1]:.3f} m")
    assert ok


def test_reid_merging(rig, catalog, report):
    rng = np.random.default_rng(3)
    merged = scenes = 0
    while scenes < 500:
        scene = sample_scene(rng, 1, catalog)
        rendered = render_detections(scene, rig, NoiseSpec(), catalog)
        if len(rendered.visibility[scene[0].id].posable_channels) < 2:
            continue
        scenes += 1
        result = Pipeline(rig, catalog).process_frame(rendered.records)
        merged += len(result.vectors) == 1 and len(result.bev_boxes) == 1
    a = MultidimensionalVector(Channel.LEFT, (0, 0, 1, 1), contact_points=[ContactPoint(K.FW, None, GroundPoint(1.0, 2.0), Channel.LEFT)])
    b = MultidimensionalVector(Channel.FRONT, (0, 0, 1, 1), contact_points=[ContactPoint(K.FW, None, GroundPoint(1.2, 2.0), Channel.FRONT)])
    (fused,) = merge_bev_targets([a, b], FusionConfig(channel_weight_alpha=0.5, channel_weight_beta=0.5))
    p = fused.point(K.FW)
    mid_err = math.hypot(p.x - 1.1, p.y - 2.0)
    ok = merged == 500 and mid_err < 1e-12
    report("5 ReID", ok, f"{merged}/500 two-channel scenes merged to one id; midpoint error {mid_err:.1e} m")
    assert ok


def _random_truth(rng, catalog):
    spec = lookup_type_attrs(catalog, catalog.names()[rng.integers(len(catalog))])
    while True:
        v = GroundTruthVehicle(1, GroundPoint(*rng.uniform(-15, 15, 2)), rng.uniform(-math.pi, math.pi), spec.type_name)
        pts = true_contact_points(v, spec)
        side = facing_side(v, pts)
        if side is not None:
            return v, spec, pts, VisibleSide(side)


def test_case_agreement_and_equivariance(catalog, report):
    rng = np.random.default_rng(11)
    n = 10_000
    agree_err = 0.0
    for _ in range(n):
        v, spec, pts, side = _random_truth(rng, catalog)
        fw, rw = pts.wheels(side.value)
        poses = (pose_case1(fw, rw, spec, side), pose_case2(rw, pts.rb, spec, side), pose_case2_front(fw, pts.fb, spec, side))
        for p in poses:
            agree_err = max(agree_err, p.center.distance(v.center), abs(math.remainder(p.heading - v.heading, 2 * math.pi)))
    equi_err = 0.0
    for _ in range(n):
        v, spec, pts, side = _random_truth(rng, catalog)
        fw, rw = pts.wheels(side.value)
        rot, tx, ty = rng.uniform(-math.pi, math.pi), *rng.uniform(-10, 10, 2)
        c, s = math.cos(rot), math.sin(rot)

        def move(p):
            return GroundPoint(c * p.x - s * p.y + tx, s * p.x + c * p.y + ty)

        before = pose_case1(fw, rw, spec, side)
        after = pose_case1(move(fw), move(rw), spec, side)
        equi_err = max(
            equi_err,
            after.center.distance(move(before.center)),
            abs(math.remainder(after.heading - before.heading - rot, 2 * math.pi)),
        )
    ok = agree_err < 1e-9 and equi_err < 1e-9
    report("6 case agreement / equivariance", ok, f"{n} + {n} instances, max deviation {agree_err:.1e} / {equi_err:.1e}")
    assert ok


def test_throughput(rig, catalog, report):
    rng = np.random.default_rng(5)
    scene = []
    while len(scene) < 10:
        scene = sample_scene(rng, 10, catalog, radius=8.0)
    rendered = render_detections(scene, rig, NoiseSpec(pixel_sigma=1.0, quantize=True), catalog)
    pipeline = Pipeline(rig, catalog)
    pipeline.process_frame(rendered.records)  # warm-up
    times = []
    for _ in range(50):
        pipeline.reset()
        t0 = time.perf_counter()
        pipeline.process_frame(rendered.records)
        times.append((time.perf_counter() - t0) * 1000)
    med, worst = float(np.median(times)), max(times)
    ok = med < 45.0
    report("7 throughput", ok, f"10-vehicle 4-channel frame: median {med:.2f} ms, worst {worst:.2f} ms of 50 (gate 45 ms)")
    assert ok


def test_detector_metrics_not_reproducible(report):
    report(
        "8 detector metrics table",
        None,
        "NOT reproducible: 2D-AP, 3D-mAP, AOS, IoU and distance error need the external panorama dataset "
        "and trained detectors; criteria 1-6 stand in for them",
    )


def test_golden_stability(tmp_path, report):
    outputs = []
    for i in range(2):
        bev = tmp_path / f"bev{i}.jsonl"
        svg = tmp_path / f"svg{i}"
        assert main(["run", "--in", str(GOLDEN / "detections.jsonl"), "--out", str(bev)]) == 0
        assert main(["render", "--in", str(bev), "--out", str(svg)]) == 0
        outputs.append((bev.read_bytes(), {p.name: p.read_bytes() for p in sorted(svg.iterdir())}))
    frozen = (
        (GOLDEN / "bevmap.jsonl").read_bytes(),
        {p.name: p.read_bytes() for p in sorted((GOLDEN / "svg").iterdir())},
    )
    ok = outputs[0] == outputs[1] == frozen
    report("9 golden stability", ok, f"run + render twice, {len(frozen[1])} SVGs and the BEV map byte-identical to frozen files")
    assert ok
