import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from svbev.camera import Channel, GroundPoint
from svbev.model import ContactPoint, ContactPointKind as K, MultidimensionalVector, bind_type
from svbev.reid import (
    FusionConfig,
    IdAllocator,
    assign_channel_ids,
    fuse_branches,
    merge_bev_targets,
    vector_distance,
)


def mv(channel, points, bbox=(0, 0, 10, 10), **kw):
    cps = [ContactPoint(k, None, GroundPoint(*xy), channel) for k, xy in points.items()]
    return MultidimensionalVector(channel, bbox, contact_points=cps, **kw)


# stage 1


def test_branches_sharing_a_bbox_merge(catalog):
    contact = mv(Channel.LEFT, {K.FW: (1, 2)}, bbox=(5, 5, 50, 40))
    typed = bind_type(MultidimensionalVector(Channel.LEFT, (5, 5, 50, 40)), catalog, "suv")
    (out,) = fuse_branches([[contact], [typed], []])
    assert out.kinds == {K.FW}
    assert out.vehicle_type == "suv" and out.dims == catalog.types["suv"].dims


def test_single_branch_is_identity():
    vs = [mv(Channel.LEFT, {K.FW: (1, 2)}), mv(Channel.LEFT, {K.RW: (3, 2)}, bbox=(20, 0, 10, 10))]
    assert fuse_branches([vs]) == vs


def test_different_bboxes_stay_apart():
    a = MultidimensionalVector(Channel.LEFT, (0, 0, 10, 10), heading_regressed=0.1)
    b = MultidimensionalVector(Channel.LEFT, (0, 0, 10, 11), vehicle_type="car", dims=(4.6, 1.8, 1.45), overhangs=(0.9, 1.0))
    assert len(fuse_branches([[a], [b]])) == 2


def test_higher_priority_branch_wins():
    a = MultidimensionalVector(Channel.LEFT, (0, 0, 10, 10), heading_regressed=0.1)
    b = MultidimensionalVector(Channel.LEFT, (0, 0, 10, 10), heading_regressed=0.5)
    (out,) = fuse_branches([[a], [b]])
    assert out.heading_regressed == 0.1


# stage 2


def test_points_within_gate_share_an_id():
    a = mv(Channel.LEFT, {K.RW: (1.0, 2.0)}, bbox=(0, 0, 10, 10))
    b = mv(Channel.LEFT, {K.RW: (1.3, 2.0)}, bbox=(50, 0, 10, 10))
    out = assign_channel_ids([a, b])
    assert out[0].obj_id == out[1].obj_id


def test_points_beyond_gate_get_distinct_ids():
    a = mv(Channel.LEFT, {K.RW: (1.0, 2.0)}, bbox=(0, 0, 10, 10))
    b = mv(Channel.LEFT, {K.RW: (1.6, 2.0)}, bbox=(50, 0, 10, 10))
    out = assign_channel_ids([a, b])
    assert out[0].obj_id != out[1].obj_id


def test_empty_channel():
    assert assign_channel_ids([]) == []


def test_ids_continue_from_prior_frame():
    prior = [mv(Channel.LEFT, {K.RW: (1.0, 2.0)}, obj_id=42)]
    now = [mv(Channel.LEFT, {K.RW: (1.1, 2.05)}), mv(Channel.LEFT, {K.RW: (5.0, 2.0)}, bbox=(90, 0, 5, 5))]
    out = assign_channel_ids(now, prior)
    assert out[0].obj_id == 42
    assert out[1].obj_id == 43


def test_id_allocator_reserve():
    ids = IdAllocator()
    ids.reserve([3, None, 1])
    assert ids() == 4


def test_vector_distance_uses_shared_kinds():
    a = mv(Channel.LEFT, {K.FW: (0, 0), K.RW: (5, 0)})
    b = mv(Channel.FRONT, {K.FW: (3, 0), K.RB: (5.1, 0)})
    assert vector_distance(a, b) == 3.0
    c = mv(Channel.FRONT, {K.RB: (5.1, 0)})
    assert vector_distance(a, c) == pytest.approx(0.1)


# stage 3


def test_weighted_midpoint():
    left = mv(Channel.LEFT, {K.FW: (1.0, 2.0)})
    front = mv(Channel.FRONT, {K.FW: (1.2, 2.0)})
    (out,) = merge_bev_targets([left, front], FusionConfig(channel_weight_alpha=0.5, channel_weight_beta=0.5))
    p = out.point(K.FW)
    assert (p.x, p.y) == (pytest.approx(1.1, abs=1e-15), 2.0)


def test_unequal_weights_favour_first_channel():
    front = mv(Channel.FRONT, {K.FW: (1.0, 2.0)})
    left = mv(Channel.LEFT, {K.FW: (1.4, 2.0)})
    (out,) = merge_bev_targets([left, front], FusionConfig(channel_weight_alpha=0.75, channel_weight_beta=0.25))
    # channel order puts Front first
    assert out.point(K.FW).x == pytest.approx(1.1)


def test_category_fusion_unions_kinds():
    a = mv(Channel.LEFT, {K.FW: (1.0, 2.0), K.RW: (-1.6, 2.0)})
    b = mv(Channel.REAR, {K.RB: (-2.0, 2.3)})
    (out,) = merge_bev_targets([a, b])
    assert out.kinds == {K.FW, K.RW, K.RB}
    assert out.point(K.RB) == GroundPoint(-2.0, 2.3)


def test_single_channel_passthrough():
    a = mv(Channel.LEFT, {K.FW: (1.0, 2.0)}, obj_id=9)
    assert merge_bev_targets([a]) == [a]


def test_long_vehicle_is_not_split():
    # bus wheel base 5.7 m: wheels of one channel far apart, bumper linking another
    a = mv(Channel.LEFT, {K.FW: (4.0, 3.0), K.RW: (-1.7, 3.0)}, vehicle_type="bus", dims=(10.5, 2.5, 3.2), overhangs=(2.2, 2.6))
    b = mv(Channel.REAR, {K.RW: (-1.65, 3.05), K.RB: (-4.3, 1.8)})
    c = mv(Channel.FRONT, {K.FW: (4.1, 3.0), K.FB: (6.2, 1.8)})
    out = merge_bev_targets([a, b, c])
    assert len(out) == 1
    assert out[0].kinds == set(K)


def test_far_apart_targets_stay_separate():
    a = mv(Channel.LEFT, {K.FW: (1.0, 3.0)})
    b = mv(Channel.FRONT, {K.FW: (1.0, 5.0)})
    assert len(merge_bev_targets([a, b])) == 2


def test_weights_must_sum_to_one():
    with pytest.raises(ValueError):
        FusionConfig(channel_weight_alpha=0.7, channel_weight_beta=0.7)


channels = st.sampled_from(list(Channel))
kinds = st.sampled_from(list(K))


OFFSETS = {K.FW: (1.4, 0.9), K.RW: (-1.3, 0.9), K.FB: (2.3, 0.0), K.RB: (-2.3, 0.0)}


@st.composite
def vector_sets(draw):
    """Observations of up to four targets spaced 8 m apart, a few cm of noise each."""
    n_targets = draw(st.integers(0, 4))
    out = []
    for t in range(n_targets):
        cx, cy = 8.0 * t, draw(st.floats(-3, 3))
        for _ in range(draw(st.integers(1, 3))):
            ks = draw(st.sets(kinds, min_size=1))
            pts = {}
            for k in ks:
                dx, dy = draw(st.tuples(st.floats(-0.05, 0.05), st.floats(-0.05, 0.05)))
                pts[k] = (cx + OFFSETS[k][0] + dx, cy + OFFSETS[k][1] + dy)
            bbox = (len(out) * 20, 0, 10, 10)
            out.append(mv(draw(channels), pts, bbox=bbox, obj_id=draw(st.none() | st.integers(1, 5))))
    return out


@settings(max_examples=200, deadline=None)
@given(vector_sets())
def test_merge_properties(vectors):
    out = merge_bev_targets(vectors)
    ids = [v.obj_id for v in out]
    assert len(ids) == len(set(ids)) and None not in ids
    assert len(out) <= len(vectors)
    assert merge_bev_targets(out) == out


def test_merge_is_deterministic():
    rng = np.random.default_rng(1)
    vs = [mv(Channel(c), {K.FW: tuple(rng.uniform(-3, 3, 2))}) for c in ["front", "left", "rear", "right"] * 3]
    assert merge_bev_targets(vs) == merge_bev_targets(list(vs))
