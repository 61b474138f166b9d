"""Three-stage re-identification.

Stage 1 merges the branch outputs that share a vehicle box. Stage 2 gives
every vector of one channel an id, sharing ids between vectors whose ground
contact points lie closer than the proximity gate and carrying ids over
from the previous frame under the same gate. Stage 3 groups vectors across
channels and fuses each group into one vector: same-kind contact points are
averaged with the channel weights, kinds seen by only one member are copied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import ConflictingGeometry
from .model import (
    ContactPoint,
    ContactPointKind,
    MultidimensionalVector,
    compute_azimuth,
)
from .camera import GroundPoint

GEOMETRY_TOL = 1e-6
_SCALAR_FIELDS = ("vehicle_type", "dims", "overhangs", "heading_regressed", "heading_geometric", "obj_id")


@dataclass(frozen=True)
class FusionConfig:
    proximity_gate: float = 0.5
    channel_weight_alpha: float = 0.5
    channel_weight_beta: float = 0.5
    max_cluster_diameter: float = 2.0

    def __post_init__(self):
        a, b = self.channel_weight_alpha, self.channel_weight_beta
        if not (0 <= a <= 1 and 0 <= b <= 1) or abs(a + b - 1) > 1e-12:
            raise ValueError(f"channel weights must lie in [0, 1] and sum to 1, got {a} + {b}")
        if not self.proximity_gate > 0:
            raise ValueError("proximity_gate must be positive")
        if self.max_cluster_diameter < self.proximity_gate:
            raise ValueError("max_cluster_diameter must not be below the proximity gate")


class IdAllocator:
    """Monotonically increasing integer ids."""

    def __init__(self, start: int = 1):
        self.next_id = start

    def __call__(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def reserve(self, ids: Iterable[int | None]) -> None:
        for i in ids:
            if i is not None and i >= self.next_id:
                self.next_id = i + 1


def vector_distance(a: MultidimensionalVector, b: MultidimensionalVector) -> float:
    """Minimum distance over same-kind point pairs, or over all pairs when no kind is shared."""
    shared = a.kinds & b.kinds
    if shared:
        return min(a.point(k).distance(b.point(k)) for k in shared)
    if not a.contact_points or not b.contact_points:
        return math.inf
    return min(p.physical.distance(q.physical) for p in a.contact_points.values() for q in b.contact_points.values())


def _order_key(v: MultidimensionalVector):
    return (v.channel.rank, v.bbox)


def _same_kind_distance(a: MultidimensionalVector, b: MultidimensionalVector) -> float | None:
    """Largest same-kind point distance, or None when the vectors share no kind."""
    shared = a.kinds & b.kinds
    if not shared:
        return None
    return max(a.point(k).distance(b.point(k)) for k in shared)


def _components(vectors: Sequence[MultidimensionalVector], config: FusionConfig) -> list[list[int]]:
    n = len(vectors)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist, spread = {}, {}
    for i, j in combinations(range(n), 2):
        d = vector_distance(vectors[i], vectors[j])
        dist[i, j] = dist[j, i] = d
        spread[i, j] = spread[j, i] = _same_kind_distance(vectors[i], vectors[j])
        if d < config.proximity_gate:
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        members.sort(key=lambda i: _order_key(vectors[i]))
        if len(members) > 2 and any(_too_far(spread[i, j], config) for i, j in combinations(members, 2)):
            out.extend(_split_chain(members, dist, spread, config))
        else:
            out.append(members)
    out.sort(key=lambda m: m[0])
    return out


def _too_far(spread: float | None, config: FusionConfig) -> bool:
    # pairs without a shared kind (say FW only vs RW only) carry no evidence against merging
    return spread is not None and spread > config.max_cluster_diameter


def _split_chain(members: list[int], dist, spread, config: FusionConfig) -> list[list[int]]:
    """Break an over-long chain into clusters bounded by the max diameter."""
    clusters: list[list[int]] = []
    for i in members:
        for c in clusters:
            if any(dist[i, j] < config.proximity_gate for j in c) and not any(
                _too_far(spread[i, j], config) for j in c
            ):
                c.append(i)
                break
        else:
            clusters.append([i])
    return clusters


# ---------------------------------------------------------------------------
# stage 1


def _merge_pair(base: MultidimensionalVector, other: MultidimensionalVector) -> MultidimensionalVector:
    changes = {}
    for name in _SCALAR_FIELDS:
        if getattr(base, name) is None and getattr(other, name) is not None:
            changes[name] = getattr(other, name)
    cps = dict(base.contact_points)
    for kind, cp in other.contact_points.items():
        mine = cps.get(kind)
        if mine is None:
            cps[kind] = cp
        elif mine.physical.distance(cp.physical) > GEOMETRY_TOL:
            raise ConflictingGeometry(
                f"bbox {base.bbox}: branches disagree on {kind.value} "
                f"({mine.physical.xy} vs {cp.physical.xy})"
            )
    changes["contact_points"] = cps
    changes["flags"] = base.flags | other.flags
    if base.azimuth is None:
        changes["azimuth"] = compute_azimuth(cps)
    return base.evolve(**changes)


def fuse_branches(branches: Sequence[Sequence[MultidimensionalVector]]) -> list[MultidimensionalVector]:
    """Merge vectors of one channel whose bboxes are identical.

    ``branches`` is ordered by priority (contact points, type, heading); a
    field set by a higher-priority branch is never overwritten.
    """
    merged: dict[tuple, MultidimensionalVector] = {}
    channel = None
    for branch in branches:
        for v in branch:
            if channel is None:
                channel = v.channel
            elif v.channel != channel:
                raise ValueError("fuse_branches takes vectors of a single channel")
            key = v.bbox
            merged[key] = v if key not in merged else _merge_pair(merged[key], v)
    return list(merged.values())


# ---------------------------------------------------------------------------
# stage 2


def assign_channel_ids(
    vectors: Sequence[MultidimensionalVector],
    prior_frame: Sequence[MultidimensionalVector] | None = None,
    config: FusionConfig = FusionConfig(),
    ids: IdAllocator | None = None,
) -> list[MultidimensionalVector]:
    """Give each vector of one channel an id; vectors within the gate share one."""
    prior = [p for p in (prior_frame or ()) if p.obj_id is not None]
    if ids is None:
        ids = IdAllocator()
        ids.reserve(p.obj_id for p in prior)
    groups = _components(vectors, config)
    pairs = []
    for gi, members in enumerate(groups):
        for pi, p in enumerate(prior):
            d = min(vector_distance(vectors[m], p) for m in members)
            if d < config.proximity_gate:
                pairs.append((d, gi, pi))
    pairs.sort()
    group_id: dict[int, int] = {}
    used_prior = set()
    for _, gi, pi in pairs:
        if gi in group_id or pi in used_prior:
            continue
        group_id[gi] = prior[pi].obj_id
        used_prior.add(pi)
    out = list(vectors)
    for gi, members in enumerate(groups):
        oid = group_id.get(gi)
        if oid is None:
            oid = ids()
        for m in members:
            out[m] = vectors[m].evolve(obj_id=oid)
    return out


# ---------------------------------------------------------------------------
# stage 3


def _weighted_point(points: list[ContactPoint], config: FusionConfig) -> ContactPoint:
    weights = [config.channel_weight_alpha] + [config.channel_weight_beta] * (len(points) - 1)
    total = sum(weights)
    if total == 0:
        weights, total = [1.0] * len(points), float(len(points))
    x = sum(w * p.physical.x for w, p in zip(weights, points)) / total
    y = sum(w * p.physical.y for w, p in zip(weights, points)) / total
    first = points[0]
    return ContactPoint(first.kind, first.pixel, GroundPoint(x, y), first.source_channel)


def fuse_group(members: Sequence[MultidimensionalVector], config: FusionConfig = FusionConfig()) -> MultidimensionalVector:
    """Fuse vectors describing one target into a single vector.

    Same-kind contact points are combined as a weighted mean (alpha for the
    first member in channel order, beta for the rest, normalized); kinds
    held by one member are copied. Scalar fields come from the member that
    has them, preferring real type labels over the fallback type and then
    the highest score.
    """
    if len(members) == 1:
        return members[0]
    members = sorted(members, key=_order_key)
    by_score = sorted(members, key=lambda v: -v.score)
    primary = by_score[0]

    cps: dict[ContactPointKind, ContactPoint] = {}
    for kind in ContactPointKind:
        pts = [m.contact_points[kind] for m in members if kind in m.contact_points]
        if len(pts) == 1:
            cps[kind] = pts[0]
        elif pts:
            cps[kind] = _weighted_point(pts, config)

    typed = [m for m in by_score if m.vehicle_type is not None]
    typed.sort(key=lambda m: "fallback_type" in m.flags)  # stable: real labels first
    type_src = typed[0] if typed else None
    heading_src = next((m for m in by_score if m.heading_regressed is not None), None)

    flags = frozenset().union(*(m.flags for m in members)) - {"fallback_type", "no_geometry", "untyped"}
    if type_src is not None and "fallback_type" in type_src.flags:
        flags |= {"fallback_type"}
    if type_src is None:
        flags |= {"untyped"}
    heading = heading_src.heading_regressed if heading_src else None
    if not cps and heading is None:
        flags |= {"no_geometry"}
    return MultidimensionalVector(
        channel=primary.channel,
        bbox=primary.bbox,
        obj_id=primary.obj_id,
        vehicle_type=type_src.vehicle_type if type_src else None,
        dims=type_src.dims if type_src else None,
        overhangs=type_src.overhangs if type_src else None,
        heading_regressed=heading,
        azimuth=compute_azimuth(cps),
        contact_points=cps,
        score=primary.score,
        flags=flags | {"fused"},
    )


def _flatten(all_channels) -> list[MultidimensionalVector]:
    if isinstance(all_channels, Mapping):
        return [v for vs in all_channels.values() for v in vs]
    return list(all_channels)


def assign_group_ids(
    groups: Sequence[Sequence[MultidimensionalVector]], ids: IdAllocator
) -> list[int]:
    """Pick a unique id per group, reusing the members' most common id when free."""
    order = sorted(
        range(len(groups)),
        key=lambda g: (min((v.obj_id for v in groups[g] if v.obj_id is not None), default=math.inf), g),
    )
    claimed: set[int] = set()
    out: list[int | None] = [None] * len(groups)
    for g in order:
        counts: dict[int, int] = {}
        for v in groups[g]:
            if v.obj_id is not None:
                counts[v.obj_id] = counts.get(v.obj_id, 0) + 1
        for oid in sorted(counts, key=lambda i: (-counts[i], i)):
            if oid not in claimed:
                out[g] = oid
                break
        if out[g] is None:
            out[g] = ids()
        claimed.add(out[g])
    return out


def merge_bev_targets(
    all_channels: Iterable[MultidimensionalVector] | Mapping[object, Sequence[MultidimensionalVector]],
    config: FusionConfig = FusionConfig(),
    ids: IdAllocator | None = None,
) -> list[MultidimensionalVector]:
    """Merge vectors of every channel describing the same target; output ids are unique."""
    vectors = _flatten(all_channels)
    if ids is None:
        ids = IdAllocator()
        ids.reserve(v.obj_id for v in vectors)
    groups = [[vectors[i] for i in members] for members in _components(vectors, config)]
    group_ids = assign_group_ids(groups, ids)
    out = []
    for members, oid in zip(groups, group_ids):
        fused = fuse_group(members, config)
        out.append(fused if fused.obj_id == oid else fused.evolve(obj_id=oid))
    out.sort(key=lambda v: v.obj_id)
    return out
