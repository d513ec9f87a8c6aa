"""Planar domains assembled from oriented boundary-curve loops.

A domain is bounded by closed loops of BoundaryCurves traversed with the
interior on the left (outer loop counterclockwise, holes clockwise).
Corners between consecutive curves are explicit exterior-angle atoms; no
curvature spike is folded into any kappa(s).  Membership queries classify
against the polyline discretization with a boundary band equal to the
discretization tolerance h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _geom
from .curves import INTERIOR_LEFT, BoundaryCurve
from .errors import (
    BadOrientation,
    LengthMismatch,
    LoopsIntersect,
    NotClosed,
    NotLocallyConvex,
    ParameterOutOfRange,
    SelfIntersecting,
)

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"

_CLS_INTERIOR = 1
_CLS_BOUNDARY = 0
_CLS_EXTERIOR = -1


class Loop:
    """Closed chain of boundary curves with a cumulative arc-length parameter."""

    def __init__(self, curves):
        if not curves:
            raise ParameterOutOfRange("loop needs at least one curve")
        self.curves = tuple(curves)
        lengths = np.array([c.length for c in self.curves])
        self.offsets = np.concatenate([[0.0], np.cumsum(lengths)])
        self.total_length = float(self.offsets[-1])

    def _locate(self, t: np.ndarray):
        t = np.mod(np.asarray(t, dtype=float), self.total_length)
        idx = np.clip(np.searchsorted(self.offsets, t, side="right") - 1, 0, len(self.curves) - 1)
        return idx, t

    def point_many(self, t):
        idx, t = self._locate(t)
        pts = np.empty((len(t), 2))
        angs = np.empty(len(t))
        for i, c in enumerate(self.curves):
            m = idx == i
            if not m.any():
                continue
            s = c.profile.s_lo + (t[m] - self.offsets[i])
            p, a = c.evaluate_many(s)
            pts[m] = p
            angs[m] = a
        return pts, angs

    def point(self, t: float):
        pts, angs = self.point_many(np.array([t]))
        return pts[0], angs[0]

    def curvature_many(self, t):
        idx, t = self._locate(t)
        out = np.empty(len(t))
        for i, c in enumerate(self.curves):
            m = idx == i
            if not m.any():
                continue
            s = c.profile.s_lo + (t[m] - self.offsets[i])
            out[m] = c.profile.kappa_many(s)
        return out

    def corner_angles(self):
        """Exterior turning angle at each curve junction (start of curve i)."""
        angs = []
        n = len(self.curves)
        for i in range(n):
            prev = self.curves[i - 1]
            cur = self.curves[i]
            a_in = prev.tangent_angle(prev.profile.s_hi)
            a_out = cur.start_angle
            d = (a_out - a_in + math.pi) % (2 * math.pi) - math.pi
            angs.append(d)
        return np.array(angs)

    def closure_gap(self) -> float:
        return float(np.hypot(*(self.curves[-1].end - self.curves[0].start)))

    def polyline(self, h: float):
        """(params, points, clip mask) of the discretized loop, last point omitted."""
        params, pts, clip = [], [], []
        for i, c in enumerate(self.curves):
            sp = c.polyline_params(h)
            p, _ = c.evaluate_many(sp)
            # drop the final sample of each curve; the next curve supplies it
            params.append(self.offsets[i] + (sp[:-1] - c.profile.s_lo))
            pts.append(p[:-1])
            clip.append(np.full(len(sp) - 1, c.clip))
        return np.concatenate(params), np.vstack(pts), np.concatenate(clip)

    def turning_total(self):
        curve_turn = sum(c.turning_angle(*c.interval) for c in self.curves)
        return curve_turn + float(self.corner_angles().sum())


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * y2 - x2 * y))


def _self_intersects(pts: np.ndarray) -> bool:
    n = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0)
    hit = _geom.properly_crosses_any(a, b, a, b)
    return bool(hit.any())


@dataclass(eq=False)
class Domain:
    """Validated planar region with a polyline discretization at tolerance h."""

    loops: tuple
    h: float
    # filled by make_domain
    loop_params: list = field(default_factory=list)
    loop_points: list = field(default_factory=list)
    loop_clip: list = field(default_factory=list)
    outer_index: int = 0
    bounding_box: tuple = ((0, 0), (0, 0))

    # -- assembled segment arrays over all loops ------------------------------
    def _segments(self):
        if not hasattr(self, "_seg_cache"):
            seg_a, seg_b, clip = [], [], []
            for pts, cl in zip(self.loop_points, self.loop_clip):
                seg_a.append(pts)
                seg_b.append(np.roll(pts, -1, axis=0))
                clip.append(cl | np.roll(cl, -1))
            self._seg_cache = (np.vstack(seg_a), np.vstack(seg_b), np.concatenate(clip))
        return self._seg_cache

    def classify_many(self, points) -> np.ndarray:
        """1 interior, 0 boundary (within h of the polyline), -1 exterior."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        seg_a, seg_b, _ = self._segments()
        dist = _geom.seg_point_dist(points, seg_a, seg_b)
        inside = _geom.crossing_parity(points, seg_a, seg_b)
        out = np.where(inside, _CLS_INTERIOR, _CLS_EXTERIOR).astype(np.int8)
        out[dist <= self.h] = _CLS_BOUNDARY
        return out

    def contains(self, p) -> str:
        c = int(self.classify_many([np.asarray(p, dtype=float)])[0])
        return {_CLS_INTERIOR: INTERIOR, _CLS_BOUNDARY: BOUNDARY, _CLS_EXTERIOR: EXTERIOR}[c]

    def distance_to_boundary(self, points) -> np.ndarray:
        seg_a, seg_b, _ = self._segments()
        return _geom.seg_point_dist(np.atleast_2d(points), seg_a, seg_b)

    def area(self) -> float:
        return float(sum(_signed_area(p) for p in self.loop_points))


def make_domain(loops, h: float) -> Domain:
    """Validate loops and build the discretized domain.

    Raises NotClosed, SelfIntersecting, LoopsIntersect or BadOrientation.
    """
    if h <= 0:
        raise ParameterOutOfRange("h must be positive")
    loops = tuple(lp if isinstance(lp, Loop) else Loop(lp) for lp in loops)
    dom = Domain(loops=loops, h=h)
    for li, lp in enumerate(loops):
        gap = lp.closure_gap()
        if gap > h:
            raise NotClosed(f"loop {li} endpoint gap {gap:.3g} exceeds h={h:.3g}")
        params, pts, clip = lp.polyline(h)
        if len(pts) < 3:
            raise ParameterOutOfRange(f"loop {li} discretization too coarse")
        if _self_intersects(pts):
            raise SelfIntersecting(f"loop {li} polyline self-intersects")
        dom.loop_params.append(params)
        dom.loop_points.append(pts)
        dom.loop_clip.append(clip)
    # pairwise disjointness
    for i in range(len(loops)):
        for j in range(i + 1, len(loops)):
            a = dom.loop_points[i]
            b = dom.loop_points[j]
            if _geom.properly_crosses_any(
                a, np.roll(a, -1, axis=0), b, np.roll(b, -1, axis=0)
            ).any():
                raise LoopsIntersect(f"loops {i} and {j} intersect")
            if _geom.seg_point_dist(a[:1], b, np.roll(b, -1, axis=0))[0] <= h and len(loops) > 1:
                raise LoopsIntersect(f"loops {i} and {j} touch within h")
    # outer loop: the one containing a sample vertex of every other loop
    outer = 0
    if len(loops) > 1:
        outer = -1
        for i in range(len(loops)):
            pts_i = dom.loop_points[i]
            ok = True
            for j in range(len(loops)):
                if i == j:
                    continue
                probe = dom.loop_points[j][0]
                if not _geom.crossing_parity(
                    probe[None, :], pts_i, np.roll(pts_i, -1, axis=0)
                )[0]:
                    ok = False
                    break
            if ok:
                outer = i
                break
        if outer < 0:
            raise BadOrientation("no loop contains all others; domain is not connected")
    dom.outer_index = outer
    for i in range(len(loops)):
        area = _signed_area(dom.loop_points[i])
        if i == outer and area <= 0:
            raise BadOrientation(f"outer loop {i} must be counterclockwise (area {area:.3g})")
        if i != outer and area >= 0:
            raise BadOrientation(f"hole loop {i} must be clockwise (area {area:.3g})")
    allpts = np.vstack(dom.loop_points)
    dom.bounding_box = (
        (float(allpts[:, 0].min()), float(allpts[:, 1].min())),
        (float(allpts[:, 0].max()), float(allpts[:, 1].max())),
    )
    return dom


class GlueArc:
    """Closed subarc of one boundary component, parametrized by a shared
    interval J = [0, L] via the loop's arc-length parameter.

    t1 < t0 traverses the loop backwards; the interior-normal signed
    curvature is invariant under that reversal.
    """

    def __init__(self, domain: Domain, component_index: int, t0: float, t1: float):
        loop = domain.loops[component_index]
        T = loop.total_length
        if not (0.0 <= min(t0, t1) and max(t0, t1) <= T + 1e-12):
            raise ParameterOutOfRange("glue-arc interval outside loop parameter range")
        if t0 == t1:
            raise ParameterOutOfRange("glue arc is empty")
        self.domain = domain
        self.component_index = int(component_index)
        self.t0 = float(t0)
        self.t1 = float(t1)
        self.direction = 1.0 if t1 > t0 else -1.0
        self.length = abs(t1 - t0)

    @property
    def loop(self) -> Loop:
        return self.domain.loops[self.component_index]

    def loop_param(self, s):
        return self.t0 + self.direction * np.asarray(s, dtype=float)

    def point_many(self, s):
        pts, angs = self.loop.point_many(self.loop_param(s))
        if self.direction < 0:
            angs = angs + math.pi
        return pts, angs

    def point(self, s: float):
        pts, angs = self.point_many(np.array([s]))
        return pts[0], angs[0]

    def tangent_many(self, s):
        _, angs = self.point_many(s)
        return np.stack([np.cos(angs), np.sin(angs)], axis=1)

    def interior_normal_many(self, s) -> np.ndarray:
        """Unit normals pointing into the parent domain."""
        tans = self.tangent_many(s)
        out = np.empty_like(tans)
        out[:, 0] = -tans[:, 1]
        out[:, 1] = tans[:, 0]
        return out * self.direction

    def interior_curvature_many(self, s) -> np.ndarray:
        """Signed curvature w.r.t. the parent interior, per shared parameter."""
        return self.loop.curvature_many(self.loop_param(s))

    def interior_curvature(self, s: float) -> float:
        return float(self.interior_curvature_many(np.array([s]))[0])


@dataclass
class ConditionReport:
    """Result of the (k1)-(k3) gluing gate evaluated on a parameter grid."""

    k1_holds: bool
    k2_holds: bool
    k3_holds: bool
    flat_edge_case: bool
    epsilon_margin: float
    equality_points: np.ndarray
    grid_step: float

    @property
    def all_pass(self) -> bool:
        return self.k1_holds and self.k2_holds and self.k3_holds

    @property
    def acceptable(self) -> bool:
        """Conditions pass, or the documented flat-flat edge case."""
        return self.all_pass or (self.k1_holds and self.k2_holds and self.flat_edge_case)

    def to_dict(self) -> dict:
        return {
            "k1_holds": self.k1_holds,
            "k2_holds": self.k2_holds,
            "k3_holds": self.k3_holds,
            "flat_edge_case": self.flat_edge_case,
            "epsilon_margin": self.epsilon_margin,
            "equality_point_count": int(len(self.equality_points)),
            "grid_step": self.grid_step,
        }


_EQ_TOL = 1e-10
_SIGN_TOL = 1e-12


def conditions_from_samples(kappa_a: np.ndarray, kappa_b: np.ndarray, grid: np.ndarray, grid_step: float) -> ConditionReport:
    """Evaluate (k1)-(k3) on sampled curvature values.

    The finitely-many-equality-points clause of (k3) is operationalized as:
    no two adjacent grid points lie in the equality set |kA + kB| <= 1e-10.
    """
    kappa_a = np.asarray(kappa_a, dtype=float)
    kappa_b = np.asarray(kappa_b, dtype=float)
    k1 = bool(np.all(kappa_a <= _SIGN_TOL))
    k2 = bool(np.all(kappa_b >= -_SIGN_TOL))
    total = kappa_a + kappa_b
    eq = np.abs(total) <= _EQ_TOL
    adjacent_eq = bool(np.any(eq[:-1] & eq[1:]))
    k3 = bool(np.all(total <= _SIGN_TOL)) and not adjacent_eq
    flat = bool(np.all(np.abs(kappa_a) <= _EQ_TOL) and np.all(np.abs(kappa_b) <= _EQ_TOL))
    margin = float(np.min(np.abs(kappa_a) - kappa_b))
    return ConditionReport(
        k1_holds=k1,
        k2_holds=k2,
        k3_holds=k3,
        flat_edge_case=flat,
        epsilon_margin=margin,
        equality_points=np.asarray(grid)[eq],
        grid_step=grid_step,
    )


def check_gluing_conditions(arc_a: GlueArc, arc_b: GlueArc, grid_step: float = 0.0) -> ConditionReport:
    """Gate for gluing arc_a to arc_b; both must be parametrized by the same J."""
    L = arc_a.length
    if abs(arc_a.length - arc_b.length) > 1e-12 * max(L, arc_b.length):
        raise LengthMismatch(
            f"glue arcs have lengths {arc_a.length} and {arc_b.length}"
        )
    if grid_step <= 0.0:
        grid_step = L / 1024.0
    n = max(2, int(math.ceil(L / grid_step)) + 1)
    grid = np.linspace(0.0, L, n)
    ka = arc_a.interior_curvature_many(grid)
    kb = arc_b.interior_curvature_many(grid)
    return conditions_from_samples(ka, kb, grid, grid_step)


def local_chord_containment(domain: Domain, s0: float, component_index: int = 0, eps_max: float = 0.5, pairs: int = 8, probes: int = 5) -> float:
    """Largest tested half-width eps <= eps_max such that chords between
    boundary points of (s0-eps, s0+eps) stay in the domain.

    Requires positive interior-normal curvature at s0; raises
    NotLocallyConvex otherwise.  Chords are validated by sampling interior
    points against contains().
    """
    loop = domain.loops[component_index]
    k0 = float(loop.curvature_many(np.array([s0]))[0])
    if k0 <= 0:
        raise NotLocallyConvex(f"interior-normal curvature {k0} at s0 is not positive")
    eps = float(eps_max)
    fracs = np.linspace(0.0, 1.0, probes + 2)[1:-1]
    for _ in range(60):
        ts = s0 + np.linspace(-eps, eps, pairs)
        pts, _ = loop.point_many(ts)
        pa = np.repeat(pts, len(pts), axis=0)
        pb = np.tile(pts, (len(pts), 1))
        samples = pa[:, None, :] * (1 - fracs[None, :, None]) + pb[:, None, :] * fracs[None, :, None]
        cls = domain.classify_many(samples.reshape(-1, 2))
        if np.all(cls >= _CLS_BOUNDARY):
            return eps
        eps *= 0.7
    return eps
