"""Euclidean comparison triangles and the thin-triangle audit.

A space under audit exposes ``geodesic(a, b)`` returning a polyline path
and ``pairwise_distance(rows, cols)`` returning a distance matrix; both
the single-domain and the glued adapters below qualify.  The audit samples
geodesic triangles, measures |a-b| against the comparison distance
for grid points a, b on two distinct sides, and reports the worst signed
excess; a positive excess beyond the calibrated discretization threshold
certifies failure of the thin-triangle inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _geom
from .domains import Domain
from .errors import ClippedGeodesic, ParameterOutOfRange, TriangleInequalityViolated
from .geodesics import GeodesicPath, domain_graph, shortest_path
from .gluing import SIDE_A, SIDE_B, GluedSurface

_REL_SLACK = 1e-12


@dataclass
class ComparisonTriangle:
    l_xy: float
    l_yz: float
    l_zx: float
    x_bar: np.ndarray
    y_bar: np.ndarray
    z_bar: np.ndarray
    degenerate: bool

    def side(self, name: str):
        if name == "xy":
            return self.x_bar, self.y_bar, self.l_xy
        if name == "yz":
            return self.y_bar, self.z_bar, self.l_yz
        if name == "zx":
            return self.z_bar, self.x_bar, self.l_zx
        raise ParameterOutOfRange(f"unknown side {name!r}")


def comparison_triangle(l_xy: float, l_yz: float, l_zx: float) -> ComparisonTriangle:
    """Euclidean triangle with the given side lengths: x_bar at the origin,
    y_bar on the positive first axis, z_bar in the upper half-plane."""
    sides = (l_xy, l_yz, l_zx)
    if any(l < 0 for l in sides):
        raise TriangleInequalityViolated("negative side length")
    scale = max(sides) or 1.0
    slack = _REL_SLACK * scale
    if (
        l_xy > l_yz + l_zx + slack
        or l_yz > l_xy + l_zx + slack
        or l_zx > l_xy + l_yz + slack
    ):
        raise TriangleInequalityViolated(f"side lengths {sides} violate the triangle inequality")
    x_bar = np.zeros(2)
    y_bar = np.array([l_xy, 0.0])
    if l_xy == 0.0:
        cx, cy2 = l_zx, 0.0
    else:
        cx = (l_zx**2 + l_xy**2 - l_yz**2) / (2.0 * l_xy)
        cy2 = l_zx**2 - cx**2
    cy = math.sqrt(max(cy2, 0.0))
    degenerate = cy <= slack
    return ComparisonTriangle(l_xy, l_yz, l_zx, x_bar, y_bar, np.array([cx, cy]), degenerate)


def comparison_point(tri: ComparisonTriangle, side: str, t: float) -> np.ndarray:
    """Affine point at arc length t from the side's first endpoint."""
    a, b, L = tri.side(side)
    if t < -_REL_SLACK * max(1.0, L) or t > L + _REL_SLACK * max(1.0, L):
        raise ParameterOutOfRange(f"t={t} outside side of length {L}")
    lam = 0.0 if L == 0 else min(max(t / L, 0.0), 1.0)
    return (1 - lam) * a + lam * b


# -- space adapters -------------------------------------------------------------
class DomainSpace:
    """Single planar domain under the induced length metric."""

    def __init__(self, domain: Domain, h: float):
        self.domain = domain
        self.h = h

    def geodesic(self, a, b) -> GeodesicPath:
        return shortest_path(self.domain, _pt(a), _pt(b), self.h)

    def pairwise_distance(self, rows, cols=None) -> np.ndarray:
        square = cols is None
        pts = [_pt(p) for p in rows] + ([] if square else [_pt(p) for p in cols])
        g = domain_graph(self.domain, self.h)
        src = [len(g.verts) + i for i in range(len(rows))]
        dist, _ = g.solve(np.array(pts), sources=src)
        off = len(g.verts) if square else len(g.verts) + len(rows)
        out = dist[:, off:].copy()
        if square:
            iu = np.triu_indices(len(rows), k=1)
            out[(iu[1], iu[0])] = out[iu]
        return out

    def clearance(self, pts) -> np.ndarray:
        return self.domain.distance_to_boundary(np.atleast_2d(pts))

    def classify_interior(self, p) -> bool:
        return int(self.domain.classify_many([_pt(p)])[0]) == 1


class GluedSpaceAdapter:
    """Glued surface under the quotient length metric; points carry side tags."""

    def __init__(self, surface: GluedSurface, h: float):
        self.surface = surface
        self.h = h
        self.space = surface.space(h)

    def geodesic(self, a, b) -> GeodesicPath:
        return self.space.shortest_path(a, b)

    def pairwise_distance(self, rows, cols=None) -> np.ndarray:
        return self.space.pairwise_distance(rows, cols)

    def clearance(self, tagged_pts) -> np.ndarray:
        out = np.empty(len(tagged_pts))
        for i, (side, p) in enumerate(tagged_pts):
            panel = self.space.panels[side]
            out[i] = _geom.seg_point_dist(np.atleast_2d(p), panel.seg_a, panel.seg_b)[0]
        return out

    def classify_interior(self, tp) -> bool:
        side, p = tp
        return int(self.space.classify(side, p)[0]) == 1


def _pt(p):
    if isinstance(p, tuple) and len(p) == 2 and isinstance(p[0], str):
        return np.asarray(p[1], dtype=float)
    return np.asarray(p, dtype=float).reshape(2)


def _sample_on_path(path: GeodesicPath, n: int):
    """n interior grid points (tagged when the path carries sides)."""
    L = path.length
    ts = L * (np.arange(1, n + 1) / (n + 1.0))
    pts = []
    for t in ts:
        p = path.point_at(float(t))
        side = path.side_at(float(t))
        pts.append((side, p) if side is not None else p)
    return ts, pts


@dataclass
class ThinnessReport:
    vertices: tuple
    samples_per_side: int
    max_violation: float
    witness: dict
    h_used: float
    side_lengths: tuple = ()
    degenerate: bool = False

    def to_dict(self) -> dict:
        w = dict(self.witness)
        for k in ("a", "b"):
            if k in w and w[k] is not None:
                side, p = (w[k] if isinstance(w[k], tuple) and isinstance(w[k][0], str) else (None, w[k]))
                w[k] = {"side": side, "xy": [float(v) for v in np.asarray(p).ravel()]}
        return {
            "max_violation": float(self.max_violation),
            "side_lengths": [float(v) for v in self.side_lengths],
            "samples_per_side": int(self.samples_per_side),
            "h": float(self.h_used),
            "witness": w,
            "degenerate": bool(self.degenerate),
        }


def thinness_violation(space, x, y, z, n: int = 16, h: float | None = None) -> ThinnessReport:
    """Worst signed excess |a-b| - ||a_bar-b_bar|| over all side pairs.

    The three geodesics are computed once; a and b range over an n-point
    arc-length grid with endpoints excluded (endpoints give trivial
    equality).  The maximum is recorded even when negative.
    """
    h = h if h is not None else space.h
    p_xy = space.geodesic(x, y)
    p_yz = space.geodesic(y, z)
    p_zx = space.geodesic(z, x)
    tri = comparison_triangle(p_xy.length, p_yz.length, p_zx.length)
    sides = {"xy": p_xy, "yz": p_yz, "zx": p_zx}
    samples = {name: _sample_on_path(path, n) for name, path in sides.items()}
    order = ("xy", "yz", "zx")
    all_pts = [p for name in order for p in samples[name][1]]
    dall = space.pairwise_distance(all_pts)
    best = -math.inf
    witness = {}
    for si, sj in ((0, 1), (1, 2), (2, 0)):
        s1, s2 = order[si], order[sj]
        t1, pts1 = samples[s1]
        t2, pts2 = samples[s2]
        dmat = dall[si * n:(si + 1) * n, sj * n:(sj + 1) * n]
        c1 = np.array([comparison_point(tri, s1, t) for t in t1])
        c2 = np.array([comparison_point(tri, s2, t) for t in t2])
        comp = np.hypot(
            c1[:, None, 0] - c2[None, :, 0], c1[:, None, 1] - c2[None, :, 1]
        )
        viol = dmat - comp
        k = int(np.argmax(viol))
        i, j = divmod(k, viol.shape[1])
        if viol[i, j] > best:
            best = float(viol[i, j])
            witness = {
                "sides": (s1, s2),
                "t_a": float(t1[i]),
                "t_b": float(t2[j]),
                "a": pts1[i],
                "b": pts2[j],
                "measured": float(dmat[i, j]),
                "comparison": float(comp[i, j]),
            }
    return ThinnessReport(
        vertices=(x, y, z),
        samples_per_side=n,
        max_violation=best,
        witness=witness,
        h_used=h,
        side_lengths=(p_xy.length, p_yz.length, p_zx.length),
        degenerate=tri.degenerate,
    )


# -- triangle sampling ------------------------------------------------------------
@dataclass
class AuditRegion:
    """Sampling recipe for audit triangles.

    For glued spaces points are drawn near the glue arc: a parameter in
    ``window``, an inward offset in [clearance, radius], and a random side.
    For plain domains points are drawn uniformly from ``box``.
    """

    kind: str  # "glued" | "domain"
    window: tuple = (0.0, 1.0)
    radius: float = 0.15
    clearance: float = 0.02
    min_side: float = 0.05
    sides: tuple = (SIDE_A, SIDE_B)
    box: tuple = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "window": list(self.window),
            "radius": self.radius,
            "clearance": self.clearance,
            "min_side": self.min_side,
            "sides": list(self.sides),
            "box": list(self.box),
        }


def _sample_point(space, region: AuditRegion, rng) -> tuple:
    for _ in range(1000):
        if region.kind == "domain":
            x0, y0, x1, y1 = region.box
            p = np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])
            if space.classify_interior(p) and space.clearance([p])[0] >= region.clearance:
                return p
        else:
            side = region.sides[int(rng.integers(len(region.sides)))]
            s = rng.uniform(*region.window)
            d = rng.uniform(region.clearance, region.radius)
            arc = space.surface.arc(side)
            base, _ = arc.point_many(np.array([s]))
            nrm = arc.interior_normal_many(np.array([s]))
            p = base[0] + d * nrm[0]
            tp = (side, p)
            if space.classify_interior(tp) and space.clearance([tp])[0] >= region.clearance:
                return tp
    raise ParameterOutOfRange("could not sample an interior point in the audit region")


def _chart_separation_ok(space, pts, min_side: float) -> bool:
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = pts[i], pts[j]
            if isinstance(a, tuple) and isinstance(b, tuple):
                if a[0] == b[0]:
                    if np.hypot(*(a[1] - b[1])) < min_side:
                        return False
                else:
                    if space.clearance([a])[0] + space.clearance([b])[0] < min_side:
                        return False
            else:
                if np.hypot(*(np.asarray(a) - np.asarray(b))) < min_side:
                    return False
    return True


def cat0_audit(space, region: AuditRegion, trials: int, n: int = 16, h: float | None = None, seed: int = 0, threshold: float | None = None):
    """Sampled thin-triangle audit; deterministic given the seed.

    Returns (reports, summary).  Triangles whose geodesics are clipped are
    discarded and resampled (counted in the summary).
    """
    h = h if h is not None else space.h
    rng = np.random.default_rng(seed)
    reports = []
    clipped = 0
    attempts = 0
    while len(reports) < trials and attempts < 50 * trials:
        attempts += 1
        pts = [_sample_point(space, region, rng) for _ in range(3)]
        if not _chart_separation_ok(space, pts, region.min_side):
            continue
        try:
            reports.append(thinness_violation(space, *pts, n=n, h=h))
        except ClippedGeodesic:
            clipped += 1
            continue
    if len(reports) < trials:
        raise ParameterOutOfRange("audit could not assemble enough valid triangles")
    worst_idx = int(np.argmax([r.max_violation for r in reports]))
    worst = reports[worst_idx]
    summary = {
        "trials": trials,
        "clipped_discarded": clipped,
        "worst_violation": float(worst.max_violation),
        "worst_trial": worst_idx,
        "threshold": None if threshold is None else float(threshold),
        "cat0_consistent": None if threshold is None else bool(worst.max_violation <= threshold),
    }
    return reports, summary


def calibrate_audit_threshold(make_space, region: AuditRegion, h_values, trials: int = 10, n: int = 16, seed: int = 0) -> dict:
    """Richardson-style pilot: worst violation at each h on the same
    deterministic triangles; the threshold constant C comes from the
    largest violation-to-h ratio with a 1.3x safety factor (floored at 1
    so a clean pilot still yields a usable positive threshold)."""
    worst = []
    for h in h_values:
        space = make_space(h)
        _, summary = cat0_audit(space, region, trials, n=n, h=h, seed=seed)
        worst.append(summary["worst_violation"])
    ratios = []
    for a, b in zip(worst, worst[1:]):
        if b <= 0:
            ratios.append(math.inf)
        else:
            ratios.append(a / b)
    c = 1.3 * max(max(w, 0.0) / h for w, h in zip(worst, h_values))
    return {
        "h_values": [float(h) for h in h_values],
        "worst_violations": [float(w) for w in worst],
        "shrink_ratios": [float(r) for r in ratios],
        "calibrated_c": float(max(c, 1.0)),
    }
