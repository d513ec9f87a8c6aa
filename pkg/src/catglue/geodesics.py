"""Induced length-metric geodesics inside a single planar domain.

The induced distance is approximated on a visibility graph whose nodes are
the boundary-polyline vertices plus the two query points.  An edge is
admissible when its segment does not properly cross the boundary and its
interior probe points are not exterior; grazing contact within the h-band
counts as admissible, so paths may hug the boundary along concave
stretches.  Shortest paths are found with a label-setting search
(scipy's Dijkstra); the returned length overestimates the true induced
distance by O(h * path length).
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from . import _geom
from .domains import Domain, _CLS_EXTERIOR
from .errors import ClippedGeodesic, Disconnected, PointOutside

_PROBE_FRACS = np.array([0.5, 0.25, 0.75, 0.125, 0.875, 0.37, 0.63])


@dataclass
class GeodesicPath:
    """Polyline path; ``vertex_sides`` is None for single-domain paths."""

    vertices: np.ndarray
    length: float
    space_tag: str
    crossings: list = field(default_factory=list)
    vertex_sides: list | None = None

    def __post_init__(self):
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        self._cum = np.concatenate(
            [[0.0], np.cumsum(_geom.norms(np.diff(self.vertices, axis=0)))]
        ) if len(self.vertices) > 1 else np.array([0.0])

    def point_at(self, t: float) -> np.ndarray:
        """Point at arc length t along the polyline."""
        t = float(np.clip(t, 0.0, self._cum[-1]))
        i = int(np.clip(np.searchsorted(self._cum, t, side="right") - 1, 0, len(self._cum) - 2))
        seg = self._cum[i + 1] - self._cum[i]
        lam = 0.0 if seg == 0 else (t - self._cum[i]) / seg
        return (1 - lam) * self.vertices[i] + lam * self.vertices[i + 1]

    def side_at(self, t: float):
        """Side tag of the segment containing arc length t (glued paths only)."""
        if self.vertex_sides is None:
            return None
        t = float(np.clip(t, 0.0, self._cum[-1]))
        i = int(np.clip(np.searchsorted(self._cum, t, side="right") - 1, 0, len(self._cum) - 2))
        # a segment joins vertex i to i+1; its interior lies on the side both
        # endpoints share (crossing vertices carry both tags)
        sa, sb = self.vertex_sides[i], self.vertex_sides[i + 1]
        return sb if sa == "both" else sa


def visibility_edges(verts: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray, classify_fn, ring_pairs=None, cand=None):
    """Admissible straight chords among ``verts``.

    cand: optional (i_idx, j_idx) arrays of candidate pairs; defaults to all
    i < j pairs.  ring_pairs are forced admissible (boundary edges).
    Returns (i, j, w) arrays.
    """
    n = len(verts)
    if cand is None:
        ii, jj = np.triu_indices(n, k=1)
    else:
        ii, jj = cand
    keep = _admissible(verts[ii], verts[jj], seg_a, seg_b, classify_fn)
    if ring_pairs is not None and len(ring_pairs):
        ring = {(min(a, b), max(a, b)) for a, b in ring_pairs}
        forced = np.array([(min(a, b), max(a, b)) in ring for a, b in zip(ii, jj)])
        keep |= forced
    ii, jj = ii[keep], jj[keep]
    w = _geom.norms(verts[ii] - verts[jj])
    return ii, jj, w


def _admissible(p: np.ndarray, q: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray, classify_fn) -> np.ndarray:
    """Vectorized edge test.

    A chord is admissible when none of its interior probe points is
    exterior; chords that properly cross the discretized boundary get a
    second, crossing-aware probe pass so that only excursions beyond the
    h-band disqualify them (grazing tangency inside the band is allowed).
    """
    p = np.atleast_2d(p)
    q = np.atleast_2d(q)
    probes = (
        p[:, None, :] * (1.0 - _PROBE_FRACS[None, :, None])
        + q[:, None, :] * _PROBE_FRACS[None, :, None]
    ).reshape(-1, 2)
    cls = classify_fn(probes).reshape(len(p), len(_PROBE_FRACS))
    ok = ~np.any(cls == _CLS_EXTERIOR, axis=1)
    if ok.any():
        crosses = _geom.properly_crosses_any(p[ok], q[ok], seg_a, seg_b)
        check = np.nonzero(ok)[0][crosses]
        for k in check:
            ts = _geom.crossing_params(p[k], q[k], seg_a, seg_b)
            mids = 0.5 * (np.concatenate([[0.0], ts]) + np.concatenate([ts, [1.0]]))
            pts = p[k][None, :] + mids[:, None] * (q[k] - p[k])[None, :]
            if np.any(classify_fn(pts) == _CLS_EXTERIOR):
                ok[k] = False
    return ok


class DomainGraph:
    """Cached visibility structure of one domain at one discretization h."""

    def __init__(self, domain: Domain, h: float):
        self.domain = domain
        self.h = h
        verts, clip, rings = [], [], []
        off = 0
        for pts, cl in zip(domain.loop_points, domain.loop_clip):
            verts.append(pts)
            clip.append(cl)
            n = len(pts)
            rings.extend([(off + i, off + (i + 1) % n) for i in range(n)])
            off += n
        self.verts = np.vstack(verts)
        self.clip_mask = np.concatenate(clip)
        self.ring_pairs = rings
        self.seg_a, self.seg_b, _ = domain._segments()
        self.base_i, self.base_j, self.base_w = visibility_edges(
            self.verts, self.seg_a, self.seg_b, domain.classify_many, ring_pairs=rings
        )

    def extend(self, extra_pts: np.ndarray):
        """Edges linking extra points to the base vertices and to each other."""
        extra_pts = np.atleast_2d(extra_pts)
        m = len(extra_pts)
        n = len(self.verts)
        ei = np.repeat(np.arange(m), n)
        ej = np.tile(np.arange(n), m)
        keep = _admissible(
            extra_pts[ei], self.verts[ej], self.seg_a, self.seg_b, self.domain.classify_many
        )
        pi, pj = ei[keep], ej[keep]
        w1 = _geom.norms(extra_pts[pi] - self.verts[pj])
        if m > 1:
            qi, qj = np.triu_indices(m, k=1)
            keep2 = _admissible(
                extra_pts[qi], extra_pts[qj], self.seg_a, self.seg_b, self.domain.classify_many
            )
            qi, qj = qi[keep2], qj[keep2]
            w2 = _geom.norms(extra_pts[qi] - extra_pts[qj])
        else:
            qi = qj = np.zeros(0, dtype=int)
            w2 = np.zeros(0)
        return (pi, pj, w1), (qi, qj, w2)

    def solve(self, extra_pts: np.ndarray, sources):
        """Dijkstra over base + extra nodes; extra nodes are indexed after
        the base vertices.  Returns (dist, predecessors) from each source."""
        (pi, pj, w1), (qi, qj, w2) = self.extend(extra_pts)
        n = len(self.verts)
        m = len(np.atleast_2d(extra_pts))
        rows = np.concatenate([self.base_i, self.base_j, pi + n, pj, qi + n, qj + n])
        cols = np.concatenate([self.base_j, self.base_i, pj, pi + n, qj + n, qi + n])
        vals = np.concatenate([self.base_w, self.base_w, w1, w1, w2, w2])
        g = csr_matrix((vals, (rows, cols)), shape=(n + m, n + m))
        dist, pred = dijkstra(g, directed=False, indices=sources, return_predecessors=True)
        return dist, pred


_graph_cache: "weakref.WeakKeyDictionary[Domain, dict]" = weakref.WeakKeyDictionary()


def domain_graph(domain: Domain, h: float) -> DomainGraph:
    per = _graph_cache.setdefault(domain, {})
    if h not in per:
        per[h] = DomainGraph(domain, h)
    return per[h]


def _walk(pred_row, src, dst):
    path = [dst]
    guard = 0
    while path[-1] != src:
        p = pred_row[path[-1]]
        if p < 0:
            raise Disconnected("no path found")
        path.append(int(p))
        guard += 1
        if guard > len(pred_row):
            raise Disconnected("predecessor cycle")
    return path[::-1]


def shortest_path(domain: Domain, x, y, h: float) -> GeodesicPath:
    """Shortest admissible polyline from x to y at discretization h."""
    x = np.asarray(x, dtype=float).reshape(2)
    y = np.asarray(y, dtype=float).reshape(2)
    cls = domain.classify_many(np.vstack([x, y]))
    if np.any(cls == _CLS_EXTERIOR):
        raise PointOutside(f"query point outside the domain: {x if cls[0] == _CLS_EXTERIOR else y}")
    tag = f"domain@{h:g}"
    if np.array_equal(x, y):
        return GeodesicPath(vertices=np.array([x]), length=0.0, space_tag=tag)
    g = domain_graph(domain, h)
    n = len(g.verts)
    dist, pred = g.solve(np.vstack([x, y]), sources=[n])
    d = dist[0, n + 1]
    if not np.isfinite(d):
        raise Disconnected("query points are not connected at this discretization")
    idxs = _walk(pred[0], n, n + 1)
    pts = np.vstack([g.verts, x, y])[idxs]
    mid = [i for i in idxs[1:-1] if i < n]
    if any(g.clip_mask[i] for i in mid):
        raise ClippedGeodesic("shortest path touches a clip-box edge")
    verts = [pts[0]]
    for p in pts[1:]:
        if not np.array_equal(p, verts[-1]):
            verts.append(p)
    verts = np.vstack(verts)
    length = float(_geom.norms(np.diff(verts, axis=0)).sum())
    return GeodesicPath(vertices=verts, length=length, space_tag=tag)


def distance(domain: Domain, x, y, h: float) -> float:
    """Length of shortest_path; exactly symmetric in (x, y)."""
    x = np.asarray(x, dtype=float).reshape(2)
    y = np.asarray(y, dtype=float).reshape(2)
    if tuple(y) < tuple(x):
        x, y = y, x
    return shortest_path(domain, x, y, h).length


def is_locally_geodesic(domain: Domain, path: GeodesicPath, window: float, tol: float, h: float | None = None) -> bool:
    """No local shortcut: every windowed sub-path is within tol of the
    distance between its endpoints."""
    if h is None:
        h = float(path.space_tag.split("@")[-1]) if "@" in path.space_tag else domain.h
    cum = path._cum
    for i in range(1, len(path.vertices) - 1):
        t0 = max(0.0, cum[i] - window / 2)
        t1 = min(cum[-1], cum[i] + window / 2)
        p0 = path.point_at(t0)
        p1 = path.point_at(t1)
        sub_len = t1 - t0
        if sub_len > distance(domain, p0, p1, h) + tol:
            return False
    return True


def path_midpoints_inside(domain: Domain, path: GeodesicPath) -> bool:
    mids = 0.5 * (path.vertices[:-1] + path.vertices[1:])
    if len(mids) == 0:
        return True
    return bool(np.all(domain.classify_many(mids) >= 0))
