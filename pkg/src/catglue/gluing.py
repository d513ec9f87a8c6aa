"""Gluing two planar domains along isometric boundary arcs.

The two sides keep their own planar charts; the glued surface identifies
arc points with equal shared parameter.  Discretized geodesics change
sides only at portal points sampled on the arc, and every crossing is
then refined by a one-dimensional minimization of path length over the
crossing parameter (golden section between the neighboring portals, one
crossing at a time, two sweeps).  Crossing angles are measured against
the analytic arc tangent, never the polyline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from . import _geom
from .domains import Domain, GlueArc, ConditionReport, check_gluing_conditions, _CLS_EXTERIOR
from .errors import (
    AngleDomain,
    ClippedGeodesic,
    ConditionsViolated,
    Disconnected,
    NoCrossings,
    ParameterOutOfRange,
    PointOutside,
)
from .geodesics import GeodesicPath, _admissible, visibility_edges

SIDE_A = "A"
SIDE_B = "B"

ANCHOR_FACTOR = 10.0  # angle anchors sit >= 10 h back along the path


def tag(side: str, p) -> tuple:
    if side not in (SIDE_A, SIDE_B):
        raise ParameterOutOfRange(f"unknown side {side!r}")
    return (side, np.asarray(p, dtype=float).reshape(2))


@dataclass
class Crossing:
    """One transition of a path through the glue arc."""

    parameter: float
    point_a: np.ndarray
    point_b: np.ndarray
    theta_a: float
    theta_b: float
    boundary_endpoint: bool = False

    def to_dict(self) -> dict:
        return {
            "parameter": float(self.parameter),
            "point_a": [float(v) for v in self.point_a],
            "point_b": [float(v) for v in self.point_b],
            "theta_a": float(self.theta_a),
            "theta_b": float(self.theta_b),
            "boundary_endpoint": bool(self.boundary_endpoint),
        }


@dataclass(eq=False)
class GluedSurface:
    side_a: Domain
    side_b: Domain
    arc_a: GlueArc
    arc_b: GlueArc
    portal_parameters: np.ndarray
    condition_report: ConditionReport
    enforce_conditions: bool
    _spaces: dict = field(default_factory=dict, repr=False)

    @property
    def glue_length(self) -> float:
        return self.arc_a.length

    def domain(self, side: str) -> Domain:
        return self.side_a if side == SIDE_A else self.side_b

    def arc(self, side: str) -> GlueArc:
        return self.arc_a if side == SIDE_A else self.arc_b

    def space(self, h: float) -> "GluedSpace":
        if h not in self._spaces:
            self._spaces[h] = GluedSpace(self, h)
        return self._spaces[h]


def glue(side_a: Domain, arc_a: GlueArc, side_b: Domain, arc_b: GlueArc, portals: int = 65, enforce: bool = True, grid_step: float = 0.0) -> GluedSurface:
    """Glue two domains along arcs of equal length.

    ``portals`` is the number of side-transition samples on the shared
    interval (endpoints included).  With enforce=True the (k1)-(k3) gate
    must pass; the flat-flat case (both curvatures identically zero) is
    accepted and flagged on the report instead of rejected.
    """
    if portals < 2:
        raise ParameterOutOfRange("need at least 2 portals")
    report = check_gluing_conditions(arc_a, arc_b, grid_step)
    if enforce and not report.acceptable:
        raise ConditionsViolated(
            f"gluing conditions fail: k1={report.k1_holds} k2={report.k2_holds} k3={report.k3_holds}"
        )
    grid = np.linspace(0.0, arc_a.length, int(portals))
    return GluedSurface(
        side_a=side_a,
        side_b=side_b,
        arc_a=arc_a,
        arc_b=arc_b,
        portal_parameters=grid,
        condition_report=report,
        enforce_conditions=enforce,
    )


class _Panel:
    """One side of the glued surface, discretized at the query tolerance h
    with portal points spliced into the glue window of its boundary."""

    def __init__(self, domain: Domain, arc: GlueArc, h: float, portal_params: np.ndarray):
        self.domain = domain
        self.arc = arc
        self.h = h
        lo = min(arc.t0, arc.t1)
        hi = max(arc.t0, arc.t1)
        verts, clip, rings = [], [], []
        portal_rank_all = []
        off = 0
        for li, loop in enumerate(domain.loops):
            params, pts, cl = loop.polyline(h)
            rank = np.full(len(params), -1, dtype=int)
            if li == arc.component_index:
                p_loop = arc.loop_param(portal_params)
                keep = (params <= lo + 1e-12) | (params >= hi - 1e-12)
                # drop kept samples that coincide with a portal parameter
                near = np.min(
                    np.abs(params[:, None] - p_loop[None, :]), axis=1, initial=np.inf
                )
                keep &= near > 1e-9 * max(1.0, loop.total_length)
                params = np.concatenate([params[keep], p_loop])
                ppts, _ = arc.point_many(portal_params)
                pts = np.vstack([pts[keep], ppts])
                cl = np.concatenate([cl[keep], np.zeros(len(p_loop), dtype=bool)])
                rank = np.concatenate(
                    [np.full(keep.sum(), -1, dtype=int), np.arange(len(p_loop))]
                )
                order = np.argsort(params, kind="stable")
                params, pts, cl, rank = params[order], pts[order], cl[order], rank[order]
            n = len(pts)
            rings.extend([(off + i, off + (i + 1) % n) for i in range(n)])
            verts.append(pts)
            clip.append(cl)
            portal_rank_all.append(rank)
            off += n
        self.verts = np.vstack(verts)
        self.clip_mask = np.concatenate(clip)
        rank = np.concatenate(portal_rank_all)
        self.portal_vertex = np.full(len(portal_params), -1, dtype=int)
        for idx, r in enumerate(rank):
            if r >= 0:
                self.portal_vertex[r] = idx
        self.ring_pairs = rings
        self.seg_a = self.verts
        self.seg_b = np.vstack(
            [np.roll(v, -1, axis=0) for v in verts]
        )
        self.base_i, self.base_j, self.base_w = visibility_edges(
            self.verts, self.seg_a, self.seg_b, self.classify_many, ring_pairs=rings
        )

    def classify_many(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        dist = _geom.seg_point_dist(points, self.seg_a, self.seg_b)
        inside = _geom.crossing_parity(points, self.seg_a, self.seg_b)
        out = np.where(inside, 1, -1).astype(np.int8)
        out[dist <= self.h] = 0
        return out

    def extend_edges(self, pts: np.ndarray):
        """(i_extra, j_vert, w) plus (i_extra, j_extra, w) admissible edges."""
        pts = np.atleast_2d(pts)
        m = len(pts)
        n = len(self.verts)
        ei = np.repeat(np.arange(m), n)
        ej = np.tile(np.arange(n), m)
        keep = _admissible(pts[ei], self.verts[ej], self.seg_a, self.seg_b, self.classify_many)
        e1 = (ei[keep], ej[keep], _geom.norms(pts[ei[keep]] - self.verts[ej[keep]]))
        if m > 1:
            qi, qj = np.triu_indices(m, k=1)
            keep2 = _admissible(pts[qi], pts[qj], self.seg_a, self.seg_b, self.classify_many)
            e2 = (qi[keep2], qj[keep2], _geom.norms(pts[qi[keep2]] - pts[qj[keep2]]))
        else:
            e2 = (np.zeros(0, dtype=int), np.zeros(0, dtype=int), np.zeros(0))
        return e1, e2


def _refined_portal_grid(base: np.ndarray, h: float) -> np.ndarray:
    """Subdivide each portal interval in powers of two until the spacing is
    at most sqrt(2h); keeps the original portals as a subset so growing the
    portal count never shrinks the search space."""
    target = math.sqrt(2.0 * h)
    out = [base[0]]
    for a, b in zip(base[:-1], base[1:]):
        span = b - a
        m = max(0, int(math.ceil(math.log2(span / target)))) if span > target else 0
        k = 1 << m
        for i in range(1, k + 1):
            out.append(a + span * i / k)
    return np.array(out)


class GluedSpace:
    """Distance structure of a glued surface at discretization h."""

    def __init__(self, surface: GluedSurface, h: float):
        self.surface = surface
        self.h = float(h)
        self.portal_params = _refined_portal_grid(surface.portal_parameters, self.h)
        self.panels = {
            SIDE_A: _Panel(surface.side_a, surface.arc_a, self.h, self.portal_params),
            SIDE_B: _Panel(surface.side_b, surface.arc_b, self.h, self.portal_params),
        }
        pa = self.panels[SIDE_A]
        pb = self.panels[SIDE_B]
        self.n_a = len(pa.verts)
        self.n_base = self.n_a + len(pb.verts)
        rows = [pa.base_i, pa.base_j, pb.base_i + self.n_a, pb.base_j + self.n_a]
        cols = [pa.base_j, pa.base_i, pb.base_j + self.n_a, pb.base_i + self.n_a]
        vals = [pa.base_w, pa.base_w, pb.base_w, pb.base_w]
        ia = pa.portal_vertex
        ib = pb.portal_vertex + self.n_a
        zero = np.zeros(len(ia))
        rows += [ia, ib]
        cols += [ib, ia]
        vals += [zero, zero]
        self._base = (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))
        self._portal_of_node = {}
        for k, (va, vb) in enumerate(zip(ia, ib)):
            self._portal_of_node[int(va)] = k
            self._portal_of_node[int(vb)] = k

    # -- basic node helpers -------------------------------------------------
    def node_side(self, idx: int) -> str:
        return SIDE_A if idx < self.n_a else SIDE_B

    def node_point(self, idx: int, extras=None) -> np.ndarray:
        if idx < self.n_a:
            return self.panels[SIDE_A].verts[idx]
        if idx < self.n_base:
            return self.panels[SIDE_B].verts[idx - self.n_a]
        return extras[idx - self.n_base][1]

    def classify(self, side: str, points) -> np.ndarray:
        return self.panels[side].classify_many(points)

    # -- graph assembly -------------------------------------------------------
    def solve(self, extras, sources, need_pred=True):
        """Dijkstra over base plus tagged extra points.

        extras: list of (side, point); extra i becomes node n_base + i.
        """
        rows, cols, vals = [self._base[0]], [self._base[1]], [self._base[2]]
        by_side = {SIDE_A: [], SIDE_B: []}
        for i, (side, pt) in enumerate(extras):
            by_side[side].append((i, pt))
        for side, items in by_side.items():
            if not items:
                continue
            panel = self.panels[side]
            off = 0 if side == SIDE_A else self.n_a
            pts = np.array([p for _, p in items])
            gids = np.array([self.n_base + i for i, _ in items])
            (ei, ej, w1), (qi, qj, w2) = panel.extend_edges(pts)
            rows.append(gids[ei]); cols.append(ej + off); vals.append(w1)
            rows.append(ej + off); cols.append(gids[ei]); vals.append(w1)
            rows.append(gids[qi]); cols.append(gids[qj]); vals.append(w2)
            rows.append(gids[qj]); cols.append(gids[qi]); vals.append(w2)
        n = self.n_base + len(extras)
        g = csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        )
        return dijkstra(g, directed=False, indices=sources, return_predecessors=need_pred)

    # -- path extraction ----------------------------------------------------
    def _walk(self, pred_row, src, dst):
        path = [int(dst)]
        guard = 0
        limit = len(pred_row) + 1
        while path[-1] != src:
            p = pred_row[path[-1]]
            if p < 0:
                raise Disconnected("no path between query points")
            path.append(int(p))
            guard += 1
            if guard > limit:
                raise Disconnected("predecessor cycle")
        return path[::-1]

    def _entries_from_nodes(self, nodes, extras):
        """Convert a node id path to (side, point, portal_k) entries,
        collapsing each zero-length portal hop into a seam marker."""
        entries = []
        for idx in nodes:
            if idx >= self.n_base:
                side, pt = extras[idx - self.n_base]
                entries.append([side, np.asarray(pt, dtype=float), None])
            else:
                side = self.node_side(idx)
                k = self._portal_of_node.get(idx)
                pt = self.node_point(idx)
                entries.append([side, pt, k])
        return entries

    def _find_seams(self, entries):
        seams = []
        for i in range(len(entries) - 1):
            a, b = entries[i], entries[i + 1]
            if a[2] is not None and a[2] == b[2] and a[0] != b[0]:
                seams.append(i)
        return seams

    def _seam_window(self, k: int):
        pp = self.portal_params
        lo = pp[k - 1] if k > 0 else pp[0]
        hi = pp[k + 1] if k + 1 < len(pp) else pp[-1]
        return lo, hi

    def _seam_g(self, from_side, prev_pt, next_pt):
        arc_from = self.surface.arc(from_side)
        arc_to = self.surface.arc(SIDE_B if from_side == SIDE_A else SIDE_A)

        def g(s):
            pa, _ = arc_from.point_many(np.atleast_1d(s))
            pb, _ = arc_to.point_many(np.atleast_1d(s))
            return float(
                np.hypot(*(pa[0] - prev_pt)) + np.hypot(*(pb[0] - next_pt))
            )

        return g

    def refine_path(self, entries, sweeps: int = 2):
        """Refine every seam parameter by golden-section; entries are
        updated in place with the refined crossing coordinates."""
        seams = self._find_seams(entries)
        params = {}
        for _ in range(sweeps):
            for i in seams:
                from_side = entries[i][0]
                k = entries[i][2]
                s0 = params.get(i, self.portal_params[k])
                lo, hi = self._seam_window(k)
                prev_pt = entries[i - 1][1]
                next_pt = entries[i + 2][1] if i + 2 < len(entries) else entries[i + 1][1]
                g = self._seam_g(from_side, prev_pt, next_pt)
                s_star, _ = _geom.brent_min(g, lo, hi, xtol=1e-11 * max(1.0, hi - lo))
                if g(s0) < g(s_star):
                    s_star = s0
                params[i] = s_star
                arc_from = self.surface.arc(from_side)
                arc_to = self.surface.arc(SIDE_B if from_side == SIDE_A else SIDE_A)
                pa, _ = arc_from.point_many(np.array([s_star]))
                pb, _ = arc_to.point_many(np.array([s_star]))
                entries[i][1] = pa[0]
                entries[i + 1][1] = pb[0]
        return [(i, params[i]) for i in seams]

    def _crossing_record(self, entries, seam_idx: int, s: float) -> Crossing:
        arc_a = self.surface.arc_a
        arc_b = self.surface.arc_b
        pa, ang_a = arc_a.point(s)
        pb, ang_b = arc_b.point(s)
        ta = np.array([math.cos(ang_a), math.sin(ang_a)])
        tb = np.array([math.cos(ang_b), math.sin(ang_b)])
        reach = ANCHOR_FACTOR * self.h
        from_side = entries[seam_idx][0]
        anchor_from = _anchor_point(entries, seam_idx, -1, reach)
        anchor_to = _anchor_point(entries, seam_idx + 1, +1, reach)
        d_from = anchor_from - entries[seam_idx][1]
        d_to = anchor_to - entries[seam_idx + 1][1]
        if from_side == SIDE_A:
            theta_a = _geom.angle_between(ta, d_from)
            theta_b = _geom.angle_between(tb, d_to)
        else:
            theta_b = _geom.angle_between(tb, d_from)
            theta_a = _geom.angle_between(ta, d_to)
        L = self.surface.glue_length
        endpoint = s <= reach or s >= L - reach
        return Crossing(
            parameter=float(s),
            point_a=pa,
            point_b=pb,
            theta_a=float(theta_a),
            theta_b=float(theta_b),
            boundary_endpoint=bool(endpoint),
        )

    def path_from_entries(self, entries) -> GeodesicPath:
        seam_params = self.refine_path(entries)
        crossings = [self._crossing_record(entries, i, s) for i, s in seam_params]
        verts, sides = [], []
        for side, pt, _ in entries:
            if verts and sides[-1] == side and np.array_equal(pt, verts[-1]):
                continue
            verts.append(pt)
            sides.append(side)
        verts = np.vstack(verts)
        seg = _geom.norms(np.diff(verts, axis=0))
        seam_mask = np.array([sides[i] != sides[i + 1] for i in range(len(sides) - 1)])
        seg = np.where(seam_mask, 0.0, seg)
        length = float(seg.sum())
        path = GeodesicPath(
            vertices=verts,
            length=length,
            space_tag=f"glued@{self.h:g}",
            crossings=crossings,
            vertex_sides=sides,
        )
        path._cum = np.concatenate([[0.0], np.cumsum(seg)])
        return path

    # -- queries ------------------------------------------------------------
    def _check_inside(self, x_t):
        side, pt = x_t
        if int(self.classify(side, pt)[0]) == -1:
            raise PointOutside(f"point {pt} outside side {side}")

    def shortest_path(self, x_t, y_t) -> GeodesicPath:
        x_t = tag(*x_t)
        y_t = tag(*y_t)
        self._check_inside(x_t)
        self._check_inside(y_t)
        extras = [x_t, y_t]
        if x_t[0] == y_t[0] and np.array_equal(x_t[1], y_t[1]):
            return GeodesicPath(
                vertices=np.array([x_t[1]]),
                length=0.0,
                space_tag=f"glued@{self.h:g}",
                vertex_sides=[x_t[0]],
            )
        dist, pred = self.solve(extras, sources=[self.n_base])
        if not np.isfinite(dist[0, self.n_base + 1]):
            raise Disconnected("query points not connected")
        nodes = self._walk(pred[0], self.n_base, self.n_base + 1)
        mids = [i for i in nodes[1:-1] if i < self.n_base]
        for i in mids:
            panel = self.panels[self.node_side(i)]
            local = i if i < self.n_a else i - self.n_a
            if panel.clip_mask[local]:
                raise ClippedGeodesic("glued path touches a clip-box edge")
        entries = self._entries_from_nodes(nodes, extras)
        return self.path_from_entries(entries)

    def distance(self, x_t, y_t) -> float:
        x_t = tag(*x_t)
        y_t = tag(*y_t)
        ka = (x_t[0], float(x_t[1][0]), float(x_t[1][1]))
        kb = (y_t[0], float(y_t[1][0]), float(y_t[1][1]))
        if kb < ka:
            x_t, y_t = y_t, x_t
        return self.shortest_path(x_t, y_t).length

    # -- batched distances for audits ------------------------------------------
    def pairwise_distance(self, points_row, points_col=None) -> np.ndarray:
        """Refined distance matrix between two lists of tagged points.

        With points_col=None the matrix is square over points_row and
        exactly symmetric.  All points are inserted as graph nodes at once;
        single-crossing pairs are refined in a vectorized golden-section
        pass, pairs with two or more crossings by the scalar path
        refinement.
        """
        square = points_col is None
        row = [tag(*p) for p in points_row]
        col = row if square else [tag(*p) for p in points_col]
        extras = row if square else row + col
        src = [self.n_base + i for i in range(len(row))]
        dist, pred = self.solve(extras, sources=src)
        col_off = self.n_base if square else self.n_base + len(row)
        out = dist[:, col_off:].copy()
        batch = {"i": [], "j": [], "s0": [], "lo": [], "hi": [], "prev": [], "next": [], "from_a": []}
        for i in range(len(row)):
            for j in range(len(col)):
                if square and j <= i:
                    continue
                dst = col_off + j
                if not np.isfinite(out[i, j]) or out[i, j] == 0.0:
                    continue
                nodes = self._walk(pred[i], src[i], dst)
                entries = self._entries_from_nodes(nodes, extras)
                seams = self._find_seams(entries)
                if len(seams) == 1:
                    si = seams[0]
                    k = entries[si][2]
                    lo, hi = self._seam_window(k)
                    batch["i"].append(i)
                    batch["j"].append(j)
                    batch["s0"].append(self.portal_params[k])
                    batch["lo"].append(lo)
                    batch["hi"].append(hi)
                    batch["prev"].append(entries[si - 1][1])
                    batch["next"].append(entries[si + 2][1] if si + 2 < len(entries) else entries[si + 1][1])
                    batch["from_a"].append(entries[si][0] == SIDE_A)
                elif len(seams) >= 2:
                    path = self.path_from_entries(entries)
                    out[i, j] = path.length
        if batch["i"]:
            gain = self._batch_refine_single(batch)
            out[np.array(batch["i"]), np.array(batch["j"])] -= gain
        if square:
            iu = np.triu_indices(len(row), k=1)
            out[(iu[1], iu[0])] = out[iu]
        return out

    def _batch_refine_single(self, batch) -> np.ndarray:
        """Vectorized golden-section over many single-crossing pairs.
        Returns the (nonnegative) length improvements."""
        s0 = np.array(batch["s0"])
        lo = np.array(batch["lo"])
        hi = np.array(batch["hi"])
        prev = np.vstack(batch["prev"])
        nxt = np.vstack(batch["next"])
        from_a = np.array(batch["from_a"])
        arc_a = self.surface.arc_a
        arc_b = self.surface.arc_b

        def g(s):
            pa, _ = arc_a.point_many(s)
            pb, _ = arc_b.point_many(s)
            p_from = np.where(from_a[:, None], pa, pb)
            p_to = np.where(from_a[:, None], pb, pa)
            return _geom.norms(p_from - prev) + _geom.norms(p_to - nxt)

        base = g(s0)
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo.copy(), hi.copy()
        for _ in range(60):
            c = b - invphi * (b - a)
            d = a + invphi * (b - a)
            take = g(c) < g(d)
            b = np.where(take, d, b)
            a = np.where(take, a, c)
        mid = 0.5 * (a + b)
        best = np.minimum(g(mid), base)
        return np.clip(base - best, 0.0, None)


# -- public operations ----------------------------------------------------------
def glued_shortest_path(surface: GluedSurface, x_t, y_t, h: float) -> GeodesicPath:
    return surface.space(h).shortest_path(x_t, y_t)


def glued_distance(surface: GluedSurface, x_t, y_t, h: float) -> float:
    return surface.space(h).distance(x_t, y_t)


def crossing_angles(surface: GluedSurface, path: GeodesicPath):
    if not path.crossings:
        raise NoCrossings("path does not cross the glue arc")
    return list(path.crossings)


def rho_of_angles(theta_a: float, theta_b: float) -> float:
    """Distance |OE| in the unit isosceles wedge with apex angle
    theta_a + theta_b and E on the chord with AOE = theta_a."""
    if theta_a <= 0 or theta_b <= 0 or theta_a + theta_b >= math.pi:
        raise AngleDomain("need theta_a, theta_b > 0 with theta_a + theta_b < pi")
    return math.cos(0.5 * (theta_a + theta_b)) / math.cos(0.5 * (theta_a - theta_b))


def _anchor_point(entries, start: int, step: int, reach: float) -> np.ndarray:
    """Path vertex at cumulative distance >= reach from the seam, staying on
    the seam side's chart."""
    side = entries[start][0]
    pos = entries[start][1]
    acc = 0.0
    i = start
    best = None
    while 0 <= i + step < len(entries):
        nxt = entries[i + step]
        if nxt[0] != side:
            break
        acc += float(np.hypot(*(nxt[1] - entries[i][1])))
        best = nxt[1]
        i += step
        if acc >= reach:
            break
    if best is None:
        best = entries[min(max(start + step, 0), len(entries) - 1)][1]
    return np.asarray(best, dtype=float)


def geodesic_multiplicity_probe(surface: GluedSurface, x_t, y_t, h: float, slack: float):
    """All locally-optimal crossing configurations within ``slack`` of the
    best path length, deduplicated by crossing-parameter separation > 10 h.

    Covers direct same-side paths, single crossings, and two-crossing
    shortcuts through the far side; the globally shortest path is always a
    candidate.
    """
    space = surface.space(h)
    x_t = tag(*x_t)
    y_t = tag(*y_t)
    space._check_inside(x_t)
    space._check_inside(y_t)
    candidates = []
    extras = [x_t, y_t]
    dist, pred = space.solve(extras, sources=[space.n_base, space.n_base + 1])
    pp = space.portal_params

    def portal_nodes(side):
        panel = space.panels[side]
        off = 0 if side == SIDE_A else space.n_a
        return panel.portal_vertex + off

    if x_t[0] != y_t[0]:
        # single-crossing scan along the portal grid
        nx = portal_nodes(x_t[0])
        ny = portal_nodes(y_t[0])
        fx = dist[0, nx]
        fy = dist[1, ny]
        f = fx + fy
        tol_eq = 1e-12 * max(1.0, float(np.nanmax(f[np.isfinite(f)], initial=1.0)))
        for k in range(len(pp)):
            left = f[k - 1] if k > 0 else np.inf
            right = f[k + 1] if k + 1 < len(f) else np.inf
            if np.isfinite(f[k]) and f[k] <= left + tol_eq and f[k] <= right + tol_eq:
                nodes_x = space._walk(pred[0], space.n_base, nx[k])
                nodes_y = space._walk(pred[1], space.n_base + 1, ny[k])
                nodes = nodes_x + nodes_y[::-1]  # seam pair (nx[k], ny[k]) kept
                entries = space._entries_from_nodes(nodes, extras)
                candidates.append(space.path_from_entries(entries))
    else:
        direct_nodes = None
        try:
            nodes = space._walk(pred[0], space.n_base, space.n_base + 1)
            entries = space._entries_from_nodes(nodes, extras)
            candidates.append(space.path_from_entries(entries))
            direct_nodes = nodes
        except Disconnected:
            pass
        # two-crossing shortcut scan through the far side
        near = x_t[0]
        far = SIDE_B if near == SIDE_A else SIDE_A
        n_near = portal_nodes(near)
        n_far = portal_nodes(far)
        fx = dist[0, n_near]
        fy = dist[1, n_near]
        dist_far, pred_far = space.solve([], sources=n_far.tolist(), need_pred=True)
        dff = dist_far[:, n_far]
        L = fx[:, None] + dff + fy[None, :]
        np.fill_diagonal(L, np.inf)
        finite = np.isfinite(L)
        if finite.any():
            tol_eq = 1e-12 * max(1.0, float(np.nanmin(L)))
            minima = []
            for i in range(L.shape[0]):
                for j in range(L.shape[1]):
                    if not finite[i, j]:
                        continue
                    nb = [
                        L[i2, j2]
                        for i2 in (i - 1, i, i + 1)
                        for j2 in (j - 1, j, j + 1)
                        if (i2, j2) != (i, j)
                        and 0 <= i2 < L.shape[0]
                        and 0 <= j2 < L.shape[1]
                    ]
                    if L[i, j] <= min(nb) + tol_eq:
                        minima.append((L[i, j], i, j))
            minima.sort()
            for _, i, j in minima[:12]:
                nodes_x = space._walk(pred[0], space.n_base, n_near[i])
                nodes_mid = space._walk(pred_far[i], n_far[i], n_far[j])
                nodes_y = space._walk(pred[1], space.n_base + 1, n_near[j])
                nodes = nodes_x + nodes_mid + nodes_y[::-1]
                dedup = [nodes[0]]
                for nid in nodes[1:]:
                    if nid != dedup[-1]:
                        dedup.append(nid)
                entries = space._entries_from_nodes(dedup, extras)
                candidates.append(space.path_from_entries(entries))
    if not candidates:
        raise Disconnected("no candidate paths")
    candidates.sort(key=lambda p: p.length)
    best = candidates[0].length
    sep = ANCHOR_FACTOR * h
    kept = []
    for cand in candidates:
        if cand.length > best + slack:
            continue
        sig = np.array(sorted(c.parameter for c in cand.crossings))
        dup = False
        for other in kept:
            osig = np.array(sorted(c.parameter for c in other.crossings))
            if len(sig) == len(osig) and (
                len(sig) == 0 or np.all(np.abs(sig - osig) <= sep)
            ):
                dup = True
                break
        if not dup:
            kept.append(cand)
    return kept
