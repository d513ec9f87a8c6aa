"""Low-level vectorized planar primitives.

All batched routines accept numpy arrays of shape (K, 2) for points and
(M, 2) pairs for segment endpoints and are chunked so intermediate
(K, M) arrays stay below a fixed memory budget.
"""

from __future__ import annotations

import numpy as np

# Upper bound on elements of a single (chunk, M) intermediate array.
_CHUNK_BUDGET = 2_000_000


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(2)
    return a


def rot90(v: np.ndarray) -> np.ndarray:
    """Rotate vectors by +90 degrees (left normal of a tangent)."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def norms(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.hypot(v[..., 0], v[..., 1])


def polyline_length(pts: np.ndarray) -> float:
    pts = np.asarray(pts, dtype=float)
    if len(pts) < 2:
        return 0.0
    return float(norms(np.diff(pts, axis=0)).sum())


def angle_between(u, v) -> float:
    """Unsigned angle in [0, pi] between two nonzero planar vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    cross = u[0] * v[1] - u[1] * v[0]
    dot = u[0] * v[0] + u[1] * v[1]
    return float(np.arctan2(abs(cross), dot))


def _chunks(n: int, m: int):
    step = max(1, _CHUNK_BUDGET // max(1, m))
    for lo in range(0, n, step):
        yield lo, min(n, lo + step)


def seg_point_dist(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest of the given segments.

    points: (K, 2); seg_a, seg_b: (M, 2).  Returns (K,).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    seg_a = np.atleast_2d(np.asarray(seg_a, dtype=float))
    seg_b = np.atleast_2d(np.asarray(seg_b, dtype=float))
    d = seg_b - seg_a  # (M,2)
    dd = np.einsum("ij,ij->i", d, d)  # (M,)
    dd_safe = np.where(dd == 0.0, 1.0, dd)
    out = np.empty(len(points))
    for lo, hi in _chunks(len(points), len(seg_a)):
        p = points[lo:hi]
        w = p[:, None, :] - seg_a[None, :, :]  # (k,M,2)
        t = np.einsum("kmj,mj->km", w, d) / dd_safe[None, :]
        t = np.clip(t, 0.0, 1.0)
        proj = seg_a[None, :, :] + t[:, :, None] * d[None, :, :]
        diff = p[:, None, :] - proj
        dist2 = np.einsum("kmj,kmj->km", diff, diff)
        out[lo:hi] = np.sqrt(dist2.min(axis=1))
    return out


def crossing_parity(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """Even-odd crossing parity of a +x ray from each point, as bool (K,).

    Edges are treated half-open in y so a ray through a shared vertex is
    counted once.  Only trustworthy for points farther from the polyline
    than the classification band; callers mask near-boundary points first.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    seg_a = np.atleast_2d(np.asarray(seg_a, dtype=float))
    seg_b = np.atleast_2d(np.asarray(seg_b, dtype=float))
    ax, ay = seg_a[:, 0], seg_a[:, 1]
    bx, by = seg_b[:, 0], seg_b[:, 1]
    dy = by - ay
    dy_safe = np.where(dy == 0.0, 1.0, dy)
    out = np.zeros(len(points), dtype=bool)
    for lo, hi in _chunks(len(points), len(seg_a)):
        px = points[lo:hi, 0][:, None]
        py = points[lo:hi, 1][:, None]
        straddle = (ay[None, :] > py) != (by[None, :] > py)
        t = (py - ay[None, :]) / dy_safe[None, :]
        x_at = ax[None, :] + t * (bx - ax)[None, :]
        hits = straddle & (x_at > px)
        out[lo:hi] = (hits.sum(axis=1) % 2).astype(bool)
    return out


def properly_crosses_any(p: np.ndarray, q: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """For each candidate segment (p_i, q_i), whether it properly crosses
    any of the boundary segments (a_j, b_j).

    Proper crossing means the two open segments intersect transversally;
    contact at endpoints or collinear overlap does not count.  Returns
    bool (K,).
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    seg_a = np.atleast_2d(np.asarray(seg_a, dtype=float))
    seg_b = np.atleast_2d(np.asarray(seg_b, dtype=float))
    out = np.zeros(len(p), dtype=bool)
    if len(seg_a) == 0:
        return out
    for lo, hi in _chunks(len(p), len(seg_a)):
        pc = p[lo:hi][:, None, :]  # (k,1,2)
        qc = q[lo:hi][:, None, :]
        a = seg_a[None, :, :]  # (1,M,2)
        b = seg_b[None, :, :]
        r = qc - pc
        s = b - a
        w = a - pc
        d1 = r[..., 0] * w[..., 1] - r[..., 1] * w[..., 0]
        w2 = b - pc
        d2 = r[..., 0] * w2[..., 1] - r[..., 1] * w2[..., 0]
        v = pc - a
        d3 = s[..., 0] * v[..., 1] - s[..., 1] * v[..., 0]
        v2 = qc - a
        d4 = s[..., 0] * v2[..., 1] - s[..., 1] * v2[..., 0]
        cross = (d1 * d2 < 0.0) & (d3 * d4 < 0.0)
        out[lo:hi] = cross.any(axis=1)
    return out


def crossing_params(p, q, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """Sorted parameters t in (0,1) where segment p->q properly crosses any
    of the given segments.  Single candidate, vectorized over segments."""
    p = np.asarray(p, dtype=float).reshape(2)
    q = np.asarray(q, dtype=float).reshape(2)
    a = np.atleast_2d(seg_a)
    b = np.atleast_2d(seg_b)
    r = q - p
    s = b - a
    denom = r[0] * s[:, 1] - r[1] * s[:, 0]
    mask = denom != 0.0
    w = a - p
    t = np.where(mask, (w[:, 0] * s[:, 1] - w[:, 1] * s[:, 0]) / np.where(mask, denom, 1.0), -1.0)
    u = np.where(mask, (w[:, 0] * r[1] - w[:, 1] * r[0]) / np.where(mask, denom, 1.0), -1.0)
    hit = mask & (t > 0.0) & (t < 1.0) & (u > 0.0) & (u < 1.0)
    return np.sort(t[hit])


def brent_min(f, lo: float, hi: float, xtol: float = 1e-10, max_iter: int = 200):
    """Golden-section minimization of a scalar function on [lo, hi].

    Returns (x*, f(x*)).  Deterministic and derivative-free; adequate for
    the locally convex length functions refined here.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while (b - a) > xtol and it < max_iter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        it += 1
    if fc < fd:
        return c, fc
    return d, fd
