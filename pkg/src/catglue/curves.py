"""Arc-length-parametrized planar curves reconstructed from signed curvature.

A curve is specified by a curvature profile kappa(s) on a closed interval,
a start point and a start tangent.  The tangent angle follows the planar
Frenet relation theta(s) = theta0 + integral of kappa, and positions are
recovered by integrating (cos theta, sin theta).  Constant-curvature pieces
use the exact circular-arc closed form; general profiles are integrated on
a dense node grid with Gauss-Legendre quadrature and evaluated in between
with cubic Hermite interpolation (the node tangents are exact).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import NonFiniteCurvature, ParameterOutOfRange, ToleranceTooCoarse

DEFAULT_QUAD_TOL = 1e-9  # absolute tolerance of curve-internal integrals

_GL_X, _GL_W = np.polynomial.legendre.leggauss(7)

INTERIOR_LEFT = "interior-left"
INTERIOR_RIGHT = "interior-right"


class CurvatureProfile:
    """Signed-curvature function on a closed arc-length interval.

    Supported analytic forms: constant, piecewise-constant, and tabulated
    with monotone cubic (PCHIP) interpolation.  The turning integral is
    exact for the first two forms and is the exact integral of the
    interpolant for tabulated data.
    """

    def __init__(self, kind, s_lo, s_hi, data):
        if not (np.isfinite(s_lo) and np.isfinite(s_hi) and s_hi > s_lo):
            raise ParameterOutOfRange(f"bad profile interval [{s_lo}, {s_hi}]")
        self.kind = kind
        self.s_lo = float(s_lo)
        self.s_hi = float(s_hi)
        self._data = data
        probe = self.kappa_many(np.linspace(self.s_lo, self.s_hi, 257))
        if not np.all(np.isfinite(probe)):
            raise NonFiniteCurvature("kappa evaluates non-finite on the profile interval")

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, kappa: float, interval) -> "CurvatureProfile":
        return cls("constant", interval[0], interval[1], float(kappa))

    @classmethod
    def piecewise_constant(cls, breakpoints, values) -> "CurvatureProfile":
        bp = np.asarray(breakpoints, dtype=float)
        vals = np.asarray(values, dtype=float)
        if len(bp) != len(vals) + 1 or np.any(np.diff(bp) <= 0):
            raise ParameterOutOfRange("piecewise profile needs increasing breakpoints, one value per piece")
        return cls("piecewise", bp[0], bp[-1], (bp, vals))

    @classmethod
    def tabulated(cls, s_values, kappa_values) -> "CurvatureProfile":
        s = np.asarray(s_values, dtype=float)
        k = np.asarray(kappa_values, dtype=float)
        if len(s) < 2 or np.any(np.diff(s) <= 0):
            raise ParameterOutOfRange("tabulated profile needs strictly increasing parameters")
        if not np.all(np.isfinite(k)):
            raise NonFiniteCurvature("tabulated kappa contains non-finite values")
        interp = PchipInterpolator(s, k)
        return cls("tabulated", s[0], s[-1], (interp, interp.antiderivative()))

    # -- queries ----------------------------------------------------------
    @property
    def interval(self):
        return (self.s_lo, self.s_hi)

    @property
    def length(self) -> float:
        return self.s_hi - self.s_lo

    def kappa_many(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind == "constant":
            return np.full(s.shape, self._data)
        if self.kind == "piecewise":
            bp, vals = self._data
            idx = np.clip(np.searchsorted(bp, s, side="right") - 1, 0, len(vals) - 1)
            return vals[idx]
        interp, _ = self._data
        return interp(s)

    def kappa(self, s: float) -> float:
        return float(self.kappa_many(np.array([s]))[0])

    def turning(self, s0: float, s1: float) -> float:
        """Integral of kappa over [s0, s1]."""
        if self.kind == "constant":
            return self._data * (s1 - s0)
        if self.kind == "piecewise":
            bp, vals = self._data
            lo = np.maximum(bp[:-1], s0)
            hi = np.minimum(bp[1:], s1)
            return float(np.sum(vals * np.clip(hi - lo, 0.0, None)))
        _, anti = self._data
        return float(anti(s1) - anti(s0))

    def turning_from(self, s0, s1) -> np.ndarray:
        """Vectorized turning(s0_i, s1_i) for tabulated profiles."""
        s0 = np.asarray(s0, dtype=float)
        s1 = np.asarray(s1, dtype=float)
        if self.kind == "constant":
            return self._data * (s1 - s0)
        if self.kind == "tabulated":
            _, anti = self._data
            return anti(s1) - anti(s0)
        return np.array([self.turning(a, b) for a, b in zip(np.ravel(s0), np.ravel(s1))])

    def max_abs_kappa(self) -> float:
        if self.kind == "constant":
            return abs(self._data)
        if self.kind == "piecewise":
            return float(np.max(np.abs(self._data[1])))
        grid = np.linspace(self.s_lo, self.s_hi, 1025)
        return float(np.max(np.abs(self.kappa_many(grid))))

    def piece_breaks(self) -> np.ndarray:
        if self.kind == "piecewise":
            return self._data[0]
        return np.array([self.s_lo, self.s_hi])


class BoundaryCurve:
    """Planar curve reconstructed from a curvature profile.

    Immutable after construction; evaluation is vectorized and safe for
    concurrent readers.  ``clip`` marks curves that exist only to bound an
    otherwise unbounded domain; geodesics touching them are flagged.
    """

    def __init__(self, profile: CurvatureProfile, start, start_tangent, tol: float = 1e-9, clip: bool = False):
        if tol <= 0:
            raise ParameterOutOfRange("tol must be positive")
        max_k = profile.max_abs_kappa()
        if max_k > 0 and tol > 0.1 / max_k:
            raise ToleranceTooCoarse(
                f"tol {tol} exceeds a tenth of the minimum curvature radius {1.0 / max_k}"
            )
        self.profile = profile
        self.start = np.asarray(start, dtype=float).reshape(2)
        t = np.asarray(start_tangent, dtype=float).reshape(2)
        n = math.hypot(t[0], t[1])
        if n == 0:
            raise ParameterOutOfRange("start tangent must be nonzero")
        self.start_angle = math.atan2(t[1], t[0])
        self.tol = float(tol)
        self.clip = bool(clip)
        self._build_segments()
        end_pt, _ = self.evaluate(profile.s_hi)
        self.end = np.asarray(end_pt)

    # -- construction ------------------------------------------------------
    def _build_segments(self):
        prof = self.profile
        segs = []
        pt = self.start.copy()
        ang = self.start_angle
        if prof.kind in ("constant", "piecewise"):
            breaks = prof.piece_breaks()
            for a, b in zip(breaks[:-1], breaks[1:]):
                k = prof.kappa(0.5 * (a + b))
                segs.append(("const", a, b, pt.copy(), ang, k))
                ang2 = ang + k * (b - a)
                pt = pt + _const_disp(ang, k, b - a)
                ang = ang2
        else:
            a, b = prof.s_lo, prof.s_hi
            step = min(0.01, (b - a) / 16.0, 0.5 / (1.0 + prof.max_abs_kappa()))
            n = max(16, int(math.ceil((b - a) / step)))
            nodes = np.linspace(a, b, n + 1)
            angles = self.start_angle + prof.turning_from(np.full(n + 1, a), nodes)
            half = 0.5 * (b - a) / n
            mids = 0.5 * (nodes[:-1] + nodes[1:])
            sq = mids[:, None] + half * _GL_X[None, :]  # (n, 7)
            th = self.start_angle + prof.turning_from(np.full(sq.shape, a), sq)
            dx = (np.cos(th) @ _GL_W) * half
            dy = (np.sin(th) @ _GL_W) * half
            pts = np.empty((n + 1, 2))
            pts[0] = pt
            pts[1:, 0] = pt[0] + np.cumsum(dx)
            pts[1:, 1] = pt[1] + np.cumsum(dy)
            segs.append(("nodes", a, b, nodes, pts, angles))
        self._segments = segs

    # -- evaluation ----------------------------------------------------------
    @property
    def interval(self):
        return self.profile.interval

    @property
    def length(self) -> float:
        return self.profile.length

    def _check_params(self, s: np.ndarray):
        eps = 1e-9 * max(1.0, self.length)
        if np.any(s < self.profile.s_lo - eps) or np.any(s > self.profile.s_hi + eps):
            raise ParameterOutOfRange(
                f"parameter outside [{self.profile.s_lo}, {self.profile.s_hi}]"
            )

    def evaluate_many(self, s):
        """Points and tangent angles at the given arc-length parameters."""
        s = np.asarray(s, dtype=float).ravel()
        self._check_params(s)
        s = np.clip(s, self.profile.s_lo, self.profile.s_hi)
        pts = np.empty((len(s), 2))
        angs = np.empty(len(s))
        for seg in self._segments:
            if seg[0] == "const":
                _, a, b, p0, ang0, k = seg
                mask = (s >= a) & (s <= b) if b == self.profile.s_hi else (s >= a) & (s < b)
                if not mask.any():
                    continue
                ds = s[mask] - a
                th = ang0 + k * ds
                angs[mask] = th
                if k == 0.0:
                    pts[mask] = p0 + ds[:, None] * np.array([math.cos(ang0), math.sin(ang0)])
                else:
                    pts[mask, 0] = p0[0] + (np.sin(th) - math.sin(ang0)) / k
                    pts[mask, 1] = p0[1] + (math.cos(ang0) - np.cos(th)) / k
            else:
                _, a, b, nodes, npts, nangs = seg
                mask = (s >= a) & (s <= b)
                if not mask.any():
                    continue
                sv = s[mask]
                idx = np.clip(np.searchsorted(nodes, sv, side="right") - 1, 0, len(nodes) - 2)
                d = nodes[idx + 1] - nodes[idx]
                t = (sv - nodes[idx]) / d
                th = nangs[idx] + self.profile.turning_from(nodes[idx], sv)
                angs[mask] = th
                h00 = 2 * t**3 - 3 * t**2 + 1
                h10 = t**3 - 2 * t**2 + t
                h01 = -2 * t**3 + 3 * t**2
                h11 = t**3 - t**2
                m0 = np.stack([np.cos(nangs[idx]), np.sin(nangs[idx])], axis=1)
                m1 = np.stack([np.cos(nangs[idx + 1]), np.sin(nangs[idx + 1])], axis=1)
                pts[mask] = (
                    h00[:, None] * npts[idx]
                    + h10[:, None] * d[:, None] * m0
                    + h01[:, None] * npts[idx + 1]
                    + h11[:, None] * d[:, None] * m1
                )
        return pts, angs

    def evaluate(self, s: float):
        """Point and unit tangent at arc length s."""
        pts, angs = self.evaluate_many(np.array([float(s)]))
        ang = angs[0]
        return pts[0], np.array([math.cos(ang), math.sin(ang)])

    def tangent_angle(self, s: float) -> float:
        _, angs = self.evaluate_many(np.array([float(s)]))
        return float(angs[0])

    # -- curvature ------------------------------------------------------------
    def signed_curvature(self, s: float, side: str = INTERIOR_LEFT) -> float:
        """Curvature with respect to the normal pointing into the declared
        interior; flipping the interior side negates the sign exactly."""
        if not (self.profile.s_lo - 1e-12 <= s <= self.profile.s_hi + 1e-12):
            raise ParameterOutOfRange(f"s={s} outside profile interval")
        k = self.profile.kappa(s)
        if side == INTERIOR_LEFT:
            return k
        if side == INTERIOR_RIGHT:
            return -k
        raise ParameterOutOfRange(f"unknown side {side!r}")

    def turning_angle(self, s0: float, s1: float) -> float:
        """Integral of kappa over [s0, s1]; additive over subintervals."""
        if s0 > s1:
            raise ParameterOutOfRange("turning_angle expects s0 <= s1")
        eps = 1e-9 * max(1.0, self.length)
        if s0 < self.profile.s_lo - eps or s1 > self.profile.s_hi + eps:
            raise ParameterOutOfRange("turning interval outside profile domain")
        return self.profile.turning(s0, s1)

    # -- discretization ---------------------------------------------------------
    def polyline_params(self, tol: float) -> np.ndarray:
        """Arc-length parameters of a polyline within Hausdorff tol of the curve.

        The sample step follows the chord-sagitta bound sqrt(8 tol / kappa),
        so halving tol never increases the Hausdorff error.
        """
        if tol <= 0:
            raise ParameterOutOfRange("tol must be positive")
        max_k = self.profile.max_abs_kappa()
        if max_k > 0 and tol > 0.1 / max_k:
            raise ToleranceTooCoarse(
                f"tol {tol} exceeds a tenth of the minimum curvature radius {1.0 / max_k}"
            )
        L = self.length
        if max_k == 0.0:
            n = 1
        else:
            step = math.sqrt(8.0 * tol / max_k)
            n = max(1, int(math.ceil(L / step)))
        return np.linspace(self.profile.s_lo, self.profile.s_hi, n + 1)

    def polyline(self, tol: float) -> np.ndarray:
        pts, _ = self.evaluate_many(self.polyline_params(tol))
        return pts


def _const_disp(ang0: float, k: float, ds: float) -> np.ndarray:
    if k == 0.0:
        return ds * np.array([math.cos(ang0), math.sin(ang0)])
    th = ang0 + k * ds
    return np.array([(math.sin(th) - math.sin(ang0)) / k, (math.cos(ang0) - math.cos(th)) / k])


def build_from_curvature_profile(profile: CurvatureProfile, initial_point, initial_tangent, tol: float = 1e-9, clip: bool = False) -> BoundaryCurve:
    """Reconstruct the unique curve with the given curvature profile."""
    return BoundaryCurve(profile, initial_point, initial_tangent, tol=tol, clip=clip)


# -- convenience constructors used by scenarios and tests ---------------------
def straight_segment(p0, p1, clip: bool = False) -> BoundaryCurve:
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    L = float(np.hypot(*(p1 - p0)))
    if L == 0:
        raise ParameterOutOfRange("degenerate segment")
    prof = CurvatureProfile.constant(0.0, (0.0, L))
    return BoundaryCurve(prof, p0, (p1 - p0) / L, tol=1e-9, clip=clip)


def circular_arc(center, radius: float, angle_from: float, angle_to: float, orientation: int = +1, clip: bool = False) -> BoundaryCurve:
    """Arc of a circle traversed CCW (orientation +1) or CW (-1).

    angle_from/angle_to are position angles at the center; the traversal
    goes from angle_from to angle_to in the given orientation.
    """
    if radius <= 0:
        raise ParameterOutOfRange("radius must be positive")
    sweep = (angle_to - angle_from) * orientation
    if sweep <= 0:
        sweep += 2.0 * math.pi
    L = radius * sweep
    kappa = orientation / radius
    prof = CurvatureProfile.constant(kappa, (0.0, L))
    c = np.asarray(center, dtype=float)
    p0 = c + radius * np.array([math.cos(angle_from), math.sin(angle_from)])
    t0 = orientation * np.array([-math.sin(angle_from), math.cos(angle_from)])
    return BoundaryCurve(prof, p0, t0, tol=1e-9, clip=clip)
