"""Builders for the standard glued-surface configurations.

Each builder returns a dict with the two side domains, their glue arcs,
the shared-interval length, and sampling hints used by scenario checks.
Side B's arc always runs against its loop orientation so the gluing is
orientation-compatible (the flat case then unfolds to the plane).
"""

from __future__ import annotations

import math

import numpy as np

from .curves import CurvatureProfile, build_from_curvature_profile, circular_arc, straight_segment
from .domains import Domain, GlueArc, make_domain


def _rect_loop(x0, y0, x1, y1, clip=(True, True, True, True)):
    """CCW rectangle [x0,x1] x [y0,y1]; clip flags per edge starting at the
    bottom edge."""
    return [
        straight_segment((x0, y0), (x1, y0), clip=clip[0]),
        straight_segment((x1, y0), (x1, y1), clip=clip[1]),
        straight_segment((x1, y1), (x0, y1), clip=clip[2]),
        straight_segment((x0, y1), (x0, y0), clip=clip[3]),
    ]


def half_plane_pair(h: float = 1e-3, extent: float = 2.0, depth: float = 2.0) -> dict:
    """Two half-planes (clipped to boxes) glued along their full straight
    edges; the glued surface is isometric to a strip of the plane."""
    e, d = extent, depth
    side_a = make_domain(
        [[
            straight_segment((-e, 0), (e, 0)),
            straight_segment((e, 0), (e, d), clip=True),
            straight_segment((e, d), (-e, d), clip=True),
            straight_segment((-e, d), (-e, 0), clip=True),
        ]],
        h,
    )
    side_b = make_domain(
        [[
            straight_segment((-e, -d), (e, -d), clip=True),
            straight_segment((e, -d), (e, 0), clip=True),
            straight_segment((e, 0), (-e, 0)),
            straight_segment((-e, 0), (-e, -d), clip=True),
        ]],
        h,
    )
    L = 2 * e
    arc_a = GlueArc(side_a, 0, 0.0, L)
    # top edge of side B runs from (e,0) to (-e,0); reverse to match sigma_A
    off = 2 * e + d  # loop params: bottom, right, then the glue edge
    arc_b = GlueArc(side_b, 0, off + L, off)
    return {
        "side_a": side_a,
        "side_b": side_b,
        "arc_a": arc_a,
        "arc_b": arc_b,
        "glue_length": L,
        "window": (0.0, L),
        "unfold": lambda side, p: np.asarray(p, dtype=float),
        "sample_box": {"A": (-e + 0.3, 0.0, e - 0.3, d - 0.3), "B": (-e + 0.3, -d + 0.3, e - 0.3, 0.0)},
    }


def two_disks(h: float = 1e-3, radius: float = 1.0, arc_length: float = 1.6) -> dict:
    """Two copies of a disk glued along boundary arcs of equal length.

    Both circles start at angle -arc_length/(2R) so the glue midpoint w
    sits at (R, 0) in either chart and the charts are related by the
    mirror map (x, y) -> (x, -y).
    """
    R = radius
    frac = arc_length / R
    theta0 = -0.5 * frac
    disk_a = make_domain([[circular_arc((0, 0), R, theta0, theta0)]], h)
    disk_b = make_domain([[circular_arc((0, 0), R, theta0, theta0)]], h)
    arc_a = GlueArc(disk_a, 0, 0.0, arc_length)
    arc_b = GlueArc(disk_b, 0, arc_length, 0.0)
    return {
        "side_a": disk_a,
        "side_b": disk_b,
        "arc_a": arc_a,
        "arc_b": arc_b,
        "glue_length": arc_length,
        "window": (0.0, arc_length),
        "radius": R,
        "center": np.zeros(2),
        "mirror": lambda p: np.array([p[0], -p[1]]),
        "sample_box": {
            "A": (0.2, -0.6, 0.95, 0.6),
            "B": (0.2, -0.6, 0.95, 0.6),
        },
    }


def _bite_channel(bite_curve, h: float, pad: float = 1.5, height: float = 2.0):
    """Channel above the x-axis with a concave bite; the bite curve must
    start on the x-axis with tangent (0,1) and end on it with tangent
    (0,-1)."""
    sx = bite_curve.start[0]
    ex = bite_curve.end[0]
    loop = [
        straight_segment((sx - pad, 0), (sx, 0)),
        bite_curve,
        straight_segment((ex, 0), (ex + pad, 0)),
        straight_segment((ex + pad, 0), (ex + pad, height)),
        straight_segment((ex + pad, height), (sx - pad, height)),
        straight_segment((sx - pad, height), (sx - pad, 0)),
    ]
    dom = make_domain([loop], h)
    bite_offset = pad  # loop param where the bite starts
    return dom, bite_offset


def _segment_region(radius: float, arc_len: float, h: float) -> Domain:
    """Circular segment (lens) bounded by an arc of the given radius and
    its chord; interior inside the circle."""
    theta = arc_len / radius
    a0, a1 = -0.5 * theta, 0.5 * theta
    arc = circular_arc((0, 0), radius, a0, a1, orientation=+1)
    p_top = radius * np.array([math.cos(a1), math.sin(a1)])
    p_bot = radius * np.array([math.cos(a0), math.sin(a0)])
    chord = straight_segment(p_top, p_bot)
    return make_domain([[arc, chord]], h)


def concave_convex(h: float = 1e-3, kappa_a: float = -1.0, kappa_b: float = 0.5, margin: float = 0.3) -> dict:
    """Concave bite (curvature kappa_a < 0) glued to a convex lens
    (curvature kappa_b > 0) along a window of the bite arc."""
    Ra = 1.0 / abs(kappa_a)
    bite = circular_arc((0, 0), Ra, math.pi, 0.0, orientation=-1)
    side_a, off = _bite_channel(bite, h, pad=1.5, height=1.8)
    bite_len = math.pi * Ra
    J = bite_len - 2 * margin
    arc_a = GlueArc(side_a, 0, off + margin, off + margin + J)
    Rb = 1.0 / kappa_b
    side_b = _segment_region(Rb, J, h)
    arc_b = GlueArc(side_b, 0, J, 0.0)
    lens_mid_x = Rb * math.cos(0.5 * J / Rb)
    return {
        "side_a": side_a,
        "side_b": side_b,
        "arc_a": arc_a,
        "arc_b": arc_b,
        "glue_length": J,
        "window": (0.0, J),
        "sample_box": {
            "A": (-1.1, 0.0, 1.1, 1.6),
            "B": (lens_mid_x, -1.0, Rb, 1.0),
        },
    }


def bite_shortcut(h: float = 2e-3, kappa_b: float = 0.9) -> dict:
    """Concave bite glued to a strongly convex far side: for points near the
    bite flanks the shortest path tunnels through the far side (the lens
    chord undercuts the bite arc), giving exactly two crossings."""
    cfg = concave_convex(h=h, kappa_b=kappa_b)
    cfg["x"] = ("A", np.array([-1.25, 0.1]))
    cfg["y"] = ("A", np.array([1.25, 0.1]))
    return cfg


def equality_point(h: float = 1e-3, base: float = 0.5, length: float = 2.8, margin: float = 0.3) -> dict:
    """Concave side whose curvature meets -kappa_b exactly once, at the
    window center: kappa_a(s) = -(base + c (s - L/2)^2) with total turning
    -pi so the bite closes with vertical tangents."""
    L = length
    c = (math.pi - base * L) * 12.0 / L**3
    s = np.linspace(0.0, L, 2801)
    kap = -(base + c * (s - 0.5 * L) ** 2)
    prof = CurvatureProfile.tabulated(s, kap)
    bite = build_from_curvature_profile(prof, (0.0, 0.0), (0.0, 1.0), tol=1e-9)
    side_a, off = _bite_channel(bite, h, pad=1.5, height=2.2)
    J = L - 2 * margin
    arc_a = GlueArc(side_a, 0, off + margin, off + margin + J)
    Rb = 1.0 / base
    side_b = _segment_region(Rb, J, h)
    arc_b = GlueArc(side_b, 0, J, 0.0)
    lens_mid_x = Rb * math.cos(0.5 * J / Rb)
    return {
        "side_a": side_a,
        "side_b": side_b,
        "arc_a": arc_a,
        "arc_b": arc_b,
        "glue_length": J,
        "window": (0.0, J),
        "equality_parameter": 0.5 * J,
        "sample_box": {
            "A": (bite.start[0] - 0.9, 0.0, bite.end[0] + 0.9, 1.8),
            "B": (lens_mid_x, -1.2, Rb, 1.2),
        },
    }
