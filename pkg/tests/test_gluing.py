import math

import numpy as np
import pytest

from catglue import shapes
from catglue.domains import GlueArc
from catglue.errors import AngleDomain, ConditionsViolated, NoCrossings
from catglue.gluing import (
    SIDE_A,
    SIDE_B,
    crossing_angles,
    geodesic_multiplicity_probe,
    glue,
    glued_distance,
    glued_shortest_path,
    rho_of_angles,
    tag,
)


def flat_surface(h=1e-3, portals=65):
    cfg = shapes.half_plane_pair(h=h)
    return glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], portals=portals, enforce=True), cfg


def disks_surface(h=1e-3, portals=65, radius=1.0, arc_length=1.6):
    cfg = shapes.two_disks(h=h, radius=radius, arc_length=arc_length)
    return (
        glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], portals=portals, enforce=False),
        cfg,
    )


def cc_surface(h=1e-3, portals=0):
    cfg = shapes.concave_convex(h=h)
    portals = portals or 65
    return glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], portals=portals, enforce=True), cfg


class TestGlue:
    def test_flat_accepted_and_flagged(self):
        surf, _ = flat_surface()
        rep = surf.condition_report
        assert rep.k1_holds and rep.k2_holds
        assert not rep.k3_holds and rep.flat_edge_case
        assert rep.epsilon_margin == pytest.approx(0.0, abs=1e-12)

    def test_concave_convex_passes(self):
        surf, _ = cc_surface()
        assert surf.condition_report.all_pass

    def test_two_disks_enforced_rejected(self):
        cfg = shapes.two_disks()
        with pytest.raises(ConditionsViolated):
            glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], enforce=True)

    def test_portal_grid_includes_endpoints(self):
        surf, cfg = flat_surface()
        assert surf.portal_parameters[0] == 0.0
        assert surf.portal_parameters[-1] == pytest.approx(cfg["glue_length"])


class TestFlatPaths:
    def test_vertical_crossing(self):
        surf, _ = flat_surface()
        p = glued_shortest_path(surf, ("A", (0, 1)), ("B", (0, -1)), 1e-3)
        assert p.length == pytest.approx(2.0, abs=1e-9)
        assert len(p.crossings) == 1
        c = p.crossings[0]
        assert c.parameter == pytest.approx(2.0, abs=1e-6)  # foot of (0,*) on J
        assert c.theta_a == pytest.approx(math.pi / 2, abs=1e-6)
        assert c.theta_b == pytest.approx(math.pi / 2, abs=1e-6)

    def test_unfolded_isometry_sampled(self):
        surf, cfg = flat_surface()
        rng = np.random.default_rng(42)
        for _ in range(25):
            xa = rng.uniform(-1.7, 1.7), rng.uniform(0.05, 1.7)
            yb = rng.uniform(-1.7, 1.7), rng.uniform(-1.7, -0.05)
            d = glued_distance(surf, ("A", xa), ("B", yb), 1e-3)
            assert d == pytest.approx(np.hypot(xa[0] - yb[0], xa[1] - yb[1]), abs=1e-9)

    def test_crossing_angle_law_flat(self):
        surf, _ = flat_surface()
        p = glued_shortest_path(surf, ("A", (-1.0, 0.8)), ("B", (1.2, -0.5)), 1e-3)
        cs = crossing_angles(surf, p)
        assert len(cs) == 1
        assert cs[0].theta_a + cs[0].theta_b == pytest.approx(math.pi, abs=1e-6)

    def test_same_side_straight(self):
        surf, _ = flat_surface()
        p = glued_shortest_path(surf, ("A", (-1, 1)), ("A", (1, 1)), 1e-3)
        assert p.length == pytest.approx(2.0, abs=1e-9)
        assert len(p.crossings) == 0

    def test_no_crossings_error(self):
        surf, _ = flat_surface()
        p = glued_shortest_path(surf, ("A", (-1, 1)), ("A", (1, 1)), 1e-3)
        with pytest.raises(NoCrossings):
            crossing_angles(surf, p)


class TestTwoDisks:
    def test_center_to_center_length_two(self):
        surf, cfg = disks_surface()
        d = glued_distance(surf, ("A", (0, 0)), ("B", (0, 0)), 1e-3)
        assert d == pytest.approx(2.0, abs=1e-9)

    def test_every_portal_gives_length_two(self):
        surf, cfg = disks_surface()
        space = surf.space(1e-3)
        s = space.portal_params
        pa, _ = cfg["arc_a"].point_many(s)
        pb, _ = cfg["arc_b"].point_many(s)
        f = np.hypot(pa[:, 0], pa[:, 1]) + np.hypot(pb[:, 0], pb[:, 1])
        np.testing.assert_allclose(f, 2.0, atol=1e-12)

    def test_multiplicity_probe_centers(self):
        surf, _ = disks_surface()
        paths = geodesic_multiplicity_probe(surf, ("A", (0, 0)), ("B", (0, 0)), 1e-3, slack=1e-9)
        assert len(paths) >= 3
        for p in paths:
            assert p.length == pytest.approx(2.0, abs=1e-9)

    def test_radii_cross_orthogonally(self):
        surf, _ = disks_surface()
        p = glued_shortest_path(surf, ("A", (0, 0)), ("B", (0, 0)), 1e-3)
        c = p.crossings[0]
        assert c.theta_a == pytest.approx(math.pi / 2, abs=1e-5)
        assert c.theta_b == pytest.approx(math.pi / 2, abs=1e-5)


def paper_counterexample_points(cfg, delta=0.5):
    """The isosceles construction with two equal-length broken geodesics."""
    L = cfg["glue_length"]
    eps = 4 * math.sin(delta / 2) - 2 * math.sin(delta)
    w1_angle = -delta  # sigma_A(L/2 - delta)
    w2_angle = +delta
    r = 1.0 - eps / 4.0
    x_a = r * np.array([math.cos(w1_angle), math.sin(w1_angle)])
    y_a = r * np.array([math.cos(w2_angle), math.sin(w2_angle)])
    y_b = cfg["mirror"](y_a)
    return x_a, y_a, y_b, eps


def brute_force_f_minima(cfg, x_a, y_a, n=40001):
    """Dense grid minimization of f(z) = |x-z| + |z-y| over the glue arc."""
    L = cfg["glue_length"]
    s = np.linspace(0, L, n)
    pa, _ = cfg["arc_a"].point_many(s)
    f = np.hypot(*(pa - x_a).T) + np.hypot(*(pa - y_a).T)
    idx = np.nonzero((f <= np.roll(f, 1)) & (f <= np.roll(f, -1)))[0]
    idx = idx[(idx > 0) & (idx < n - 1)]
    return s[idx], f[idx]


class TestPaperExample:
    def test_f_has_two_symmetric_minima(self):
        _, cfg = disks_surface()
        x_a, y_a, _, eps = paper_counterexample_points(cfg)
        L = cfg["glue_length"]
        w = L / 2
        s_min, f_min = brute_force_f_minima(cfg, x_a, y_a)
        assert len(s_min) == 2
        assert (s_min[0] + s_min[1]) / 2 == pytest.approx(w, abs=1e-3)
        # the center is strictly worse than the minima
        pa, _ = cfg["arc_a"].point_many(np.array([w]))
        f_w = np.hypot(*(pa[0] - x_a)) + np.hypot(*(pa[0] - y_a))
        assert np.all(f_min < f_w)

    def test_probe_finds_exactly_two(self):
        surf, cfg = disks_surface()
        x_a, y_a, y_b, _ = paper_counterexample_points(cfg)
        h = 1e-3
        paths = geodesic_multiplicity_probe(surf, ("A", x_a), ("B", y_b), h, slack=1e-7)
        assert len(paths) == 2
        params = sorted(p.crossings[0].parameter for p in paths)
        w = cfg["glue_length"] / 2
        assert (params[0] + params[1]) / 2 == pytest.approx(w, abs=1e-2)
        assert params[1] - params[0] > 0.05
        s_min, _ = brute_force_f_minima(cfg, x_a, y_a)
        np.testing.assert_allclose(params, s_min, atol=1e-3)


class TestProbe:
    def test_flat_unique(self):
        surf, _ = flat_surface()
        paths = geodesic_multiplicity_probe(surf, ("A", (0.3, 0.9)), ("B", (-0.4, -0.7)), 1e-3, slack=1e-2)
        assert len(paths) == 1

    def test_same_side_consistency(self):
        from catglue.geodesics import distance as dom_distance

        surf, cfg = cc_surface()
        x = (-1.2, 1.2)
        y = (1.2, 1.2)
        paths = geodesic_multiplicity_probe(surf, ("A", x), ("A", y), 1e-3, slack=1e-2)
        best = paths[0]
        if not best.crossings:
            d_dom = dom_distance(cfg["side_a"], x, y, 1e-3)
            assert best.length == pytest.approx(d_dom, abs=1e-12)


class TestInvariants:
    def test_portal_doubling_monotone(self):
        cfg = shapes.concave_convex(h=2e-3)
        h = 2e-3
        x = ("A", (-0.4, 1.0))
        y = ("B", (1.75, 0.1))
        d = []
        for portals in (33, 65, 129):
            surf = glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], portals=portals)
            d.append(glued_distance(surf, x, y, h))
        assert d[1] <= d[0] + 1e-12
        assert d[2] <= d[1] + 1e-12

    def test_distance_symmetry_exact(self):
        surf, _ = cc_surface(h=2e-3)
        x = ("A", (-0.5, 1.1))
        y = ("B", (1.8, 0.2))
        assert glued_distance(surf, x, y, 2e-3) == glued_distance(surf, y, x, 2e-3)

    def test_crossing_angle_law_cc(self):
        surf, _ = cc_surface()
        h = 1e-3
        rng = np.random.default_rng(0)
        errs = []
        checked = 0
        while checked < 10:
            x = ("A", (rng.uniform(-0.8, 0.8), rng.uniform(1.15, 1.5)))
            y = ("B", (rng.uniform(1.75, 1.95), rng.uniform(-0.5, 0.5)))
            space = surf.space(h)
            if space.classify("A", x[1])[0] != 1 or space.classify("B", y[1])[0] != 1:
                continue
            p = glued_shortest_path(surf, x, y, h)
            cs = [c for c in p.crossings if not c.boundary_endpoint]
            if len(cs) != 1:
                continue
            errs.append(abs(cs[0].theta_a + cs[0].theta_b - math.pi))
            checked += 1
        assert max(errs) < 1e-2
        assert np.median(errs) < 2e-3


class TestTwoCrossingShortcut:
    def test_two_crossings_and_oracle(self):
        from catglue.geodesics import distance as dom_distance

        cfg = shapes.bite_shortcut(h=2e-3)
        surf = glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], portals=65)
        h = 2e-3
        p = glued_shortest_path(surf, cfg["x"], cfg["y"], h)
        assert len(p.crossings) == 2
        # brute-force portal-pair enumeration at coarse resolution, with
        # side distances from the single-domain machinery
        s = np.linspace(0.0, cfg["glue_length"], 17)
        pa, _ = cfg["arc_a"].point_many(s)
        pb, _ = cfg["arc_b"].point_many(s)
        x = cfg["x"][1]
        y = cfg["y"][1]
        dx = np.array([dom_distance(cfg["side_a"], x, q, h) for q in pa])
        dy = np.array([dom_distance(cfg["side_a"], y, q, h) for q in pa])
        chordb = np.array(
            [[dom_distance(cfg["side_b"], q1, q2, h) if i != j else np.inf
              for j, q2 in enumerate(pb)] for i, q1 in enumerate(pa * 0 + pb)]
        )
        two_cross = (dx[:, None] + chordb + dy[None, :]).min()
        direct = dom_distance(cfg["side_a"], x, y, h)
        assert two_cross < direct  # the shortcut topology wins at the oracle level
        assert p.length <= two_cross + 1e-9
        assert p.length >= two_cross - 0.05  # coarse enumeration overshoots a bit


class TestRho:
    def test_symmetric_quarter(self):
        assert rho_of_angles(math.pi / 4, math.pi / 4) == pytest.approx(math.cos(math.pi / 4), abs=1e-12)

    def test_symmetric_general(self):
        for th in (0.2, 0.7, 1.2):
            assert rho_of_angles(th, th) == pytest.approx(math.cos(th), abs=1e-12)

    def test_asymmetric_coordinate_oracle(self):
        th_a, th_b = math.pi / 6, math.pi / 3
        # coordinate oracle: O at origin, A and B unit vectors around the bisector
        half = (th_a + th_b) / 2
        A = np.array([math.cos(half), math.sin(half)])
        B = np.array([math.cos(half), -math.sin(half)])
        # ray from O at angle th_a from OA (toward OB): direction at angle half - th_a
        d = np.array([math.cos(half - th_a), math.sin(half - th_a)])
        ab = B - A
        cross2 = lambda u, v: u[0] * v[1] - u[1] * v[0]
        t = cross2(d, A) / cross2(ab, d)
        E = A + t * ab
        rho_oracle = float(np.hypot(*E))
        assert rho_of_angles(th_a, th_b) == pytest.approx(rho_oracle, abs=1e-12)
        assert rho_of_angles(th_a, th_b) == pytest.approx(0.7321, abs=1e-4)

    def test_angle_domain_errors(self):
        with pytest.raises(AngleDomain):
            rho_of_angles(0.0, 0.5)
        with pytest.raises(AngleDomain):
            rho_of_angles(2.0, 2.0)
