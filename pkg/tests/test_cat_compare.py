import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catglue import shapes
from catglue.cat_compare import (
    AuditRegion,
    DomainSpace,
    GluedSpaceAdapter,
    cat0_audit,
    calibrate_audit_threshold,
    comparison_point,
    comparison_triangle,
    thinness_violation,
)
from catglue.curves import circular_arc
from catglue.domains import make_domain
from catglue.errors import ParameterOutOfRange, TriangleInequalityViolated
from catglue.gluing import glue


def unit_disk(h=1e-3):
    return make_domain([[circular_arc((0, 0), 1.0, 0.0, 0.0)]], h)


class TestComparisonTriangle:
    def test_equilateral(self):
        tri = comparison_triangle(1.0, 1.0, 1.0)
        assert np.allclose(tri.z_bar, [0.5, math.sqrt(3) / 2], atol=1e-14)
        ang = math.atan2(tri.z_bar[1], tri.z_bar[0])
        assert ang == pytest.approx(math.pi / 3, abs=1e-14)

    def test_3_4_5_right_angle(self):
        tri = comparison_triangle(3.0, 5.0, 4.0)
        assert np.allclose(tri.x_bar, [0, 0])
        assert np.allclose(tri.y_bar, [3, 0])
        assert np.allclose(tri.z_bar, [0, 4], atol=1e-13)

    def test_degenerate_collinear(self):
        tri = comparison_triangle(1.0, 2.0, 3.0)
        assert tri.degenerate
        assert np.allclose(tri.z_bar, [3.0, 0.0], atol=1e-12)

    def test_violation_rejected(self):
        with pytest.raises(TriangleInequalityViolated):
            comparison_triangle(1.0, 1.0, 5.0)

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_reconstruction_identity(self, a, b, t):
        # c interpolates the degenerate limits so the inequality holds
        c = abs(a - b) + t * (a + b - abs(a - b))
        tri = comparison_triangle(a, b, c)
        assert np.hypot(*(tri.y_bar - tri.x_bar)) == pytest.approx(a, rel=1e-12, abs=1e-12)
        assert np.hypot(*(tri.z_bar - tri.y_bar)) == pytest.approx(b, rel=1e-12, abs=2e-12)
        assert np.hypot(*(tri.x_bar - tri.z_bar)) == pytest.approx(c, rel=1e-12, abs=1e-12)


class TestComparisonPoint:
    def test_first_endpoint(self):
        tri = comparison_triangle(1.0, 1.0, 1.0)
        assert np.allclose(comparison_point(tri, "xy", 0.0), [0, 0])

    def test_equilateral_midpoint(self):
        tri = comparison_triangle(1.0, 1.0, 1.0)
        assert np.allclose(comparison_point(tri, "xy", 0.5), [0.5, 0.0])

    def test_3_4_5_vertical_side(self):
        tri = comparison_triangle(3.0, 5.0, 4.0)
        assert np.allclose(comparison_point(tri, "zx", 2.0), [0, 2], atol=1e-12)

    def test_out_of_range(self):
        tri = comparison_triangle(1.0, 1.0, 1.0)
        with pytest.raises(ParameterOutOfRange):
            comparison_point(tri, "xy", 1.5)


class TestThinnessEuclidean:
    def test_disk_triangles_exact(self):
        space = DomainSpace(unit_disk(), 1e-3)
        rng = np.random.default_rng(2)
        for _ in range(10):
            ang = rng.uniform(0, 2 * math.pi, 3)
            rad = rng.uniform(0.1, 0.9, 3)
            x, y, z = [
                (r * math.cos(a), r * math.sin(a)) for r, a in zip(rad, ang)
            ]
            rep = thinness_violation(space, x, y, z, n=20)
            assert abs(rep.max_violation) <= 1e-9

    def test_relabel_invariance(self):
        space = DomainSpace(unit_disk(), 1e-3)
        x, y, z = (-0.5, -0.2), (0.6, 0.1), (0.05, 0.55)
        r1 = thinness_violation(space, x, y, z, n=8)
        r2 = thinness_violation(space, y, z, x, n=8)
        r3 = thinness_violation(space, z, x, y, n=8)
        assert r1.max_violation == pytest.approx(r2.max_violation, abs=1e-12)
        assert r1.max_violation == pytest.approx(r3.max_violation, abs=1e-12)

    def test_violation_bounded_below(self):
        space = DomainSpace(unit_disk(), 1e-3)
        rep = thinness_violation(space, (-0.4, 0), (0.4, 0), (0, 0.5), n=6)
        assert np.isfinite(rep.max_violation)
        assert rep.max_violation >= -min(rep.side_lengths)


class TestGluedThinness:
    def test_flat_glue_is_thin_exactly(self):
        cfg = shapes.half_plane_pair(h=1e-3)
        surf = glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"])
        space = GluedSpaceAdapter(surf, 1e-3)
        x = ("A", (-0.8, 0.7))
        y = ("B", (0.9, -0.6))
        z = ("A", (0.7, 0.3))
        rep = thinness_violation(space, x, y, z, n=10)
        assert abs(rep.max_violation) <= 1e-9

    def test_two_disks_violation_positive(self):
        cfg = shapes.two_disks(h=1e-3)
        surf = glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], enforce=False)
        h = 1e-3
        space = GluedSpaceAdapter(surf, h)
        x = ("A", (0.0, 0.0))  # center of disk A
        ang = 0.6
        y = ("B", (0.5 * math.cos(ang), 0.5 * math.sin(ang)))
        z = ("B", (0.5 * math.cos(ang), -0.5 * math.sin(ang)))
        rep = thinness_violation(space, x, y, z, n=16)
        assert rep.max_violation > 10 * h
        # persists under h-refinement: same sign, within 30 percent
        space2 = GluedSpaceAdapter(surf, h / 2)
        rep2 = thinness_violation(space2, x, y, z, n=16)
        assert rep2.max_violation > 10 * h
        assert abs(rep2.max_violation - rep.max_violation) <= 0.3 * abs(rep.max_violation)


class TestAudit:
    def test_deterministic(self):
        space = DomainSpace(unit_disk(), 2e-3)
        region = AuditRegion(kind="domain", box=(-0.6, -0.6, 0.6, 0.6), min_side=0.1)
        _, s1 = cat0_audit(space, region, trials=5, n=6, seed=11)
        _, s2 = cat0_audit(space, region, trials=5, n=6, seed=11)
        assert s1 == s2

    def test_disk_audit_tiny_violations(self):
        space = DomainSpace(unit_disk(), 2e-3)
        region = AuditRegion(kind="domain", box=(-0.6, -0.6, 0.6, 0.6), min_side=0.1)
        reports, summary = cat0_audit(space, region, trials=10, n=8, seed=3, threshold=1e-9)
        assert summary["cat0_consistent"]

    def test_glued_audit_two_disks_flags_violation(self):
        cfg = shapes.two_disks(h=2e-3)
        surf = glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"], enforce=False)
        h = 2e-3
        space = GluedSpaceAdapter(surf, h)
        region = AuditRegion(
            kind="glued", window=(0.1, cfg["glue_length"] - 0.1), radius=0.5, min_side=0.1
        )
        reports, summary = cat0_audit(space, region, trials=25, n=8, seed=5, threshold=10 * h)
        assert summary["worst_violation"] > 10 * h
        assert summary["cat0_consistent"] is False

    def test_concave_convex_calibration_and_audit(self):
        cfg = shapes.concave_convex(h=4e-3)
        surf = glue(cfg["side_a"], cfg["arc_a"], cfg["side_b"], cfg["arc_b"])
        region = AuditRegion(
            kind="glued", window=(0.2, cfg["glue_length"] - 0.2), radius=0.15
        )
        cal = calibrate_audit_threshold(
            lambda h: GluedSpaceAdapter(surf, h),
            region,
            h_values=[4e-3, 2e-3],
            trials=4,
            n=8,
            seed=7,
        )
        assert cal["calibrated_c"] >= 1.0
        space = GluedSpaceAdapter(surf, 2e-3)
        _, summary = cat0_audit(
            space, region, trials=8, n=8, seed=9, threshold=cal["calibrated_c"] * 2e-3
        )
        assert summary["cat0_consistent"]
