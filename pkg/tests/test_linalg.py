import numpy as np
import pytest

from lcgeo.linalg import (
    AmbientSpace,
    Bivector,
    DegenerateSubspaceError,
    SubspaceFrame,
    bivector_pairing,
    null_lines_in_plane,
    principal_angles,
    random_pseudo_orthogonal,
    wedge_apply,
    wedge_matrix,
)

R41 = AmbientSpace(4, 1)


def e(i, space=R41):
    return space.basis(i)


class TestInner:
    def test_metric_convention(self):
        assert R41.inner(e(0), e(0)) == 1.0
        assert R41.inner(e(4), e(4)) == -1.0

    def test_lightlike(self):
        v = e(0) + e(4)
        assert R41.inner(v, v) == 0.0
        assert R41.is_lightlike(v)

    def test_symmetry_and_polarization(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            x = rng.standard_normal(5)
            y = rng.standard_normal(5)
            scale = max(abs(R41.inner(x, x)), abs(R41.inner(y, y)), 1.0)
            assert R41.inner(x, y) == R41.inner(y, x)
            lhs = R41.inner(x + y, x + y)
            rhs = R41.inner(x, x) + 2 * R41.inner(x, y) + R41.inner(y, y)
            assert abs(lhs - rhs) < 1e-12 * scale

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            R41.inner(np.ones(4), np.ones(5))


class TestWedge:
    def test_plane_rotation(self):
        out = wedge_apply(R41, e(0), e(1), e(0))
        np.testing.assert_allclose(out, e(1))

    def test_orthogonal_argument_gives_zero(self):
        out = wedge_apply(R41, e(0), e(1), e(2))
        np.testing.assert_allclose(out, np.zeros(5))

    def test_skewness_random(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b, c, d = rng.standard_normal((4, 5))
            scale = np.prod([np.linalg.norm(v) for v in (a, b, c, d)])
            lhs = R41.inner(wedge_apply(R41, a, b, c), d)
            rhs = R41.inner(wedge_apply(R41, a, b, d), c)
            assert abs(lhs + rhs) < 1e-12 * max(scale, 1.0)

    def test_matrix_matches_apply(self):
        rng = np.random.default_rng(2)
        a, b, c = rng.standard_normal((3, 5))
        np.testing.assert_allclose(
            wedge_matrix(R41, a, b) @ c, wedge_apply(R41, a, b, c), atol=1e-14
        )


class TestBivectorPairing:
    def test_spacelike_wedge(self):
        xi = Bivector.from_wedge(R41, e(0), e(1))
        assert bivector_pairing(R41, xi, xi) == pytest.approx(1.0)

    def test_mixed_wedge(self):
        xi = Bivector.from_wedge(R41, e(0), e(4))
        assert bivector_pairing(R41, xi, xi) == pytest.approx(-1.0)

    def test_disjoint_wedges_pair_to_zero(self):
        xi = Bivector.from_wedge(R41, e(0), e(1))
        eta = Bivector.from_wedge(R41, e(2), e(4))
        assert bivector_pairing(R41, xi, eta) == pytest.approx(0.0)

    def test_simple_wedge_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b, c, d = rng.standard_normal((4, 5))
            xi = Bivector.from_wedge(R41, a, b)
            eta = Bivector.from_wedge(R41, c, d)
            expected = R41.inner(a, c) * R41.inner(b, d) - R41.inner(a, d) * R41.inner(b, c)
            assert xi.pair(eta) == pytest.approx(expected)

    def test_ad_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            vs = rng.standard_normal((6, 5))
            zeta = Bivector.from_wedge(R41, vs[0], vs[1])
            xi = Bivector.from_wedge(R41, vs[2], vs[3])
            eta = Bivector.from_wedge(R41, vs[4], vs[5])
            scale = max(xi.pos_norm() * eta.pos_norm() * zeta.pos_norm(), 1.0)
            lhs = zeta.commutator(xi).pair(eta)
            rhs = xi.pair(zeta.commutator(eta))
            assert abs(lhs + rhs) < 1e-10 * scale

    def test_skewness_defect(self):
        rng = np.random.default_rng(5)
        a, b = rng.standard_normal((2, 5))
        assert Bivector.from_wedge(R41, a, b).skewness_defect() < 1e-13


class TestSubspaceFrame:
    def test_hyperbolic_plane_signature(self):
        fr = SubspaceFrame(R41, [e(0), e(4)])
        assert fr.signature() == (1, 1, 0)

    def test_complement_of_line(self):
        fr = SubspaceFrame(R41, [e(0)])
        comp = fr.orthogonal_complement()
        assert comp.rank == 4
        expected = SubspaceFrame(R41, [e(1), e(2), e(3), e(4)])
        assert principal_angles(comp.vectors, expected.vectors).max() < 1e-12

    def test_null_line_degenerate(self):
        fr = SubspaceFrame(R41, [e(0) + e(4)])
        assert fr.signature() == (0, 0, 1)
        with pytest.raises(DegenerateSubspaceError):
            fr.project(e(1))

    def test_complement_dimension_and_involution(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            v = rng.standard_normal((2, 5))
            fr = SubspaceFrame(R41, v)
            comp = fr.orthogonal_complement()
            assert fr.rank + comp.rank == 5
            try:
                if fr.is_degenerate():
                    continue
            except Exception:
                continue
            back = comp.orthogonal_complement()
            assert principal_angles(back.vectors, fr.vectors).max() < 1e-10

    def test_intersection(self):
        fr1 = SubspaceFrame(R41, [e(0), e(1), e(2)])
        fr2 = SubspaceFrame(R41, [e(1), e(3)])
        inter = fr1.intersect(fr2)
        assert inter.rank == 1
        assert principal_angles(inter.vectors, np.atleast_2d(e(1))).max() < 1e-12

    def test_projection_decomposition(self):
        fr = SubspaceFrame(R41, [e(0), e(1)])
        x = np.array([1.0, 2.0, 3.0, 0.0, 4.0])
        proj = fr.project(x)
        np.testing.assert_allclose(proj, [1.0, 2.0, 0, 0, 0], atol=1e-14)
        assert abs(R41.inner(x - proj, e(0))) < 1e-14
        assert abs(R41.inner(x - proj, e(1))) < 1e-14


class TestNullLines:
    def test_standard_hyperbolic_plane(self):
        fr = SubspaceFrame(R41, [e(0), e(4)])
        v1, v2 = null_lines_in_plane(fr)
        got = {tuple(np.round(np.abs(v * np.sqrt(2)), 9)) for v in (v1, v2)}
        assert got == {(1.0, 0.0, 0.0, 0.0, 1.0)}
        cross = np.abs(v1 @ v2)
        assert cross < 1.0 - 1e-9  # not proportional

    def test_spacelike_plane_rejected(self):
        fr = SubspaceFrame(R41, [e(0), e(1)])
        with pytest.raises(ValueError, match="no null lines"):
            null_lines_in_plane(fr)

    def test_random_boosted_plane(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            t = random_pseudo_orthogonal(R41, rng)
            basis = np.stack([t @ e(0), t @ e(4)])
            fr = SubspaceFrame(R41, basis)
            v1, v2 = null_lines_in_plane(fr)
            for v in (v1, v2):
                assert abs(R41.inner(v, v)) < 1e-12 * (v @ v)
                # membership in the input plane
                res = v - np.linalg.lstsq(basis.T, v, rcond=None)[0] @ basis
                assert np.linalg.norm(res) < 1e-12
            assert np.linalg.matrix_rank(np.stack([v1, v2])) == 2

    def test_deterministic_ordering(self):
        fr = SubspaceFrame(R41, [e(0), e(4)])
        a = null_lines_in_plane(fr)
        b = null_lines_in_plane(SubspaceFrame(R41, [e(4), e(0)]))
        np.testing.assert_allclose(a[0], b[0])
        np.testing.assert_allclose(a[1], b[1])


def test_random_pseudo_orthogonal_preserves_form():
    rng = np.random.default_rng(8)
    g = R41.metric
    for _ in range(10):
        t = random_pseudo_orthogonal(R41, rng)
        np.testing.assert_allclose(t.T @ g @ t, g, atol=1e-10)
