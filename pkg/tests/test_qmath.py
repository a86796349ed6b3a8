"""Tests for the real symmetric 2x2 algebra layer."""

import math

import numpy as np
import pytest

from discrim3.qmath import (
    IDENTITY,
    DensityMatrix,
    Mat2,
    PlaneState,
    Sym2,
    conjugate,
    eig_bounds,
    projector,
    psd_sqrt,
    sandwich,
    trace_product,
)


def random_sym2(rng):
    a, b, c = rng.uniform(-2.0, 2.0, size=3)
    return Sym2(a, b, c)


def random_psd(rng):
    m = random_sym2(rng)
    # m^T m is PSD for any m.
    return Sym2(m.a * m.a + m.b * m.b, m.b * (m.a + m.c), m.b * m.b + m.c * m.c)


def as_array(m):
    return np.array([[m.a, m.b], [m.b, m.c]])


class TestProjector:
    def test_angle_zero(self):
        p = projector(PlaneState(0.0))
        assert (p.a, p.b, p.c) == (1.0, 0.0, 0.0)

    def test_angle_half_pi(self):
        p = projector(PlaneState(0.5 * math.pi))
        assert abs(p.a) < 1e-30 and abs(p.b) < 1e-16 and p.c == 1.0

    def test_angle_quarter_pi(self):
        p = projector(PlaneState(0.25 * math.pi))
        assert abs(p.a - 0.5) < 1e-15
        assert abs(p.b - 0.5) < 1e-15
        assert abs(p.c - 0.5) < 1e-15

    def test_idempotent_trace_one(self):
        rng = np.random.default_rng(1)
        for angle in rng.uniform(-math.pi, math.pi, size=100):
            p = projector(PlaneState(angle))
            sq = as_array(p) @ as_array(p)
            assert np.max(np.abs(sq - as_array(p))) < 1e-15
            assert abs(p.trace() - 1.0) < 1e-15

    def test_pi_periodic(self):
        for i in range(100):
            angle = -math.pi + (i + 0.5) * 2.0 * math.pi / 100.0
            p = projector(PlaneState(angle))
            q = projector(PlaneState(angle + math.pi))
            assert (p - q).max_abs() < 1e-15


class TestEigBounds:
    def test_identity(self):
        assert eig_bounds(IDENTITY) == (1.0, 1.0, 0.0)

    def test_diag_projector(self):
        lo, hi, angle = eig_bounds(Sym2(1.0, 0.0, 0.0))
        assert (lo, hi) == (0.0, 1.0)
        assert angle == 0.5 * math.pi

    def test_error_operator_orthogonal_states(self):
        # (1 + P(pi/2) - P(0)) / 2 = diag(0, 1)
        a_hat = (IDENTITY + projector(PlaneState(0.5 * math.pi)) - projector(PlaneState(0.0))).scale(0.5)
        lo, hi, _ = eig_bounds(a_hat)
        assert abs(lo) < 1e-15 and abs(hi - 1.0) < 1e-15

    def test_characteristic_polynomial_10k(self):
        rng = np.random.default_rng(2)
        for _ in range(10_000):
            m = random_sym2(rng)
            lo, hi, angle = eig_bounds(m)
            for lam in (lo, hi):
                # det(m - lam I) = 0
                assert abs((m.a - lam) * (m.c - lam) - m.b * m.b) < 1e-10
            assert lo <= 0.5 * (m.a + m.c) + 1e-15 <= hi + 2e-15
            # (m - lo I) v = 0 for the reported eigenvector.
            v = (math.cos(angle), math.sin(angle))
            r0 = (m.a - lo) * v[0] + m.b * v[1]
            r1 = m.b * v[0] + (m.c - lo) * v[1]
            assert abs(r0) < 1e-9 and abs(r1) < 1e-9
            assert -0.5 * math.pi < angle <= 0.5 * math.pi


class TestPsdSqrt:
    def test_identity(self):
        assert psd_sqrt(IDENTITY) == IDENTITY

    def test_projector_fixed_point(self):
        p = projector(PlaneState(0.3))
        r = psd_sqrt(p)
        # The rounded projector has a stray ~1e-17 eigenvalue; sqrt
        # amplifies it to ~1e-9.  The square below is still exact to 1e-10.
        assert (r - p).max_abs() < 1e-8
        sq = as_array(r) @ as_array(r)
        assert np.max(np.abs(sq - as_array(p))) < 1e-10

    def test_diagonal(self):
        r = psd_sqrt(Sym2(0.36, 0.0, 1.0))
        assert abs(r.a - 0.6) < 1e-15 and r.b == 0.0 and abs(r.c - 1.0) < 1e-15

    def test_square_reproduces_10k(self):
        rng = np.random.default_rng(3)
        for _ in range(10_000):
            m = random_psd(rng)
            r = psd_sqrt(m)
            sq = as_array(r) @ as_array(r)
            assert np.max(np.abs(sq - as_array(m))) < 1e-10

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError):
            psd_sqrt(Sym2(-0.1, 0.0, 1.0))

    def test_clamps_tiny_negative(self):
        r = psd_sqrt(Sym2(-1e-12, 0.0, 1.0))
        assert r.is_psd()


class TestSandwich:
    def test_completeness(self):
        rho = DensityMatrix.pure(PlaneState(0.7))
        assert abs(sandwich(IDENTITY, rho) - 1.0) < 1e-15

    def test_aligned_projector(self):
        rho = DensityMatrix.pure(PlaneState(0.0))
        assert abs(sandwich(projector(PlaneState(0.0)), rho) - 1.0) < 1e-15

    def test_mixed_state(self):
        assert abs(sandwich(projector(PlaneState(0.5 * math.pi)), DensityMatrix.mixed()) - 0.5) < 1e-15

    def test_bilinear(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            x = random_sym2(rng)
            y = random_sym2(rng)
            rho = DensityMatrix.pure(PlaneState(rng.uniform(-math.pi, math.pi)))
            lhs = sandwich(x + y, rho)
            rhs = sandwich(x, rho) + sandwich(y, rho)
            assert abs(lhs - rhs) < 1e-12
            s, t = rng.uniform(-2, 2, size=2)
            assert abs(trace_product(x.scale(s), y.scale(t)) - s * t * trace_product(x, y)) < 1e-12


class TestDensityMatrix:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix(Sym2(1.0, 0.0, 0.5))

    def test_rejects_non_psd(self):
        with pytest.raises(ValueError):
            DensityMatrix(Sym2(0.5, 0.9, 0.5))

    def test_depolarize_limits(self):
        rho = DensityMatrix.pure(PlaneState(0.4))
        assert (rho.depolarize(0.0).m - rho.m).max_abs() < 1e-15
        assert (rho.depolarize(1.0).m - DensityMatrix.mixed().m).max_abs() < 1e-15


class TestMat2:
    def test_gram_matches_numpy(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            vals = rng.uniform(-2, 2, size=4)
            m = Mat2(*vals)
            arr = np.array([[m.m00, m.m01], [m.m10, m.m11]])
            g = m.gram()
            ref = arr.T @ arr
            assert np.max(np.abs(as_array(g) - ref)) < 1e-12

    def test_conjugate_symmetric(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = random_psd(rng)
            m = random_sym2(rng)
            out = conjugate(n, m)
            ref = as_array(n) @ as_array(m) @ as_array(n)
            assert np.max(np.abs(as_array(out) - ref)) < 1e-12
