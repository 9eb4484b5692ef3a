import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdouglas.errors import (
    DomainError,
    InvalidArgumentError,
    SingularityError,
    UnsupportedInputError,
)
from pdouglas.kernels import (
    Ball,
    Disk,
    Exponent,
    Interval,
    KernelSet,
    bregman_chain_terms,
    bregman_comparability,
    bregman_fp,
    feller_comparability,
    feller_normal_derivative_check,
    green_comparability,
    poisson_comparability,
    signed_power,
    symmetrized_hp,
)

P_GRID = [1.1, 1.5, 2.0, 2.5, 3.0, 4.0]


class TestExponent:
    def test_rejects_p_le_one(self):
        with pytest.raises(InvalidArgumentError):
            Exponent(1.0)
        with pytest.raises(InvalidArgumentError):
            Exponent(0.5)
        with pytest.raises(InvalidArgumentError):
            Exponent(math.inf)

    def test_accepts_valid(self):
        assert Exponent(1.5).p == 1.5


class TestSignedPower:
    def test_odd_cube(self):
        assert signed_power(-2.0, 3.0) == -8.0

    def test_square_root(self):
        assert signed_power(4.0, 0.5) == 2.0

    def test_zero(self):
        for kappa in (0.3, 1.0, 2.5):
            assert signed_power(0.0, kappa) == 0.0

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidArgumentError):
            signed_power(math.nan, 2.0)
        with pytest.raises(InvalidArgumentError):
            signed_power(1.0, -1.0)

    @given(st.floats(-100, 100), st.floats(0.1, 5))
    def test_odd_function(self, a, kappa):
        assert signed_power(-a, kappa) == pytest.approx(-signed_power(a, kappa))

    @given(
        st.floats(-50, 50).filter(lambda t: t == 0.0 or abs(t) > 1e-6),
        st.floats(-50, 50).filter(lambda t: t == 0.0 or abs(t) > 1e-6),
        st.floats(0.1, 5),
    )
    @settings(max_examples=200)
    def test_strictly_increasing(self, a, b, kappa):
        if a < b:
            assert signed_power(a, kappa) < signed_power(b, kappa)


class TestBregman:
    def test_p2_is_squared_difference(self):
        assert bregman_fp(2.0, 1.0, 3.0) == pytest.approx(4.0)

    def test_zero_at_base_point(self):
        for p in P_GRID:
            assert bregman_fp(p, 0.7, 0.7) == pytest.approx(0.0, abs=1e-15)

    def test_p3_sign_change(self):
        # 1 - 1 - 3*1*(-2) = 6
        assert bregman_fp(3.0, 1.0, -1.0) == pytest.approx(6.0)

    def test_even_under_joint_negation(self):
        rng = np.random.default_rng(0)
        a, b = rng.uniform(-3, 3, 100), rng.uniform(-3, 3, 100)
        for p in P_GRID:
            np.testing.assert_allclose(
                bregman_fp(p, -a, -b), bregman_fp(p, a, b), rtol=1e-12, atol=1e-14
            )

    @given(
        st.floats(-10, 10),
        st.floats(-10, 10),
        st.sampled_from(P_GRID),
    )
    @settings(max_examples=300)
    def test_nonnegative(self, a, b, p):
        scale = max(abs(a), abs(b), 1.0) ** p
        assert bregman_fp(p, a, b) >= -1e-13 * scale


class TestSymmetrizedHp:
    def test_p2(self):
        assert symmetrized_hp(2.0, 1.0, 3.0) == pytest.approx(4.0)

    def test_diagonal(self):
        assert symmetrized_hp(3.3, 0.4, 0.4) == 0.0

    def test_p3(self):
        # (3/2)(1-(-1))(1-(-1)) = 6
        assert symmetrized_hp(3.0, 1.0, -1.0) == pytest.approx(6.0)

    def test_is_symmetrization_of_bregman(self):
        # equality up to 1e-14 relative to the natural scale max(|a|,|b|)^p,
        # which is the roundoff floor of the defining formulas
        rng = np.random.default_rng(1)
        a, b = rng.uniform(-5, 5, 500), rng.uniform(-5, 5, 500)
        for p in P_GRID:
            hp = symmetrized_hp(p, a, b)
            avg = 0.5 * (bregman_fp(p, a, b) + bregman_fp(p, b, a))
            scale = np.maximum(np.abs(a), np.abs(b)) ** p + 1e-30
            assert np.max(np.abs(hp - avg) / scale) < 1e-14

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        a, b = rng.uniform(-5, 5, 200), rng.uniform(-5, 5, 200)
        for p in P_GRID:
            np.testing.assert_allclose(
                symmetrized_hp(p, a, b), symmetrized_hp(p, b, a), rtol=1e-12, atol=1e-14
            )


class TestBregmanChain:
    def test_p2_collapse(self):
        rng = np.random.default_rng(3)
        a, b = rng.uniform(-4, 4, 1000), rng.uniform(-4, 4, 1000)
        hp, fp, mid, sq = bregman_chain_terms(2.0, a, b)
        ref = (a - b) ** 2
        for term in (hp, fp, mid, sq):
            np.testing.assert_allclose(term, ref, rtol=1e-12, atol=1e-13)

    def test_direct_substitution_p3(self):
        hp, fp, mid, sq = bregman_chain_terms(3.0, 1.0, 0.0)
        assert fp == pytest.approx(2.0)   # F_3(1,0) = 0 - 1 - 3*1*(-1)
        assert hp == pytest.approx(1.5)   # (3/2)(1)(1)
        assert mid == pytest.approx(1.0)
        assert sq == pytest.approx(1.0)

    def test_envelope_finite_positive(self):
        for p in P_GRID:
            env = bregman_comparability(p, n=10_000, rng=7)
            for key in ("H_over_F", "F_over_maxweight", "maxweight_over_halfpower"):
                lo, hi = env[key]
                assert 0.0 < lo <= hi < math.inf, (p, key, lo, hi)

    def test_envelope_identity_at_p2(self):
        env = bregman_comparability(2.0, n=10_000, rng=11)
        for key in ("H_over_F", "F_over_maxweight", "maxweight_over_halfpower"):
            lo, hi = env[key]
            assert abs(lo - 1.0) < 1e-12 and abs(hi - 1.0) < 1e-12


class TestDomains:
    def test_interval_validation(self):
        with pytest.raises(InvalidArgumentError):
            Interval(1.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            Interval(0.0, math.inf)

    def test_ball_dimension(self):
        with pytest.raises(InvalidArgumentError):
            Ball(d=4)
        assert Ball().d == 3

    def test_disk_distance(self):
        assert Disk().distance_to_boundary([0.6, 0.0]) == pytest.approx(0.4)
        assert Disk().distance_to_boundary([1.0, 0.0]) == pytest.approx(0.0)


class TestPoissonKernel:
    def test_disk_center_uniform(self):
        ks = KernelSet(Disk())
        for eta in (0.0, 1.0, 3.0):
            assert ks.poisson([0.0, 0.0], eta) == pytest.approx(1 / (2 * math.pi))

    def test_disk_half_radius(self):
        # (1 - 1/4) / (2 pi (1 - 1 + 1/4)) = 3/(2 pi)
        ks = KernelSet(Disk())
        val = ks.poisson([0.5, 0.0], 0.0)
        assert val == pytest.approx(3 / (2 * math.pi), rel=1e-12)

    def test_disk_matches_normal_derivative_of_green(self):
        # independent oracle: P(x,z) = lim_h G(x, (1-h) z)/h
        ks = KernelSet(Disk())
        x = np.array([0.5, 0.0])
        for eta in (0.0, 1.1, 2.7):
            z = Disk().boundary_point(eta)
            hs = (1e-4, 1e-5, 1e-6)
            vals = [ks.green(x, (1 - h) * z) / h for h in hs]
            extrap = (1e-4 * vals[1] - 1e-5 * vals[0]) / (1e-4 - 1e-5)
            extrap = (1e-5 * vals[2] - 1e-6 * vals[1]) / (1e-5 - 1e-6)
            assert ks.poisson(x, eta) == pytest.approx(extrap, rel=1e-6)

    def test_interval_weights_solve_bvp(self):
        # oracle: the weights must reproduce u(x) = x and u = 1 exactly
        ks = KernelSet(Interval(0.0, 1.0))
        for x in (0.25, 0.5, 0.9):
            wa, wb = ks.poisson(x, 0.0), ks.poisson(x, 1.0)
            assert wa + wb == pytest.approx(1.0)
            assert wa * 0.0 + wb * 1.0 == pytest.approx(x)

    def test_ball_value(self):
        ks = KernelSet(Ball())
        x = np.zeros(3)
        z = np.array([0.0, 0.0, 1.0])
        assert ks.poisson(x, z) == pytest.approx(1 / (4 * math.pi))

    def test_rejects_boundary_start(self):
        ks = KernelSet(Disk())
        with pytest.raises(DomainError):
            ks.poisson([1.0, 0.0], 0.0)
        with pytest.raises(DomainError):
            ks.poisson([1.2, 0.0], 0.0)

    @pytest.mark.parametrize("domain", [Disk(), Ball()])
    def test_normalization_by_quadrature(self, domain):
        # integral of P(x,.) over the boundary equals 1, 20 random x
        ks = KernelSet(domain)
        rng = np.random.default_rng(5)
        for _ in range(20):
            if isinstance(domain, Disk):
                r = 0.85 * math.sqrt(rng.uniform())
                t = rng.uniform(0, 2 * math.pi)
                x = np.array([r * math.cos(t), r * math.sin(t)])
                etas = np.linspace(0.0, 2 * math.pi, 2048, endpoint=False)
                total = np.sum(ks.poisson(x, etas)) * (2 * math.pi / 2048)
            else:
                v = rng.standard_normal(3)
                x = 0.8 * rng.uniform() ** (1 / 3) * v / np.linalg.norm(v)
                nodes, wts = np.polynomial.legendre.leggauss(160)
                phis = np.linspace(0.0, 2 * math.pi, 320, endpoint=False)
                st_ = np.sqrt(1 - nodes**2)
                zgrid = np.stack(
                    [
                        np.outer(st_, np.cos(phis)),
                        np.outer(st_, np.sin(phis)),
                        np.outer(nodes, np.ones_like(phis)),
                    ],
                    axis=-1,
                )
                vals = ks.poisson(x, zgrid.reshape(-1, 3)).reshape(len(nodes), len(phis))
                total = float(np.sum(vals @ np.ones(len(phis)) * wts) * (2 * math.pi / len(phis)))
            assert total == pytest.approx(1.0, abs=1e-8)


class TestGreenFunction:
    def test_interval_branch(self):
        ks = KernelSet(Interval(0.0, 1.0))
        assert ks.green(0.25, 0.5) == pytest.approx(0.125, rel=1e-14)

    def test_disk_center(self):
        ks = KernelSet(Disk())
        for y in ([0.3, 0.0], [0.0, 0.7], [0.2, -0.4]):
            ref = math.log(1.0 / np.hypot(*y)) / (2 * math.pi)
            assert ks.green([0.0, 0.0], y) == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("domain", [Interval(0.0, 1.0), Disk(), Ball()])
    def test_symmetry(self, domain):
        ks = KernelSet(domain)
        rng = np.random.default_rng(8)
        for _ in range(100):
            if isinstance(domain, Interval):
                x, y = rng.uniform(0.05, 0.95, 2)
            elif isinstance(domain, Disk):
                pts = rng.uniform(-0.6, 0.6, (2, 2))
                x, y = pts[0], pts[1]
            else:
                pts = rng.uniform(-0.5, 0.5, (2, 3))
                x, y = pts[0], pts[1]
            gxy, gyx = ks.green(x, y), ks.green(y, x)
            assert abs(gxy - gyx) <= 1e-12 * max(abs(gxy), 1e-30)

    def test_positive(self):
        rng = np.random.default_rng(9)
        for domain in (Disk(), Ball()):
            ks = KernelSet(domain)
            dim = 2 if isinstance(domain, Disk) else 3
            for _ in range(50):
                x = rng.uniform(-0.55, 0.55, dim)
                y = rng.uniform(-0.55, 0.55, dim)
                if np.linalg.norm(x - y) < 1e-3:
                    continue
                assert ks.green(x, y) > 0.0

    def test_singularity_raises(self):
        ks = KernelSet(Disk())
        with pytest.raises(SingularityError):
            ks.green([0.3, 0.2], [0.3, 0.2])


class TestFellerKernel:
    def test_disk_antipodal(self):
        ks = KernelSet(Disk())
        assert ks.feller(0.0, math.pi) == pytest.approx(1 / (4 * math.pi), rel=1e-14)

    def test_disk_symmetric(self):
        ks = KernelSet(Disk())
        for xi, eta in [(0.3, 1.7), (5.0, 0.1)]:
            assert ks.feller(xi, eta) == ks.feller(eta, xi)

    def test_equals_normal_derivative_limit(self):
        # defining limit, Richardson-extrapolated over h = 1e-3, 1e-4, 1e-5
        ball = KernelSet(Ball())
        z = np.array([0.0, 0.0, 1.0])
        w = np.array([math.sin(1.0), 0.0, math.cos(1.0)])
        numeric = feller_normal_derivative_check(ball, z, w)
        assert ball.feller(z, w) == pytest.approx(numeric, rel=1e-6)

        disk = KernelSet(Disk())
        numeric = feller_normal_derivative_check(disk, 0.4, 2.0)
        assert disk.feller(0.4, 2.0) == pytest.approx(numeric, rel=1e-6)

        interval = KernelSet(Interval(0.0, 2.0))
        numeric = feller_normal_derivative_check(interval, 0.0, 2.0)
        assert interval.feller(0.0, 2.0) == pytest.approx(numeric, rel=1e-9)

    def test_coincidence_raises(self):
        ks = KernelSet(Ball())
        z = np.array([1.0, 0.0, 0.0])
        with pytest.raises(SingularityError):
            ks.feller(z, z)


class TestComparabilityDiagnostics:
    @pytest.mark.parametrize("domain", [Interval(0.0, 1.0), Disk(), Ball()])
    def test_poisson_bounds(self, domain):
        lo, hi = poisson_comparability(KernelSet(domain), n=300, rng=13)
        assert 0.0 < lo <= hi < math.inf

    @pytest.mark.parametrize("domain", [Disk(), Ball()])
    def test_green_bounds(self, domain):
        lo, hi = green_comparability(KernelSet(domain), n=300, rng=17)
        assert 0.0 < lo <= hi < math.inf

    def test_green_bounds_interval_unsupported(self):
        with pytest.raises(UnsupportedInputError):
            green_comparability(KernelSet(Interval(0.0, 1.0)))

    @pytest.mark.parametrize("domain", [Interval(0.0, 1.0), Disk(), Ball()])
    def test_feller_bounds(self, domain):
        lo, hi = feller_comparability(KernelSet(domain), n=300, rng=19)
        assert 0.0 < lo <= hi < math.inf
        if isinstance(domain, Disk):
            # exact constant: gamma |z-w|^2 = 1/pi identically
            assert lo == pytest.approx(1 / math.pi, rel=1e-10)
            assert hi == pytest.approx(1 / math.pi, rel=1e-10)
