import math

import numpy as np
import pytest

from pdouglas.errors import (
    AccuracyError,
    AliasingError,
    ConfigurationError,
    DomainError,
    InvalidArgumentError,
)
from pdouglas.harmonic import (
    BoundaryFunction,
    HarmonicDiskFunction,
    IntervalHarmonic,
    eval_grad_sq,
    eval_u,
    fourier_project,
    poisson_extend_pointwise,
    radial_trace,
)
from pdouglas.kernels import Disk, Interval, KernelSet

TWO_PI = 2 * math.pi


def g_cos():
    return BoundaryFunction.from_callable(np.cos, derivative=lambda t: -np.sin(t), label="cos")


def g_mix():
    # 0.5 + cos t + 0.25 sin 3t
    return BoundaryFunction.from_callable(
        lambda t: 0.5 + np.cos(t) + 0.25 * np.sin(3 * t),
        derivative=lambda t: -np.sin(t) + 0.75 * np.cos(3 * t),
        label="mix",
    )


class TestBoundaryFunction:
    def test_sample_grid_validation(self):
        with pytest.raises(InvalidArgumentError):
            BoundaryFunction.from_samples([1.0, 2.0, 3.0])  # not a power of two
        with pytest.raises(InvalidArgumentError):
            BoundaryFunction.from_samples([1.0, 2.0])  # too small

    def test_coefficient_eval(self):
        g = BoundaryFunction.from_coefficients(0.5, [1.0], [0.0, 0.0, 0.25])
        t = np.linspace(0, TWO_PI, 7)
        np.testing.assert_allclose(g(t), 0.5 + np.cos(t) + 0.25 * np.sin(3 * t), atol=1e-14)

    def test_series_derivative(self):
        g = BoundaryFunction.from_coefficients(0.5, [1.0], [0.0, 0.0, 0.25])
        t = np.linspace(0, TWO_PI, 7)
        np.testing.assert_allclose(g.derivative(t), -np.sin(t) + 0.75 * np.cos(3 * t), atol=1e-13)

    def test_sampled_derivative_is_spectral(self):
        vals = np.cos(np.arange(64) * TWO_PI / 64)
        g = BoundaryFunction.from_samples(vals)
        t = np.array([0.3, 1.2, 4.0])
        np.testing.assert_allclose(g.derivative(t), -np.sin(t), atol=1e-12)

    def test_missing_derivative_raises(self):
        g = BoundaryFunction.from_callable(lambda t: np.abs(np.sin(t)))
        with pytest.raises(ConfigurationError):
            g.derivative(0.3)

    def test_fourier_csv_roundtrip(self, tmp_path):
        path = tmp_path / "coeffs.csv"
        path.write_text("n,a_n,b_n\n0,0.5,0\n1,1.0,0\n3,0,0.25\n")
        g = BoundaryFunction.from_fourier_csv(path)
        t = np.linspace(0, TWO_PI, 5)
        np.testing.assert_allclose(g(t), 0.5 + np.cos(t) + 0.25 * np.sin(3 * t), atol=1e-14)


class TestFourierProject:
    def test_pure_cosine(self):
        H = fourier_project(g_cos(), 4)
        assert H.a0 == pytest.approx(0.0, abs=1e-14)
        np.testing.assert_allclose(H.an, [1, 0, 0, 0], atol=1e-13)
        np.testing.assert_allclose(H.bn, 0, atol=1e-13)

    def test_constant(self):
        g = BoundaryFunction.from_callable(lambda t: 7.0 + 0 * t, label="const")
        H = fourier_project(g, 3)
        assert H.a0 == pytest.approx(7.0)
        np.testing.assert_allclose(H.an, 0, atol=1e-13)
        np.testing.assert_allclose(H.bn, 0, atol=1e-13)

    def test_mixed(self):
        H = fourier_project(g_mix(), 5)
        assert H.a0 == pytest.approx(0.5, abs=1e-13)
        assert H.an[0] == pytest.approx(1.0, rel=1e-12)
        assert H.bn[2] == pytest.approx(0.25, rel=1e-12)
        assert abs(H.an[1]) < 1e-13 and abs(H.bn[0]) < 1e-13

    def test_undersampled_grid_raises(self):
        g = BoundaryFunction.from_samples(np.cos(np.arange(8) * TWO_PI / 8))
        with pytest.raises(AliasingError):
            fourier_project(g, 4)  # needs M >= 10

    def test_band_limited_exact(self):
        g = BoundaryFunction.from_coefficients(0.5, [1.0], [0.0, 0.0, 0.25])
        H = fourier_project(g, 16)
        assert H.an[0] == 1.0 and H.bn[2] == 0.25 and H.a0 == 0.5


class TestEval:
    def test_linear_mode(self):
        H = fourier_project(g_cos(), 2)
        assert eval_u(H, 0.5, 0.0) == pytest.approx(0.5, rel=1e-13)

    def test_center_is_mean(self):
        H = fourier_project(g_mix(), 8)
        for theta in (0.0, 1.0, 2.5):
            assert eval_u(H, 0.0, theta) == pytest.approx(0.5, abs=1e-13)

    def test_rejects_boundary_radius(self):
        H = fourier_project(g_cos(), 2)
        with pytest.raises(DomainError):
            eval_u(H, 1.0, 0.0)

    def test_matches_kernel_quadrature(self):
        # independent oracle for the series: direct Poisson integral
        ks = KernelSet(Disk())
        H = fourier_project(g_cos(), 4)
        val = poisson_extend_pointwise(ks, g_cos(), [0.3, 0.0])
        assert eval_u(H, 0.3, 0.0) == pytest.approx(val, abs=1e-10)
        assert val == pytest.approx(0.3, abs=1e-10)

    def test_fourier_vs_pointwise_random(self):
        ks = KernelSet(Disk())
        g = g_mix()
        H = fourier_project(g, 8)
        rng = np.random.default_rng(23)
        for _ in range(50):
            r = 0.85 * math.sqrt(rng.uniform())
            t = rng.uniform(0, TWO_PI)
            x = [r * math.cos(t), r * math.sin(t)]
            series = eval_u(H, r, t)
            quad = poisson_extend_pointwise(ks, g, x)
            assert series == pytest.approx(quad, rel=1e-8, abs=1e-10)


class TestGradSq:
    def test_linear_everywhere_one(self):
        H = fourier_project(g_cos(), 3)
        rng = np.random.default_rng(1)
        r = 0.95 * rng.uniform(size=20)
        t = rng.uniform(0, TWO_PI, size=20)
        np.testing.assert_allclose(eval_grad_sq(H, r, t), 1.0, rtol=1e-12)

    def test_degree_two_mode(self):
        g2 = BoundaryFunction.from_coefficients(0.0, [0.0, 1.0], [])
        H = fourier_project(g2, 4)
        rng = np.random.default_rng(2)
        r = 0.9 * rng.uniform(size=20)
        t = rng.uniform(0, TWO_PI, size=20)
        np.testing.assert_allclose(eval_grad_sq(H, r, t), 4 * r**2, rtol=1e-12)

    def test_constant_zero(self):
        g = BoundaryFunction.from_coefficients(3.0, [0.0], [0.0])
        H = fourier_project(g, 2)
        assert eval_grad_sq(H, 0.4, 1.0) == 0.0

    def test_center_limit(self):
        H = fourier_project(g_mix(), 8)
        assert eval_grad_sq(H, 0.0, 0.7) == pytest.approx(1.0, rel=1e-12)

    def test_against_finite_differences(self):
        # |grad u|^2 vs central differences of eval_u in Cartesian coordinates
        H = fourier_project(g_mix(), 8)
        h = 1e-4
        rng = np.random.default_rng(3)
        for _ in range(10):
            r = rng.uniform(0.1, 0.8)
            t = rng.uniform(0, TWO_PI)
            x, y = r * math.cos(t), r * math.sin(t)
            ux = (H.eval_xy(x + h, y) - H.eval_xy(x - h, y)) / (2 * h)
            uy = (H.eval_xy(x, y + h) - H.eval_xy(x, y - h)) / (2 * h)
            assert eval_grad_sq(H, r, t) == pytest.approx(ux**2 + uy**2, rel=1e-5)


class TestHarmonicity:
    def test_five_point_laplacian_vanishes(self):
        # truncated series is exactly harmonic; only FD discretization remains
        rng = np.random.default_rng(4)
        an = rng.standard_normal(8) / 2.0 ** np.arange(1, 9)
        bn = rng.standard_normal(8) / 2.0 ** np.arange(1, 9)
        H = HarmonicDiskFunction(rng.standard_normal(), an, bn)
        n = np.arange(1, 9, dtype=float)
        scale4 = float(np.sum(n**4 * (np.abs(an) + np.abs(bn)))) + 1.0
        h = 1e-3
        for _ in range(25):
            r = rng.uniform(0, 0.85)
            t = rng.uniform(0, TWO_PI)
            x, y = r * math.cos(t), r * math.sin(t)
            lap = (
                H.eval_xy(x + h, y)
                + H.eval_xy(x - h, y)
                + H.eval_xy(x, y + h)
                + H.eval_xy(x, y - h)
                - 4 * H.eval_xy(x, y)
            ) / h**2
            assert abs(lap) <= 1e-6 * scale4

    def test_mean_value_property(self):
        g = g_mix()
        H = fourier_project(g, 8)
        thetas = np.arange(4096) * TWO_PI / 4096
        mean = float(np.mean(g(thetas)))
        assert eval_u(H, 0.0, 0.0) == pytest.approx(mean, rel=1e-10)


class TestRadialTrace:
    def test_cosine(self):
        H = fourier_project(g_cos(), 4)
        assert radial_trace(H, 0.0) == pytest.approx(1.0, rel=1e-9)

    def test_constant(self):
        g = BoundaryFunction.from_coefficients(2.5, [0.0], [0.0])
        H = fourier_project(g, 2)
        for t in (0.0, 1.0, 3.0, 6.0):
            assert radial_trace(H, t) == pytest.approx(2.5, rel=1e-12)

    def test_mixed_at_half_pi(self):
        H = fourier_project(g_mix(), 8)
        # 0.5 + cos(pi/2) + 0.25 sin(3 pi/2) = 0.25
        assert radial_trace(H, math.pi / 2) == pytest.approx(0.25, abs=1e-9)

    def test_matches_boundary_series(self):
        H = fourier_project(g_mix(), 8)
        thetas = np.linspace(0, TWO_PI, 64, endpoint=False)
        np.testing.assert_allclose(
            radial_trace(H, thetas), H.boundary_series(thetas), atol=1e-9
        )

    def test_bad_radii_rejected(self):
        H = fourier_project(g_cos(), 2)
        with pytest.raises(InvalidArgumentError):
            radial_trace(H, 0.0, radii=[0.9, 0.8, 0.7])


class TestIntervalHarmonic:
    def test_boundary_consistency(self):
        dom = Interval(0.0, 2.0)
        u = IntervalHarmonic.from_boundary_values(dom, 1.0, 5.0)
        assert u.c == pytest.approx(2.0)
        assert u.eval(0.0) == pytest.approx(1.0)
        assert u.eval(2.0) == pytest.approx(5.0)
        ua, ub = u.boundary_values()
        assert (ua, ub) == (pytest.approx(1.0), pytest.approx(5.0))
