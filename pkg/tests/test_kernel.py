import math

import numpy as np
import pytest
from scipy import integrate

from fracfilm import spectral as sp
from fracfilm.kernel import (KernelParams, QuadratureError, apply_I_integral, c_alpha,
                             kernel_eval, regular_kernel)
from fracfilm.spectral import SpectralField


def literal_sum(x, y, alpha, k_max):
    s = 1.0 + alpha
    total = 0.0
    for k in range(-k_max, k_max + 1):
        total += abs(x - y - 2 * k) ** -s + abs(x + y - 2 * k) ** -s
    return c_alpha(alpha) * total


class TestConstant:
    def test_alpha_one(self):
        # c_1 = 1 / pi
        assert c_alpha(1.0) == pytest.approx(1 / math.pi, rel=1e-15)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_fourier_symbol(self, alpha):
        # c_a int_R (1 - cos y) |y|^-(1+a) dy = 1
        f = lambda y: (1 - math.cos(y)) * y ** -(1 + alpha)
        val = sum(integrate.quad(f, a, b, limit=500)[0] for a, b in [(0, 1), (1, 50)])
        val += integrate.quad(lambda y: y ** -(1 + alpha), 50, np.inf)[0]
        tail = integrate.quad(lambda y: y ** -(1 + alpha), 50, np.inf, weight="cos", wvar=1)[0]
        assert 2 * c_alpha(alpha) * (val - tail) == pytest.approx(1.0, rel=1e-6)


class TestKernelEval:
    def test_example(self):
        p = KernelParams(1.0, k_max=50)
        assert kernel_eval(0.5, 0.25, p) == pytest.approx(literal_sum(0.5, 0.25, 1.0, 50), rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 1.7])
    def test_symmetric(self, alpha, rng):
        p = KernelParams(alpha, k_max=200)
        x, y = rng.uniform(0.01, 0.99, (2, 20))
        assert np.allclose(kernel_eval(x, y, p), kernel_eval(y, x, p), rtol=1e-14)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_positive(self, alpha, rng):
        x, y = rng.uniform(0, 1, (2, 50))
        assert np.all(kernel_eval(x, y, KernelParams(alpha, k_max=20)) > 0)

    def test_diagonal_rejected(self):
        with pytest.raises(ValueError):
            kernel_eval(0.3, 0.3, KernelParams(1.0))

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_tail_bound(self, alpha):
        small = KernelParams(alpha, k_max=20)
        big = KernelParams(alpha, k_max=5000)
        x = np.array([0.1, 0.5, 0.9])
        y = np.array([0.7, 0.2, 0.95])
        gap = kernel_eval(x, y, big) - kernel_eval(x, y, small)
        assert np.all(gap > 0)
        assert np.all(gap <= small.tail_bound())

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_regular_part_matches(self, alpha, rng):
        p = KernelParams(alpha, k_max=300)
        x, y = rng.uniform(0.01, 0.99, (2, 10))
        direct = p.c_alpha * np.abs(x - y) ** -(1 + alpha)
        assert np.allclose(regular_kernel(x, y, p), kernel_eval(x, y, p) - direct, rtol=1e-11)

    def test_rejects_params(self):
        for bad in (0.0, 2.0, -1.0):
            with pytest.raises(ValueError):
                KernelParams(bad)
        with pytest.raises(ValueError):
            KernelParams(1.0, k_max=0)


class TestIntegralForm:
    def test_constant_maps_to_zero(self):
        u = SpectralField.constant(3.0, 4)
        x = np.array([0.1, 0.5, 0.8])
        assert np.allclose(apply_I_integral(u, x, KernelParams(1.0), quad_points=2000), 0.0,
                           atol=1e-12)

    def test_first_mode(self):
        got = apply_I_integral(SpectralField.mode(1, 2), 0.25, KernelParams(1.0))
        want = -math.pi * sp.basis(1, 0.25)
        assert abs(got - want) <= 1e-2 * abs(want)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_matches_spectral(self, alpha, rng):
        u = SpectralField(rng.standard_normal(8) / (1 + np.arange(8)) ** 2)
        x = sp.nodes(8)
        ref = sp.synthesize(sp.apply_I(u, alpha), 8).values
        got = apply_I_integral(u, x, KernelParams(alpha))
        assert np.max(np.abs(got - ref)) <= 1e-2 * np.max(np.abs(ref))

    def test_zero_mean(self, rng):
        u = SpectralField(rng.standard_normal(6) / (1 + np.arange(6)) ** 2)
        x = sp.nodes(64)
        vals = apply_I_integral(u, x, KernelParams(1.5), quad_points=4000)
        assert abs(vals.mean()) < 1e-2 * np.max(np.abs(vals))

    def test_scalar_in_scalar_out(self):
        assert isinstance(apply_I_integral(SpectralField.mode(1, 2), 0.5, KernelParams(1.0),
                                           quad_points=64), float)

    def test_too_few_points(self):
        with pytest.raises(QuadratureError):
            apply_I_integral(SpectralField.mode(1, 2), 0.5, KernelParams(1.0), quad_points=8)

    def test_tolerance_unreachable(self):
        with pytest.raises(QuadratureError):
            apply_I_integral(SpectralField.mode(6, 8), 0.3, KernelParams(0.5), quad_points=32,
                             tol=1e-12)

    def test_tolerance_met(self):
        v = apply_I_integral(SpectralField.mode(1, 2), 0.3, KernelParams(1.5), quad_points=4000,
                             tol=1e-3)
        assert math.isfinite(v)

    def test_endpoints_rejected(self):
        with pytest.raises(ValueError):
            apply_I_integral(SpectralField.mode(1, 2), 0.0, KernelParams(1.0))

    def test_requires_field(self):
        with pytest.raises(TypeError):
            apply_I_integral(np.ones(4), 0.5, KernelParams(1.0))
