"""Kernel-layer checks: transition densities, Chapman-Kolmogorov closures,
the stationary and extended kernels, the configuration kernels, and the
integral-identity layer that glues them together."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from airyrelax.airy import ai, ai_prime, airy_constants, airy_zeros
from airyrelax.configs import PointConfiguration, builtin, transform
from airyrelax.errors import ArgumentError, ConditionViolationError
from airyrelax.kernels import (
    KernelSpec,
    airy_bilinear_exp,
    airy_gauss_transform,
    airy_kernel,
    ext_airy_kernel,
    fourier_airy_project,
    g_factor,
    kernel_batch,
    kernel_finite,
    kernel_infinite,
    kernel_relaxation,
    p_ai,
    p_sin,
    q_kernel,
    sine_kernel,
)

RNG = np.random.default_rng(20260816)


def product_quad(f1, f2, y0):
    # every factor here is a Gaussian-type density whose log is exactly
    # quadratic in y, so three probes pin the product's peak and width;
    # ten sigma of coverage leaves a relative tail below 1e-21
    ys = (y0 - 1.0, y0, y0 + 1.0)
    lv = [math.log(f1(v)) + math.log(f2(v)) for v in ys]
    a = (lv[0] - 2.0 * lv[1] + lv[2]) / 2.0
    assert a < 0.0
    y_star = y0 - (lv[2] - lv[0]) / (4.0 * a)
    sigma = math.sqrt(-0.5 / a)
    val, _ = integrate.quad(
        lambda y: f1(y) * f2(y), y_star - 10 * sigma, y_star + 10 * sigma, limit=300
    )
    return val


def random_tuples(n):
    # spacing |z - x| = O(s/sqrt(t)) keeps every factor of the backward
    # identities inside double range, where an absolute residual target
    # is meaningful
    out = []
    for _ in range(n):
        t = RNG.uniform(0.3, 2.0)
        s = RNG.uniform(0.3, 0.85) * t
        x = RNG.uniform(-1.5, 1.5)
        z = x + RNG.uniform(-2.5, 2.5) * s / math.sqrt(t)
        out.append((s, t, x, z))
    return out


class TestPSin:
    def test_value_at_origin(self):
        assert abs(p_sin(1, 0) - 0.39894228) < 1e-8
        assert p_sin(1, 0) == 1.0 / math.sqrt(2.0 * math.pi)

    def test_zero_time_rejected(self):
        with pytest.raises(ArgumentError):
            p_sin(0.0, 1.0)

    def test_normalization_uses_absolute_time(self):
        assert p_sin(-1, 0) == p_sin(1, 0)

    def test_signed_exponent(self):
        # the exponent carries the sign of t (only the normalization takes
        # |t|); this is what gives the backward kernel Gaussian decay along
        # the imaginary axis, where every contour formula lives
        for t, x in [(1.0, 0.7), (0.4, -1.2)]:
            assert abs(p_sin(t, x) * p_sin(-t, x) - 1.0 / (2 * math.pi * t)) < 1e-15
        v = 3.0
        assert abs(p_sin(-1.0, 1j * v + 0.5)) < p_sin(-1.0, 0.5)

    def test_chapman_kolmogorov_forward(self):
        for s, t, x, z in random_tuples(6):
            got = product_quad(
                lambda y: p_sin(t - s, z - y), lambda y: p_sin(s, y - x), (x + z) / 2
            )
            assert abs(got - p_sin(t, z - x)) < 1e-9

    def test_chapman_kolmogorov_backward(self):
        for s, t, x, z in random_tuples(6):
            got = product_quad(
                lambda y: p_sin(-t, z - y),
                lambda y: p_sin(t - s, y - x),
                (x + z) / 2,
            )
            assert abs(got - p_sin(-s, z - x)) < 1e-8


class TestQKernel:
    def test_equal_times_rejected(self):
        with pytest.raises(ArgumentError):
            q_kernel(1.0, 1.0, 0.5)

    def test_total_mass(self):
        for t in (0.5, 1.7):
            val = product_quad(lambda u: q_kernel(0.0, t, u), lambda u: 1.0, t * t / 4)
            assert abs(val - 1.0) < 1e-9

    def test_parabola_shift(self):
        assert q_kernel(0, 1, 0.25) == p_sin(1, 0)

    def test_chapman_kolmogorov(self):
        for s, t, x, z in random_tuples(6):
            got = product_quad(
                lambda y: q_kernel(s, t, z - y),
                lambda y: q_kernel(0, s, y - x),
                (x + z) / 2,
            )
            assert abs(got - q_kernel(0, t, z - x)) < 1e-9

    def test_chapman_kolmogorov_backward(self):
        for s, t, x, z in random_tuples(6):
            got = product_quad(
                lambda y: q_kernel(t, 0, z - y),
                lambda y: q_kernel(s, t, y - x),
                (x + z) / 2,
            )
            assert abs(got - q_kernel(s, 0, z - x)) < 1e-8


class TestGFactor:
    def test_time_zero_is_unity(self):
        assert g_factor(0.0, 3.7) == 1.0
        assert np.all(g_factor(0.0, np.linspace(-4, 4, 9)) == 1.0)

    def test_direct_value(self):
        assert g_factor(2, 0) == math.exp(1.0 / 3.0)

    def test_drifted_density_total_mass(self):
        # integrating the drifted transition density over the destination
        # gives the gauge weight of the source
        for t, x in [(1.0, 0.3), (0.6, -1.1)]:
            val = product_quad(lambda z: p_ai(t, z, x), lambda z: 1.0, x)
            assert abs(val - g_factor(t, x)) < 1e-8


class TestPAi:
    def test_zero_increment_rejected(self):
        with pytest.raises(ArgumentError):
            p_ai(0.0, 1.0, 0.0)

    @given(
        st.floats(0.05, 2.0),
        st.floats(0.05, 2.0),
        st.floats(-4, 4),
        st.floats(-4, 4),
    )
    @settings(max_examples=60, deadline=None)
    def test_gauge_times_q_identity(self, s, dt, x, y):
        t = s + dt
        lhs = p_ai(dt, y, x)
        rhs = g_factor(t, y) / g_factor(s, x) * q_kernel(s, t, y - x)
        assert abs(lhs - rhs) <= 1e-12 * max(lhs, rhs)

    @given(st.floats(0.1, 2.0), st.floats(-4, 4), st.floats(-4, 4))
    @settings(max_examples=40, deadline=None)
    def test_symmetric_in_endpoints(self, dt, x, y):
        assert p_ai(dt, y, x) == p_ai(dt, x, y)

    def test_matches_weighted_airy_integral(self):
        t, x, y = 1.0, 0.0, 0.5
        val, _ = integrate.quad(
            lambda u: math.exp(u * t / 2) * ai(u + x) * ai(u + y),
            -80.0,
            30.0,
            limit=400,
        )
        assert abs(p_ai(t, y, x) - val) < 1e-8

    def test_chapman_kolmogorov(self):
        for s, t, x, z in random_tuples(5):
            got = product_quad(
                lambda y: p_ai(t - s, z, y), lambda y: p_ai(s, y, x), (x + z) / 2
            )
            assert abs(got - p_ai(t, z, x)) < 1e-8

    def test_chapman_kolmogorov_backward(self):
        for s, t, x, z in random_tuples(5):
            got = product_quad(
                lambda y: p_ai(-t, z, y), lambda y: p_ai(t - s, y, x), (x + z) / 2
            )
            assert abs(got - p_ai(-s, z, x)) < 1e-8


class TestSineKernel:
    def test_stationary_values(self):
        assert sine_kernel(0, 0) == 1.0
        assert abs(sine_kernel(0, 0.5) - 0.63661977) < 1e-8
        for n in (1, 2, 3, 4, 5):
            assert abs(sine_kernel(0, n)) < 1e-12

    def test_positive_time_branch(self):
        t, x = 0.5, 0.7
        want, _ = integrate.quad(
            lambda u: math.exp(math.pi**2 * u * u * t / 2) * math.cos(math.pi * u * x),
            0.0,
            1.0,
        )
        assert abs(sine_kernel(t, x) - want) < 1e-10 * abs(want)

    def test_negative_time_branch(self):
        t, x = -1.0, 0.3
        want, _ = integrate.quad(
            lambda u: math.exp(math.pi**2 * u * u * t / 2) * math.cos(math.pi * u * x),
            1.0,
            6.0,
        )
        assert abs(sine_kernel(t, x) - (-want)) < 1e-10

    def test_continuity_at_zero_from_above(self):
        for x in (0.4, 1.7):
            assert abs(sine_kernel(1e-7, x) - sine_kernel(0, x)) < 1e-5

    @given(st.floats(-3, 3), st.floats(-6, 6))
    @settings(max_examples=40, deadline=None)
    def test_even_in_space(self, t, x):
        if abs(t) < 1e-3:
            t = 0.0
        assert sine_kernel(t, -x) == sine_kernel(t, x)


class TestAiryKernel:
    def test_diagonal_value(self):
        # (Ai'(0))^2 = 0.066987483...
        assert airy_kernel(0.0, 0.0) == ai_prime(0.0) ** 2
        assert abs(airy_kernel(0.0, 0.0) - 0.066987) < 1e-6

    @given(st.floats(-8, 4), st.floats(-8, 4))
    @settings(max_examples=50, deadline=None)
    def test_exact_symmetry(self, x, y):
        assert airy_kernel(x, y) == airy_kernel(y, x)

    def test_against_integral_form(self):
        for x, y in [(0.3, -0.4), (-1.0, 0.2), (1.5, 1.5)]:
            want, _ = integrate.quad(
                lambda u: ai(u + x) * ai(u + y), 0.0, 30.0, limit=200
            )
            assert abs(airy_kernel(x, y) - want) < 1e-8

    def test_smooth_across_diagonal_switch(self):
        # ratio form above 1e-6 separation, midpoint Taylor form below.
        # Along K(x, x+h) the exact slope is -Ai(m)^2/2, so the two
        # branches must differ by just that drift across the switch.
        for x in (-2.0, 0.0, 1.3):
            lo = airy_kernel(x, x + 0.9e-6)
            hi = airy_kernel(x, x + 1.1e-6)
            want = -ai(x) ** 2 / 2.0 * 0.2e-6
            assert abs((hi - lo) - want) < 5e-10

    def test_vectorized(self):
        xs = np.array([0.0, 1.0, -1.0])
        vals = airy_kernel(xs, xs + 1e-9)
        assert vals.shape == (3,)
        assert abs(vals[0] - airy_kernel(0.0, 1e-9)) < 1e-15


class TestExtAiryKernel:
    def test_time_zero_matches_stationary(self):
        for x, y in [(0.0, 0.0), (0.5, -0.3)]:
            assert abs(ext_airy_kernel(0.0, y, x) - airy_kernel(x, y)) < 1e-10

    def test_negative_time_against_quadrature(self):
        want, _ = integrate.quad(
            lambda u: math.exp(u / 2) * ai(u) ** 2, -70.0, 0.0, limit=500
        )
        assert abs(ext_airy_kernel(-1.0, 0.0, 0.0) - (-want)) < 1e-9

    def test_symmetry_in_space(self):
        for t in (0.7, -0.7):
            assert (
                abs(ext_airy_kernel(t, 0.4, -1.1) - ext_airy_kernel(t, -1.1, 0.4))
                < 1e-12
            )

    def test_decay_along_ray(self):
        vals = [abs(ext_airy_kernel(0.5, r, r)) for r in (2.0, 6.0, 10.0)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 1e-10

    def test_negative_time_envelope(self):
        with pytest.raises(ArgumentError):
            ext_airy_kernel(-8.0, 0.0, 0.0)


class TestAiryBilinearExp:
    def test_nonpositive_rate_rejected(self):
        with pytest.raises(ArgumentError):
            airy_bilinear_exp(0.0, 0.0, 0.0)

    def test_reference_value_and_quadrature(self):
        got = airy_bilinear_exp(1.0, 0.0, 0.0)
        assert abs(got - math.exp(1.0 / 12.0) / math.sqrt(4 * math.pi)) < 1e-12
        assert abs(got - 0.30660) < 1e-5
        want, _ = integrate.quad(
            lambda u: math.exp(u) * ai(u) ** 2, -90.0, 25.0, limit=400
        )
        assert abs(got - want) < 1e-8

    def test_integral_over_second_argument(self):
        c, x = 0.8, 0.4
        val = product_quad(lambda y: airy_bilinear_exp(c, x, y), lambda y: 1.0, x)
        assert abs(val - math.exp(-c * x + c**3 / 3)) < 1e-8

    def test_small_rate_blowup_on_diagonal(self):
        # c -> 0+ diverges like (4 pi c)^{-1/2}: the orthonormality limit
        for c in (1e-2, 1e-4):
            ratio = airy_bilinear_exp(c, 0.3, 0.3) * math.sqrt(4 * math.pi * c)
            assert abs(ratio - math.exp(c**3 / 12 - c * 0.3)) < 1e-12


class TestAiryGaussTransform:
    def test_zero_scale_rejected(self):
        with pytest.raises(ArgumentError):
            airy_gauss_transform(0.0, 1.0)

    def test_reference_value_and_quadrature(self):
        got = airy_gauss_transform(1.0, 0.0)
        assert abs(got - math.exp(1.0 / 96.0) * ai(1.0 / 16.0)) < 1e-14
        want, _ = integrate.quad(
            lambda u: math.exp(-u * u) / math.sqrt(math.pi) * ai(u), -8.0, 8.0
        )
        assert abs(got - want) < 1e-8

    def test_smooth_over_offset_range(self):
        vals = [airy_gauss_transform(1.0, v) for v in np.linspace(-5, 5, 41)]
        assert all(np.isfinite(vals))
        diffs = np.abs(np.diff(vals))
        assert np.max(diffs) < 1.0

    def test_imaginary_axis_consequence(self):
        # integrating Ai against the backward drifted kernel along the
        # imaginary axis reproduces the exponentially damped Airy function
        t, u, y = 1.0, 0.3, -0.2

        def h(v):
            return 2.0 * (ai(u + 1j * v) * p_ai(-t, 1j * v, y)).real

        got, _ = integrate.quad(h, 0.0, 12.0, limit=300)
        want = math.exp(-u * t / 2.0) * ai(u + y)
        assert abs(got - want) < 1e-7


class TestFourierAiryProject:
    def test_needs_positive_mode_count(self):
        with pytest.raises(ArgumentError):
            fourier_airy_project(lambda x: math.exp(-x), 0)

    def test_basis_function_projects_to_delta(self):
        zeros = airy_zeros(4).values
        d1 = ai_prime(zeros[0])

        def f(x):
            return ai(x + zeros[0]) / d1

        exp = fourier_airy_project(f, 4, upper=40.0)
        assert abs(exp.coefficients[0] - 1.0) < 1e-8
        assert np.max(np.abs(exp.coefficients[1:])) < 1e-8
        assert exp.l2_error < 1e-7

    def test_cross_integrals(self):
        zeros = airy_zeros(3).values
        dai = ai_prime(zeros)
        for i in range(3):
            for j in range(3):
                val, _ = integrate.quad(
                    lambda u: ai(u + zeros[i]) * ai(u + zeros[j]),
                    0.0,
                    40.0,
                    limit=300,
                )
                want = dai[i] ** 2 if i == j else 0.0
                assert abs(val - want) < 1e-8

    def test_exponential_reconstruction_improves(self):
        f = lambda x: math.exp(-x)
        errs = []
        for n in (5, 20, 80):
            exp = fourier_airy_project(f, n, upper=40.0)
            zeros = airy_zeros(n).values
            dai = ai_prime(zeros)
            grid = np.linspace(1e-3, 3.0, 200)
            recon = (exp.coefficients / dai) @ ai(grid[None, :] + zeros[:, None])
            errs.append(float(np.sqrt(np.mean((np.exp(-grid) - recon) ** 2))))
        assert errs[0] > errs[1] > errs[2]


def gauge_hat(d, s, x):
    # scalar gauge weight of the finite-kernel reduction identities
    return math.exp(-d * (d * s / 2.0 + s * s / 4.0 - x))


class TestRatioIdentities:
    def test_three_scalar_identities(self):
        # the finite-configuration kernel collapses to its sine-version
        # through three exact ratios between shifted Gaussians; they pin
        # the drift and parabola conventions of q against p_sin
        rng = np.random.default_rng(7)
        for _ in range(25):
            d = rng.uniform(-2, 2)
            s, t = rng.uniform(0.2, 2, size=2)
            x, y, xp, yp = rng.uniform(-2, 2, size=4)

            lhs1 = p_sin(s, (x - d * s - s * s / 4.0) - xp)
            rhs1 = q_kernel(0, s, x - xp) * gauge_hat(d, s, x) * math.exp(-d * xp)
            assert abs(lhs1 - rhs1) < 1e-10 * max(1.0, abs(rhs1))

            lhs2 = p_sin(-t, yp - (y - d * t - t * t / 4.0))
            rhs2 = q_kernel(t, 0, yp - y) * math.exp(d * yp) / gauge_hat(d, t, y)
            assert abs(lhs2 - rhs2) < 1e-10 * max(1.0, abs(rhs2))

            if abs(s - t) > 1e-3:
                lhs3 = p_sin(
                    s - t, (x - d * s - s * s / 4.0) - (y - d * t - t * t / 4.0)
                )
                rhs3 = (
                    q_kernel(t, s, x - y) * gauge_hat(d, s, x) / gauge_hat(d, t, y)
                )
                assert abs(lhs3 - rhs3) < 1e-10 * max(1.0, abs(rhs3))


class TestPrimitives:
    def test_squared_primitive(self):
        c = 1.3

        def prim(u, x):
            su = c * (u + x)
            return (u + x) * ai(su) ** 2 - ai_prime(su) ** 2 / c

        h = 1e-5
        for u, x in [(0.2, 0.5), (-1.0, 0.3), (1.4, -2.0)]:
            deriv = (prim(u + h, x) - prim(u - h, x)) / (2 * h)
            assert abs(deriv - ai(c * (u + x)) ** 2) < 1e-6

    def test_bilinear_primitive(self):
        c = 0.9

        def prim(u, x, y):
            sx, sy = c * (u + x), c * (u + y)
            num = ai_prime(sx) * ai(sy) - ai(sx) * ai_prime(sy)
            return num / (c * c * (x - y))

        h = 1e-5
        for u, x, y in [(0.0, 0.7, -0.2), (-0.8, 1.1, 0.4)]:
            deriv = (prim(u + h, x, y) - prim(u - h, x, y)) / (2 * h)
            want = ai(c * (u + x)) * ai(c * (u + y))
            assert abs(deriv - want) < 1e-6


class TestKernelFinite:
    def test_nonpositive_times_rejected(self):
        xi = PointConfiguration([-2.0])
        with pytest.raises(ArgumentError):
            kernel_finite(xi, 0.0, 0.0, 1.0, 0.0)
        with pytest.raises(ArgumentError):
            kernel_finite(xi, 1.0, 0.0, -0.5, 0.0)

    def test_multiplicities_rejected(self):
        xi = PointConfiguration([-2.0, -2.0])
        with pytest.raises(ArgumentError):
            kernel_finite(xi, 1.0, 0.0, 1.0, 0.0)

    def test_single_particle_gaussian(self):
        consts = airy_constants()
        a1 = airy_zeros(1).values[0]
        drift = consts.d1 + 1.0 / a1
        xi = PointConfiguration([a1])
        for t in (0.25, 1.0):
            mean = a1 + t * t / 4.0 + drift * t
            for dx in (-0.8, 0.0, 0.8):
                x = mean + dx
                want = math.exp(-dx * dx / (2 * t)) / math.sqrt(2 * math.pi * t)
                assert abs(kernel_finite(xi, t, x, t, x) - want) < 1e-6

    def test_indicator_switches_at_equal_times(self):
        xi = PointConfiguration([-2.3, -4.1])
        t, eps = 0.8, 1e-6
        x = y = -2.0
        below = kernel_finite(xi, t - eps, x, t, y)
        above = kernel_finite(xi, t + eps, x, t, y)
        step = q_kernel(t, t + eps, x - y)
        # the smooth part moves O(eps); the indicator contributes a
        # near-delta spike on the diagonal
        assert step > 100.0
        assert abs((below - above) - step) < 1e-3 * step
        x2, y2 = -1.4, -2.6
        below2 = kernel_finite(xi, t - eps, x2, t, y2)
        above2 = kernel_finite(xi, t + eps, x2, t, y2)
        assert abs(below2 - above2) < 1e-4

    def test_two_particle_closed_form(self):
        # independent oracle: with two atoms the entire factor is degree
        # one, so the backward contour integral is an exact Gaussian
        # Fourier transform.  Writing r = y - t^2/4 and
        # alpha = d1 + 1/a1 + 1/a2, the backward half for atom a against
        # the other atom b collapses to
        #   exp(alpha (r - a) - alpha^2 t / 2) (r - alpha t - b) / (a - b)
        # and the x-side Gaussian weights do the rest.  Each diagonal
        # term integrates to one, so the oracle carries trace 2.
        consts = airy_constants()
        a1, a2 = airy_zeros(2).values
        alpha = consts.d1 + 1.0 / a1 + 1.0 / a2
        xi = PointConfiguration([a1, a2])

        def oracle(s, x, t, y):
            r = y - t * t / 4.0
            tot = 0.0
            for atom, other in ((a1, a2), (a2, a1)):
                w = math.exp(-((x - atom - s * s / 4.0) ** 2) / (2 * s))
                w /= math.sqrt(2 * math.pi * s)
                back = math.exp(alpha * (r - atom) - alpha * alpha * t / 2.0)
                tot += w * back * (r - alpha * t - other) / (atom - other)
            if s > t:
                tot -= q_kernel(t, s, x - y)
            return tot

        for t, xs in ((0.5, (-3.4, -3.0, -2.6)), (1.0, (-5.2, -4.3, -3.5, -2.7))):
            for x in xs:
                assert abs(kernel_finite(xi, t, x, t, x) - oracle(t, x, t, x)) < 5e-8
        for s, x, t, y in (
            (0.4, -3.1, 0.9, -3.6),
            (0.9, -3.6, 0.4, -3.1),
            (0.7, -2.8, 0.7, -4.4),
        ):
            assert abs(kernel_finite(xi, s, x, t, y) - oracle(s, x, t, y)) < 5e-8


class TestKernelRelaxation:
    def test_nonpositive_times_rejected(self):
        with pytest.raises(ArgumentError):
            kernel_relaxation(1.0, 0.0, 0.0, 0.0)

    def test_zero_sum_truncation_stable(self):
        v50 = kernel_relaxation(1, 0, 1, 0, zero_trunc=50)
        v100 = kernel_relaxation(1, 0, 1, 0, zero_trunc=100)
        assert v50 != 0.0
        assert abs(v100 - v50) < 1e-6 * abs(v50)

    def test_long_time_diagonal_approaches_stationary(self):
        # relaxation toward the stationary soft-edge profile
        x = -1.0
        k1 = kernel_relaxation(1.0, x, 1.0, x)
        k4 = kernel_relaxation(4.0, x, 4.0, x)
        target = airy_kernel(x, x)
        assert abs(k4 - target) < abs(k1 - target)


class TestKernelInfinite:
    def test_requires_generator(self):
        xi = PointConfiguration([-1.0, -3.0])
        with pytest.raises(ArgumentError):
            kernel_infinite(xi, 1.0, 0.0, 1.0, 0.0)

    def test_condition_gate(self):
        with pytest.raises(ConditionViolationError):
            kernel_infinite(builtin("integers", 100), 1.0, 0.0, 1.0, 0.0)

    def test_gauge_relation_to_zero_sum_form(self):
        xi = builtin("airy", 64)
        s, x, t, y = 0.8, 0.2, 1.1, -0.4
        val = kernel_infinite(xi, s, x, t, y)
        back = val * g_factor(s, x) / g_factor(t, y)
        assert abs(back - kernel_relaxation(s, x, t, y)) < 1e-12

    def test_two_route_agreement(self):
        # atom-sum route on the tagged configuration (infinite-product
        # correction) against the zero-sum route, mapped by the gauge
        # factor: the two evaluate completely different formulas
        xi = builtin("airy", 100)
        for s, x, t, y in [(0.7, 0.3, 1.2, -0.5), (1.0, 0.0, 1.0, 0.0)]:
            lhs = kernel_finite(xi, s, x, t, y) * g_factor(s, x) / g_factor(t, y)
            rhs = kernel_relaxation(s, x, t, y)
            assert abs(lhs - rhs) < 1e-8

    def test_window_truncations_approach_zero_sum_form(self):
        # untagged windows of the zero set, pushed through the finite
        # kernel, drift toward the infinite value like the inverse square
        # root of the window length
        s, x, t, y = 1.0, -0.5, 1.0, -0.5
        want = kernel_relaxation(s, x, t, y)
        errs = []
        for span in (12.0, 24.0, 48.0):
            n = int(2.0 / (3.0 * math.pi) * span**1.5) + 8
            window = transform(builtin("airy", n), "restrict", -span, span)
            got = kernel_finite(window, s, x, t, y, check=False)
            errs.append(abs(got * g_factor(s, x) / g_factor(t, y) - want))
        assert errs[0] > errs[1] > errs[2]

    def test_short_time_diagonal_recovers_atoms(self):
        # vague recovery of the initial configuration: mass of the
        # diagonal kernel concentrates on the zeros as t drops
        from airyrelax.quad import panel_rule

        a1 = airy_zeros(1).values[0]
        xi = builtin("airy", 32)

        def bump_mass(t):
            nodes, wts = panel_rule(a1 - 0.9, a1 + 0.9, 30, 8)
            phi = np.exp(-(((nodes - a1) / 0.35) ** 2))
            dens = np.array([kernel_infinite(xi, t, v, t, v) for v in nodes])
            return float(np.dot(wts, phi * dens))

        masses = [bump_mass(t) for t in (0.5, 0.1, 0.02)]
        gaps = [abs(m - 1.0) for m in masses]
        assert gaps[1] < gaps[0]
        assert gaps[2] < gaps[1]


class TestKernelSpecAndBatch:
    def test_spec_validation(self):
        with pytest.raises(ArgumentError):
            KernelSpec(kind="nope")
        with pytest.raises(ArgumentError):
            KernelSpec(kind="finite_config")
        with pytest.raises(ArgumentError):
            KernelSpec(kind="airy", zero_trunc=0)
        with pytest.raises(ArgumentError):
            KernelSpec(kind="sine", quadrature=(0.0, 4, 12))

    def test_stationary_kinds_require_equal_times(self):
        for kind in ("sine", "airy"):
            with pytest.raises(ArgumentError):
                kernel_batch(KernelSpec(kind=kind), [(0.0, 0.0, 1.0, 0.5)])

    def test_batch_matches_direct_calls(self):
        pts = [(1.0, 0.0, 1.0, 0.5), (1.0, -0.3, 1.0, 0.7)]
        got = kernel_batch(KernelSpec(kind="airy"), pts)
        assert got[0] == airy_kernel(0.0, 0.5)
        assert got[1] == airy_kernel(-0.3, 0.7)
        got = kernel_batch(KernelSpec(kind="ext_sine"), [(0.3, 0.1, 0.8, 0.4)])
        assert got[0] == sine_kernel(0.5, 0.3)
        got = kernel_batch(KernelSpec(kind="ext_airy"), [(0.3, 0.1, 0.8, 0.4)])
        assert got[0] == ext_airy_kernel(0.5, 0.4, 0.1)

    def test_batch_finite_config_with_explicit_rule(self):
        a1 = airy_zeros(1).values[0]
        xi = PointConfiguration([a1])
        spec = KernelSpec(kind="finite_config", config=xi, quadrature=(9.0, 60, 12))
        t = 1.0
        consts = airy_constants()
        mean = a1 + t * t / 4.0 + (consts.d1 + 1.0 / a1) * t
        got = kernel_batch(spec, [(t, mean, t, mean)])
        assert abs(got[0] - 1.0 / math.sqrt(2 * math.pi * t)) < 1e-6

    def test_batch_rejects_undersized_halfwidth(self):
        xi = PointConfiguration([-2.0])
        spec = KernelSpec(kind="finite_config", config=xi, quadrature=(5.0, 40, 12))
        with pytest.raises(ArgumentError):
            kernel_batch(spec, [(4.0, 0.0, 4.0, 0.0)])
