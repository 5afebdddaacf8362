"""Knot-space geometry: the almost complex structure, the 2-form and metric,
chart brackets, and the Nijenhuis tensor with its explicit nonzero witness."""

import numpy as np
import pytest

from g2knot.algebra import cross_field, standard_g2
from g2knot.errors import StepOutOfRange
from g2knot.knots import (KnotChart, OMEGA_METRIC_SIGN, acs_apply,
                          chart_bracket, d_omega, d_omega_fd,
                          hermitian_metric, nijenhuis, omega)
from g2knot.loops import (FourierLoopSpec, Loop7, circle_loop,
                          loop_from_fourier, normal_project, trig_interpolate,
                          unit_speed_reparam)

N = 256


@pytest.fixture(scope="module")
def g2():
    return standard_g2()


@pytest.fixture(scope="module")
def circle():
    return circle_loop(N)


def smooth_loop(rng, n=N, k_max=4):
    k = np.arange(k_max + 1)
    scale = 1.0 / (1.0 + k.astype(float) ** 2)
    while True:
        spec = FourierLoopSpec(rng.standard_normal((k_max + 1, 7)) * scale[:, None],
                               rng.standard_normal((k_max + 1, 7)) * scale[:, None], n)
        try:
            loop = loop_from_fourier(spec)
        except Exception:
            continue
        if loop.speeds.min() / loop.speeds.mean() > 0.5:
            return loop


def smooth_field(rng, loop, k_max=4):
    k = np.arange(k_max + 1)
    scale = 1.0 / (1.0 + k.astype(float) ** 2)
    spec = FourierLoopSpec(rng.standard_normal((k_max + 1, 7)) * scale[:, None],
                           rng.standard_normal((k_max + 1, 7)) * scale[:, None], loop.n)
    return normal_project(loop, spec.evaluate(loop.params))


def const_field(loop, axis):
    return np.tile(np.eye(7)[axis], (loop.n, 1))


class TestAlmostComplexStructure:
    def test_circle_oracle(self, circle, g2):
        # on the (e1, e2)-circle, I e3 = T * e3 with T = (-sin, cos, 0, ...)
        out = acs_apply(circle, const_field(circle, 2), g2)
        oracle = cross_field(g2, circle.unit_tangent, const_field(circle, 2))
        assert np.allclose(out, oracle, atol=1e-12)
        # at t = 0 the tangent is e2 and e2 * e3 = e1
        assert np.allclose(out[0], np.eye(7)[0], atol=1e-12)

    def test_squares_to_minus_identity_pointwise(self, g2, rng):
        loop = smooth_loop(rng)
        X = smooth_field(rng, loop)
        twice = acs_apply(loop, acs_apply(loop, X, g2), g2)
        assert np.allclose(twice, -X, atol=1e-10 * max(1.0, np.abs(X).max()))

    def test_chart_acs_squares_to_minus_identity(self, g2, rng):
        loop = smooth_loop(rng)
        chart = KnotChart(loop, g2)
        X = smooth_field(rng, loop)
        u = 0.05 * smooth_field(rng, loop)
        twice = chart.acs(u, chart.acs(u, X))
        assert np.allclose(twice, -X, atol=1e-10 * max(1.0, np.abs(X).max()))

    def test_isometry_on_normal_fields(self, g2, rng):
        loop = smooth_loop(rng)
        X = smooth_field(rng, loop)
        IX = acs_apply(loop, X, g2)
        assert hermitian_metric(loop, IX, IX, g2) == pytest.approx(
            hermitian_metric(loop, X, X, g2), rel=1e-10)


class TestTwoForm:
    def test_antisymmetry(self, g2, rng):
        loop = smooth_loop(rng)
        X, Y = smooth_field(rng, loop), smooth_field(rng, loop)
        assert omega(loop, X, Y, g2) == pytest.approx(-omega(loop, Y, X, g2), rel=1e-12)

    def test_reparametrization_invariance(self, g2, rng):
        loop = smooth_loop(rng)
        X, Y = smooth_field(rng, loop), smooth_field(rng, loop)
        val = omega(loop, X, Y, g2)
        fixed = unit_speed_reparam(loop)
        from g2knot.loops import arclength_params
        t = arclength_params(loop)
        Xr = trig_interpolate(X, t)
        Yr = trig_interpolate(Y, t)
        assert omega(fixed, Xr, Yr, g2) == pytest.approx(val, rel=1e-8)

    def test_compatibility_with_metric(self, g2, rng):
        loop = smooth_loop(rng)
        X, Y = smooth_field(rng, loop), smooth_field(rng, loop)
        IX = acs_apply(loop, X, g2)
        assert omega(loop, X, Y, g2) == pytest.approx(
            OMEGA_METRIC_SIGN * hermitian_metric(loop, IX, Y, g2), rel=1e-10)

    def test_invariance_under_acs(self, g2, rng):
        loop = smooth_loop(rng)
        X, Y = smooth_field(rng, loop), smooth_field(rng, loop)
        IX = acs_apply(loop, X, g2)
        IY = acs_apply(loop, Y, g2)
        assert omega(loop, IX, IY, g2) == pytest.approx(omega(loop, X, Y, g2), rel=1e-10)

    def test_closedness_exact_route(self, g2, rng):
        loop = smooth_loop(rng)
        chart = KnotChart(loop, g2)
        X, Y, Z = (smooth_field(rng, loop) for _ in range(3))
        assert abs(d_omega(chart, X, Y, Z)) < 1e-10

    def test_closedness_fd_route_matches(self, g2, rng):
        loop = smooth_loop(rng)
        chart = KnotChart(loop, g2)
        X, Y, Z = (smooth_field(rng, loop) for _ in range(3))
        assert abs(d_omega_fd(chart, X, Y, Z, 1e-4)) < 1e-6

    def test_step_validation(self, g2, rng):
        loop = smooth_loop(rng)
        chart = KnotChart(loop, g2)
        X, Y, Z = (smooth_field(rng, loop) for _ in range(3))
        with pytest.raises(StepOutOfRange):
            d_omega_fd(chart, X, Y, Z, 1.0)


class TestChartBracket:
    def test_constant_fields_commute(self, g2, rng):
        loop = smooth_loop(rng)
        chart = KnotChart(loop, g2)
        X = smooth_field(rng, loop)
        Y = smooth_field(rng, loop)
        zero = np.zeros_like(X)
        br = chart_bracket(chart, lambda u: X, lambda u: Y, zero, 1e-4)
        assert np.abs(br).max() < 1e-12

    def test_linear_field_bracket_oracle(self, g2, rng):
        # [X, f X] = (X f) X for a chart-linear scalar coefficient
        loop = smooth_loop(rng)
        chart = KnotChart(loop, g2)
        X = smooth_field(rng, loop)
        W = smooth_field(rng, loop)
        # f(u) = <W, u> integrated: A = X constant, B(u) = f(u) X
        def f(u):
            return float(np.sum(W * u)) / loop.n
        zero = np.zeros_like(X)
        br = chart_bracket(chart, lambda u: X, lambda u: f(u) * X, zero, 1e-4)
        expected = (float(np.sum(W * X)) / loop.n) * X
        assert np.allclose(br, expected, atol=1e-6 * max(1.0, np.abs(expected).max()))


class TestNijenhuis:
    def test_circle_witness_is_nonzero(self, g2, circle):
        # explicit witness: on the unit circle the Nijenhuis tensor applied to
        # the constant normal fields e3, e4 equals -(T * e4), with unit sup
        # norm, so the almost complex structure is not formally integrable
        chart = KnotChart(circle, g2)
        X = const_field(circle, 2)
        Y = const_field(circle, 3)
        nij = nijenhuis(chart, X, Y, 1e-4)
        expected = -cross_field(g2, circle.unit_tangent, Y)
        assert np.allclose(nij, expected, atol=1e-6)
        assert np.abs(nij).max() == pytest.approx(1.0, abs=1e-7)

    def test_witness_is_step_independent(self, g2, circle):
        # the residual is a genuine tensor value, not a discretization artifact
        chart = KnotChart(circle, g2)
        X = const_field(circle, 2)
        Y = const_field(circle, 3)
        sups = [np.abs(nijenhuis(chart, X, Y, h)).max() for h in (2e-4, 1e-4, 5e-5)]
        assert np.allclose(sups, 1.0, atol=1e-6)

    def test_antisymmetry(self, g2, rng):
        loop = smooth_loop(rng)
        chart = KnotChart(loop, g2)
        X = smooth_field(rng, loop)
        Y = smooth_field(rng, loop)
        nxy = nijenhuis(chart, X, Y, 1e-4)
        nyx = nijenhuis(chart, Y, X, 1e-4)
        assert np.allclose(nxy, -nyx, atol=1e-5 * max(1.0, np.abs(nxy).max()))

    def test_vanishes_on_parallel_arguments(self, g2, circle):
        chart = KnotChart(circle, g2)
        X = const_field(circle, 2)
        nij = nijenhuis(chart, X, 2.0 * X, 1e-4)
        assert np.abs(nij).max() < 1e-6
