"""Spectral loop calculus: derivatives, interpolation, quadrature, arclength
reparametrization, serialization, and validation."""

import json

import numpy as np
import pytest

from g2knot.errors import ImmersionViolation
from g2knot.loops import (FourierLoopSpec, Loop7, arclength_params,
                          circle_loop, integrate, loop_from_fourier,
                          loop_from_json, loop_to_json, normal_project,
                          resample_field, spectral_derivative,
                          trig_interpolate, unit_speed_reparam)


def random_spec(rng, n=128, k_max=4):
    k = np.arange(k_max + 1)
    scale = 1.0 / (1.0 + k.astype(float) ** 2)
    return FourierLoopSpec(rng.standard_normal((k_max + 1, 7)) * scale[:, None],
                           rng.standard_normal((k_max + 1, 7)) * scale[:, None],
                           n)


class TestSpectralCalculus:
    def test_derivative_exact_on_trig_polynomials(self, rng):
        spec = random_spec(rng)
        t = 2 * np.pi * np.arange(spec.n) / spec.n
        numeric = spectral_derivative(spec.evaluate(t))
        assert np.allclose(numeric, spec.derivative(t), atol=1e-12)

    def test_derivative_of_constant_is_zero(self):
        vals = np.ones((64, 7)) * 3.5
        assert np.allclose(spectral_derivative(vals), 0.0, atol=1e-13)

    def test_interpolation_reproduces_samples(self, rng):
        spec = random_spec(rng)
        t = 2 * np.pi * np.arange(spec.n) / spec.n
        vals = spec.evaluate(t)
        assert np.allclose(trig_interpolate(vals, t), vals, atol=1e-12)

    def test_interpolation_exact_off_grid(self, rng):
        spec = random_spec(rng)
        t = 2 * np.pi * np.arange(spec.n) / spec.n
        t_new = rng.uniform(0, 2 * np.pi, 17)
        assert np.allclose(trig_interpolate(spec.evaluate(t), t_new),
                           spec.evaluate(t_new), atol=1e-12)

    def test_quadrature_exact_for_smooth_periodic(self):
        n = 64
        t = 2 * np.pi * np.arange(n) / n
        loop = circle_loop(n)
        # ∫ (1 + cos t)^2 dt = 3 pi
        vals = (1 + np.cos(t)) ** 2
        assert integrate(loop, vals[:n]) == pytest.approx(3 * np.pi, rel=1e-13)


class TestLoop7:
    def test_circle_geometry(self):
        loop = circle_loop(128)
        assert loop.length == pytest.approx(2 * np.pi, rel=1e-12)
        assert loop.is_constant_speed()
        expected_tangent = np.zeros((128, 7))
        expected_tangent[:, 0] = -np.sin(loop.params)
        expected_tangent[:, 1] = np.cos(loop.params)
        assert np.allclose(loop.unit_tangent, expected_tangent, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            Loop7(np.zeros((10, 7)))  # too few samples
        with pytest.raises(ValueError):
            Loop7(np.zeros((32, 3)))  # wrong width
        with pytest.raises(ValueError):
            Loop7(np.full((32, 7), np.inf))

    def test_immersion_violation(self):
        samples = np.zeros((32, 7))
        samples[:, 0] = 1.0  # constant loop: zero velocity
        with pytest.raises(ImmersionViolation):
            Loop7(samples)

    def test_fourier_aliasing_guard(self, rng):
        with pytest.raises(ValueError):
            FourierLoopSpec(np.zeros((9, 7)), np.zeros((9, 7)), 16)


class TestReparametrization:
    def test_arclength_params_on_circle_are_identity(self):
        loop = circle_loop(64)
        t = arclength_params(loop)
        assert np.allclose(t, loop.params, atol=1e-12)

    def test_unit_speed_reparam(self, rng):
        spec = random_spec(rng, n=256)
        loop = loop_from_fourier(spec)
        fixed = unit_speed_reparam(loop)
        spread = (fixed.speeds.max() - fixed.speeds.min()) / fixed.speeds.mean()
        assert spread < 1e-8
        assert fixed.length == pytest.approx(loop.length, rel=1e-10)

    def test_resample_field_roundtrip(self, rng):
        spec = random_spec(rng, n=128)
        loop = loop_from_fourier(spec)
        field = random_spec(rng, n=128).evaluate(loop.params)
        back = resample_field(loop, field, loop.params)
        assert np.allclose(back, field, atol=1e-12)


class TestNormalProjection:
    def test_projection_is_pointwise_orthogonal(self, rng):
        loop = loop_from_fourier(random_spec(rng, n=128))
        field = rng.standard_normal((128, 7))
        proj = normal_project(loop, field)
        dots = np.einsum("ni,ni->n", proj, loop.unit_tangent)
        assert np.abs(dots).max() < 1e-12

    def test_projection_idempotent(self, rng):
        loop = loop_from_fourier(random_spec(rng, n=128))
        field = rng.standard_normal((128, 7))
        once = normal_project(loop, field)
        assert np.allclose(normal_project(loop, once), once, atol=1e-12)

    def test_projection_with_metric(self, rng):
        loop = loop_from_fourier(random_spec(rng, n=128))
        metric = np.diag(np.linspace(1.0, 2.0, 7))
        field = rng.standard_normal((128, 7))
        proj = normal_project(loop, field, metric)
        dots = np.einsum("ni,ij,nj->n", proj, metric, loop.unit_tangent)
        assert np.abs(dots).max() < 1e-12


class TestSerialization:
    def test_samples_roundtrip(self, rng):
        loop = loop_from_fourier(random_spec(rng, n=64))
        back = loop_from_json(loop_to_json(loop))
        assert np.allclose(back.samples, loop.samples)

    def test_fourier_roundtrip(self, rng):
        spec = random_spec(rng, n=64)
        loop = loop_from_fourier(spec)
        doc = json.loads(loop_to_json(loop, spec))
        del doc["samples"]
        back = loop_from_json(json.dumps(doc))
        assert np.allclose(back.samples, loop.samples, atol=1e-12)

    def test_malformed_json_rejected(self):
        with pytest.raises(ValueError):
            loop_from_json(json.dumps({"n": 64}))
