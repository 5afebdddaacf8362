"""Discretized closed curves in R^7 and periodic spectral calculus.

A loop is sampled at the uniform parameters t_j = 2*pi*j/N; derivatives are
computed by FFT (exact for trigonometric polynomials) and integrals by the
periodic trapezoid rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ImmersionViolation

MIN_SAMPLES = 16
IMMERSION_FLOOR = 1e-6
TWO_PI = 2.0 * np.pi


def spectral_derivative(values: np.ndarray) -> np.ndarray:
    """d/dt of periodic samples over [0, 2*pi), along axis 0."""
    n = values.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0  # Nyquist mode has no well-defined odd derivative
    spec = np.fft.fft(values, axis=0)
    shape = (n,) + (1,) * (values.ndim - 1)
    out = np.fft.ifft(1j * k.reshape(shape) * spec, axis=0)
    return out.real if np.isrealobj(values) else out


def trig_interpolate(values: np.ndarray, t_new: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of periodic samples at t_new."""
    n = values.shape[0]
    spec = np.fft.fft(values, axis=0) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        # split the Nyquist mode symmetrically so the interpolant stays real
        spec = np.concatenate([spec, spec[n // 2: n // 2 + 1]], axis=0)
        spec[n // 2] *= 0.5
        spec[-1] *= 0.5
        k = np.concatenate([k, [-k[n // 2]]])
        k[n // 2] = abs(k[n // 2])
    phases = np.exp(1j * np.outer(t_new, k))
    out = np.tensordot(phases, spec, axes=(1, 0))
    return out.real if np.isrealobj(values) else out


class Loop7:
    """Closed discretized curve in R^7 with spectral tangent data."""

    def __init__(self, samples: np.ndarray, immersion_floor: float = IMMERSION_FLOOR):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 7:
            raise ValueError("samples must have shape (N, 7)")
        if samples.shape[0] < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError("non-finite loop samples")
        self.samples = samples
        self.n = samples.shape[0]
        self.params = TWO_PI * np.arange(self.n) / self.n
        self.velocity = spectral_derivative(samples)
        self.speeds = np.linalg.norm(self.velocity, axis=1)
        if self.speeds.min() <= immersion_floor:
            raise ImmersionViolation(
                f"minimum speed {self.speeds.min():.3e} at or below floor {immersion_floor:.1e}")
        self.unit_tangent = self.velocity / self.speeds[:, None]

    @property
    def length(self) -> float:
        return float(integrate(self, self.speeds))

    def is_constant_speed(self, rtol: float = 1e-8) -> bool:
        mean = self.speeds.mean()
        return float(self.speeds.max() - self.speeds.min()) < rtol * mean


@dataclass
class FourierLoopSpec:
    """Trigonometric-polynomial loop: coordinate m is
    sum_k cos_coeffs[k, m] cos(k t) + sin_coeffs[k, m] sin(k t), k = 0..K."""

    cos_coeffs: np.ndarray  # (K+1, 7)
    sin_coeffs: np.ndarray  # (K+1, 7)
    n: int

    def __post_init__(self):
        self.cos_coeffs = np.atleast_2d(np.asarray(self.cos_coeffs, dtype=float))
        self.sin_coeffs = np.atleast_2d(np.asarray(self.sin_coeffs, dtype=float))
        if self.cos_coeffs.shape != self.sin_coeffs.shape or self.cos_coeffs.shape[1] != 7:
            raise ValueError("coefficient arrays must both have shape (K+1, 7)")
        k_max = self.cos_coeffs.shape[0] - 1
        if self.n <= 2 * k_max:
            raise ValueError(f"need n > 2K = {2 * k_max} samples to avoid aliasing")

    @property
    def max_mode(self) -> int:
        return self.cos_coeffs.shape[0] - 1

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.arange(self.max_mode + 1)
        c = np.cos(np.outer(t, k))
        s = np.sin(np.outer(t, k))
        return c @ self.cos_coeffs + s @ self.sin_coeffs

    def derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.arange(self.max_mode + 1)
        c = np.cos(np.outer(t, k)) * k
        s = np.sin(np.outer(t, k)) * k
        return c @ self.sin_coeffs - s @ self.cos_coeffs


def loop_from_fourier(spec: FourierLoopSpec) -> Loop7:
    """Sample a trigonometric-polynomial loop at its uniform grid."""
    t = TWO_PI * np.arange(spec.n) / spec.n
    return Loop7(spec.evaluate(t))


def integrate(loop: Loop7, f) -> float:
    """Periodic trapezoid rule: sum f(t_j) * (2*pi/N)."""
    f = np.asarray(f)
    if f.shape[0] != loop.n:
        raise ValueError("integrand length mismatch")
    total = np.sum(f, axis=0) * (TWO_PI / loop.n)
    return float(total) if np.ndim(total) == 0 and not np.iscomplexobj(f) else total


def arclength_params(loop: Loop7) -> np.ndarray:
    """Parameters t(s_j) at which arclength is uniform, via Newton on the
    spectrally integrated speed."""
    n = loop.n
    speed_spec = np.fft.fft(loop.speeds) / n
    mean_speed = speed_spec[0].real
    k = np.fft.fftfreq(n, d=1.0 / n)

    nonzero = k != 0
    km = k[nonzero]
    cm = speed_spec[nonzero]

    def arclength(t):
        # integral of speed from 0 to t of the trig interpolant
        phases = np.exp(1j * np.outer(t, km)) - 1.0
        return mean_speed * t + (phases @ (cm / (1j * km))).real

    def speed_at(t):
        return trig_interpolate(loop.speeds, np.atleast_1d(t))

    total = loop.length
    targets = total * np.arange(n) / n
    t = TWO_PI * np.arange(n) / n  # initial guess: uniform parameter
    for _ in range(60):
        resid = arclength(t) - targets
        t = t - resid / np.maximum(speed_at(t).ravel(), 1e-12)
        if np.max(np.abs(resid)) < 1e-14 * max(total, 1.0):
            break
    return t


def unit_speed_reparam(loop: Loop7) -> Loop7:
    """Resample the loop so its speed is constant (= length / 2*pi)."""
    if loop.is_constant_speed(rtol=1e-12):
        return loop
    t = arclength_params(loop)
    return Loop7(trig_interpolate(loop.samples, t))


def resample_field(loop: Loop7, field: np.ndarray, t_new: np.ndarray) -> np.ndarray:
    """Transport a variation field to a new parameter grid along the same image."""
    field = np.asarray(field)
    if field.shape[0] != loop.n:
        raise ValueError("field length mismatch")
    return trig_interpolate(field, t_new)


def normal_project(loop: Loop7, field: np.ndarray, metric: np.ndarray | None = None) -> np.ndarray:
    """Pointwise projection X - g(X, T) T onto the normal spaces of the loop."""
    field = np.asarray(field)
    if field.shape != (loop.n, 7):
        raise ValueError("field must have shape (N, 7)")
    t_vec = loop.unit_tangent
    if metric is None:
        coef = np.einsum("ni,ni->n", field, t_vec)
    else:
        t_norm = np.sqrt(np.einsum("ni,ij,nj->n", t_vec, metric, t_vec))
        t_vec = t_vec / t_norm[:, None]
        coef = np.einsum("ni,ij,nj->n", field, metric, t_vec)
    return field - coef[:, None] * t_vec


def loop_to_json(loop: Loop7, spec: FourierLoopSpec | None = None) -> str:
    doc = {"n": loop.n, "samples": loop.samples.tolist()}
    if spec is not None:
        doc["fourier"] = {
            "cos": spec.cos_coeffs.tolist(),
            "sin": spec.sin_coeffs.tolist(),
        }
    return json.dumps(doc)


def loop_from_json(text: str) -> Loop7:
    doc = json.loads(text)
    if doc.get("samples") is not None:
        samples = np.asarray(doc["samples"], dtype=float)
        if samples.shape[0] != doc["n"]:
            raise ValueError("sample count disagrees with 'n'")
        return Loop7(samples)
    if doc.get("fourier") is not None:
        spec = FourierLoopSpec(
            cos_coeffs=np.asarray(doc["fourier"]["cos"], dtype=float),
            sin_coeffs=np.asarray(doc["fourier"]["sin"], dtype=float),
            n=int(doc["n"]),
        )
        return loop_from_fourier(spec)
    raise ValueError("loop JSON needs 'samples' or 'fourier'")


def circle_loop(n: int = 256, axes: tuple[int, int] = (0, 1), radius: float = 1.0) -> Loop7:
    """Planar circle fixture in the given coordinate plane."""
    cos = np.zeros((2, 7))
    sin = np.zeros((2, 7))
    cos[1, axes[0]] = radius
    sin[1, axes[1]] = radius
    return loop_from_fourier(FourierLoopSpec(cos, sin, n))
