"""Discretized geometry of the knot space of flat R^7: the almost complex
structure, the symplectic 2-form, the Hermitian metric, chart brackets and
the Nijenhuis tensor.

A chart at a base loop consists of variation fields u normal to the base;
u represents the loop base + u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import G2Structure, cross_field, standard_g2
from .errors import StepOutOfRange
from .loops import Loop7, integrate, normal_project, spectral_derivative

H_MIN, H_MAX = 1e-6, 1e-2

# Global sign s in omega(X, Y) = s * G(I X, Y): measured once on the circle
# fixture (see tests) and frozen here.
OMEGA_METRIC_SIGN = 1.0


def _g2_or_default(g2: G2Structure | None) -> G2Structure:
    return standard_g2() if g2 is None else g2


def acs_apply(loop: Loop7, X: np.ndarray, g2: G2Structure | None = None) -> np.ndarray:
    """Almost complex structure: (I X)(t) = T(t) ⋆ X_N(t)."""
    g2 = _g2_or_default(g2)
    T = _unit_tangent(loop, g2)
    X_N = _metric_normal_project(loop, X, g2)
    return cross_field(g2, T, X_N)


def _unit_tangent(loop: Loop7, g2: G2Structure) -> np.ndarray:
    T = loop.unit_tangent
    norms = np.sqrt(np.einsum("ni,ij,nj->n", T, g2.metric, T))
    return T / norms[:, None]


def _metric_normal_project(loop: Loop7, X: np.ndarray, g2: G2Structure) -> np.ndarray:
    X = np.asarray(X)
    T = _unit_tangent(loop, g2)
    if np.iscomplexobj(X):
        coef = (np.einsum("ni,ij,nj->n", X.real, g2.metric, T)
                + 1j * np.einsum("ni,ij,nj->n", X.imag, g2.metric, T))
    else:
        coef = np.einsum("ni,ij,nj->n", X, g2.metric, T)
    return X - coef[:, None] * T


def omega(loop: Loop7, X: np.ndarray, Y: np.ndarray, g2: G2Structure | None = None):
    """Symplectic form omega(X, Y) = ∫ rho(X(t), Y(t), γ'(t)) dt.

    As a line integral of rho this is invariant under reparametrization, so
    no unit-speed normalization is needed.
    """
    g2 = _g2_or_default(g2)
    vals = np.einsum("ijk,...i,...j,...k->...", g2.rho.tensor(),
                     np.asarray(X), np.asarray(Y), loop.velocity)
    return integrate(loop, vals)


def hermitian_metric(loop: Loop7, X: np.ndarray, Y: np.ndarray,
                     g2: G2Structure | None = None):
    """Hermitian metric G(X, Y) = ∫ g(X_N, Y_N) |γ'| dt (arclength integral).

    The speed weight makes G reparametrization invariant and equal to the
    constant-speed-chart value ∫ g(X_N, Y_N) dt up to the fixed speed factor.
    """
    g2 = _g2_or_default(g2)
    X_N = _metric_normal_project(loop, X, g2)
    Y_N = _metric_normal_project(loop, Y, g2)
    speeds = np.sqrt(np.einsum("ni,ij,nj->n", loop.velocity, g2.metric, loop.velocity))
    vals = np.einsum("ni,ij,nj->n", X_N, g2.metric, Y_N) * speeds
    return integrate(loop, vals)


@dataclass
class KnotChart:
    """Normal-bundle chart of the knot space at a constant-speed base loop."""

    base: Loop7
    g2: G2Structure | None = None

    def __post_init__(self):
        self.g2 = _g2_or_default(self.g2)

    def loop_at(self, u: np.ndarray) -> Loop7:
        return Loop7(self.base.samples + np.asarray(u, dtype=float))

    def project(self, u: np.ndarray) -> np.ndarray:
        return normal_project(self.base, u)

    def to_chart_tangent(self, loop: Loop7, W: np.ndarray) -> np.ndarray:
        """Quotient identification: shift W along the loop tangent so it is
        pointwise normal to the base (tangential shifts are reparametrizations).
        """
        g2 = self.g2
        tau = _unit_tangent(loop, g2)
        T_b = _unit_tangent(self.base, g2)
        num = np.einsum("ni,ij,nj->n", np.asarray(W).real, g2.metric, T_b)
        if np.iscomplexobj(W):
            num = num + 1j * np.einsum("ni,ij,nj->n", np.asarray(W).imag, g2.metric, T_b)
        den = np.einsum("ni,ij,nj->n", tau, g2.metric, T_b)
        return W - (num / den)[:, None] * tau

    def acs(self, u: np.ndarray, X: np.ndarray) -> np.ndarray:
        """The almost complex structure in chart coordinates at the point u.

        Applies the pointwise cross-product structure at the loop base + u and
        maps the result back to a base-normal chart tangent; satisfies
        acs(u, acs(u, X)) = -X exactly on chart tangents.
        """
        loop = self.loop_at(u)
        return self.to_chart_tangent(loop, acs_apply(loop, X, self.g2))


def _check_step(h: float):
    if not H_MIN <= h <= H_MAX:
        raise StepOutOfRange(f"step {h} outside [{H_MIN}, {H_MAX}]")


def _directional(chart: KnotChart, field_map, u: np.ndarray,
                 direction: np.ndarray, h: float) -> np.ndarray:
    """Centered difference of a chart field map along a possibly complex direction."""
    def real_directional(d: np.ndarray) -> np.ndarray:
        scale = np.abs(d).max()
        if scale == 0.0:
            return np.zeros_like(np.asarray(field_map(u)))
        step = h / scale
        return (np.asarray(field_map(u + step * d)) -
                np.asarray(field_map(u - step * d))) / (2.0 * step)

    direction = np.asarray(direction)
    if np.iscomplexobj(direction):
        return real_directional(direction.real) + 1j * real_directional(direction.imag)
    return real_directional(direction)


def chart_bracket(chart: KnotChart, A, B, u: np.ndarray, h: float) -> np.ndarray:
    """Commutator [A, B](u) of two chart field maps by centered differences."""
    _check_step(h)
    u = np.asarray(u, dtype=float)
    a_val = np.asarray(A(u))
    b_val = np.asarray(B(u))
    return (_directional(chart, B, u, a_val, h)
            - _directional(chart, A, u, b_val, h))


def nijenhuis(chart: KnotChart, X: np.ndarray, Y: np.ndarray, h: float) -> np.ndarray:
    """Nijenhuis tensor N(X, Y) = [X,Y] + I[IX,Y] + I[X,IY] - [IX,IY] at u = 0
    for chart-constant normal fields X, Y; [X,Y] = 0 by construction.
    """
    _check_step(h)
    X = chart.project(np.asarray(X, dtype=float))
    Y = chart.project(np.asarray(Y, dtype=float))
    zero = np.zeros_like(X)

    I_at = chart.acs
    IX0 = I_at(zero, X)
    IY0 = I_at(zero, Y)
    # [IX, Y] = -d/de I_{u=eY}(X); [X, IY] = +d/de I_{u=eX}(Y)
    d_IX_along_Y = _directional(chart, lambda u: I_at(u, X), zero, Y, h)
    d_IY_along_X = _directional(chart, lambda u: I_at(u, Y), zero, X, h)
    d_IY_along_IX = _directional(chart, lambda u: I_at(u, Y), zero, IX0, h)
    d_IX_along_IY = _directional(chart, lambda u: I_at(u, X), zero, IY0, h)
    bracket_IX_Y = -d_IX_along_Y
    bracket_X_IY = d_IY_along_X
    bracket_IX_IY = d_IY_along_IX - d_IX_along_IY
    result = I_at(zero, bracket_IX_Y) + I_at(zero, bracket_X_IY) - bracket_IX_IY
    return result


def d_omega(chart: KnotChart, X: np.ndarray, Y: np.ndarray, Z: np.ndarray) -> float:
    """Exterior derivative of omega on chart-constant fields, via the exact
    linearity of u -> omega_{base+u}: X·omega(Y,Z) = ∫ rho(Y, Z, X') dt.
    """
    g2 = chart.g2
    rho_t = g2.rho.tensor()
    base = chart.base

    def term(A, B, C):
        dC = spectral_derivative(np.asarray(C, dtype=float))
        vals = np.einsum("ijk,ni,nj,nk->n", rho_t, np.asarray(A, dtype=float),
                         np.asarray(B, dtype=float), dC)
        return integrate(base, vals)

    return term(Y, Z, X) - term(X, Z, Y) + term(X, Y, Z)


def d_omega_fd(chart: KnotChart, X: np.ndarray, Y: np.ndarray, Z: np.ndarray,
               h: float) -> float:
    """Finite-difference route for d_omega, used as the independent oracle."""
    _check_step(h)
    g2 = chart.g2

    def om_at(u, A, B):
        return omega(chart.loop_at(u), A, B, g2)

    zero = np.zeros((chart.base.n, 7))

    def deriv(direction, A, B):
        d = np.asarray(direction, dtype=float)
        scale = np.abs(d).max()
        if scale == 0.0:
            return 0.0
        step = h / scale
        return (om_at(step * d, A, B) - om_at(-step * d, A, B)) / (2.0 * step)

    return deriv(X, Y, Z) - deriv(Y, X, Z) + deriv(Z, X, Y)
