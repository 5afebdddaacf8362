"""Lifts of knots into the unit tangent sphere bundle S^6 x R^7 over flat R^7,
the splitting of lifted tangents, the complex 3-form on lifted knot spaces,
the 4-form pairing with its exterior derivative, and the Cartan bracket check.

The sphere-bundle point over a knot point is the unit tangent v = T(t); the
canonical lift of a knot uses its own unit tangent ("tangent lift" below).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import G2Structure, standard_g2
from .errors import StepOutOfRange
from .knots import H_MIN, H_MAX, KnotChart, chart_bracket
from .loops import Loop7, integrate, spectral_derivative, unit_speed_reparam

UNIT_SPHERE_TOL = 1e-12


def _g2_or_default(g2: G2Structure | None) -> G2Structure:
    return standard_g2() if g2 is None else g2


@dataclass
class LKnotLift:
    """A knot lifted into S^6 x R^7 by its own unit tangent.

    base is constant speed; sphere_curve[j] = T(t_j) is a unit vector equal to
    the base unit tangent at every sample.
    """

    base: Loop7
    sphere_curve: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.sphere_curve, dtype=float)
        if v.shape != (self.base.n, 7):
            raise ValueError("sphere curve must have shape (N, 7)")
        norms = np.linalg.norm(v, axis=1)
        if np.abs(norms - 1.0).max() > UNIT_SPHERE_TOL:
            raise ValueError("sphere curve is not pointwise unit")
        if np.abs(v - self.base.unit_tangent).max() > 1e-8:
            raise ValueError("sphere curve must equal the base unit tangent")
        self.sphere_curve = v

    @property
    def speed(self) -> float:
        return float(self.base.speeds.mean())


@dataclass
class SplitTangent:
    """Tangent vector to the lifted knot space, split into the sphere-fiber
    (vertical) component, pointwise orthogonal to v, and the R^7 (horizontal)
    component."""

    vertical: np.ndarray
    horizontal: np.ndarray

    def __post_init__(self):
        self.vertical = np.asarray(self.vertical)
        self.horizontal = np.asarray(self.horizontal)
        if self.vertical.shape != self.horizontal.shape:
            raise ValueError("vertical/horizontal shape mismatch")


def lknot_lift(loop: Loop7) -> LKnotLift:
    """Lift a knot by its unit tangent, after constant-speed resampling."""
    loop = unit_speed_reparam(loop)
    return LKnotLift(base=loop, sphere_curve=loop.unit_tangent.copy())


def _project_off(v: np.ndarray, F: np.ndarray) -> np.ndarray:
    coef = np.einsum("ni,ni->n", F.real, v)
    out = F - coef[:, None] * v
    if np.iscomplexobj(F):
        out = out - 1j * np.einsum("ni,ni->n", F.imag, v)[:, None] * v
    return out


def lift_tangent(lift: LKnotLift, X1: np.ndarray) -> SplitTangent:
    """Split the lift of a normal variation field X1 of the base knot.

    The deformed loop gamma + eps*X1 (at fixed parametrization) has unit
    tangent v + eps*P(X1')/c, so the vertical component is the projection of
    X1'/c onto v-perp and the horizontal component is X1 itself.  Matches the
    finite-difference oracle lift_tangent_fd to O(eps^2).
    """
    X1 = np.asarray(X1)
    v = lift.sphere_curve
    dX = spectral_derivative(X1)
    vertical = _project_off(v, dX) / lift.speed
    return SplitTangent(vertical=vertical, horizontal=X1)


def lift_tangent_fd(lift: LKnotLift, X1: np.ndarray, eps: float = 1e-5) -> SplitTangent:
    """Independent oracle for lift_tangent: finite difference of the deformed
    loop's unit tangent at fixed parametrization."""
    X1 = np.asarray(X1, dtype=float)
    vp = Loop7(lift.base.samples + eps * X1).unit_tangent
    vm = Loop7(lift.base.samples - eps * X1).unit_tangent
    return SplitTangent(vertical=(vp - vm) / (2.0 * eps), horizontal=X1)


def covariant_split(lift: LKnotLift, X1: np.ndarray) -> SplitTangent:
    """Covariant-derivative splitting (-X1'/c, X1) of a lifted field.

    The fiber component is the unprojected parameter derivative; it is the
    splitting for which the 4-form integrand below telescopes into a total
    t-derivative.  It differs from lift_tangent by the component of X1'/c
    along v, which is generically of order one.
    """
    X1 = np.asarray(X1)
    return SplitTangent(vertical=-spectral_derivative(X1) / lift.speed, horizontal=X1)


def omega3_integrand(g2: G2Structure, v: np.ndarray, A: np.ndarray,
                     B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Pointwise values rho(A,B,C) - i rho*(v,A,B,C) on (N,7) argument arrays."""
    re = np.einsum("ijk,ni,nj,nk->n", g2.rho.tensor(), A, B, C)
    im = -np.einsum("ijkl,ni,nj,nk,nl->n", g2.rho_star.tensor(), v, A, B, C)
    return re + 1j * im


def omega3_eval(lift: LKnotLift, A: SplitTangent, B: SplitTangent,
                C: SplitTangent, g2: G2Structure | None = None) -> complex:
    """The complex 3-form on the lifted knot space.

    Evaluates ∫ [rho(A_h,B_h,C_h) - i rho*(v,A_h,B_h,C_h)] dt on the
    horizontal parts; vertical parts do not contribute.  The sign of the
    imaginary part is fixed so the form has type (3,0): replacing A_h by
    J_v A_h multiplies the value by i.
    """
    g2 = _g2_or_default(g2)
    vals = omega3_integrand(g2, lift.sphere_curve, np.asarray(A.horizontal),
                            np.asarray(B.horizontal), np.asarray(C.horizontal))
    return complex(integrate(lift.base, vals))


def xi_eval(g2: G2Structure, v: np.ndarray, W1: SplitTangent, W2: SplitTangent,
            W3: SplitTangent, W4: SplitTangent) -> np.ndarray:
    """Pointwise 4-form pairing d(complex 3-form) with the tangent splitting.

    For each argument the fiber slot contributes -rho*(W_a^ver, ., ., .) as a
    3-form, evaluated on the horizontal parts of the other three arguments,
    alternated over the four arguments.  Returns the (N,) array of pointwise
    values; vanishes whenever two or more arguments are purely vertical or
    all four are horizontal.
    """
    rhos = g2.rho_star.tensor()
    args = [W1, W2, W3, W4]
    n = np.asarray(W1.horizontal).shape[0]
    vals = np.zeros(n, dtype=complex)
    for a in range(4):
        others = [args[b] for b in range(4) if b != a]
        q = -np.einsum("ijkl,ni->njkl", rhos, np.asarray(args[a].vertical))
        term = np.einsum("njkl,nj,nk,nl->n", q,
                         np.asarray(others[0].horizontal),
                         np.asarray(others[1].horizontal),
                         np.asarray(others[2].horizontal))
        vals = vals + (-1) ** a * term
    if all(not np.iscomplexobj(w.vertical) and not np.iscomplexobj(w.horizontal)
           for w in args):
        return vals.real
    return vals


def xi_tilde(lift: LKnotLift, X1, X2, X3, X4,
             g2: G2Structure | None = None) -> float:
    """Integral of the 4-form pairing over the tangent-lifted knot.

    Uses the covariant splitting (-X'/c, X), for which the integrand is the
    total derivative -(1/c) d/dt rho*(X1,...,X4) and the integral vanishes to
    quadrature accuracy.  With the orthogonally projected vertical of
    lift_tangent the integral is generically of order one; see the twistor
    tests for the measured gap.
    """
    g2 = _g2_or_default(g2)
    ws = [covariant_split(lift, np.asarray(X, dtype=float)) for X in (X1, X2, X3, X4)]
    vals = xi_eval(g2, lift.sphere_curve, *ws)
    return float(integrate(lift.base, vals))


def _check_step(h: float):
    if not H_MIN <= h <= H_MAX:
        raise StepOutOfRange(f"step {h} outside [{H_MIN}, {H_MAX}]")


def _complex_normal(chart: KnotChart, field: np.ndarray) -> np.ndarray:
    field = np.asarray(field)
    re = chart.project(field.real.astype(float))
    if np.iscomplexobj(field):
        return re + 1j * chart.project(field.imag.astype(float))
    return re.astype(complex)


def cartan_check(lift: LKnotLift, X, Y, Z, T, h: float,
                 g2: G2Structure | None = None) -> complex:
    """Cartan pairing Omega((1,0)-fields; bracket of (0,1)-fields).

    Builds type-preserving chart extensions X(u) = (1 - i I_u) x / 2 and
    Z(u) = (1 + i I_u) z / 2 from the real parts of the inputs, computes the
    chart bracket [Z, T], lifts everything and returns Omega(X, Y, [Z, T]).
    The magnitude measures the integrability obstruction of the knot-space
    almost complex structure and tracks the Nijenhuis residual.
    """
    _check_step(h)
    g2 = _g2_or_default(g2)
    chart = KnotChart(lift.base, g2)
    zero = np.zeros((lift.base.n, 7))

    def acs_c(u, F):
        F = np.asarray(F)
        out = chart.acs(u, F.real.astype(float)).astype(complex)
        if np.iscomplexobj(F):
            out = out + 1j * chart.acs(u, F.imag.astype(float))
        return out

    def type_field(seed_field, sign):
        seed_c = _complex_normal(chart, seed_field)

        def field_map(u):
            return 0.5 * (seed_c + sign * 1j * acs_c(u, seed_c))
        return field_map

    x_map = type_field(X, -1.0)
    y_map = type_field(Y, -1.0)
    z_map = type_field(Z, +1.0)
    t_map = type_field(T, +1.0)
    bracket = chart_bracket(chart, z_map, t_map, zero, h)
    args = [x_map(zero), y_map(zero), bracket]
    lifted = []
    for F in args:
        re = lift_tangent(lift, F.real)
        im = lift_tangent(lift, F.imag)
        lifted.append(SplitTangent(vertical=re.vertical + 1j * im.vertical,
                                   horizontal=re.horizontal + 1j * im.horizontal))
    return omega3_eval(lift, *lifted, g2=g2)


def d_omega3_vs_xi(lift: LKnotLift, W1: SplitTangent, W2: SplitTangent,
                   W3: SplitTangent, W4: SplitTangent, h: float,
                   g2: G2Structure | None = None) -> tuple[complex, complex]:
    """Compare the finite-difference exterior derivative of the complex 3-form
    with i times the integrated 4-form pairing, on four chart-constant split
    fields over the sphere-bundle chart (fiber and base displaced
    independently, fiber points renormalized to the unit sphere).
    """
    _check_step(h)
    g2 = _g2_or_default(g2)
    base_v = lift.sphere_curve
    args = [W1, W2, W3, W4]

    def omega_at(dv, A, B, C):
        v = base_v + dv
        v = v / np.linalg.norm(v, axis=1)[:, None]
        vals = omega3_integrand(g2, v, np.asarray(A.horizontal),
                                np.asarray(B.horizontal), np.asarray(C.horizontal))
        return complex(integrate(lift.base, vals))

    lhs = 0.0 + 0.0j
    for a in range(4):
        rest = [args[b] for b in range(4) if b != a]
        d = np.asarray(args[a].vertical)

        def deriv(dr):
            scale = np.abs(dr).max()
            if scale == 0.0:
                return 0.0 + 0.0j
            step = h / scale
            return (omega_at(step * dr, *rest) - omega_at(-step * dr, *rest)) / (2.0 * step)

        if np.iscomplexobj(d):
            val = deriv(d.real) + 1j * deriv(d.imag)
        else:
            val = deriv(d)
        lhs += (-1) ** a * val
    rhs = 1j * integrate(lift.base, xi_eval(g2, base_v, *args))
    return lhs, complex(rhs)
