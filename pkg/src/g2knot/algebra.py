"""The G2 structure on R^7: metric from a 3-form, cross product, octonions,
the pointwise complex structures J_v, the SU(3) volume form, the 7+14 split
of 2-forms, and associativity of 3-planes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateForm, DegenerateSpan, NonUnitAxis
from .forms import DIM, AltForm, basis_form, contract, hodge_star, multi_indices, wedge

UNIT_AXIS_TOL = 1e-12


def standard_phi() -> AltForm:
    """The reference G2 3-form
    phi0 = e123 + e145 + e167 + e246 - e257 - e347 - e356  (1-based indices).
    """
    return AltForm.from_terms(3, {
        (0, 1, 2): 1.0,
        (0, 3, 4): 1.0,
        (0, 5, 6): 1.0,
        (1, 3, 5): 1.0,
        (1, 4, 6): -1.0,
        (2, 3, 6): -1.0,
        (2, 4, 5): -1.0,
    })


@dataclass(frozen=True)
class G2Structure:
    """A non-degenerate 3-form with its induced metric, volume and 4-form."""

    rho: AltForm
    metric: np.ndarray          # 7x7 symmetric positive definite
    vol_coeff: float            # volume form = vol_coeff * e^{1...7}
    rho_star: AltForm           # *rho under (metric, vol)
    metric_inv: np.ndarray = field(init=False, repr=False)
    cross_tensor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "metric_inv", np.linalg.inv(self.metric))
        # (x*y)^k = g^{kl} rho_{ijl} x^i y^j
        ct = np.tensordot(self.rho.tensor(), self.metric_inv, axes=([2], [0]))
        object.__setattr__(self, "cross_tensor", ct)

    @property
    def vol(self) -> AltForm:
        return AltForm(DIM, np.array([self.vol_coeff]))

    def inner(self, x, y) -> float:
        return float(np.asarray(x) @ self.metric @ np.asarray(y))

    def vnorm(self, x) -> float:
        return math.sqrt(max(self.inner(x, x), 0.0))


def metric_from_three_form(rho: AltForm) -> G2Structure:
    """Recover the metric, volume and 4-form from a non-degenerate 3-form.

    b(x,y) vol0 = (1/6) (rho ⌟ x) ∧ (rho ⌟ y) ∧ rho with vol0 = e^{1...7};
    then vol = |det b|^{1/9} vol0 and g = (sign-fixed b) / |det b|^{1/9}.
    Raises DegenerateForm for degenerate or split forms.
    """
    if rho.degree != 3:
        raise ValueError("expected a 3-form")
    contractions = [contract(rho, np.eye(DIM)[i]) for i in range(DIM)]
    b = np.empty((DIM, DIM))
    for i in range(DIM):
        for j in range(i, DIM):
            b[i, j] = b[j, i] = wedge(wedge(contractions[i], contractions[j]), rho).coeffs[0]
    b /= 6.0
    eigvals = np.linalg.eigvalsh(b)
    scale_ref = np.max(np.abs(eigvals))
    if scale_ref == 0.0 or np.min(np.abs(eigvals)) < 1e-12 * scale_ref:
        raise DegenerateForm("contraction pairing is rank deficient")
    sign = 1.0 if np.all(eigvals > 0) else (-1.0 if np.all(eigvals < 0) else 0.0)
    if sign == 0.0:
        raise DegenerateForm("split 3-form: contraction pairing is indefinite")
    det = float(np.linalg.det(b))
    scale = abs(det) ** (1.0 / 9.0)
    metric = sign * b / scale
    vol_coeff = scale
    rho_star = hodge_star(rho, metric, vol_coeff)
    return G2Structure(rho=rho, metric=metric, vol_coeff=vol_coeff, rho_star=rho_star)


@lru_cache(maxsize=1)
def standard_g2() -> G2Structure:
    """The flat G2 structure induced by standard_phi (identity metric)."""
    return metric_from_three_form(standard_phi())


def cross(g2: G2Structure, x, y) -> np.ndarray:
    """Vector product x ⋆ y = rho(x, y, ·)^sharp."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.einsum("ijk,i,j->k", g2.cross_tensor, x, y)


def cross_field(g2: G2Structure, X, Y) -> np.ndarray:
    """Pointwise vector product for (N,7) arrays of vectors; complex-linear."""
    return np.einsum("ijk,...i,...j->...k", g2.cross_tensor, X, Y)


@dataclass(frozen=True)
class Octonion:
    """Octonion as imaginary part in R^7 plus a real part."""

    imag: np.ndarray
    real: float

    def __post_init__(self):
        object.__setattr__(self, "imag", np.asarray(self.imag, dtype=float))

    def norm(self) -> float:
        return math.sqrt(float(self.imag @ self.imag) + self.real ** 2)


def octonion_mul(a: Octonion, b: Octonion, g2: G2Structure) -> Octonion:
    """(x,t)(y,t') = (t y + t' x + x ⋆ y, t t' - g(x,y)).

    The scalar part carries -g(x,y); only this sign yields a composition
    algebra (|ab| = |a||b|).
    """
    imag = a.real * b.imag + b.real * a.imag + cross(g2, a.imag, b.imag)
    real = a.real * b.real - g2.inner(a.imag, b.imag)
    return Octonion(imag=imag, real=real)


def complex_structure_apply(g2: G2Structure, v, x) -> np.ndarray:
    """J_v(x) = v ⋆ (x - g(x,v) v) for a unit axis v."""
    v = np.asarray(v, dtype=float)
    if abs(g2.vnorm(v) - 1.0) > UNIT_AXIS_TOL:
        raise NonUnitAxis(f"|v| = {g2.vnorm(v)!r} is not 1 within {UNIT_AXIS_TOL}")
    x = np.asarray(x, dtype=float)
    return cross(g2, v, x - g2.inner(x, v) * v)


class Su3VolumeForm:
    """The complex (3,0) volume form on v^perp for a unit axis v.

    Omega_v(a,b,c) = rho(a',b',c') - i rho*(v,a',b',c') on projections a',b',c'
    to v^perp.  The sign of the imaginary part is fixed so that
    Omega_v(J_v a, b, c) = i Omega_v(a,b,c).
    """

    def __init__(self, g2: G2Structure, v):
        v = np.asarray(v, dtype=float)
        if abs(g2.vnorm(v) - 1.0) > UNIT_AXIS_TOL:
            raise NonUnitAxis(f"|v| = {g2.vnorm(v)!r} is not 1 within {UNIT_AXIS_TOL}")
        self.g2 = g2
        self.v = v
        self.imag_part = -1.0 * contract(g2.rho_star, v)

    def _project(self, x):
        x = np.asarray(x, dtype=complex)
        coef = (x.real @ self.g2.metric @ self.v) + 1j * (x.imag @ self.g2.metric @ self.v)
        return x - coef * self.v

    def __call__(self, a, b, c) -> complex:
        a, b, c = self._project(a), self._project(b), self._project(c)
        re_t = self.g2.rho.tensor()
        im_t = self.imag_part.tensor()
        val_re = np.einsum("ijk,i,j,k->", re_t, a, b, c)
        val_im = np.einsum("ijk,i,j,k->", im_t, a, b, c)
        return complex(val_re + 1j * val_im)


def su3_volume_form(g2: G2Structure, v) -> Su3VolumeForm:
    """Holomorphic volume form on v^perp; see Su3VolumeForm."""
    return Su3VolumeForm(g2, v)


def two_form_operator_matrix(g2: G2Structure) -> np.ndarray:
    """Matrix of L(beta) = *(rho ∧ beta) on the 21 basis 2-forms."""
    n = math.comb(DIM, 2)
    mat = np.empty((n, n))
    for col, idx in enumerate(multi_indices(2)):
        image = hodge_star(wedge(g2.rho, basis_form(2, idx)), g2.metric, g2.vol_coeff)
        mat[:, col] = image.coeffs
    return mat


def two_form_decompose(g2: G2Structure, beta: AltForm) -> tuple[AltForm, AltForm]:
    """Split a 2-form into its Lambda^2_7 and Lambda^2_14 components.

    Spectral projection of L = *(rho ∧ ·), which has eigenvalues 2 on the
    7-dimensional part and -1 on the 14-dimensional part.
    """
    if beta.degree != 2:
        raise ValueError("expected a 2-form")
    L = two_form_operator_matrix(g2)
    c = beta.coeffs
    beta7 = AltForm(2, (L @ c + c) / 3.0)
    beta14 = AltForm(2, (2.0 * c - L @ c) / 3.0)
    return beta7, beta14


def hermitian_trace_vector(g2: G2Structure, beta: AltForm) -> np.ndarray:
    """The covector tau with tau · v = (1/2) sum_i beta(e_i, J_v e_i).

    For each unit axis v this is the trace of beta against the Kaehler form of
    J_v on v^perp.  tau = 0 exactly on Lambda^2_14, and tau is proportional to
    x for beta = rho(x, ., .), so tau detects the Lambda^2_7 component
    pointwise along any family of axes.
    """
    if beta.degree != 2:
        raise ValueError("expected a 2-form")
    return 0.5 * np.einsum("kij,ij->k", g2.cross_tensor, beta.tensor())


def skew_endomorphism(g2: G2Structure, beta: AltForm) -> np.ndarray:
    """The endomorphism A with g(A x, y) = beta(x, y)."""
    return g2.metric_inv @ beta.tensor()


def lie_action_on_rho(g2: G2Structure, beta: AltForm) -> AltForm:
    """Action of the skew endomorphism of beta on rho as a Lie-algebra element.

    Vanishes exactly when beta lies in Lambda^2_14 (the g2 subalgebra).
    """
    A = skew_endomorphism(g2, beta)
    t = g2.rho.tensor()
    acted = (np.einsum("il,ljk->ijk", A, t)
             + np.einsum("jl,ilk->ijk", A, t)
             + np.einsum("kl,ijl->ijk", A, t))
    out = AltForm(3)
    for pos, idx in enumerate(multi_indices(3)):
        out.coeffs[pos] = acted[idx]
    return out


def is_associative(g2: G2Structure, u, v, w, tol: float = 1e-8) -> tuple[bool, float]:
    """Test whether span(u,v,w) is an associative 3-plane.

    Returns (flag, calibration) where calibration = rho on the orthonormalized
    triple and flag is True when the plane is closed under the vector product.
    """
    vecs = [np.asarray(u, dtype=float), np.asarray(v, dtype=float), np.asarray(w, dtype=float)]
    gram = np.array([[g2.inner(a, b) for b in vecs] for a in vecs])
    if np.linalg.det(gram) < 1e-12:
        raise DegenerateSpan("vectors do not span a 3-plane")
    # Gram-Schmidt in the g metric, preserving order/orientation
    ortho = []
    for a in vecs:
        for e in ortho:
            a = a - g2.inner(a, e) * e
        ortho.append(a / g2.vnorm(a))
    u1, v1, w1 = ortho
    calibration = float(np.einsum("ijk,i,j,k->", g2.rho.tensor(), u1, v1, w1))
    p = cross(g2, u1, v1)
    residual = p - sum(g2.inner(p, e) * e for e in ortho)
    flag = g2.vnorm(residual) < tol
    return flag, calibration
