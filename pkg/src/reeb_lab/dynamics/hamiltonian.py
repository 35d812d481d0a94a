"""Symplectic forms, Hamiltonians and Hamiltonian vector fields.

Convention: omega(X, .) = -dH.  A 2-form is stored as the matrix W of
omega(v, w) = v^T W w in ambient coordinates, so the defining equation
reads W X = grad H on tangent vectors.  It is solved in an orthonormal
basis E of the tangent space: (E^T W E) xi = E^T grad H, X = E xi.

Models
------
cotangent  T*S^2 minus the zero section inside R^6 = {(x, p)}, with
           omega^theta = sin(theta) dlambda + cos(theta) d(rho alpha),
           rho = |p| and rho alpha = <(p x x)/|p|, dp>.
magnetic   T*S^2 with dlambda - s pi^* sigma_0, s = -cot(theta).
r4         R^4 minus 0 with the symplectisation form d(alpha^theta_eps)
           extended linearly, i.e. the constant matrix M^T - M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import quat
from ..forms import ContactFormSpec, _check_eps, _cross_matrix

MODELS = ("cotangent", "magnetic", "r4")
HAMILTONIANS = ("H", "H0", "F", "H_eps", "K_eps")
SINGULAR_TOL = 1e-10


class DegenerateFormError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SymplecticFormSpec:
    theta: float = np.pi / 2
    model: str = "cotangent"
    form_eps: float = 0.0  # deformation of the r4 model's contact form

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        _check_eps(self.form_eps)

    @classmethod
    def from_strength(cls, s: float, model: str = "cotangent") -> "SymplecticFormSpec":
        """theta in (0, pi) with -cot(theta) = s."""
        return cls(float(np.pi / 2 + np.arctan(s)), model)

    @property
    def strength(self) -> float:
        """Magnetic strength s = -cot(theta); infinite for theta = 0 mod pi."""
        sn = np.sin(self.theta)
        if abs(sn) < 1e-15:
            return float("inf")
        return float(-np.cos(self.theta) / sn)

    @property
    def contact_spec(self) -> ContactFormSpec:
        return ContactFormSpec.from_theta(self.theta, self.form_eps)


@dataclass(frozen=True)
class HamiltonianSpec:
    """tag H is |p|^2/2 on T*S^2; the others live on R^4.

    H_eps = H0 + eps F.  With `theta` set, H_eps is transported by the
    rotor a of that angle: H_eps o l_{conj(a)}.  K_eps is this function at
    theta = pi/2, so K_eps = H0 + 2 eps (x0 y1 + y0 x1).
    """

    tag: str = "H"
    eps: float = 0.0
    theta: float | None = None

    def __post_init__(self):
        if self.tag not in HAMILTONIANS:
            raise ValueError(f"unknown Hamiltonian {self.tag!r}; expected one of {HAMILTONIANS}")
        if not (0.0 <= self.eps < 1.0):
            raise ValueError("eps must lie in [0, 1)")

    @property
    def rotor(self) -> np.ndarray | None:
        if self.tag == "K_eps":
            return quat.theta_rotor(np.pi / 2)
        if self.tag == "H_eps" and self.theta is not None:
            return quat.theta_rotor(self.theta)
        return None

    @property
    def domain(self) -> str:
        return "cotangent" if self.tag == "H" else "r4"


def _h0(p):
    return np.sum(p * p, axis=-1)


def _f(p):
    return p[..., 0] ** 2 + p[..., 1] ** 2 - p[..., 2] ** 2 - p[..., 3] ** 2


def _transport(spec: HamiltonianSpec, p):
    a = spec.rotor
    return p if a is None else quat.mul(quat.conj(a), p)


def energy(spec: HamiltonianSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if spec.tag == "H":
        q = p[..., 3:]
        return 0.5 * np.sum(q * q, axis=-1)
    if spec.tag == "H0":
        return _h0(p)
    if spec.tag == "F":
        return _f(p)
    q = _transport(spec, p)
    return _h0(q) + spec.eps * _f(q)


def gradient(spec: HamiltonianSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if spec.tag == "H":
        return np.concatenate([np.zeros_like(p[..., :3]), p[..., 3:]], axis=-1)
    if spec.tag == "H0":
        return 2.0 * p
    sgn = np.array([1.0, 1.0, -1.0, -1.0])
    if spec.tag == "F":
        return 2.0 * sgn * p
    a = spec.rotor
    la = np.eye(4) if a is None else quat.left_matrix(quat.conj(a))
    q = p @ la.T
    g = 2.0 * q + spec.eps * 2.0 * sgn * q
    return g @ la  # chain rule through q = L p


# --- 2-forms -----------------------------------------------------------------

_DLAMBDA = np.block([[np.zeros((3, 3)), -np.eye(3)], [np.eye(3), np.zeros((3, 3))]])


def _d_rho_alpha(p6: np.ndarray) -> np.ndarray:
    x, p = p6[..., :3], p6[..., 3:]
    rho = np.linalg.norm(p, axis=-1)[..., None, None]
    if np.any(rho < SINGULAR_TOL):
        raise DegenerateFormError("d(rho alpha) is undefined on the zero section")
    b = np.cross(p, x)
    jx = _cross_matrix(p) / rho
    jp = -_cross_matrix(x) / rho - b[..., :, None] * p[..., None, :] / rho**3
    n = p6.shape[:-1]
    jac = np.zeros(n + (6, 6))
    jac[..., 3:, :3] = jx
    jac[..., 3:, 3:] = jp
    return np.swapaxes(jac, -1, -2) - jac


def _sigma0(p6: np.ndarray) -> np.ndarray:
    n = p6.shape[:-1]
    w = np.zeros(n + (6, 6))
    w[..., :3, :3] = -_cross_matrix(p6[..., :3])
    return w


def form_matrix(omega: SymplecticFormSpec, p) -> np.ndarray:
    """W with omega(v, w) = v^T W w at p (constant for the r4 model)."""
    p = np.asarray(p, dtype=float)
    if omega.model == "r4":
        return np.broadcast_to(omega.contact_spec.d_matrix, p.shape[:-1] + (4, 4))
    if omega.model == "magnetic":
        s = omega.strength
        if not np.isfinite(s):
            raise DegenerateFormError("magnetic strength is infinite at theta = 0 mod pi")
        return _DLAMBDA - s * _sigma0(p)
    st, ct = np.sin(omega.theta), np.cos(omega.theta)
    w = st * np.broadcast_to(_DLAMBDA, p.shape[:-1] + (6, 6))
    if abs(ct) > 0.0:
        w = w + ct * _d_rho_alpha(p)
    return w


def tangent_basis(model: str, p) -> np.ndarray:
    """Orthonormal basis of the tangent space, as columns of shape (..., d, m)."""
    p = np.asarray(p, dtype=float)
    if model == "r4":
        return np.broadcast_to(np.eye(4), p.shape[:-1] + (4, 4))
    x, q = p[..., :3], p[..., 3:]
    c = np.zeros(p.shape[:-1] + (2, 6))
    c[..., 0, :3] = x
    c[..., 1, :3] = q
    c[..., 1, 3:] = x
    vh = np.linalg.svd(c, full_matrices=True)[2]
    return np.swapaxes(vh[..., 2:, :], -1, -2)


@dataclass
class FieldSolve:
    field: np.ndarray
    residual: np.ndarray  # max-norm of (E^T W E) xi - E^T grad H
    dh: np.ndarray  # dH(X)
    omega_xx: np.ndarray  # omega(X, X)


def solve_field(omega: SymplecticFormSpec, ham: HamiltonianSpec, p) -> FieldSolve:
    p = np.asarray(p, dtype=float)
    model = "r4" if omega.model == "r4" else "cotangent"
    if ham.domain != model:
        raise ValueError(f"Hamiltonian {ham.tag} does not live on the {omega.model} model")
    w = form_matrix(omega, p)
    e = tangent_basis(model, p)
    g = gradient(ham, p)
    a = np.swapaxes(e, -1, -2) @ w @ e
    rhs = np.einsum("...ji,...j->...i", e, g)
    sv = np.linalg.svd(a, compute_uv=False)
    if np.any(sv[..., -1] <= SINGULAR_TOL * np.maximum(1.0, sv[..., 0])):
        raise DegenerateFormError("omega is degenerate at this point")
    xi = np.linalg.solve(a, rhs[..., None])[..., 0]
    x = np.einsum("...ij,...j->...i", e, xi)
    res = np.max(np.abs(np.einsum("...ij,...j->...i", a, xi) - rhs), axis=-1)
    dh = np.sum(g * x, axis=-1)
    oxx = np.einsum("...i,...ij,...j->...", x, w, x)
    return FieldSolve(x, res, dh, oxx)


def hamiltonian_field(omega: SymplecticFormSpec, ham: HamiltonianSpec, p) -> np.ndarray:
    """X with omega(X, .) = -dH at p; batched over leading axes."""
    return solve_field(omega, ham, p).field


def closed_form_x_eps(eps: float, p) -> np.ndarray:
    """((1+eps)/2)(x0 d_y0 - y0 d_x0) + ((1-eps)/2)(x1 d_y1 - y1 d_x1)."""
    p = np.asarray(p, dtype=float)
    a, b = 0.5 * (1.0 + eps), 0.5 * (1.0 - eps)
    return np.stack([-a * p[..., 1], a * p[..., 0], -b * p[..., 3], b * p[..., 2]], axis=-1)
