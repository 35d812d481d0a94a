"""Contact forms on S^3 and the structure forms on ST*S^2.

Every 1-form here has coefficients that are polynomial in the ambient
coordinates, so exterior derivatives are evaluated in closed form:

    a = sum_j a_j(p) dp_j,   Jac[j, i] = d a_j / d p_i,
    da(v, w) = v^T (Jac^T - Jac) w.

On S^3 all forms in the family are linear, a_u = M u, hence

    alpha(u)(v) = (M u) . v,     d alpha(v, w) = v^T (M^T - M) w.

The family member alpha^theta_eps is the push-forward of the deformed form
alpha_{i,eps} under left multiplication by a rotor a with a i conj(a) = c.
Left multiplication by exp(i phi) preserves alpha_{i,eps}, so the result
depends on the axis c only.

On ST*S^2 = {(x, y) : |x| = |y| = 1, <x, y> = 0} in R^6:

    lambda_1 = <y, dx>,   lambda_2 = <x cross y, dx>,   alpha = s <x cross y, dy>

with the sign s = CONNECTION_SIGN = -1, fixed by `calibrate_connection_sign`
against the structure equations
dlambda_1 = lambda_2 ^ alpha, dlambda_2 = alpha ^ lambda_1, dalpha = lambda_1 ^ lambda_2.
With that sign alpha evaluates to +1 on the positively oriented unit fibre
rotation y' = y cross x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import quat

EPS_MAX = 0.99
TANGENCY_TOL = 1e-12

CONNECTION_SIGN = -1.0


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 <= eps <= EPS_MAX):
        raise ValueError(f"deformation eps must lie in [0, {EPS_MAX}], got {eps}")
    return eps


@dataclass(frozen=True)
class ContactFormSpec:
    """alpha_c deformed by eps; eps = 0 gives the undeformed alpha_c."""

    axis: tuple = (1.0, 0.0, 0.0)
    eps: float = 0.0
    theta: float | None = None

    def __post_init__(self):
        c = np.asarray(self.axis, dtype=float)
        if c.shape != (3,) or abs(np.linalg.norm(c) - 1.0) > quat.UNIT_TOL:
            raise ValueError("axis must be a unit vector of R^3")
        object.__setattr__(self, "axis", tuple(float(t) for t in c))
        object.__setattr__(self, "eps", _check_eps(self.eps))

    @classmethod
    def from_theta(cls, theta: float, eps: float = 0.0) -> "ContactFormSpec":
        return cls(tuple(quat.theta_axis(theta)), eps, float(theta))

    @property
    def c(self) -> np.ndarray:
        return np.array(self.axis)

    @property
    def rotor(self) -> np.ndarray:
        if self.theta is not None:
            return quat.theta_rotor(self.theta)
        return quat.rotor_to(self.c)

    @property
    def base_matrix(self) -> np.ndarray:
        """M for alpha_{i,eps} in (x0, y0, x1, y1) coordinates."""
        e = self.eps
        p, q = 2.0 / (1.0 + e), 2.0 / (1.0 - e)
        m = np.zeros((4, 4))
        m[0, 1], m[1, 0] = -p, p
        m[2, 3], m[3, 2] = -q, q
        return m

    @property
    def base_reeb_matrix(self) -> np.ndarray:
        e = self.eps
        p, q = (1.0 + e) / 2.0, (1.0 - e) / 2.0
        z = np.zeros((4, 4))
        z[0, 1], z[1, 0] = -p, p
        z[2, 3], z[3, 2] = -q, q
        return z

    @property
    def matrix(self) -> np.ndarray:
        """alpha_u(v) = (M u) . v."""
        la = quat.left_matrix(self.rotor)
        return la @ self.base_matrix @ la.T

    @property
    def reeb_matrix(self) -> np.ndarray:
        """R(u) = Z u (a linear vector field on R^4 tangent to S^3)."""
        la = quat.left_matrix(self.rotor)
        return la @ self.base_reeb_matrix @ la.T

    @property
    def d_matrix(self) -> np.ndarray:
        """d alpha(v, w) = v^T W w.  Also the symplectisation form on R^4 minus 0."""
        m = self.matrix
        return m.T - m


@dataclass
class S3Tangent:
    """Tangent vectors v at base points u of S^3; both may be batched (..., 4)."""

    base: np.ndarray
    vec: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.base = quat.as_array(self.base)
        self.vec = quat.as_array(self.vec)
        if self.check:
            bad = np.abs(np.sum(self.base * self.vec, axis=-1))
            if np.any(bad > TANGENCY_TOL * np.maximum(1.0, np.linalg.norm(self.vec, axis=-1))):
                raise ValueError("vector is not tangent to S^3 at its base point")


def tangent_project_s3(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return v - np.sum(u * v, axis=-1, keepdims=True) * u


def random_s3_tangents(rng: np.random.Generator, n: int, count: int = 1):
    """Base points u and `count` tangent vectors at each."""
    u = quat.random_unit(rng, n)
    vs = [tangent_project_s3(u, rng.normal(size=(n, 4))) for _ in range(count)]
    return u, vs


def alpha_eval(spec: ContactFormSpec, t: S3Tangent) -> np.ndarray:
    return np.einsum("...i,...i->...", t.base @ spec.matrix.T, t.vec)


def reeb(spec: ContactFormSpec, u) -> S3Tangent:
    u = quat.as_array(u)
    return S3Tangent(u, u @ spec.reeb_matrix.T, check=False)


def d_alpha_eval(spec: ContactFormSpec, u, v: S3Tangent, w: S3Tangent) -> np.ndarray:
    u = quat.as_array(u)
    for t in (v, w):
        if t.base.shape != u.shape or np.max(np.abs(t.base - u), initial=0.0) > 0.0:
            raise ValueError("tangent vectors must share the base point u")
    return np.einsum("...i,ij,...j->...", v.vec, spec.d_matrix, w.vec)


def quaternionic_alpha(c, u, v) -> np.ndarray:
    """alpha_c(u)(v) = -2 <u, c v>, straight from quaternion products."""
    cv = quat.mul(quat.as_array(c), quat.as_array(v))
    return -2.0 * quat.inner(u, cv)


def wedge(a: np.ndarray, b: np.ndarray, a_w: np.ndarray, b_w: np.ndarray) -> np.ndarray:
    """(A ^ B)(v, w) given A(v) = a, B(v) = b, A(w) = a_w, B(w) = b_w."""
    return a * b_w - a_w * b


# --- structure forms on ST*S^2 ---------------------------------------------

@dataclass
class STPoint:
    x: np.ndarray
    y: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.check:
            r = st_point_residual(self.x, self.y)
            if np.any(r > TANGENCY_TOL):
                raise ValueError(f"not a point of ST*S^2 (residual {np.max(r):.2e})")

    @property
    def array(self) -> np.ndarray:
        return np.concatenate([self.x, self.y], axis=-1)


@dataclass
class STTangent:
    base: STPoint
    dx: np.ndarray
    dy: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.dx = np.asarray(self.dx, dtype=float)
        self.dy = np.asarray(self.dy, dtype=float)
        if self.check:
            r = st_tangent_residual(self.base.x, self.base.y, self.dx, self.dy)
            scale = np.maximum(1.0, np.linalg.norm(self.array, axis=-1))
            if np.any(r > TANGENCY_TOL * scale):
                raise ValueError("vector violates the linearised ST*S^2 constraints")

    @property
    def array(self) -> np.ndarray:
        return np.concatenate([self.dx, self.dy], axis=-1)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def st_point_residual(x, y) -> np.ndarray:
    return np.max(
        np.abs(np.stack([_dot(x, x) - 1.0, _dot(y, y) - 1.0, _dot(x, y)], axis=-1)),
        axis=-1,
    )


def st_tangent_residual(x, y, dx, dy) -> np.ndarray:
    return np.max(
        np.abs(np.stack([_dot(x, dx), _dot(y, dy), _dot(x, dy) + _dot(y, dx)], axis=-1)),
        axis=-1,
    )


def st_tangent_basis(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Orthonormal basis (3 rows of R^6) of T_(x,y) ST*S^2 for a single point."""
    n = np.cross(x, y)
    basis = np.array(
        [
            np.concatenate([y, -x]),  # geodesic direction
            np.concatenate([n, np.zeros(3)]),
            np.concatenate([np.zeros(3), n]),  # fibre
        ]
    )
    basis[0] /= np.sqrt(2.0)
    return basis


def random_st_tangents(rng: np.random.Generator, n: int, count: int = 1):
    x = quat.random_unit_vector(rng, n)
    y = rng.normal(size=(n, 3))
    y -= _dot(y, x)[:, None] * x
    y /= np.linalg.norm(y, axis=-1, keepdims=True)
    xy = np.cross(x, y)
    vecs = []
    for _ in range(count):
        a, b, c = rng.normal(size=(3, n, 1))
        dx = a * y + b * xy
        dy = -a * x + c * xy
        vecs.append((dx, dy))
    return STPoint(x, y, check=False), vecs


def _cross_matrix(v: np.ndarray) -> np.ndarray:
    """[v]_x with [v]_x w = v cross w, batched over leading axes."""
    z = np.zeros(v.shape[:-1])
    return np.stack(
        [
            np.stack([z, -v[..., 2], v[..., 1]], axis=-1),
            np.stack([v[..., 2], z, -v[..., 0]], axis=-1),
            np.stack([-v[..., 1], v[..., 0], z], axis=-1),
        ],
        axis=-2,
    )


def _st_coefficients(which: str, x, y, sign: float):
    """Ambient coefficient vector a(p) (..., 6) and Jacobian (..., 6, 6)."""
    shape = x.shape[:-1]
    a = np.zeros(shape + (6,))
    jac = np.zeros(shape + (6, 6))
    eye = np.broadcast_to(np.eye(3), shape + (3, 3))
    if which == "lambda1":
        a[..., :3] = y
        jac[..., :3, 3:] = eye
    elif which == "lambda2":
        a[..., :3] = np.cross(x, y)
        jac[..., :3, :3] = -_cross_matrix(y)
        jac[..., :3, 3:] = _cross_matrix(x)
    elif which == "alpha":
        a[..., 3:] = sign * np.cross(x, y)
        jac[..., 3:, :3] = -sign * _cross_matrix(y)
        jac[..., 3:, 3:] = sign * _cross_matrix(x)
    else:
        raise ValueError(f"unknown structure form {which!r}")
    return a, jac


def liouville_cartan(which: str, t: STTangent, sign: float = CONNECTION_SIGN) -> np.ndarray:
    """Evaluate lambda1, lambda2 or the connection form alpha on t."""
    a, _ = _st_coefficients(which, t.base.x, t.base.y, sign)
    return _dot(a, t.array)


def d_liouville_cartan(
    which: str, base: STPoint, v: STTangent, w: STTangent, sign: float = CONNECTION_SIGN
) -> np.ndarray:
    _, jac = _st_coefficients(which, base.x, base.y, sign)
    w_mat = np.swapaxes(jac, -1, -2) - jac
    return np.einsum("...i,...ij,...j->...", v.array, w_mat, w.array)


def structure_residuals(base: STPoint, v: STTangent, w: STTangent, sign: float = CONNECTION_SIGN) -> dict:
    """Residuals of the three structure equations on ST*S^2 at sampled bivectors."""
    ev = {k: liouville_cartan(k, v, sign) for k in ("lambda1", "lambda2", "alpha")}
    ew = {k: liouville_cartan(k, w, sign) for k in ("lambda1", "lambda2", "alpha")}

    def wd(p, q):
        return wedge(ev[p], ev[q], ew[p], ew[q])

    return {
        "dlambda1=lambda2^alpha": np.abs(d_liouville_cartan("lambda1", base, v, w, sign) - wd("lambda2", "alpha")),
        "dlambda2=alpha^lambda1": np.abs(d_liouville_cartan("lambda2", base, v, w, sign) - wd("alpha", "lambda1")),
        "dalpha=lambda1^lambda2": np.abs(d_liouville_cartan("alpha", base, v, w, sign) - wd("lambda1", "lambda2")),
    }


def calibrate_connection_sign(rng: np.random.Generator | None = None, n: int = 64) -> float:
    """Pick the sign of <x cross y, dy> for which all structure equations hold."""
    rng = rng or np.random.default_rng(0)
    base, [(dx1, dy1), (dx2, dy2)] = random_st_tangents(rng, n, count=2)
    v = STTangent(base, dx1, dy1, check=False)
    w = STTangent(base, dx2, dy2, check=False)
    scores = {}
    for s in (1.0, -1.0):
        scores[s] = max(float(np.max(r)) for r in structure_residuals(base, v, w, s).values())
    best = min(scores, key=scores.get)
    if scores[best] > 1e-10:
        raise RuntimeError(f"neither sign satisfies the structure equations: {scores}")
    return best


# --- structure equations on S^3 -------------------------------------------

AXES = {"i": quat.E_I, "j": quat.E_J, "k": quat.E_K}


def s3_structure_residuals(u, v, w) -> dict:
    """Cyclic structure equations d alpha_i = alpha_j ^ alpha_k and rotations.

    Also reports the non-cyclic variant d alpha_k = alpha_i ^ alpha_k,
    which does not hold (it even fails on R_k, where d alpha_k vanishes).
    """
    specs = {k: ContactFormSpec(tuple(c)) for k, c in AXES.items()}
    tv, tw = S3Tangent(u, v, check=False), S3Tangent(u, w, check=False)
    a = {k: alpha_eval(s, tv) for k, s in specs.items()}
    b = {k: alpha_eval(s, tw) for k, s in specs.items()}
    d = {k: d_alpha_eval(s, u, tv, tw) for k, s in specs.items()}

    def wd(p, q):
        return wedge(a[p], a[q], b[p], b[q])

    return {
        "dalpha_i=alpha_j^alpha_k": np.abs(d["i"] - wd("j", "k")),
        "dalpha_j=alpha_k^alpha_i": np.abs(d["j"] - wd("k", "i")),
        "dalpha_k=alpha_i^alpha_j": np.abs(d["k"] - wd("i", "j")),
        "noncyclic:dalpha_k=alpha_i^alpha_k": np.abs(d["k"] - wd("i", "k")),
    }


# --- Lie derivatives by finite differences --------------------------------

def _rk4_s3(field_fn: Callable, u: np.ndarray, t: float, steps: int) -> np.ndarray:
    h = t / steps
    for _ in range(steps):
        k1 = field_fn(u)
        k2 = field_fn(u + 0.5 * h * k1)
        k3 = field_fn(u + 0.5 * h * k2)
        k4 = field_fn(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    return u


def _sphere_curve(u: np.ndarray, v: np.ndarray, s: float) -> np.ndarray:
    nv = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(nv == 0.0, 1.0, nv)
    return np.cos(s * nv) * u + np.sin(s * nv) * v / safe


def lie_derivative_residual(
    form: Callable,
    field_fn: Callable,
    u,
    v,
    h: float = 1e-4,
    delta: float = 1e-5,
    substeps: int = 2,
) -> np.ndarray:
    """Central-difference estimate of (L_X form)(v) at u on S^3.

    form(u, v) -> scalar, field_fn(u) -> tangent vector.  The flow is
    integrated with RK4 (plus renormalisation) and its differential is taken
    along great circles through u, so nothing leaves the sphere.
    Returns |(phi_h^* form - phi_{-h}^* form)(v)| / (2h).
    """
    if not h > 0.0:
        raise ValueError("step h must be positive")
    if h < 1e-12:
        raise FloatingPointError("step underflow")
    u = quat.as_array(u)
    v = quat.as_array(v)

    def pulled(t):
        p0 = _rk4_s3(field_fn, u, t, substeps)
        pp = _rk4_s3(field_fn, _sphere_curve(u, v, delta), t, substeps)
        pm = _rk4_s3(field_fn, _sphere_curve(u, v, -delta), t, substeps)
        return form(p0, (pp - pm) / (2.0 * delta))

    return np.abs(pulled(h) - pulled(-h)) / (2.0 * h)
