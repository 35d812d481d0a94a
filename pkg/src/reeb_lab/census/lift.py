"""Boothby-Wang lift of a Hamiltonian on S^2 to the Hopf bundle (S^3, alpha_i).

The projection is pi(u) = conj(u) i u, so d alpha_i = pi^* sigma_0.  For a
base Hamiltonian H the field X with sigma_0(X, .) = -dH is X = x cross grad H.
Its alpha_i-horizontal lift is X_h(u) = q u with q = -(1/2) i cross (u X conj(u)),
and the lifted field X~ = (H o pi) R_i + X_h preserves alpha_i.

For H = c + <i, x> one gets X~ = c R_i + u i / 2, whose flow
t -> exp(i c t/2) u exp(i t/2) is written down in `rotation_lift_flow`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import cover, forms, quat
from ..dynamics import orbits as ob
from ..dynamics.integrate import integrate

ALPHA_I = forms.ContactFormSpec((1.0, 0.0, 0.0))
_ALPHA_I_MATRIX = ALPHA_I.matrix
_ALPHA_I_REEB = ALPHA_I.reeb_matrix


@dataclass
class BaseHamiltonian:
    """A function on S^2 (raw (i, j, k) components) with optional ambient gradient."""

    fn: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "H"

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.grad is not None:
            return self.grad(x)
        h = 1e-6
        eye = np.eye(3)
        return np.stack([(self.fn(x + h * e) - self.fn(x - h * e)) / (2 * h) for e in eye], axis=-1)

    @classmethod
    def affine(cls, axis=quat.E_I, c: float = 0.0) -> "BaseHamiltonian":
        """c + <axis, x>, the generator of rotation about `axis`."""
        a = np.asarray(axis, dtype=float)
        return cls(lambda x: c + np.asarray(x) @ a,
                   lambda x: np.broadcast_to(a, np.shape(x)).copy(),
                   f"{c:g} + <{a.tolist()}, x>")

    @classmethod
    def constant(cls, c: float = 1.0) -> "BaseHamiltonian":
        return cls(lambda x: np.full(np.shape(x)[:-1], float(c)),
                   lambda x: np.zeros(np.shape(x)), f"{c:g}")


def _fibonacci_sphere(n: int = 2000) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z * z)
    phi = np.pi * (1 + 5**0.5) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def base_field(H: BaseHamiltonian, x) -> np.ndarray:
    """X_H = x cross grad H, so that sigma_0(X_H, .) = -dH."""
    x = np.asarray(x, dtype=float)
    return np.cross(x, H.gradient(x))


def horizontal_lift_closed(xfield: np.ndarray, u: np.ndarray) -> np.ndarray:
    w = quat.as_vector(quat.mul(quat.mul(u, quat.embed(xfield)), quat.conj(u)))
    q = -0.5 * np.cross(quat.E_I, w)
    return quat.mul(quat.embed(q), u)


def horizontal_lift(xfield: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Least-squares solution of d pi(v) = X, alpha_i(v) = 0, <u, v> = 0."""
    u = np.asarray(u, dtype=float)
    xfield = np.asarray(xfield, dtype=float)
    # d pi_u(v) = conj(v) i u + conj(u) i v = 2 Vec(conj(u) i v)
    dpi = 2.0 * quat.left_matrix(quat.mul(quat.conj(u), quat.I))[..., 1:, :]
    arow = (u @ _ALPHA_I_MATRIX.T)[..., None, :]
    urow = u[..., None, :]
    a = np.concatenate([dpi, arow, urow], axis=-2)  # (..., 5, 4)
    rhs = np.concatenate([xfield, np.zeros(u.shape[:-1] + (2,))], axis=-1)
    at = np.swapaxes(a, -1, -2)
    return np.linalg.solve(at @ a, (at @ rhs[..., None]))[..., 0]


@dataclass
class LiftedField:
    base: BaseHamiltonian
    shift: float = 0.0

    def H_tilde(self, u) -> np.ndarray:
        return self.base.fn(cover.hopf_vector(u)) + self.shift

    def horizontal(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return horizontal_lift(base_field(self.base, cover.hopf_vector(u)), u)

    def reeb(self, u) -> np.ndarray:
        return np.asarray(u, dtype=float) @ _ALPHA_I_REEB.T

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.H_tilde(u)[..., None] * self.reeb(u) + self.horizontal(u)

    def invariant_residuals(self, u) -> dict:
        u = np.asarray(u, dtype=float)
        a = lambda v: forms.alpha_eval(ALPHA_I, forms.S3Tangent(u, v, check=False))
        xh = self.horizontal(u)
        return {
            "alpha(X~) - H~": float(np.max(np.abs(a(self(u)) - self.H_tilde(u)))),
            "alpha(X_h)": float(np.max(np.abs(a(xh)))),
            "X_h vs closed form": float(np.max(np.abs(
                xh - horizontal_lift_closed(base_field(self.base, cover.hopf_vector(u)), u)))),
        }


def build_lift(H: BaseHamiltonian, shift: float | None = None, min_value: float = 0.0) -> LiftedField:
    """Lift H; with shift=None the smallest integer shift making H + shift >= 1 is used.

    Positivity is checked on a Fibonacci grid of S^2.
    """
    lo = float(np.min(H.fn(_fibonacci_sphere())))
    if shift is None:
        shift = float(max(0.0, np.ceil(1.0 - lo)))
    if lo + shift <= min_value:
        raise ValueError(f"H + shift is not positive on S^2 (min {lo + shift:.3g})")
    return LiftedField(H, float(shift))


# --- torus action checks --------------------------------------------------------

def directional_derivative(field_fn, u: np.ndarray, v: np.ndarray, delta: float = 1e-5) -> np.ndarray:
    """D_v B at u along the great circle with initial velocity v."""
    return (field_fn(forms._sphere_curve(u, v, delta)) - field_fn(forms._sphere_curve(u, v, -delta))) / (2 * delta)


def lie_bracket(a_fn, b_fn, u: np.ndarray, delta: float = 1e-5) -> np.ndarray:
    """[A, B] = D_A B - D_B A, tangentially projected."""
    u = np.asarray(u, dtype=float)
    a, b = a_fn(u), b_fn(u)
    br = directional_derivative(b_fn, u, a, delta) - directional_derivative(a_fn, u, b, delta)
    return forms.tangent_project_s3(u, br)


def rotation_lift_flow(c: float, u0, t, extra: float = 0.0) -> np.ndarray:
    """Flow of (c + extra) R_i + u i/2: exp(i (c + extra) t/2) u0 exp(i t/2)."""
    t = np.asarray(t, dtype=float)
    left = quat.exp_pure(quat.E_I, (c + extra) * t / 2.0)
    right = quat.exp_pure(quat.E_I, t / 2.0)
    return quat.mul(quat.mul(quat.as_array(left), quat.as_array(u0)), quat.as_array(right))


def fibre_displacement(u_start, u_end) -> float:
    """Angle from Phi(u_start) to Phi(u_end) within one ST*S^2 fibre, in [0, 2 pi)."""
    a, b = cover.phi(u_start), cover.phi(u_end)
    if np.linalg.norm(a.x - b.x) > 1e-6:
        raise ValueError("end point is not in the starting fibre")
    positive = np.cross(a.y, a.x)
    return float(np.mod(np.arctan2(b.y @ positive, b.y @ a.y), 2 * np.pi))


@dataclass
class TorusActionCheck:
    lie_alpha: float  # max |L_{X~} alpha_i|
    lie_alpha_reeb: float  # max |L_R alpha_i|
    bracket: float  # max |[R, X_h]|
    closure_s3: float  # |flow_{4 pi}(u) - u| for the X~ flow
    closure_st: float  # |Phi(flow_{2 pi}(u)) - Phi(u)|
    holonomy_mismatch: float  # max angle distance of fibre displacement vs -2 pi H(q)
    counterexample: float  # L_X alpha for a non-preserving field, should stay large
    samples: int
    tolerances: dict = field(default_factory=lambda: {"lie": 1e-6, "bracket": 1e-8, "closure": 1e-8, "holonomy": 1e-4})

    @property
    def passed(self) -> bool:
        t = self.tolerances
        return (self.lie_alpha < t["lie"] and self.lie_alpha_reeb < t["lie"] and self.bracket < t["bracket"]
                and self.closure_s3 < t["closure"] and self.closure_st < t["closure"]
                and self.holonomy_mismatch < t["holonomy"] and self.counterexample > 1e-3)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "lie_alpha", "lie_alpha_reeb", "bracket", "closure_s3", "closure_st",
            "holonomy_mismatch", "counterexample", "samples")}
        d["tolerances"] = dict(self.tolerances)
        d["passed"] = self.passed
        return d


def verify_torus_action(lift: LiftedField, samples: int = 1000, seed: int = 0, holonomy_points: int = 8,
                        dt: float = 2e-3) -> TorusActionCheck:
    """Finite-difference checks of L_{X~} alpha_i = 0, [R_i, X_h] = 0, orbit closure and holonomy.

    The closure and holonomy parts assume the base field is a rotation of
    period 2 pi (H affine in <i, x>), which is the case built by
    BaseHamiltonian.affine.
    """
    rng = np.random.default_rng(seed)
    u, (v,) = forms.random_s3_tangents(rng, samples, 1)
    alpha = lambda p, w: forms.alpha_eval(ALPHA_I, forms.S3Tangent(p, w, check=False))
    lie = float(np.max(forms.lie_derivative_residual(alpha, lift, u, v)))
    reeb_fn = lift.reeb
    lie_r = float(np.max(forms.lie_derivative_residual(alpha, reeb_fn, u, v)))
    br = float(np.max(np.linalg.norm(lie_bracket(reeb_fn, lift.horizontal, u), axis=-1)))
    bad = lambda p: (1.0 + p[..., :1] ** 2) * reeb_fn(p)
    counter = float(np.median(forms.lie_derivative_residual(alpha, bad, u, v)))

    # closure and holonomy along a few orbits, integrated numerically
    u0 = quat.random_unit(rng, holonomy_points)
    leg1 = integrate(lift, u0, 2 * np.pi, dt, constraint="s3", flow_id="lifted")
    leg2 = integrate(lift, leg1.final, 2 * np.pi, dt, constraint="s3", flow_id="lifted")
    closure_s3 = float(np.max(np.linalg.norm(leg2.final - u0, axis=-1)))
    closure_st = float(np.max(np.linalg.norm(cover.phi_array(leg1.final) - cover.phi_array(u0), axis=-1)))
    hz = integrate(lift.horizontal, u0, 2 * np.pi, dt, constraint="s3", flow_id="horizontal")
    mism = 0.0
    for k in range(holonomy_points):
        disp = fibre_displacement(u0[k], hz.states[-1][k])
        q = cover.hopf_vector(u0[k])
        target = -2 * np.pi * float(lift.base.fn(q))
        mism = max(mism, cover.angle_distance(disp, target))
    return TorusActionCheck(lie, lie_r, br, closure_s3, closure_st, mism, counter, samples)


def fixed_fibre_census(c: float = 2.0, extra: float = 1 / np.sqrt(2), T_max: float = 200.0,
                       delta: float = 1e-6, seeds=None) -> ob.OrbitCensus:
    """Return-map census of X~ + extra R_i for the lifted rotation action.

    For irrational `extra` the closed orbits are exactly the fibres over the
    two fixed points +-i of the rotation, i.e. {z1 = 0} and {z0 = 0}.
    """
    if seeds is None:
        seeds = ob.torus_seeds()

    def flow(u, t):
        return rotation_lift_flow(c, np.asarray(u)[:, None, :], np.asarray(t)[None, :], extra)

    def describe(u):
        x = cover.hopf_vector(u)
        if abs(x[0] - 1) < 1e-8:
            return "fibre over +i"
        if abs(x[0] + 1) < 1e-8:
            return "fibre over -i"
        return "generic"

    speed = 0.5 * (abs(c + extra) + 1.0)
    return ob.return_map_scan(flow, seeds, T_max, delta, speed=speed, describe=describe)
