"""The Finsler side of the quaternionic picture at theta = pi/2.

K_eps is the deformed Hamiltonian H0 + eps F transported by the rotor
a = (1 + k)/sqrt(2):

    K_eps = H_eps o l_{conj(a)} = H0 + 2 eps (x0 y1 + y0 x1).

On T*S^2 (fibre coordinate p at the foot point x, both in raw (i, j, k)
components) it becomes G(x, p) = K_eps(sqrt(|p|) u) with Phi(u) = (x, p/|p|):

    G(x, p) = |p| - eps <p, i x x>,

a Randers co-metric |p| + <p, V> with wind V = -eps (i x x), |V| <= eps.
Its square is fibrewise strictly convex exactly while max |V| < 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import cover, quat
from .dynamics import hamiltonian as hm
from .dynamics.flows import deformed_flow_closed

HESSIAN_STEP = 1e-5
EIGEN_FLOOR = 1e-8
ROTOR = quat.theta_rotor(np.pi / 2)


def cross_term(p) -> np.ndarray:
    """x0 y1 + y0 x1 in (x0, y0, x1, y1) = (u0, u1, u2, u3)."""
    p = np.asarray(p, dtype=float)
    return p[..., 0] * p[..., 3] + p[..., 1] * p[..., 2]


def K_eps(eps: float, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.sum(p * p, axis=-1) + 2.0 * eps * cross_term(p)


def H_eps(eps: float, p) -> np.ndarray:
    return hm.energy(hm.HamiltonianSpec("H_eps", eps), p)


def K_identity_residual(eps: float, p) -> np.ndarray:
    """|K_eps(p) - H_eps(conj(a) p)|."""
    p = np.asarray(p, dtype=float)
    return np.abs(K_eps(eps, p) - H_eps(eps, quat.mul(quat.conj(ROTOR), p)))


def homogeneity_degree(f: Callable[[np.ndarray], np.ndarray], p, s_min: float = 0.5, s_max: float = 2.0,
                       n: int = 33) -> float:
    """Slope of log|f(s p)| against log s over [s_min, s_max]."""
    s = np.geomspace(s_min, s_max, n)
    p = np.asarray(p, dtype=float)
    vals = np.array([f(si * p) for si in s], dtype=float)
    if np.any(np.abs(vals) < 1e-300) or np.any(np.sign(vals) != np.sign(vals[0])):
        raise ValueError("f vanishes or changes sign along the test ray")
    slope, _ = np.polyfit(np.log(s), np.log(np.abs(vals)), 1)
    return float(slope)


# --- cotangent model -------------------------------------------------------------

def lift_point(x, p) -> np.ndarray:
    """sqrt(|p|) u with Phi(u) = (x, p/|p|); batched."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    rho = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(rho == 0.0):
        raise ValueError("the zero section has no lift")
    y = p / rho
    x = np.broadcast_to(x, y.shape)
    m = np.stack([x, np.cross(y, x), y], axis=-1)
    return np.sqrt(rho) * quat.from_rotation_matrix(m)


def cometric(eps: float, x, p) -> np.ndarray:
    """G(x, p) = K_eps(lift_point(x, p)).  The foot point must satisfy <x, p> = 0."""
    return K_eps(eps, lift_point(x, p))


def wind(eps: float, x) -> np.ndarray:
    return -eps * np.cross(quat.E_I, np.asarray(x, dtype=float))


def cometric_closed(eps: float, x, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.linalg.norm(p, axis=-1) + np.sum(p * wind(eps, x), axis=-1)


def finsler_norm(eps: float, x, v) -> np.ndarray:
    """Dual Randers norm of v in T_x S^2: max <p, v> over G(x, p) = 1.

    With lam = 1 - |V|^2 it is (sqrt(lam |v|^2 + <V, v>^2) - <V, v>) / lam,
    i.e. sqrt(g(v, v)) + mu(v) with mu = -<V, .>/lam.
    """
    v = np.asarray(v, dtype=float)
    w = wind(eps, x)
    lam = 1.0 - float(w @ w)
    if lam <= 0:
        raise ValueError("wind too strong: the dual norm is undefined")
    wv = v @ w
    return (np.sqrt(lam * np.sum(v * v, axis=-1) + wv**2) - wv) / lam


def fibre_frame(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    helper = quat.E_J if abs(x[1]) < 0.9 else quat.E_K
    e1 = np.cross(helper, x)
    e1 /= np.linalg.norm(e1)
    return np.stack([e1, np.cross(x, e1)])


def fibre_hessian(eps: float, x, p, h: float = HESSIAN_STEP) -> np.ndarray:
    """2x2 central-difference Hessian of G^2 in fibre-affine coordinates at p."""
    e = fibre_frame(x)
    p = np.asarray(p, dtype=float)
    offs = np.array([[0, 0], [h, 0], [-h, 0], [0, h], [0, -h], [h, h], [h, -h], [-h, h], [-h, -h]])
    pts = p[..., None, :] + offs @ e
    g = cometric(eps, x, pts) ** 2
    f0 = g[..., 0]
    hxx = (g[..., 1] - 2 * f0 + g[..., 2]) / h**2
    hyy = (g[..., 3] - 2 * f0 + g[..., 4]) / h**2
    hxy = (g[..., 5] - g[..., 6] - g[..., 7] + g[..., 8]) / (4 * h**2)
    return np.stack([np.stack([hxx, hxy], axis=-1), np.stack([hxy, hyy], axis=-1)], axis=-2)


@dataclass
class FinslerCheckConfig:
    eps: float = 0.05
    fibres: int = 100
    directions: int = 12
    floor: float = EIGEN_FLOOR
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.eps < 1.0):
            raise ValueError("eps must lie in [0, 1)")
        if self.fibres < 1 or self.directions < 3:
            raise ValueError("need at least one fibre and three directions")

    def sample_fibres(self) -> np.ndarray:
        return quat.random_unit_vector(np.random.default_rng(self.seed), self.fibres)


def fibre_min_eigenvalues(eps: float, xs, directions: int = 12) -> np.ndarray:
    """Smallest Hessian eigenvalue of G^2 over unit covectors, per fibre."""
    out = []
    ang = np.linspace(0.0, 2 * np.pi, directions, endpoint=False) + 0.05
    for x in xs:
        e = fibre_frame(x)
        p = np.cos(ang)[:, None] * e[0] + np.sin(ang)[:, None] * e[1]
        ev = np.linalg.eigvalsh(fibre_hessian(eps, x, p))
        if not np.all(np.isfinite(ev)):
            raise ArithmeticError("Hessian sampling failed on a fibre")
        out.append(float(ev[:, 0].min()))
    return np.array(out)


@dataclass
class ConvexityReport:
    eps: float
    convex: bool
    min_eigenvalues: np.ndarray
    eps_star: float
    eps_star_oracle: float
    bisection: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "convex": self.convex,
            "min_eigenvalue": float(self.min_eigenvalues.min()),
            "per_fibre_min_eigenvalues": [float(v) for v in self.min_eigenvalues],
            "eps_star": self.eps_star,
            "eps_star_oracle": self.eps_star_oracle,
        }


def fibre_convexity_threshold(config: FinslerCheckConfig, bracket: tuple[float, float] = (0.0, 2.0),
                              iterations: int = 30) -> ConvexityReport:
    """Largest eps in `bracket` whose G^2 passes the eigenvalue floor on all sampled fibres.

    The bracket deliberately reaches past eps = 1 so that the failure side
    is actually observed.  The oracle 1/max|i x x| is computed on the same
    fibres.
    """
    xs = config.sample_fibres()
    here = fibre_min_eigenvalues(config.eps, xs, config.directions)

    def ok(e):
        return bool(np.all(fibre_min_eigenvalues(e, xs, config.directions) >= config.floor))

    lo, hi = bracket
    trace = []
    if not ok(lo):
        raise ArithmeticError("not convex even at the lower end of the bracket")
    if ok(hi):
        raise ArithmeticError("convexity never fails inside the bracket")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        good = ok(mid)
        trace.append((mid, good))
        lo, hi = (mid, hi) if good else (lo, mid)
    oracle = 1.0 / float(np.max(np.linalg.norm(np.cross(quat.E_I, xs), axis=-1)))
    return ConvexityReport(config.eps, bool(np.all(here >= config.floor)), here, lo, oracle, trace)


# --- Randers identities and the squared Hamiltonian --------------------------------

@dataclass
class RandersResidual:
    identity: float  # |-2(u0 u3 + u1 u2) - (x1 y2 - x2 y1)| in cartesian labels
    covector: float  # |-(1/2)<y, (0, -x3, x2)> - (u0 u3 + u1 u2)| in raw (i, j, k) labels
    lhs: float
    rhs: float


def randers_identity(u) -> RandersResidual:
    u = quat.normalize(quat.as_array(u))
    xr = quat.rotate(u, quat.E_I)
    yr = quat.rotate(u, quat.E_K)
    xc, yc = cover.to_cartesian(xr), cover.to_cartesian(yr)
    c = cross_term(u)
    lhs = -2.0 * c
    rhs = xc[..., 0] * yc[..., 1] - xc[..., 1] * yc[..., 0]
    cov = -0.5 * (-yr[..., 1] * xr[..., 2] + yr[..., 2] * xr[..., 1])
    return RandersResidual(np.abs(lhs - rhs), np.abs(cov - c), lhs, rhs)


def squared_field_residual(p) -> np.ndarray:
    """|X_{H0^2/2} - H0 X_{H0}| for omega~^{pi/2} on R^4."""
    p = np.asarray(p, dtype=float)
    omega = hm.SymplecticFormSpec(np.pi / 2, "r4")
    x = hm.hamiltonian_field(omega, hm.HamiltonianSpec("H0"), p)
    h0 = np.sum(p * p, axis=-1, keepdims=True)
    # grad(H0^2/2) = H0 grad H0, so the field is the H0-field scaled by H0
    a = omega.contact_spec.d_matrix
    xs = np.linalg.solve(a, (h0 * 2.0 * p)[..., None])[..., 0]
    return np.max(np.abs(xs - h0 * x), axis=-1)


def k_field(eps: float, p) -> np.ndarray:
    return hm.hamiltonian_field(hm.SymplecticFormSpec(np.pi / 2, "r4"), hm.HamiltonianSpec("K_eps", eps), p)


def k_flow_closed(eps: float, p0, t) -> np.ndarray:
    """Exact flow of X_{K_eps}: a o (deformed rotation) o conj(a)."""
    v = quat.mul(quat.conj(ROTOR), quat.as_array(p0))
    return quat.mul(ROTOR, deformed_flow_closed(eps, v, t))


def surviving_geodesics(eps: float, n: int = 64) -> dict:
    """Foot-point curves of the two closed K_eps orbits (images of the coordinate circles)."""
    out = {}
    for name, start in (("z1 = 0", quat.ONE), ("z0 = 0", quat.J)):
        p0 = quat.mul(ROTOR, start)
        w = 0.5 * (1.0 + eps) if name == "z1 = 0" else 0.5 * (1.0 - eps)
        t = np.linspace(0.0, 2 * np.pi / w, n)
        u = k_flow_closed(eps, p0, t)
        pts = quat.rotate(u, quat.E_I)
        out[name] = cover.latitude_fit(pts, pole_hint=quat.E_I)
    return out


def finsler_report(config: FinslerCheckConfig, samples: int = 10_000) -> dict:
    """eps*, per-fibre minimal eigenvalues at config.eps and the identity residuals."""
    rng = np.random.default_rng(config.seed)
    conv = fibre_convexity_threshold(config)
    u = quat.random_unit(rng, samples)
    rr = randers_identity(u)
    rays = rng.normal(size=(5, 4))
    degree = max(abs(homogeneity_degree(lambda q: K_eps(config.eps, q), r) - 2.0) for r in rays)
    out = conv.to_dict()
    out["residuals"] = {
        "homogeneity_degree_minus_2": degree,
        "randers_identity": float(rr.identity.max()),
        "randers_covector": float(rr.covector.max()),
        "K_eps_transport": float(np.max(K_identity_residual(config.eps, rng.normal(size=(samples, 4))))),
    }
    out["samples"] = samples
    return out
