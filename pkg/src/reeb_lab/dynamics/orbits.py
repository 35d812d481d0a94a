"""Correspondence fit, periodic-orbit census and return-map scans."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .. import cover, quat
from ..forms import ContactFormSpec
from . import flows, hamiltonian as hm
from .integrate import Trajectory, integrate

RATIONAL_TOL = 1e-9
RATIONAL_MAX_DEN = 10**4
RATIONAL_DEPTH = 20

RESONANT = "resonant family detected"
FINITE = "finite"


# --- correspondence between Reeb flows on S^3 and flows on ST*S^2 ------------------

@dataclass
class CorrespondenceResult:
    theta: float
    scale: float  # lambda*: Phi(reeb(lambda* t)) ~ trajectory(t)
    mismatch: float
    converged: bool
    model: str
    trajectory: Trajectory
    diagnostics: dict = field(default_factory=dict)


def fibre_rotation(p0, t) -> np.ndarray:
    """Exact flow along the fibres of ST*S^2: y' = y cross x, unit speed."""
    p0 = np.asarray(p0, dtype=float)
    t = np.asarray(t, dtype=float)[:, None]
    x, y = p0[:3], p0[3:]
    yy = np.cos(t) * y + np.sin(t) * np.cross(y, x)
    return np.concatenate([np.broadcast_to(x, yy.shape), yy], axis=-1)


def st_trajectory(theta: float, p0, T: float, dt: float = 1e-3, model: str = "cotangent") -> Trajectory:
    """Hamiltonian flow of H = |p|^2/2 on T*S^2 for omega^theta (or its magnetic form)."""
    omega = hm.SymplecticFormSpec(theta, model)
    ham = hm.HamiltonianSpec("H")
    params = {"theta": theta, "model": model, "s": omega.strength}
    if model == "magnetic" and not np.isfinite(omega.strength):
        n = max(1, int(round(T / dt)))
        times = np.linspace(0.0, T, n + 1)
        states = fibre_rotation(p0, times)
        z = np.zeros(n + 1)
        return Trajectory("fibre-rotation", times, states, z, z.copy(), dict(params, T=T, dt=dt, steps=n))
    return integrate(
        lambda p: hm.hamiltonian_field(omega, ham, p),
        p0,
        T,
        dt,
        constraint="tstar",
        energy=lambda p: hm.energy(ham, p),
        flow_id=f"{model}-hamiltonian",
        params=params,
    )


def correspondence_check(
    theta: float,
    u0,
    T: float = 4 * np.pi,
    dt: float = 1e-3,
    model: str = "cotangent",
    scale_range: tuple[float, float] = (0.05, 20.0),
) -> CorrespondenceResult:
    """Fit the constant time scale between Phi(Reeb flow of alpha^theta) and the flow on ST*S^2.

    Both signs of the scale are searched, so a time-reversed correspondence
    is reported as a negative lambda*.
    """
    u0 = quat.normalize(quat.as_array(u0))
    spec = ContactFormSpec.from_theta(theta)
    traj = st_trajectory(theta, cover.phi_array(u0), T, dt, model)
    t = traj.times
    target = traj.states

    def mismatch(lam, stride=1):
        u = flows.contact_flow(spec, u0, lam * t[::stride])
        return float(np.max(np.linalg.norm(cover.phi_array(u) - target[::stride], axis=-1)))

    grid = np.geomspace(*scale_range, 400)
    grid = np.concatenate([-grid[::-1], grid])
    stride = max(1, len(t) // 400)
    coarse = np.array([mismatch(g, stride) for g in grid])
    k = int(np.argmin(coarse))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(mismatch, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14, "maxiter": 500})
    best = float(res.x)
    mm = mismatch(best)
    diag = {
        "coarse_best": float(grid[k]),
        "coarse_mismatch": float(coarse[k]),
        "iterations": int(res.nit),
        "constraint_drift": float(traj.constraint_drift.max()),
        "energy_drift": float(traj.energy_drift.max()),
    }
    return CorrespondenceResult(theta, best, mm, bool(res.success), model, traj, diag)


# --- census records ------------------------------------------------------------------

@dataclass
class OrbitRecord:
    description: str
    period: float
    multiplicity: int
    representative: list | None = None


@dataclass
class OrbitCensus:
    orbits: list
    params: dict
    verdict: str  # FINITE or RESONANT
    count: int | None = None
    near_periodic_fraction: float | None = None
    resonances: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "count": self.count,
            "near_periodic_fraction": self.near_periodic_fraction,
            "orbits": [
                {
                    "description": o.description,
                    "period": o.period,
                    "multiplicity": o.multiplicity,
                    "representative": o.representative,
                }
                for o in self.orbits
            ],
            "resonances": self.resonances,
            "params": self.params,
        }


# --- ellipsoids --------------------------------------------------------------------

def rational_approximation(r: float, tol: float = RATIONAL_TOL, max_den: int = RATIONAL_MAX_DEN,
                           depth: int = RATIONAL_DEPTH) -> tuple[int, int] | None:
    """First continued-fraction convergent p/q of r > 0 with |r - p/q| <= tol * max(1, r).

    Searches at most `depth` terms and denominators q <= max_den; None if
    no convergent qualifies (r is irrational at this tolerance).
    """
    if not r > 0:
        raise ValueError("ratio must be positive")
    h0, h1, k0, k1 = 1, 0, 0, 1  # convergents p_{-1}/q_{-1}, p_{-2}/q_{-2}
    x = r
    for _ in range(depth):
        a = int(np.floor(x))
        h0, h1 = a * h0 + h1, h0
        k0, k1 = a * k0 + k1, k0
        if k0 > max_den:
            return None
        if abs(r - h0 / k0) <= tol * max(1.0, r):
            return h0, k0
        frac = x - a
        if frac < 1e-15:
            return None
        x = 1.0 / frac
    return None


def ellipsoid_flow(weights, z0, t) -> np.ndarray:
    """Reeb flow of sum a_i (x_i dy_i - y_i dx_i) on the unit sphere: z_i -> e^{i t/a_i} z_i."""
    a = np.asarray(weights, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    return np.exp(1j * t / a) * np.asarray(z0, dtype=complex)


def periodic_census_ellipsoid(weights) -> OrbitCensus:
    """Closed Reeb orbits of sum a_i (x_i dy_i - y_i dx_i) on S^{2n+1}.

    The coordinate circle in the i-th plane has period 2 pi a_i.  Any pair of
    weights with a rational ratio (at the tolerances above) spans a resonant
    sub-sphere filled with closed orbits, which is flagged instead.
    """
    a = [float(w) for w in weights]
    if len(a) < 1 or any(not w > 0 for w in a):
        raise ValueError("weights must be positive")
    res = []
    for i, j in combinations(range(len(a)), 2):
        pq = rational_approximation(a[i] / a[j])
        if pq is not None:
            res.append({"pair": [i, j], "ratio": [pq[0], pq[1]]})
    params = {"weights": a, "tol": RATIONAL_TOL, "max_den": RATIONAL_MAX_DEN, "depth": RATIONAL_DEPTH}
    orbits = []
    for i, w in enumerate(a):
        rep = [0.0] * (2 * len(a))
        rep[2 * i] = 1.0
        orbits.append(OrbitRecord(f"z_j = 0 for j != {i}", 2 * np.pi * w, 1, rep))
    if res:
        return OrbitCensus(orbits, params, RESONANT, None, None, res)
    return OrbitCensus(orbits, params, FINITE, len(a))


# --- return-map scans ----------------------------------------------------------------

FlowFn = Callable[[np.ndarray, np.ndarray], np.ndarray]  # (n, 4), (m,) -> (n, m, 4)


def torus_seeds(n_eta: int = 40, n_phase: int = 5) -> np.ndarray:
    """(cos eta e^{i phi0}, sin eta e^{i phi1}) on a product grid, including eta = 0 and pi/2."""
    eta = np.linspace(0.0, np.pi / 2, n_eta)
    ph = np.linspace(0.0, 2 * np.pi, n_phase, endpoint=False) + 0.1
    e, p0, p1 = np.meshgrid(eta, ph, ph, indexing="ij")
    z0 = np.cos(e) * np.exp(1j * p0)
    z1 = np.sin(e) * np.exp(1j * p1)
    return quat.from_complex_pair(z0.ravel(), z1.ravel())


def flow_for(spec: ContactFormSpec) -> FlowFn:
    def f(u, t):
        return flows.contact_flow(spec, np.asarray(u)[:, None, :], np.asarray(t)[None, :])

    return f


def describe_for(spec: ContactFormSpec, tol: float = 1e-8) -> Callable[[np.ndarray], str]:
    def d(u):
        v = quat.mul(quat.conj(spec.rotor), u)
        z0, z1 = quat.to_complex_pair(v)
        if abs(z1) < tol:
            return "z1 = 0"
        if abs(z0) < tol:
            return "z0 = 0"
        return "generic"

    return d


def _first_return(flow: FlowFn, u: np.ndarray, d: np.ndarray, t: np.ndarray, delta: float, slack: float):
    """Earliest t with |flow(u, t) - u| < delta, refined from sampled distances d(t)."""
    escape = min(0.1, 0.5 * float(d.max()))
    out = np.nonzero(d > escape)[0]
    if len(out) == 0:
        return None
    start = out[0]
    cand = np.nonzero(d[start:] < delta + slack)[0] + start
    if len(cand) == 0:
        return None
    # contiguous runs of candidate samples, refined in order of time
    breaks = np.nonzero(np.diff(cand) > 1)[0]
    runs = np.split(cand, breaks + 1)

    def sq(s):
        v = flow(u[None, :], np.array([s]))[0, 0] - u
        return float(v @ v)

    for run in runs:
        lo = t[max(run[0] - 1, 0)]
        hi = t[min(run[-1] + 1, len(t) - 1)]
        r = minimize_scalar(sq, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        dist = float(np.sqrt(max(r.fun, 0.0)))
        if dist < delta:
            return float(r.x), dist
    return None


def orbit_distance(flow: FlowFn, rep: np.ndarray, period: float, point: np.ndarray, samples: int = 2048) -> float:
    t = np.linspace(0.0, period, samples)
    d = np.linalg.norm(flow(rep[None, :], t)[0] - point, axis=-1)
    k = int(np.argmin(d))
    h = period / (samples - 1)

    def sq(s):
        v = flow(rep[None, :], np.array([s]))[0, 0] - point
        return float(v @ v)

    r = minimize_scalar(sq, bounds=(t[k] - h, t[k] + h), method="bounded", options={"xatol": 1e-13})
    return float(np.sqrt(max(min(r.fun, d[k] ** 2), 0.0)))


def return_map_scan(
    flow: FlowFn,
    seeds,
    T_max: float = 200.0,
    delta: float = 1e-6,
    sample_dt: float = 0.02,
    speed: float = 1.0,
    family_fraction: float = 0.25,
    describe: Callable[[np.ndarray], str] | None = None,
    chunk: int = 100,
) -> OrbitCensus:
    """Minimal return distance of every seed over return times <= T_max.

    Distances are sampled every sample_dt; any sample within
    delta + speed * sample_dt of zero is refined with a bounded scalar
    minimisation, which is enough because |d/dt flow| <= speed.  Seeds that
    return within delta are near-periodic; their orbits are clustered by
    seed-to-orbit distance.  If at least `family_fraction` of the seeds are
    near-periodic the verdict is RESONANT and no clustering is attempted.
    """
    seeds = np.asarray(seeds, dtype=float)
    t = np.arange(0.0, T_max + 0.5 * sample_dt, sample_dt)
    t = t[t <= T_max]
    slack = speed * sample_dt
    hits = []
    for s0 in range(0, len(seeds), chunk):
        block = seeds[s0:s0 + chunk]
        traj = flow(block, t)
        dist = np.linalg.norm(traj - block[:, None, :], axis=-1)
        for k in range(len(block)):
            r = _first_return(flow, block[k], dist[k], t, delta, slack)
            if r is not None:
                hits.append((s0 + k, r[0], r[1]))
    frac = len(hits) / max(len(seeds), 1)
    params = {"T_max": T_max, "delta": delta, "sample_dt": sample_dt, "seeds": int(len(seeds))}
    if frac >= family_fraction:
        periods = sorted({round(p, 6) for _, p, _ in hits})
        orbits = [
            OrbitRecord("family", p, sum(1 for _, q, _ in hits if round(q, 6) == p))
            for p in periods
        ]
        return OrbitCensus(orbits, params, RESONANT, None, frac)
    clusters = []  # [rep index, period, members]
    for idx, period, _ in hits:
        for c in clusters:
            rep = seeds[c[0]]
            if orbit_distance(flow, rep, c[1], seeds[idx]) < max(delta, 1e-9):
                c[2].append(idx)
                break
        else:
            clusters.append([idx, period, [idx]])
    orbits = [
        OrbitRecord(describe(seeds[c[0]]) if describe else f"orbit through seed {c[0]}", c[1], len(c[2]),
                    seeds[c[0]].tolist())
        for c in clusters
    ]
    return OrbitCensus(orbits, params, FINITE, len(clusters), frac)


def deformed_scan(eps: float, theta: float = 0.0, grid: int = 1000, T_max: float = 200.0,
                  delta: float = 1e-6) -> OrbitCensus:
    """Return-map census of alpha^theta_eps from about `grid` torus seeds (5 x 5 phases per latitude).

    The seeds are laid out in the frame where the form is alpha_{i,eps}, so
    the coordinate circles of every theta are always among them.
    """
    # with fewer than 10 latitudes the two coordinate circles alone hold a
    # quarter of the seeds and would read as a resonant family
    if grid < 250:
        raise ValueError("grid must be at least 250 seeds")
    spec = ContactFormSpec.from_theta(theta, eps)
    # the grid lives in the frame of alpha_{i,eps}; carry it over by the rotor
    seeds = quat.mul(spec.rotor, torus_seeds(int(np.ceil(grid / 25)), 5))
    census = return_map_scan(flow_for(spec), seeds, T_max, delta, speed=flows.flow_speed(spec),
                             describe=describe_for(spec))
    census.params.update(eps=eps, theta=theta, seeds=len(seeds))
    return census
