"""Fixed-step RK4 with orthogonal projection back to the constraint set."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

PROJECTION_LIMIT = 0.1  # pre-projection defect that counts as leaving the tube


class ProjectionError(RuntimeError):
    """Raised when a step leaves the tubular neighbourhood of the constraint set."""

    def __init__(self, message: str, last_good: np.ndarray, time: float):
        super().__init__(message)
        self.last_good = last_good
        self.time = time


@dataclass
class Constraint:
    name: str
    defect: Callable[[np.ndarray], np.ndarray]
    project: Callable[[np.ndarray], np.ndarray]


def _s3_defect(u):
    return np.abs(np.linalg.norm(u, axis=-1) - 1.0)


def _s3_project(u):
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


def _tstar_defect(p):
    x, q = p[..., :3], p[..., 3:]
    return np.maximum(np.abs(np.linalg.norm(x, axis=-1) - 1.0), np.abs(np.sum(x * q, axis=-1)))


def _tstar_project(p):
    x = p[..., :3] / np.linalg.norm(p[..., :3], axis=-1, keepdims=True)
    q = p[..., 3:]
    q = q - np.sum(x * q, axis=-1, keepdims=True) * x
    return np.concatenate([x, q], axis=-1)


def _st_defect(p):
    x, y = p[..., :3], p[..., 3:]
    return np.maximum.reduce(
        [
            np.abs(np.linalg.norm(x, axis=-1) - 1.0),
            np.abs(np.linalg.norm(y, axis=-1) - 1.0),
            np.abs(np.sum(x * y, axis=-1)),
        ]
    )


def _st_project(p):
    x = p[..., :3] / np.linalg.norm(p[..., :3], axis=-1, keepdims=True)
    y = p[..., 3:]
    y = y - np.sum(x * y, axis=-1, keepdims=True) * x
    y = y / np.linalg.norm(y, axis=-1, keepdims=True)
    return np.concatenate([x, y], axis=-1)


def _none_defect(p):
    return np.zeros(np.shape(p)[:-1])


CONSTRAINTS = {
    "s3": Constraint("s3", _s3_defect, _s3_project),
    "tstar": Constraint("tstar", _tstar_defect, _tstar_project),
    "st": Constraint("st", _st_defect, _st_project),
    "none": Constraint("none", _none_defect, lambda p: p),
}


@dataclass
class Trajectory:
    flow_id: str
    times: np.ndarray
    states: np.ndarray  # (steps + 1, ..., d)
    constraint_drift: np.ndarray  # post-projection defect per step
    energy_drift: np.ndarray  # |H(state) - H(state0)| per step, zeros if no energy given
    params: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def closure_distance(self) -> float:
        return float(np.max(np.linalg.norm(self.states[-1] - self.states[0], axis=-1)))


def step_count(T: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError("dt must be positive")
    return max(1, int(round(T / dt)))


def rk4_step(field_fn: Callable[[np.ndarray], np.ndarray], p: np.ndarray, h: float) -> np.ndarray:
    k1 = field_fn(p)
    k2 = field_fn(p + 0.5 * h * k1)
    k3 = field_fn(p + 0.5 * h * k2)
    k4 = field_fn(p + h * k3)
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    field_fn: Callable[[np.ndarray], np.ndarray],
    p0,
    T: float,
    dt: float,
    constraint: str = "none",
    energy: Callable[[np.ndarray], np.ndarray] | None = None,
    flow_id: str = "field",
    params: dict | None = None,
) -> Trajectory:
    """RK4 for p' = field_fn(p) over [0, T] in round(T/dt) equal steps.

    p0 may carry leading batch axes.  After each step the state is projected
    back onto the constraint set; a pre-projection defect above
    PROJECTION_LIMIT aborts with ProjectionError carrying the last good state.
    """
    n = step_count(T, dt)
    h = T / n
    con = CONSTRAINTS[constraint]
    p = con.project(np.asarray(p0, dtype=float))
    states = np.empty((n + 1,) + p.shape)
    drift = np.zeros(n + 1)
    edrift = np.zeros(n + 1)
    states[0] = p
    drift[0] = float(np.max(con.defect(p), initial=0.0))
    e0 = energy(p) if energy is not None else None
    for k in range(n):
        q = rk4_step(field_fn, p, h)
        pre = float(np.max(con.defect(q), initial=0.0))
        if not np.isfinite(pre) or pre > PROJECTION_LIMIT:
            raise ProjectionError(f"left the constraint neighbourhood at t = {k * h:.6g}", p.copy(), k * h)
        p = con.project(q)
        states[k + 1] = p
        drift[k + 1] = float(np.max(con.defect(p), initial=0.0))
        if e0 is not None:
            edrift[k + 1] = float(np.max(np.abs(energy(p) - e0), initial=0.0))
    times = np.linspace(0.0, T, n + 1)
    return Trajectory(flow_id, times, states, drift, edrift, dict(params or {}, T=T, dt=dt, steps=n))


@dataclass
class Closure:
    period: float | None  # refined first-return time, None if the orbit never returns
    distance: float  # distance to the initial state at that time
    index: int | None  # sample nearest to the return


def first_return(traj: Trajectory, field_fn: Callable[[np.ndarray], np.ndarray],
                 constraint: str = "none") -> Closure:
    """First return to the initial state, refined between samples.

    The orbit must first leave a neighbourhood of its start (half its
    maximal excursion); the closest later sample m is then corrected by one
    RK4 step of length tau in [-h, h] minimising |p(t_m + tau) - p(0)|^2.
    A single unbatched trajectory is expected.
    """
    p0 = traj.states[0]
    d = np.linalg.norm((traj.states - p0).reshape(len(traj.times), -1), axis=-1)
    far = np.flatnonzero(d > 0.5 * d.max()) if d.max() > 0 else np.array([], dtype=int)
    if far.size == 0:
        return Closure(None, float(d[-1]), None)
    # the return is the dip after the orbit has been far away, before it leaves again
    after = np.arange(far[0], len(d))
    back = after[d[after] < 0.5 * d.max()]
    if back.size == 0:
        return Closure(None, float(d[-1]), None)
    stop = far[far > back[0]]
    window = np.arange(back[0], stop[0] if stop.size else len(d))
    m = int(window[np.argmin(d[window])])
    h = float(traj.times[1] - traj.times[0])
    con = CONSTRAINTS[constraint]

    def sq(tau):
        q = con.project(rk4_step(field_fn, traj.states[m], tau))
        return float(np.sum((q - p0) ** 2))

    res = minimize_scalar(sq, bounds=(-h, h), method="bounded", options={"xatol": 1e-15})
    tau = float(res.x)
    if sq(0.0) <= res.fun:
        tau = 0.0
    return Closure(float(traj.times[m] + tau), float(np.sqrt(sq(tau))), m)
