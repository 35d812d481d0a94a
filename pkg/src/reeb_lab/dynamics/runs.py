"""Named flow runs: one config in, one trajectory plus its refined closure out."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .. import cover, quat
from ..forms import ContactFormSpec
from . import hamiltonian as hm
from .integrate import Closure, Trajectory, first_return, integrate

FLOW_KINDS = ("contact", "magnetic", "cotangent")


@dataclass(frozen=True)
class FlowConfig:
    """`contact` covers both the round Reeb flows (eps = 0) and the deformed ones.

    For the cotangent-bundle kinds the initial state is Phi(u0).
    """

    kind: str = "contact"
    theta: float = 0.0
    eps: float = 0.0
    s: float = 0.0
    T: float = 4 * np.pi
    dt: float = 1e-3
    u0: tuple = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise ValueError(f"unknown flow {self.kind!r}; expected one of {FLOW_KINDS}")
        if not (0.0 <= self.eps < 1.0):
            raise ValueError("eps must lie in [0, 1)")
        if not (self.T > 0 and self.dt > 0):
            raise ValueError("T and dt must be positive")
        if not np.all(np.isfinite([self.theta, self.s, self.T, self.dt])):
            raise ValueError("parameters must be finite")
        if len(self.u0) != 4 or not np.linalg.norm(self.u0) > 0:
            raise ValueError("u0 needs four components, not all zero")

    def params(self) -> dict:
        """Only the parameters the chosen flow depends on."""
        keep = {"contact": ("theta", "eps"), "magnetic": ("s",), "cotangent": ("theta",)}[self.kind]
        d = {k: v for k, v in asdict(self).items() if k in keep}
        d.update(T=self.T, dt=self.dt, u0=[float(c) for c in quat.normalize(np.asarray(self.u0, dtype=float))])
        return d


@dataclass
class FlowRun:
    config: FlowConfig
    trajectory: Trajectory
    closure: Closure
    columns: list


def _setup(cfg: FlowConfig):
    u0 = quat.normalize(np.asarray(cfg.u0, dtype=float))
    if cfg.kind == "contact":
        spec = ContactFormSpec.from_theta(cfg.theta, cfg.eps)
        m = spec.reeb_matrix
        ham = hm.HamiltonianSpec("H_eps", cfg.eps, cfg.theta)
        return (lambda u: u @ m.T), u0, "s3", (lambda u: hm.energy(ham, u)), ["u0", "u1", "u2", "u3"]
    if cfg.kind == "magnetic":
        omega = hm.SymplecticFormSpec.from_strength(cfg.s, "magnetic")
    else:
        omega = hm.SymplecticFormSpec(cfg.theta, "cotangent")
    ham = hm.HamiltonianSpec("H")
    return ((lambda p: hm.hamiltonian_field(omega, ham, p)), cover.phi_array(u0), "tstar",
            (lambda p: hm.energy(ham, p)), ["x0", "x1", "x2", "p0", "p1", "p2"])


def run_flow(cfg: FlowConfig) -> FlowRun:
    field_fn, p0, constraint, energy, cols = _setup(cfg)
    traj = integrate(field_fn, p0, cfg.T, cfg.dt, constraint, energy, cfg.kind, cfg.params())
    return FlowRun(cfg, traj, first_return(traj, field_fn, constraint), cols)
