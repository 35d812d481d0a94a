"""Verification suites.  Each suite returns a SuiteReport of Check records
(measured value against a bound); `run` drives any selection of them."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import cover, finsler, forms, quat
from .census import counting, lift
from .dynamics import flows, orbits
from .dynamics.integrate import integrate


@dataclass
class Check:
    name: str
    value: float
    bound: float
    relation: str = "<"  # value < bound, ">" for lower bounds, "==" for exact equality

    @property
    def passed(self) -> bool:
        if self.relation == "<":
            return bool(self.value < self.bound)
        if self.relation == ">":
            return bool(self.value > self.bound)
        return bool(self.value == self.bound)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _plain(self.value), "bound": _plain(self.bound),
                "relation": self.relation, "passed": self.passed}


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


@dataclass
class SuiteReport:
    suite: str
    checks: list
    seconds: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, timing: bool = False) -> dict:
        d = {"suite": self.suite, "passed": self.passed, "checks": [c.to_dict() for c in self.checks],
             "info": self.info}
        if timing:
            d["seconds"] = self.seconds
        return d


def _rng(seed):
    return np.random.default_rng(seed)


# --- suites ----------------------------------------------------------------------

def structure_equations(seed: int = 0, samples: int = 10_000) -> SuiteReport:
    rng = _rng(seed)
    u, (v, w) = forms.random_s3_tangents(rng, samples, 2)
    res = forms.s3_structure_residuals(u, v, w)
    checks = [Check(k, float(np.max(r)), 1e-12) for k, r in res.items() if not k.startswith("noncyclic")]
    base, [(dx1, dy1), (dx2, dy2)] = forms.random_st_tangents(rng, samples, 2)
    st = forms.structure_residuals(base, forms.STTangent(base, dx1, dy1, check=False),
                                   forms.STTangent(base, dx2, dy2, check=False))
    checks += [Check("ST*S^2 " + k, float(np.max(r)), 1e-10) for k, r in st.items()]
    checks.append(Check("calibrated connection sign", forms.calibrate_connection_sign(rng), forms.CONNECTION_SIGN, "=="))
    info = {"non-cyclic variant dalpha_k = alpha_i ^ alpha_k": float(np.max(res["noncyclic:dalpha_k=alpha_i^alpha_k"]))}
    return SuiteReport("structure-equations", checks, info=info)


def pullback(seed: int = 0, samples: int = 10_000) -> SuiteReport:
    rng = _rng(seed)
    u, (v,) = forms.random_s3_tangents(rng, samples, 1)
    checks = [
        Check(f"Phi^* {k} = alpha_{c}", float(np.max(cover.pullback_residual(k, u, v))), 1e-12)
        for k, c in cover.PULLBACKS.items()
    ]
    x = cover.phi_array(u)
    checks.append(Check("Phi(u) = Phi(-u)", float(np.max(np.abs(x - cover.phi_array(-u)))), 0.0, "=="))
    return SuiteReport("pullback", checks)


def reeb_periodicity(seed: int = 0, orbits_count: int = 20, dt: float = 1e-3) -> SuiteReport:
    rng = _rng(seed)
    thetas = rng.uniform(0.0, 2 * np.pi, orbits_count)
    u0 = quat.random_unit(rng, orbits_count)
    specs = [forms.ContactFormSpec.from_theta(t) for t in thetas]
    closed_end = np.stack([flows.contact_flow(s, u, 4 * np.pi) for s, u in zip(specs, u0)])
    closure = float(np.max(np.linalg.norm(closed_end - u0, axis=-1)))
    mats = np.stack([s.reeb_matrix for s in specs])
    tr = integrate(lambda u: np.einsum("nij,nj->ni", mats, u), u0, 4 * np.pi, dt, constraint="s3",
                   flow_id="reeb")
    exact = np.stack([flows.contact_flow(s, u, tr.times) for s, u in zip(specs, u0)], axis=1)
    sup = float(np.max(np.linalg.norm(tr.states - exact, axis=-1)))
    checks = [
        Check("closed-form closure at 4 pi", closure, 1e-10),
        Check("RK4 vs closed form, sup over [0, 4 pi]", sup, 1e-6),
        Check("constraint drift", float(tr.constraint_drift.max()), 1e-9),
    ]
    return SuiteReport("reeb", checks, info={"dt": dt, "orbits": orbits_count})


LATITUDES = (np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3)


def latitude(seed: int = 0, thetas=LATITUDES, points: int = 2001) -> SuiteReport:
    checks = []
    t = np.linspace(0.0, 4 * np.pi, points)
    pole = cover.hopf_vector(quat.ONE)
    for th in thetas:
        spec = forms.ContactFormSpec.from_theta(th)
        u = flows.contact_flow(spec, spec.rotor, t)
        fit = cover.latitude_fit(cover.hopf_vector(u), pole_hint=pole)
        st = cover.hopf_project(u).stereo
        radius = float(np.max(np.abs(np.abs(st) - np.tan(th / 2))))
        checks += [
            Check(f"theta={th:.6f} latitude angle error", abs(fit.angle - th), 1e-6),
            Check(f"theta={th:.6f} winding", fit.winding, 2, "=="),
            Check(f"theta={th:.6f} stereographic radius error", radius, 1e-6),
            Check(f"theta={th:.6f} fit rms", fit.rms, 1e-8),
        ]
    return SuiteReport("latitude", checks)


CORRESPONDENCE_THETAS = (np.pi / 4, np.pi / 2, 3 * np.pi / 4)


def correspondence(seed: int = 0, thetas=CORRESPONDENCE_THETAS, T: float = 4 * np.pi, dt: float = 1e-3) -> SuiteReport:
    rng = _rng(seed)
    checks, info = [], {}
    for th in thetas:
        r = orbits.correspondence_check(th, quat.random_unit(rng), T, dt)
        checks.append(Check(f"theta={th:.6f} sup mismatch", r.mismatch, 1e-5))
        checks.append(Check(f"theta={th:.6f} energy drift", r.diagnostics["energy_drift"], 1e-7))
        info[f"{th:.6f}"] = {"scale": r.scale, "strength": float(-1 / np.tan(th)) if abs(np.sin(th)) > 0 else None}
    return SuiteReport("correspondence", checks, info=info)


def two_orbit(seed: int = 0, eps: float = 1 / np.sqrt(2), T_max: float = 200.0, delta: float = 1e-6,
              n_eta: int = 40, n_phase: int = 5) -> SuiteReport:
    seeds = orbits.torus_seeds(n_eta, n_phase)
    out = {}
    for e in (eps, 0.0, 1 / 3):
        spec = forms.ContactFormSpec((1.0, 0.0, 0.0), e)
        out[e] = orbits.return_map_scan(orbits.flow_for(spec), seeds, T_max, delta,
                                        speed=flows.flow_speed(spec), describe=orbits.describe_for(spec))
    main = out[eps]
    descs = sorted(o.description for o in main.orbits)
    periods = {o.description: o.period for o in main.orbits}
    checks = [
        Check("seeds", len(seeds), 1000, "=="),
        Check(f"eps={eps:.6f} cluster count", main.count if main.count is not None else -1, 2, "=="),
        Check("clusters are the coordinate circles", int(descs == ["z0 = 0", "z1 = 0"]), 1, "=="),
        Check("period of z1 = 0 vs 4 pi/(1 + eps)",
              abs(periods.get("z1 = 0", np.inf) - 4 * np.pi / (1 + eps)), 1e-6),
        Check("period of z0 = 0 vs 4 pi/(1 - eps)",
              abs(periods.get("z0 = 0", np.inf) - 4 * np.pi / (1 - eps)), 1e-6),
        Check("eps=0 near-periodic fraction", out[0.0].near_periodic_fraction, 1.0, "=="),
        Check("eps=0 common period vs 4 pi", max(abs(o.period - 4 * np.pi) for o in out[0.0].orbits), 1e-5),
        Check("eps=1/3 verdict is a resonant family", int(out[1 / 3].verdict == orbits.RESONANT), 1, "=="),
        Check("eps=1/3 generic period vs 6 pi",
              abs(max(out[1 / 3].orbits, key=lambda o: o.multiplicity).period - 6 * np.pi), 1e-5),
    ]
    info = {f"{k:.6f}": v.to_dict() for k, v in out.items()}
    return SuiteReport("two-orbit", checks, info=info)


def finsler_suite(seed: int = 0, samples: int = 10_000, fibres: int = 100) -> SuiteReport:
    rng = _rng(seed)
    p = rng.normal(size=(20, 4))
    degs = [finsler.homogeneity_degree(lambda q, e=e: finsler.K_eps(e, q), pi)
            for e in (0.0, 0.05, 0.4, 0.9) for pi in p[:5]]
    u = quat.random_unit(rng, samples)
    rr = finsler.randers_identity(u)
    big = rng.normal(size=(samples, 4))
    rep = finsler.fibre_convexity_threshold(finsler.FinslerCheckConfig(0.05, fibres, seed=seed))
    zero = finsler.fibre_min_eigenvalues(0.0, finsler.FinslerCheckConfig(0.0, fibres, seed=seed).sample_fibres())
    x = quat.random_unit_vector(rng)
    pp = np.cross(x, quat.random_unit_vector(rng))
    deg_g = finsler.homogeneity_degree(lambda s: finsler.cometric(0.3, x, s), pp)
    checks = [
        Check("K_eps homogeneity degree - 2", float(np.max(np.abs(np.array(degs) - 2.0))), 1e-9),
        Check("fibre homogeneity degree of G - 1", abs(deg_g - 1.0), 1e-9),
        Check("K_eps = H_eps o l_conj(a)", float(np.max(finsler.K_identity_residual(0.4, big))), 1e-13),
        Check("Randers identity", float(np.max(rr.identity)), 1e-13),
        Check("covector form (raw labels)", float(np.max(rr.covector)), 1e-13),
        Check("eps=0 min fibre eigenvalue", float(zero.min()), 1e-8, ">"),
        Check("eps=0.05 min fibre eigenvalue", float(rep.min_eigenvalues.min()), 1e-8, ">"),
        Check("eps* >= 0.05", rep.eps_star, 0.05, ">"),
        Check("eps* finite (< 2)", rep.eps_star, 2.0, "<"),
        Check("eps* vs 1/max|V|", abs(rep.eps_star - rep.eps_star_oracle), 1e-2),
        Check("X_{H0^2/2} = H0 X_{H0}", float(np.max(finsler.squared_field_residual(big[:1000]))), 1e-11),
    ]
    geo = finsler.surviving_geodesics(1 / np.sqrt(2))
    a, b = geo["z1 = 0"], geo["z0 = 0"]
    checks += [
        Check("surviving geodesics are great circles", max(abs(a.angle - np.pi / 2), abs(b.angle - np.pi / 2)), 1e-9),
        Check("same great circle", float(np.linalg.norm(np.cross(a.axis, b.axis))), 1e-9),
        Check("opposite directions", a.direction * b.direction, -1, "=="),
    ]
    return SuiteReport("finsler", checks, info={"eps_star": rep.eps_star, "eps_star_oracle": rep.eps_star_oracle})


def lift_suite(seed: int = 0, samples: int = 1000) -> SuiteReport:
    lf = lift.build_lift(lift.BaseHamiltonian.affine(quat.E_I, 2.0), shift=0.0)
    rng = _rng(seed)
    u = quat.random_unit(rng, samples)
    inv = lf.invariant_residuals(u)
    chk = lift.verify_torus_action(lf, samples, seed)
    checks = [Check(k, v, 1e-12) for k, v in inv.items()]
    checks += [
        Check("L_{X~} alpha_i", chk.lie_alpha, 1e-6),
        Check("L_R alpha_i", chk.lie_alpha_reeb, 1e-6),
        Check("[R_i, X_h]", chk.bracket, 1e-8),
        Check("non-preserving field stays away from 0", chk.counterexample, 1e-3, ">"),
        Check("X~ orbit closure on S^3 at 4 pi", chk.closure_s3, 1e-8),
        Check("X~ orbit closure on ST*S^2 at 2 pi", chk.closure_st, 1e-8),
        Check("fibre displacement vs -2 pi H(q)", chk.holonomy_mismatch, 1e-4),
    ]
    const = lift.build_lift(lift.BaseHamiltonian.constant(1.0))
    checks.append(Check("H = 1 lifts to R_i", float(np.max(np.abs(const(u) - const.reeb(u)))), 1e-12))
    for th in (0.3, np.pi / 3, np.pi / 2, 2.5):
        r = cover.holonomy(cover.LoopOnS2.latitude(quat.E_I, th))
        target = -2 * np.pi * (1 - np.cos(th))
        checks.append(Check(f"latitude {th:.4f} holonomy vs -cap area", cover.angle_distance(r.holonomy, target), 1e-5))
    checks.append(Check("constant loop holonomy", cover.angle_distance(
        cover.holonomy(cover.LoopOnS2.constant(quat.E_J)).holonomy, 0.0), 1e-12))
    census = lift.fixed_fibre_census()
    descs = sorted(o.description for o in census.orbits)
    checks += [
        Check("X~ + R_i/sqrt(2): closed-orbit count", census.count if census.count is not None else -1, 2, "=="),
        Check("closed orbits are the fibres over +-i", int(descs == ["fibre over +i", "fibre over -i"]), 1, "=="),
    ]
    return SuiteReport("lift", checks, info={"torus_action": chk.to_dict()})


def counting_suite(seed: int = 0) -> SuiteReport:
    reeb_ok = all(counting.realize_reeb(2, k).feasible for k in range(3, 101))
    agree = all(
        counting.realize_hypersurface(n, k).feasible == counting.brute_force_feasible(n, k)
        for n in (1, 2, 3) for k in range(0, 201)
    )
    verified = all(
        p.count() == p.k for n in (1, 2, 3) for k in range(0, 201)
        for p in [counting.realize_hypersurface(n, k)] if p.feasible
    )
    thr = all(
        counting.threshold(n) == 16 * n * n - 11 * n + 3 == n + 1 + (4 * n - 2) * (4 * n - 1)
        == counting.semigroup_onset(n)
        for n in range(2, 11)
    )
    n1 = all(counting.realize_hypersurface(1, k).feasible == (k >= 2) for k in range(0, 201))
    blocks = all(
        counting.consecutive_block(n) == list(range(counting.threshold(n), counting.threshold(n) + 4 * n - 1))
        for n in range(2, 11)
    )
    no_plugs = all(counting.realize_hypersurface(2, k).plugs == 0 for k in range(45, 201))
    checks = [
        Check("realize_reeb(2, k) for 3 <= k <= 100", int(reeb_ok), 1, "=="),
        Check("realize_hypersurface vs brute force, n in {1,2,3}, k <= 200", int(agree), 1, "=="),
        Check("plans reproduce k", int(verified), 1, "=="),
        Check("threshold = formula = semigroup onset, n in [2, 10]", int(thr), 1, "=="),
        Check("n = 1 feasible exactly for k >= 2", int(n1), 1, "=="),
        Check("4n - 1 consecutive counts from the (b, c) block", int(blocks), 1, "=="),
        Check("n = 2: no plugs from 45 on", int(no_plugs), 1, "=="),
        Check("realize_hypersurface(2, 45).b", counting.realize_hypersurface(2, 45).b, 6, "=="),
    ]
    return SuiteReport("counting", checks)


ELLIPSOID_WEIGHTS = (1.0, np.sqrt(2), np.sqrt(3), np.sqrt(5), np.sqrt(7), np.sqrt(11))


def ellipsoid_suite(seed: int = 0) -> SuiteReport:
    checks = []
    for n in range(1, 6):
        c = orbits.periodic_census_ellipsoid(ELLIPSOID_WEIGHTS[: n + 1])
        checks.append(Check(f"n={n} orbit count", c.count if c.count is not None else -1, n + 1, "=="))
        # closed-form flow: each coordinate circle closes at its reported period
        worst = 0.0
        for i, o in enumerate(c.orbits):
            z = np.zeros(n + 1, dtype=complex)
            z[i] = 1.0
            worst = max(worst, float(np.abs(orbits.ellipsoid_flow(c.params["weights"], z, o.period) - z).max()))
        checks.append(Check(f"n={n} coordinate circles close at 2 pi a_i", worst, 1e-12))
    for w in ((1, 1), (2, 3)):
        c = orbits.periodic_census_ellipsoid(w)
        checks.append(Check(f"resonance detected for {w}", int(c.verdict == orbits.RESONANT), 1, "=="))
    return SuiteReport("ellipsoid", checks)


def invariants(seed: int = 0, samples: int = 2000) -> SuiteReport:
    rng = _rng(seed)
    u, (v, w) = forms.random_s3_tangents(rng, samples, 2)
    checks = []
    # right invariance u -> u b
    b = quat.random_unit(rng)
    for name, spec in (("alpha_i", forms.ContactFormSpec()), ("alpha^1.1_0.3", forms.ContactFormSpec.from_theta(1.1, 0.3))):
        a0 = forms.alpha_eval(spec, forms.S3Tangent(u, v, check=False))
        a1 = forms.alpha_eval(spec, forms.S3Tangent(quat.mul(u, b), quat.mul(v, b), check=False))
        if spec.eps == 0:
            checks.append(Check(f"right invariance of {name}", float(np.max(np.abs(a0 - a1))), 1e-12))
        r = forms.reeb(spec, u)
        checks.append(Check(f"{name}(R) = 1", float(np.max(np.abs(forms.alpha_eval(spec, r) - 1))), 1e-12))
        checks.append(Check(f"d{name}(R, .) = 0", float(np.max(np.abs(forms.d_alpha_eval(spec, u, r, forms.S3Tangent(u, v, check=False))))), 1e-12))
    # push-forward: alpha_c(conj(a) u)(conj(a) v) = alpha_{a c conj(a)}(u)(v)
    a = quat.random_unit(rng)
    c = quat.random_unit_vector(rng)
    lhs = forms.quaternionic_alpha(c, quat.mul(quat.conj(a), u), quat.mul(quat.conj(a), v))
    rhs = forms.alpha_eval(forms.ContactFormSpec(tuple(quat.as_vector(quat.mul(quat.mul(a, quat.embed(c)), quat.conj(a))))),
                           forms.S3Tangent(u, v, check=False))
    checks.append(Check("push-forward law", float(np.max(np.abs(lhs - rhs))), 1e-12))
    # alpha^theta = cos alpha_i + sin alpha_j
    th = 0.7
    t = forms.S3Tangent(u, v, check=False)
    mix = np.cos(th) * forms.alpha_eval(forms.ContactFormSpec(), t) + np.sin(th) * forms.alpha_eval(
        forms.ContactFormSpec((0.0, 1.0, 0.0)), t)
    checks.append(Check("alpha^theta = cos alpha_i + sin alpha_j",
                        float(np.max(np.abs(mix - forms.alpha_eval(forms.ContactFormSpec.from_theta(th), t)))), 1e-13))
    # l_a intertwines Reeb flows
    ts = np.linspace(0, 4 * np.pi, 200)
    u0 = quat.random_unit(rng)
    ci = forms.ContactFormSpec()
    ca = forms.ContactFormSpec(tuple(quat.as_vector(quat.mul(quat.mul(a, quat.I), quat.conj(a)))))
    d = quat.mul(a, flows.contact_flow(ci, u0, ts)) - flows.contact_flow(ca, quat.mul(a, u0), ts)
    checks.append(Check("l_a o flow(R_c) = flow(R_{a c conj a}) o l_a", float(np.max(np.abs(d))), 1e-10))
    # antipodal equivariance of the deformed flow
    d = flows.deformed_flow_closed(0.3, -u0, ts) + flows.deformed_flow_closed(0.3, u0, ts)
    checks.append(Check("deformed flow commutes with -1", float(np.max(np.abs(d))), 1e-14))
    # Hopf projection invariant under left multiplication by exp(i phi/2)
    g = quat.exp_pure(quat.E_I, 0.37).array
    checks.append(Check("hopf o l_exp(i phi) = hopf", float(np.max(np.abs(
        cover.hopf_vector(quat.mul(g, u)) - cover.hopf_vector(u)))), 1e-12))
    st = cover.hopf_project(u)
    ok = ~st.at_south_pole
    checks.append(Check("stereographic value = z1/z0", float(np.max(np.abs(st.stereo[ok] - cover.z_ratio(u)[ok]))), 1e-12))
    # double cover of the fibres
    ts = np.linspace(0, 4 * np.pi, 801)
    orbit = flows.reeb_flow_closed(quat.E_I, u0, ts)
    p = cover.phi(orbit)
    ang = np.unwrap(np.arctan2(p.y @ np.cross(p.y[0], p.x[0]), p.y @ p.y[0]))
    checks.append(Check("Reeb orbit covers its fibre twice, positively", int(round((ang[-1] - ang[0]) / (2 * np.pi))), 2, "=="))
    # rotated anti-diagonal orbits project to latitude circles
    worst = 0.0
    s = np.linspace(0, 4 * np.pi, 400)
    for _ in range(50):
        a = quat.random_unit(rng)
        z0, z1 = quat.to_complex_pair(quat.random_unit(rng))
        beta = quat.from_complex_pair(np.exp(0.5j * s) * z0, np.exp(-0.5j * s) * z1)
        worst = max(worst, cover.latitude_fit(cover.hopf_vector(quat.mul(a, beta))).rms)
    checks.append(Check("rotated anti-diagonal orbits fit latitude circles", worst, 1e-8))
    return SuiteReport("invariants", checks)


def quaternions(seed: int = 0, samples: int = 10_000) -> SuiteReport:
    rng = _rng(seed)
    x, y = quat.random_unit_vector(rng, samples), quat.random_unit_vector(rng, samples)
    u, v = quat.random_unit(rng, samples), quat.random_unit(rng, samples)
    p = quat.random_unit_vector(rng, samples)
    comp = quat.rotate(v, quat.rotate(u, p)) - quat.rotate(quat.mul(u, v), p)
    m = quat.rotation_matrix(u[:200])
    back = quat.rotation_matrix(quat.from_rotation_matrix(m))
    checks = [
        Check("xy - yx = 2 x cross y", quat.cross_check(x, y), 1e-13),
        Check("f_v o f_u = f_uv", float(np.max(np.abs(comp))), 1e-13),
        Check("from_rotation_matrix round trip", float(np.max(np.abs(back - m))), 1e-12),
        Check("|uv| = 1", float(np.max(np.abs(quat.norm(quat.mul(u, v)) - 1))), 1e-14),
    ]
    return SuiteReport("quat", checks)


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "quat": quaternions,
    "structure-equations": structure_equations,
    "pullback": pullback,
    "invariants": invariants,
    "reeb": reeb_periodicity,
    "latitude": latitude,
    "correspondence": correspondence,
    "two-orbit": two_orbit,
    "finsler": finsler_suite,
    "lift": lift_suite,
    "counting": counting_suite,
    "ellipsoid": ellipsoid_suite,
}


def run(names, seed: int = 0) -> list:
    names = list(SUITES) if names in (None, "all") or "all" in names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)} or all")
    out = []
    for n in names:
        t0 = time.perf_counter()
        rep = SUITES[n](seed=seed)
        rep.seconds = time.perf_counter() - t0
        out.append(rep)
    return out
