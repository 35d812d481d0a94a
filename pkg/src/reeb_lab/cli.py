"""reeb-lab command line.

Parsing and serialisation only; every computation is a library call.
Exit codes: 0 pass, 1 negative or infeasible result, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager

import numpy as np

from . import cover, finsler, io, quat, verify
from .census import counting
from .dynamics import orbits
from .dynamics.runs import FlowConfig, run_flow

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2

AXIS_NAMES = {"i": quat.E_I, "j": quat.E_J, "k": quat.E_K}


class UsageError(ValueError):
    pass


def _floats(text: str, n: int | None = None) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} components, got {len(vals)}")
    return vals


def _quad(text):
    return _floats(text, 4)


def _axis(text):
    if text in AXIS_NAMES:
        return list(AXIS_NAMES[text])
    v = _floats(text, 3)
    if not np.linalg.norm(v) > 0:
        raise argparse.ArgumentTypeError("axis must be non-zero")
    return v


def _angle(args, value):
    return float(np.deg2rad(value)) if getattr(args, "deg", False) else float(value)


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_json(args, command: str, body: dict, config: dict) -> None:
    rep = io.report(command, body, seed=getattr(args, "seed", None), config=config)
    with _output(getattr(args, "out", None)) as fh:
        fh.write(io.dumps(rep))


def _initial_u0(args):
    if args.u0 is not None:
        return tuple(args.u0)
    return tuple(float(c) for c in quat.random_unit(np.random.default_rng(args.seed)))


# --- commands ---------------------------------------------------------------------

def cmd_verify(args) -> int:
    names = []
    for item in args.suite or ["all"]:
        names += [s for s in item.split(",") if s]
    try:
        reports = verify.run(names, seed=args.seed)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    ok = all(r.passed for r in reports)
    body = {"passed": ok, "suites": [r.to_dict(timing=args.timing) for r in reports]}
    _emit_json(args, "verify", body, {"suites": names})
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.suite}: {len(r.checks) - len(r.failures())}/{len(r.checks)} checks", file=sys.stderr)
        for c in r.failures():
            print(f"    {c.name}: {c.value!r} (bound {c.relation} {c.bound!r})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_flow(args) -> int:
    theta = _angle(args, args.theta)
    if args.reeb:
        if args.eps:
            raise UsageError("--reeb is the undeformed flow; use --deformed for eps > 0")
        kind = "contact"
    elif args.deformed:
        kind = "contact"
    elif args.magnetic:
        kind = "magnetic"
    else:
        kind = "cotangent"
    cfg = FlowConfig(kind, theta, args.eps, args.s, args.t, args.dt, _initial_u0(args))
    run = run_flow(cfg)
    with _output(args.out) as fh:
        io.write_trajectory_csv(fh, run, seed=args.seed)
    return EXIT_OK


def cmd_orbits(args) -> int:
    if args.weights is not None:
        census = orbits.periodic_census_ellipsoid(args.weights)
        config = {"weights": args.weights}
    else:
        theta = _angle(args, args.theta)
        census = orbits.deformed_scan(args.eps, theta, args.grid, args.tmax, args.delta)
        config = {"eps": args.eps, "theta": theta, "grid": args.grid, "tmax": args.tmax, "delta": args.delta}
    _emit_json(args, "orbits", census.to_dict(), config)
    return EXIT_OK


def cmd_project(args) -> int:
    if args.input is not None:
        with open(args.input) as fh:
            _, cols, data = io.read_trajectory_csv(fh)
        try:
            idx = [cols.index(c) for c in ("u0", "u1", "u2", "u3")]
        except ValueError as exc:
            raise UsageError("project needs a trajectory on S^3 (columns u0..u3)") from exc
        u = data[:, idx]
        config = {"input": args.input}
    else:
        u = np.array([args.u0 if args.u0 is not None else _initial_u0(args)])
        config = {"u0": list(u[0])}
    _emit_json(args, "project", cover.projection_record(u), config)
    return EXIT_OK


def cmd_holonomy(args) -> int:
    angle = _angle(args, args.theta)
    body = cover.latitude_holonomy(args.axis, angle)
    body["passed"] = bool(body["distance"] < args.tol)
    _emit_json(args, "holonomy", body, {"axis": args.axis, "theta": angle, "tol": args.tol})
    return EXIT_OK if body["passed"] else EXIT_NEGATIVE


def cmd_realize(args) -> int:
    if args.reeb:
        plan = counting.realize_reeb(args.n, args.k)
    else:
        plan = counting.realize_hypersurface(args.n, args.k)
    _emit_json(args, "realize", plan.to_dict(), {"n": args.n, "k": args.k, "reeb": args.reeb})
    return EXIT_OK if plan.feasible else EXIT_NEGATIVE


def cmd_finsler(args) -> int:
    cfg = finsler.FinslerCheckConfig(args.eps, args.fibres, args.directions, seed=args.seed)
    body = finsler.finsler_report(cfg, args.samples)
    _emit_json(args, "finsler-check", body,
               {"eps": args.eps, "fibres": args.fibres, "directions": args.directions, "samples": args.samples})
    return EXIT_OK if body["convex"] else EXIT_NEGATIVE


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reeb-lab", description="Reeb and magnetic flows on S^3 and ST*S^2.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="output file (default stdout)"):
        sp.add_argument("--seed", type=int, default=0, help="RNG seed, recorded in the output")
        sp.add_argument("--out", default=None, help=out_help)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--suite", action="append",
                   help=f"suite name or comma list; one of {', '.join(verify.SUITES)} or all (repeatable)")
    v.add_argument("--timing", action="store_true", help="include wall times (breaks byte stability)")
    common(v)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("flow", help="integrate a flow and write a trajectory CSV")
    kind = f.add_mutually_exclusive_group(required=True)
    kind.add_argument("--reeb", action="store_true", help="Reeb flow of alpha^theta")
    kind.add_argument("--deformed", action="store_true", help="Reeb flow of alpha^theta_eps")
    kind.add_argument("--magnetic", action="store_true", help="magnetic flow of strength s on T*S^2")
    kind.add_argument("--cotangent", action="store_true", help="flow of |p|^2/2 for omega^theta on T*S^2")
    f.add_argument("--theta", type=float, default=0.0)
    f.add_argument("--eps", type=float, default=0.0)
    f.add_argument("--s", type=float, default=0.0)
    f.add_argument("--t", type=float, default=4 * np.pi, help="final time")
    f.add_argument("--dt", type=float, default=1e-3)
    f.add_argument("--u0", type=_quad, default=None, help="w,x,y,z (default: random from --seed)")
    f.add_argument("--deg", action="store_true", help="read angles in degrees")
    common(f)
    f.set_defaults(func=cmd_flow)

    o = sub.add_parser("orbits", help="closed-orbit census")
    o.add_argument("--eps", type=float, default=1 / np.sqrt(2))
    o.add_argument("--theta", type=float, default=0.0)
    o.add_argument("--grid", type=int, default=1000, help="number of seeds")
    o.add_argument("--tmax", type=float, default=200.0)
    o.add_argument("--delta", type=float, default=1e-6)
    o.add_argument("--weights", type=_floats, default=None, help="ellipsoid weights a_0,...,a_n instead of a scan")
    o.add_argument("--deg", action="store_true")
    common(o)
    o.set_defaults(func=cmd_orbits)

    pr = sub.add_parser("project", help="Phi, Hopf and stereographic images of points or a trajectory")
    pr.add_argument("--u0", type=_quad, default=None)
    pr.add_argument("--in", dest="input", default=None, help="trajectory CSV written by `flow --reeb/--deformed`")
    common(pr)
    pr.set_defaults(func=cmd_project)

    h = sub.add_parser("holonomy", help="holonomy of a latitude loop")
    h.add_argument("--axis", type=_axis, default=list(quat.E_I), help="i, j, k or x,y,z")
    h.add_argument("--theta", type=float, required=True, help="angular radius of the loop")
    h.add_argument("--tol", type=float, default=1e-5)
    h.add_argument("--deg", action="store_true")
    common(h)
    h.set_defaults(func=cmd_holonomy)

    r = sub.add_parser("realize", help="plan k closed characteristics on a hypersurface of R^{2n+2}")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--reeb", action="store_true", help="Reeb-flow count n+1+a(n-1) instead")
    common(r)
    r.set_defaults(func=cmd_realize)

    fc = sub.add_parser("finsler-check", help="convexity threshold and Randers identities")
    fc.add_argument("--eps", type=float, default=0.05)
    fc.add_argument("--fibres", type=int, default=100)
    fc.add_argument("--directions", type=int, default=12)
    fc.add_argument("--samples", type=int, default=10_000)
    common(fc)
    fc.set_defaults(func=cmd_finsler)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on malformed input
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"reeb-lab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"reeb-lab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
