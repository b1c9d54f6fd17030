"""Command-line interface: ``heislorentz <subcommand> [flags]``.

Exit status 0 on success, 1 on domain errors (exterior target, inadmissible
plan, solver failure), 2 on usage errors.  Output goes to stdout unless
``--output`` is given.
"""

import argparse
from dataclasses import dataclass
import math
import sys
from typing import Optional

import numpy as np

from . import discrepancies, export, limit, oracle
from . import family_one as f1
from . import family_two as f2
from .errors import HeisenbergError, InvalidParameter
from .group import Family


@dataclass
class Result:
    header: list
    rows: list
    mesh: Optional[np.ndarray] = None
    document: object = None

    def as_json(self):
        if self.document is not None:
            return self.document
        return [dict(zip(self.header, r)) for r in self.rows]


class DomainFailure(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


# -- handlers --------------------------------------------------------------------------

def cmd_exp(a):
    if a.family == 0:
        q = limit.exp0(a.psi, a.c, a.t)
        return Result(["psi", "c", "t", "x", "y", "z"], [[a.psi, a.c, a.t, *q]])
    fn = f1.exp1 if a.family == 1 else f2.exp2
    q = fn(a.eps, a.theta, a.phi, a.t)
    return Result(["theta", "phi", "t", "x", "y", "z"], [[a.theta, a.phi, a.t, *q]])


def cmd_dist(a):
    q = np.array([a.x, a.y, a.z])
    d = f1.distance1(a.eps, q, a.tol)
    if d is None:
        raise DomainFailure(f"({a.x}, {a.y}, {a.z}) is outside the attainable set; distance undefined")
    return Result(["x", "y", "z", "distance"], [[a.x, a.y, a.z, d]])


def cmd_invert(a):
    theta, phi, t = f1.invert_exp1(a.eps, np.array([a.x, a.y, a.z]), a.tol)
    return Result(["theta", "phi", "t"], [[theta, phi, t]])


def cmd_attain(a):
    q = np.array([a.x, a.y, a.z])
    if a.family == 0:
        v = limit.attain0(q, a.tol)
    else:
        q1 = np.array(a.base) if a.base else np.zeros(3)
        v = f1.attain_translated(a.eps, q1, q, f1.Direction(a.direction), a.tol)
    return Result(["status", "defect", "tau"], [[v.status.value, v.defect, v.tau]])


def cmd_sphere(a):
    if a.family == 0:
        psis = np.linspace(-a.theta_max, a.theta_max, a.n_theta)
        cs = np.linspace(-a.c_max, a.c_max, a.n_phi)
        P, C = np.meshgrid(psis, cs, indexing="ij")
        pts = limit.exp0(P, C, a.r)
        grid = f1.GridSamples(psis, cs, pts, labels=("psi", "c"))
    else:
        spec = f1.SphereSpec(a.r, a.n_theta, a.n_phi, (0.0, a.theta_max), (0.0, 2 * math.pi))
        grid = f1.sphere1(a.eps, spec)
    return Result([*grid.labels, "x", "y", "z"], grid.rows().tolist(), grid.points)


def cmd_surface(a):
    g = f1.lightlike_surface1(a.eps, np.linspace(-a.alpha_max, a.alpha_max, a.n_alpha),
                              np.linspace(0.0, a.tau_max, a.n_tau), a.sheet)
    rows = np.column_stack([g.rows(), g.normals.reshape(-1, 3)])
    return Result(["alpha", "tau", "x", "y", "z", "nx", "ny", "nz"], rows.tolist(), g.points)


def cmd_pmp_surface(a):
    h3 = -np.linspace(1.0, a.h3_max, a.n_h3) / a.eps
    g = f2.pmp_surface2(a.eps, np.linspace(0.0, 2 * math.pi, a.n_angle), h3, a.variant)
    return Result([*g.labels, "x", "y", "z"], g.rows().tolist(), g.points)


def cmd_conjugate_scan(a):
    taus = np.linspace(a.tau_max / a.n_tau, a.tau_max, a.n_tau)
    reports = f2.conjugate_scan(a.eps, a.thetas, taus, endpoint=a.endpoint)
    rows = []
    for r in reports:
        for kind, zs in (("fd", r.tau_zeros), ("f", r.f_zeros)):
            for z in zs:
                rows.append([r.theta, kind, z])
        for n, z in r.predicted:
            rows.append([r.theta, "predicted", 2 * math.pi * n])
    doc = [{"theta": r.theta, "tau_zeros": r.tau_zeros, "f_zeros": r.f_zeros,
            "predicted": [{"n": n, "z": z} for n, z in r.predicted], "z_at_zeros": r.z_at_zeros,
            "agrees_with_prediction": r.agrees_with_prediction} for r in reports]
    return Result(["theta", "source", "abs_tau"], rows, document=doc)


def cmd_periodic(a):
    t1 = a.t1 if a.t1 is not None else 6 * a.eps
    t2 = a.t2 if a.t2 is not None else f2.admissible_t2(a.eps, t1)
    plan = f2.periodic_plan(a.eps, t1, t2)
    control = plan.control.repeat(a.repeat)
    traj = oracle.integrate_control(a.eps, np.zeros(3), control, a.steps)
    rk4_residual = float(np.max(np.abs(traj.points[-1])))
    length = float(oracle.length_functional(traj, a.eps, Family.TWO))
    rows = [[i, *u, d] for i, (u, d) in enumerate(control.segments)]
    doc = {
        "eps": plan.eps, "t1": plan.t1, "t2": plan.t2, "t3": plan.t3,
        "third_control": plan.third_control, "waypoints": plan.waypoints,
        "lorentz_length": plan.lorentz_length, "closure_residual": plan.closure_residual,
        "repeat": a.repeat, "rk4_closure_residual": rk4_residual, "total_length": length,
        "segments": [{"control": u, "duration": d} for u, d in control.segments],
    }
    return Result(["segment", "u1", "u2", "u3", "duration"], rows, document=doc)


def cmd_reach(a):
    target = np.array([a.x, a.y, a.z])
    plan = f2.reach_plan(a.eps, target)
    end = f2.compose(a.eps, plan)
    rows = [[i, *u, d] for i, (u, d) in enumerate(plan.segments)]
    doc = {"target": target, "endpoint": end, "residual": float(np.max(np.abs(end - target))),
           "segments": [{"control": u, "duration": d} for u, d in plan.segments]}
    return Result(["segment", "u1", "u2", "u3", "duration"], rows, document=doc)


def _report_result(rep, extra_header=(), extra=()):
    rows = [[e, err, *(x[i] for x in extra)] for i, (e, err) in enumerate(zip(rep.eps_values, rep.errors))]
    doc = {"eps_values": rep.eps_values, "errors": rep.errors, "monotone": rep.monotone}
    if rep.members is not None:
        doc["members"] = rep.members
    return Result(["eps", "error", *extra_header], rows, document=doc)


def cmd_converge_exp(a):
    return _report_result(limit.exp_convergence(a.psi, a.c, a.t, a.eps_list))


def cmd_converge_attain(a):
    rep = limit.indicator_convergence(np.array([a.x, a.y, a.z]), a.eps_list)
    return _report_result(rep, ["member"], [rep.members])


def cmd_converge_sphere(a):
    lower = [limit.sphere_semicontinuity(a.r, e, a.n, a.n) for e in a.eps_list]
    upper = [limit.sphere_upper_proxy(a.r, e, a.n, a.n) for e in a.eps_list]
    rows = [[e, lo, up] for e, lo, up in zip(a.eps_list, lower, upper)]
    doc = {"eps_values": a.eps_list, "lower_proxy": lower, "upper_proxy": upper,
           "lower_decreasing": all(b < c for c, b in zip(lower, lower[1:]))}
    return Result(["eps", "lower_proxy", "upper_proxy"], rows, document=doc)


def cmd_oracle_check(a):
    if a.discrepancies:
        comps = discrepancies.run_all()
        rows = [[c.key, c.adopted, c.errors[c.adopted],
                 min(v for k, v in c.errors.items() if k != c.adopted), c.justified] for c in comps]
        doc = [dict(key=c.key, topic=c.topic, metric=c.metric, errors=c.errors, adopted=c.adopted,
                    justified=c.justified, note=c.note, extra=discrepancies._clean(c.extra)) for c in comps]
        return Result(["key", "adopted", "adopted_error", "best_rejected_error", "justified"], rows, document=doc)
    fam = Family(a.family)
    chart = f1.chart1 if fam is Family.ONE else f2.chart2
    fn = f1.exp1 if fam is Family.ONE else f2.exp2
    h0 = chart(a.eps, a.theta, a.phi)
    end, cov = oracle.extremal_endpoint(fam, a.eps, h0, a.t, a.steps)
    closed = fn(a.eps, a.theta, a.phi, a.t)
    drift = abs(float(oracle.hamiltonian(fam, a.eps, cov)) + 0.5)
    gap = float(np.max(np.abs(end - closed)))
    return Result(["x_closed", "y_closed", "z_closed", "x_rk4", "y_rk4", "z_rk4", "max_gap", "energy_drift"],
                  [[*closed, *end, gap, drift]])


# -- parser ----------------------------------------------------------------------------

def _common(p, eps=True, mesh=False):
    if eps:
        p.add_argument("--eps", type=_positive, default=1.0, help="structure parameter eps > 0 (default 1)")
    formats = ["csv", "json", "obj"] if mesh else ["csv", "json"]
    p.add_argument("--format", choices=formats, default="csv", help="output format (default csv)")
    p.add_argument("--output", help="write to this file instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="heislorentz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exp", help="exponential map of family 1, 2, or the limit (0)")
    _common(p)
    p.add_argument("--family", type=int, choices=[0, 1, 2], default=1)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--psi", type=float, default=0.0, help="limit chart (family 0)")
    p.add_argument("--c", type=float, default=0.0, help="limit chart (family 0)")
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_exp)

    for name, func, helptext in (("dist", cmd_dist, "Lorentzian distance from the identity (family 1)"),
                                 ("invert", cmd_invert, "invert the family-1 exponential map")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        for c in ("x", "y", "z"):
            p.add_argument(f"--{c}", type=float, required=True)
        p.add_argument("--tol", type=_positive, default=f1.DEFAULT_TOL)
        p.set_defaults(func=func)

    p = sub.add_parser("attain", help="tri-state membership in an attainable set")
    _common(p)
    p.add_argument("--family", type=int, choices=[0, 1], default=1, help="1: first family, 0: limit set")
    for c in ("x", "y", "z"):
        p.add_argument(f"--{c}", type=float, required=True)
    p.add_argument("--base", type=_floats, default=None, help="base point x1,y1,z1 (default identity)")
    p.add_argument("--direction", choices=["future", "past"], default="future")
    p.add_argument("--tol", type=_positive, default=f1.DEFAULT_TOL)
    p.set_defaults(func=cmd_attain)

    p = sub.add_parser("sphere", help="sampled sphere of radius r (family 1, or limit with --family 0)")
    _common(p, mesh=True)
    p.add_argument("--family", type=int, choices=[0, 1], default=1)
    p.add_argument("--r", type=_positive, default=1.0)
    p.add_argument("--n-theta", type=_count, default=21, help="theta (or psi) samples")
    p.add_argument("--n-phi", type=_count, default=41, help="phi (or c) samples")
    p.add_argument("--theta-max", type=_positive, default=2.0, help="theta range [0, max]; psi range [-max, max]")
    p.add_argument("--c-max", type=_positive, default=2.0, help="c range [-max, max] for family 0")
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("surface", help="family-1 boundary surface with exterior normals")
    _common(p, mesh=True)
    p.add_argument("--n-alpha", type=_count, default=21)
    p.add_argument("--n-tau", type=_count, default=21)
    p.add_argument("--alpha-max", type=_positive, default=2.0)
    p.add_argument("--tau-max", type=_positive, default=3.0)
    p.add_argument("--sheet", type=int, choices=[1, -1], default=1)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("pmp-surface", help="family-2 PMP surface (endpoints at t = 1)")
    _common(p, mesh=True)
    p.add_argument("--n-angle", type=_count, default=41)
    p.add_argument("--n-h3", type=_count, default=21)
    p.add_argument("--h3-max", type=_positive, default=8.0, help="eps*|h3| runs over [1, max]")
    p.add_argument("--variant", choices=["adopted", "literal"], default="adopted")
    p.set_defaults(func=cmd_pmp_surface)

    p = sub.add_parser("conjugate-scan", help="zeros of the family-2 Jacobian along |tau|")
    _common(p)
    p.add_argument("--thetas", type=_floats, default=[0.0, 0.5, 1.0])
    p.add_argument("--tau-max", type=_positive, default=13.0)
    p.add_argument("--n-tau", type=int, default=800)
    p.add_argument("--endpoint", choices=["closed", "ode"], default="closed")
    p.set_defaults(func=cmd_conjugate_scan)

    p = sub.add_parser("periodic", help="closed causal loop of family 2")
    _common(p)
    p.add_argument("--t1", type=_positive, default=None, help="default 6*eps")
    p.add_argument("--t2", type=_positive, default=None, help="default from the admissibility line search")
    p.add_argument("--repeat", type=_count, default=1)
    p.add_argument("--steps", type=_count, default=2000, help="RK4 steps per segment for the check")
    p.set_defaults(func=cmd_periodic)

    p = sub.add_parser("reach", help="admissible family-2 plan from the identity to a target")
    _common(p)
    for c in ("x", "y", "z"):
        p.add_argument(f"--{c}", type=float, required=True)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("converge-exp", help="exp1(transfer) -> exp0 along decreasing eps")
    _common(p, eps=False)
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps-list", type=_floats, default=[1.0, 0.1, 0.01])
    p.set_defaults(func=cmd_converge_exp)

    p = sub.add_parser("converge-attain", help="indicator of A_eps at q along decreasing eps")
    _common(p, eps=False)
    for c in ("x", "y", "z"):
        p.add_argument(f"--{c}", type=float, required=True)
    p.add_argument("--eps-list", type=_floats, default=[1.0, 0.5, 0.1, 0.01])
    p.set_defaults(func=cmd_converge_attain)

    p = sub.add_parser("converge-sphere", help="grid distances between S_eps(r) and the limit sphere")
    _common(p, eps=False)
    p.add_argument("--r", type=_positive, default=1.0)
    p.add_argument("--eps-list", type=_floats, default=[1.0, 0.1, 0.01])
    p.add_argument("--n", type=_count, default=40, help="grid size per axis")
    p.set_defaults(func=cmd_converge_sphere)

    p = sub.add_parser("oracle-check", help="closed form versus RK4, or the discrepancy report")
    _common(p)
    p.add_argument("--family", type=int, choices=[1, 2], default=1)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--phi", type=float, default=math.pi / 2)
    p.add_argument("--t", type=_positive, default=1.0)
    p.add_argument("--steps", type=_count, default=None, help="RK4 steps (default 1000 per unit time)")
    p.add_argument("--discrepancies", action="store_true", help="run every two-reading comparison")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def render(result, fmt):
    if fmt == "csv":
        return export.csv_string(result.header, result.rows)
    if fmt == "json":
        return export.json_string(result.as_json())
    if result.mesh is None:
        raise ValueError("this command has no mesh output")
    return export.obj_string(result.mesh)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    if getattr(args, "eps_list", None) is not None and (
            not args.eps_list or any(e <= 0 for e in args.eps_list)):
        parser.print_usage(sys.stderr)
        print("heislorentz: error: --eps-list needs positive values", file=sys.stderr)
        return 2
    try:
        text = render(args.func(args), args.format)
    except (InvalidParameter, ValueError) as e:
        # violated preconditions are usage errors, not geometry
        print(f"heislorentz {args.command}: error: {e}", file=sys.stderr)
        return 2
    except (HeisenbergError, DomainFailure) as e:
        print(f"heislorentz {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
