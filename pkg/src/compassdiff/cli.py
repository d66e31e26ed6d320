"""Command-line front end.

Subcommands:

* ``compass``   compass difference of a user expression at a point
* ``demo``      run a bundled demonstration and verify its claims
* ``hull``      interval hull / midpoint / membership of a polytope
* ``ode``       subgradient of a parametric ODE cost, trajectories, surface
* ``danskin``   subgradient of an optimal-value function
* ``optimize``  subgradient method on a user expression

Exit codes: 0 success, 2 input error, 3 evaluation error, 4 numerical
failure.  All JSON output is deterministic (fixed float formatting), so
repeated runs on identical inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import jsonio
from .compass import (
    basis_compass_difference,
    compass_difference,
    finite_difference_probes,
)
from .danskin import danskin_subgradient, problem_from_json as danskin_from_json, solve_inner, stability_probe
from .demos import DEMO_NAMES, paper_fixture_path, run_demo
from .geometry import interval_hull, load_polytope_json, membership_check, midpoint_element
from .odesens import (
    IntegrationConfig,
    IntegrationError,
    integrate_coupled,
    ode_cost_value,
    ode_subgradient,
    problem_from_json as ode_from_json,
)
from .optimize import Constant, Diminishing, Polyak, rule_label, subgradient_method
from .oracle import OracleError, UNGUARANTEED

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EVAL = 3
EXIT_NUMERIC = 4


class InputError(Exception):
    """Bad user input: malformed expressions, points, or problem files."""


@dataclass(frozen=True)
class RunManifest:
    """What a single CLI invocation is about to do; fixed seed for reproducibility."""

    subcommand: str
    inputs: tuple[str, ...]
    out_dir: str
    seed: int
    json_only: bool

    def __post_init__(self):
        if self.out_dir:
            os.makedirs(self.out_dir, exist_ok=True)
            if not os.access(self.out_dir, os.W_OK):
                raise InputError(f"output directory not writable: {self.out_dir}")


def _parse_point(text: str, what: str = "point") -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as err:
        raise InputError(f"bad {what} {text!r}: {err}") from None
    if not values:
        raise InputError(f"bad {what} {text!r}: no coordinates")
    return np.array(values)


def _parse_matrix(text: str) -> np.ndarray:
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.split(";")]
    except ValueError as err:
        raise InputError(f"bad matrix {text!r}: {err}") from None
    mat = np.array(rows)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InputError(f"bad matrix {text!r}: must be square, rows separated by ';'")
    return mat


def _parse_gridspec(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"bad grid spec {text!r}: expected lo:hi:count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as err:
        raise InputError(f"bad grid spec {text!r}: {err}") from None
    if count < 2 or hi <= lo:
        raise InputError(f"bad grid spec {text!r}: need hi > lo and count >= 2")
    return lo, hi, count


def _load_expression(args) -> ex.NonsmoothExpr:
    if args.expr is not None:
        source = args.expr
    else:
        try:
            with open(args.expr_file) as fh:
                source = fh.read()
        except OSError as err:
            raise InputError(f"cannot read expression file: {err}") from None
    try:
        return ex.parse_expr(source)
    except ex.ExprParseError as err:
        raise InputError(f"expression parse error: {err}") from None


def _resolve_input_path(path: str) -> str:
    if os.path.exists(path):
        return path
    bundled = paper_fixture_path(os.path.basename(path))
    if bundled.is_file():
        return str(bundled)
    raise InputError(f"no such file: {path} (and no bundled fixture of that name)")


def _load_json_file(path: str) -> dict:
    try:
        with open(_resolve_input_path(path)) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise InputError(f"malformed JSON in {path}: {err}") from None
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from None


def _manifest(args) -> RunManifest:
    inputs = tuple(
        str(getattr(args, name))
        for name in ("expr", "expr_file", "problem", "polytope")
        if getattr(args, name, None)
    )
    return RunManifest(
        subcommand=args.command,
        inputs=inputs,
        out_dir=args.out,
        seed=args.seed,
        json_only=args.json,
    )


def _emit(manifest: RunManifest, payload: dict, human_lines: list[str] | None = None):
    if human_lines and not manifest.json_only:
        for line in human_lines:
            print(line)
    print(jsonio.dumps(payload))


def _write_file(out_dir: str, name: str, content: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(content)
    return path


# ---------------------------------------------------------------------------
# subcommands

def _cmd_compass(args, manifest: RunManifest) -> int:
    expression = _load_expression(args)
    x = _parse_point(args.at)
    dim = max(x.size, ex.dimension(expression))
    if dim not in (1, 2, 3):
        raise InputError(f"dimension must be 1, 2, or 3; expression/point imply {dim}")
    if x.size != dim:
        raise InputError(f"point has {x.size} coordinates but the expression needs {dim}")
    oracle = ex.as_oracle(expression, dim)
    if args.fd is not None:
        if args.fd <= 0:
            raise InputError("--fd must be a positive step")
        approx, probes = finite_difference_probes(lambda p: ex.eval_value(expression, p), x, args.fd)
        payload = {
            "subgradient": approx.tolist(),
            "probes": [{"direction": p.direction.tolist(), "value": p.value} for p in probes],
            "basis": None,
            "guarantee": "approximate (centered finite differences)",
            "delta": args.fd,
        }
        _emit(manifest, payload)
        return EXIT_OK
    if args.basis is not None:
        basis = _parse_matrix(args.basis)
        if basis.shape != (dim, dim):
            raise InputError(f"basis must be {dim}x{dim}")
        result = basis_compass_difference(oracle, x, basis)
    else:
        result = compass_difference(oracle, x)
    if result.guarantee == UNGUARANTEED:
        print(
            "warning: in dimension 3 and up the compass difference carries no "
            "membership guarantee (the example43 demo shows it can fail)",
            file=sys.stderr,
        )
    _emit(manifest, result.to_json_dict())
    return EXIT_OK


def _cmd_demo(args, manifest: RunManifest) -> int:
    try:
        report = run_demo(args.name)
    except KeyError as err:
        raise InputError(str(err)) from None
    human = []
    if not manifest.json_only:
        human.append(f"demo {args.name}: {'all checks passed' if report['passed'] else 'CHECKS FAILED'}")
        for check in report["checks"]:
            mark = "ok " if check["passed"] else "FAIL"
            detail = f"  [{check['detail']}]" if check["detail"] else ""
            human.append(f"  [{mark}] {check['name']}{detail}")
    _emit(manifest, report, human)
    if manifest.out_dir:
        _write_file(manifest.out_dir, f"demo_{args.name}.json", jsonio.dumps(report) + "\n")
    return EXIT_OK if report["passed"] else EXIT_EVAL


def _cmd_hull(args, manifest: RunManifest) -> int:
    data = _load_json_file(args.polytope)
    try:
        oracle = load_polytope_json(data)
    except ValueError as err:
        raise InputError(str(err)) from None
    hull = interval_hull(oracle)
    payload: dict = {
        "description": oracle.description,
        "hull": {"lower": hull.lower.tolist(), "upper": hull.upper.tolist()},
    }
    if args.midpoint:
        mid = midpoint_element(oracle)
        member = membership_check(oracle, mid.point, directions=args.directions, tol=args.tol, seed=manifest.seed)
        payload["midpoint"] = {
            "point": mid.point.tolist(),
            "guarantee": mid.guarantee,
            "member": member.member,
            "detail": member.message(),
        }
    if args.point is not None:
        p = _parse_point(args.point)
        if p.size != oracle.dim:
            raise InputError(f"point has {p.size} coordinates, polytope is {oracle.dim}-dimensional")
        member = membership_check(oracle, p, directions=args.directions, tol=args.tol, seed=manifest.seed)
        payload["membership"] = {
            "point": p.tolist(),
            "member": member.member,
            "max_gap": member.max_gap,
            "witness": None if member.witness is None else member.witness.tolist(),
            "detail": member.message(),
        }
    _emit(manifest, payload)
    return EXIT_OK


def _cmd_ode(args, manifest: RunManifest) -> int:
    data = _load_json_file(args.problem)
    try:
        problem = ode_from_json(data)
    except (ValueError, ex.ExprParseError) as err:
        raise InputError(f"bad ODE problem: {err}") from None
    p = _parse_point(args.at, "parameter point")
    if p.size != 2:
        raise InputError("the parameter point must have two coordinates")
    try:
        config = IntegrationConfig(abs_tol=args.abstol, rel_tol=args.reltol)
    except ValueError as err:
        raise InputError(str(err)) from None
    result = ode_subgradient(problem, p, config)
    payload = result.to_json_dict()
    payload["parameters"] = p.tolist()
    payload["tolerances"] = {"abs": args.abstol, "rel": args.reltol}
    written = []
    out_dir = manifest.out_dir or "."
    if args.traj:
        labels = ("plus_e1", "minus_e1", "plus_e2", "minus_e2")
        dirs = (np.array([1.0, 0.0]), np.array([-1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, -1.0]))
        for label, d in zip(labels, dirs):
            traj = integrate_coupled(problem, p, d, config)
            written.append(_write_file(out_dir, f"traj_{label}.csv", traj.to_csv()))
    if args.surface is not None:
        lo, hi, count = _parse_gridspec(args.surface)
        grid = np.linspace(lo, hi, count)
        phi0 = ode_cost_value(problem, p, config)
        s = result.subgradient
        lines = ["p1,p2,phi,affine"]
        for a in grid:
            for b in grid:
                q = np.array([a, b])
                phi = ode_cost_value(problem, q, config)
                affine = phi0 + float(s @ (q - p))
                lines.append(",".join(format(v, ".17g") for v in (a, b, phi, affine)))
        written.append(_write_file(out_dir, "surface.csv", "\n".join(lines) + "\n"))
    if written:
        payload["files"] = written
    _emit(manifest, payload)
    return EXIT_OK


def _cmd_danskin(args, manifest: RunManifest) -> int:
    data = _load_json_file(args.problem)
    try:
        problem = danskin_from_json(data)
    except (ValueError, ex.ExprParseError) as err:
        raise InputError(f"bad optimal-value problem: {err}") from None
    x_hat = _parse_point(args.at)
    if x_hat.size != 2:
        raise InputError("the outer point must have two coordinates")
    active = solve_inner(problem, x_hat, args.eps_active)
    result = danskin_subgradient(problem, x_hat, args.eps_active)
    payload = result.to_json_dict()
    payload["optimal_value"] = active.optimal_value
    payload["active_set_size"] = int(active.minimizers.shape[0])
    payload["stability"] = stability_probe(problem, x_hat, args.eps_active)
    _emit(manifest, payload)
    return EXIT_OK


def _cmd_optimize(args, manifest: RunManifest) -> int:
    expression = _load_expression(args)
    x0 = _parse_point(getattr(args, "from"))
    if x0.size != 2 or ex.dimension(expression) > 2:
        raise InputError("the optimizer works on bivariate functions")
    oracle = ex.as_oracle(expression, 2)
    rules = [r for r in (args.polyak, args.constant, args.diminishing) if r is not None]
    if len(rules) != 1:
        raise InputError("choose exactly one of --polyak, --constant, --diminishing")
    if args.polyak is not None:
        rule = Polyak(f_star=args.polyak)
    elif args.constant is not None:
        rule = Constant(gamma=args.constant)
    else:
        rule = Diminishing(gamma0=args.diminishing)
    trace = subgradient_method(oracle, x0, rule, max_iters=args.max_iters, stop_tol=args.stop_tol)
    payload = {
        "rule": rule_label(rule),
        "iterations": len(trace.iterates),
        "best_value": trace.best_value,
        "best_point": trace.best_point.tolist(),
        "stop_reason": trace.stop_reason,
    }
    human = None
    if not manifest.json_only:
        human = [
            f"{rule_label(rule)}: best value {trace.best_value:.6g} at "
            f"{np.array2string(trace.best_point, precision=6)} after {len(trace.iterates)} iterates "
            f"({trace.stop_reason})"
        ]
    if manifest.out_dir:
        payload["trace_file"] = _write_file(manifest.out_dir, "trace.csv", trace.to_csv())
    _emit(manifest, payload, human)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compassdiff",
        description="Subgradients of nonsmooth bivariate functions from four directional derivatives.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="", help="directory for CSV/JSON artifacts")
    common.add_argument("--seed", type=int, default=0, help="seed for direction sampling")
    common.add_argument("--json", action="store_true", help="machine-readable output only")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compass", parents=[common], help="compass difference of an expression at a point")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--expr", help="expression in prefix syntax, e.g. '(neg (abs (var 0)))'")
    group.add_argument("--expr-file", help="file containing the expression")
    p.add_argument("--at", required=True, help="evaluation point, comma separated")
    p.add_argument("--basis", help="probe basis as 'a,b;c,d' (columns are probe directions)")
    p.add_argument("--fd", type=float, help="use centered finite differences with this step")
    p.set_defaults(handler=_cmd_compass)

    p = sub.add_parser("demo", parents=[common], help="run a bundled demonstration")
    p.add_argument("name", choices=DEMO_NAMES)
    p.set_defaults(handler=_cmd_demo)

    p = sub.add_parser("hull", parents=[common], help="interval hull and membership of a polytope")
    p.add_argument("--polytope", required=True, help="polytope JSON file")
    p.add_argument("--midpoint", action="store_true", help="also locate the interval-hull midpoint")
    p.add_argument("--point", help="check membership of this point")
    p.add_argument("--directions", type=int, default=360)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(handler=_cmd_hull)

    p = sub.add_parser("ode", parents=[common], help="subgradient of a parametric ODE cost")
    p.add_argument("--problem", required=True, help="ODE problem JSON file (or bundled fixture name)")
    p.add_argument("--at", required=True, help="parameter point p1,p2")
    p.add_argument("--abstol", type=float, default=1e-8)
    p.add_argument("--reltol", type=float, default=1e-8)
    p.add_argument("--traj", action="store_true", help="write the four probe trajectories as CSV")
    p.add_argument("--surface", help="grid spec lo:hi:count; write the cost surface and its affine underestimate")
    p.set_defaults(handler=_cmd_ode)

    p = sub.add_parser("danskin", parents=[common], help="subgradient of an optimal-value function")
    p.add_argument("--problem", required=True, help="problem JSON file (or bundled fixture name)")
    p.add_argument("--at", required=True, help="outer point x1,x2")
    p.add_argument("--eps-active", type=float, default=None, help="activation tolerance for the inner minimizer set")
    p.set_defaults(handler=_cmd_danskin)

    p = sub.add_parser("optimize", parents=[common], help="run the subgradient method on an expression")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--expr")
    group.add_argument("--expr-file")
    p.add_argument("--from", required=True, help="starting point x1,x2")
    p.add_argument("--polyak", type=float, help="Polyak steps towards this known optimal value")
    p.add_argument("--constant", type=float, help="constant step length")
    p.add_argument("--diminishing", type=float, help="gamma0 for steps gamma0/sqrt(k+1)")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--stop-tol", type=float, default=1e-12)
    p.set_defaults(handler=_cmd_optimize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = _manifest(args)
        return args.handler(args, manifest)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except IntegrationError as err:
        direction = "" if err.direction is None else f" while probing direction {err.direction.tolist()}"
        print(f"numerical failure: {err}{direction}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OracleError, ValueError) as err:
        print(f"evaluation error: {err}", file=sys.stderr)
        return EXIT_EVAL


def entry():  # console-script hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
