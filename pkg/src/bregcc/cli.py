"""Command-line front end.

``bregcc solve --input problem.json --output result.json`` runs one problem
file; ``bregcc suite --input DIR --output report.json`` runs every ``*.json``
file in a directory and compares against the ``expected`` block each file
may carry.  Exit codes: 0 computed, 1 input error, 2 solver failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import backward, bregman, duality, forward, oracle
from .exceptions import (
    BregmanError,
    InputError,
    InvariantViolation,
    NoProjectionError,
)
from .legendre import get_function
from .linalg import AffineFlat, Kind, as_points

OPERATIONS = (
    "backward_cc", "backward_pseudo", "forward_cc", "forward_pseudo", "distance",
    "project_backward", "project_forward", "duality_check", "verify",
)
EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2
DEFAULT_TOL = 1e-8


class SolverFailure(Exception):
    pass


def _floats(x):
    """Arrays and numpy scalars to plain Python floats and lists."""
    if x is None:
        return None
    if isinstance(x, np.ndarray):
        return x.astype(float).tolist()
    if isinstance(x, (np.floating, np.integer)):
        return float(x)
    return x


def load_problem(path):
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError("problem file must hold a JSON object")
    for key in ("function", "points", "operation"):
        if key not in raw:
            raise InputError(f"problem file lacks {key!r}")
    if raw["operation"] not in OPERATIONS:
        raise InputError(f"unknown operation {raw['operation']!r}")
    fn = get_function(raw["function"], raw.get("dimension"))
    pts = as_points(raw["points"])
    if fn.dimension is not None and pts.shape[1] != fn.dimension:
        raise InputError(f"points have length {pts.shape[1]}, function dimension is {fn.dimension}")
    options = dict(raw.get("options") or {})
    return raw, fn, pts, options


def _flat_from(options, pts, n):
    spec = options.get("flat")
    if spec is None:
        if pts.shape[0] < 2:
            raise InputError("projection needs options.flat or at least two points")
        return AffineFlat.from_points(pts[1:])
    base = np.asarray(spec.get("base"), dtype=float).reshape(-1)
    dirs = np.asarray(spec.get("directions", []), dtype=float)
    if base.shape[0] != n:
        raise InputError("flat base has the wrong length")
    return AffineFlat(base, dirs.reshape(-1, n) if dirs.size else np.zeros((0, n)))


def _circumcenter_result(fn, pts, sol, backward_mode, tol):
    mode = "backward" if backward_mode else "forward"
    out = {
        "status": {Kind.UNIQUE: "Unique", Kind.EMPTY: "Empty", Kind.FLAT: "Flat"}[sol.kind],
        "solution_status": sol.status,
        "detail": sol.detail,
        "points": [],
        "residuals": [],
        "domain_flags": [],
        "verification": None,
    }
    if sol.witness is not None:
        out["witness"] = _floats(sol.witness)
    if sol.dual_point is not None:
        out["dual_point"] = _floats(sol.dual_point)
    if sol.kind is Kind.FLAT:
        out["null_basis"] = _floats(sol.null_basis)
    if sol.point is None:
        return out
    rep = oracle.verify_equidistance(fn, pts, sol.point, mode, tol)
    out["points"] = [_floats(sol.point)]
    out["residuals"] = [rep.worst_residual]
    out["domain_flags"] = [fn.membership(sol.point).value]
    out["verification"] = rep.to_dict()
    if sol.kind is Kind.UNIQUE:
        d = [bregman.bregman_distance(fn, sol.point, q) if backward_mode
             else bregman.bregman_distance(fn, q, sol.point) for q in pts]
        out["radius"] = float(d[0])
        scaled = tol * (1.0 + max(d))
        if rep.worst_residual > scaled or sol.status == "unverified":
            out["status"] = "Warning"
    return out


def solve_problem(raw, fn, pts, options, seed=None, tol=None):
    """Run one problem and return the result dict (without timing)."""
    op = raw["operation"]
    seed = int(options.get("seed", 0) if seed is None else seed)
    tol = float(options.get("tol", DEFAULT_TOL) if tol is None else tol)
    n = pts.shape[1]
    try:
        if op in ("backward_cc", "backward_pseudo"):
            pb = backward.BackwardProblem.build(fn, pts)
            sol = (backward.backward_circumcenter(pb) if op == "backward_cc"
                   else backward.backward_pseudo_circumcenter(pb))
            res = _circumcenter_result(fn, pts, sol, True, tol)
        elif op in ("forward_cc", "forward_pseudo"):
            fp = forward.ForwardProblem.build(fn, pts)
            sol = (forward.forward_circumcenter(fp, seed=seed) if op == "forward_cc"
                   else forward.forward_pseudo_circumcenter(fp))
            res = _circumcenter_result(fn, pts, sol, False, tol)
        elif op == "distance":
            if pts.shape[0] != 2:
                raise InputError("distance needs exactly two points")
            value = bregman.bregman_distance(fn, pts[0], pts[1])
            res = {"status": "Unique", "value": value, "points": [], "residuals": [],
                   "domain_flags": [fn.membership(p).value for p in pts], "verification": None}
        elif op in ("project_backward", "project_forward"):
            flat = _flat_from(options, pts, n)
            proj = (bregman.backward_bregman_project if op == "project_backward"
                    else bregman.forward_bregman_project)(fn, flat, pts[0])
            ok = proj.residual <= max(tol, 1e-9)
            rep = oracle.VerificationReport(
                f"{op} optimality residual", oracle.Method.CONSTRAINT_RESIDUAL,
                proj.residual, "Pass" if ok else "Fail", max(tol, 1e-9))
            res = {"status": "Unique" if ok else "Warning", "points": [_floats(proj.point)],
                   "residuals": [proj.residual], "iterations": proj.iterations,
                   "domain_flags": [fn.membership(proj.point).value],
                   "verification": rep.to_dict()}
        elif op == "duality_check":
            rep = duality.check_pseudo_duality(fn, pts)
            status = "Warning" if rep.status == "Mismatch" else (
                "Unique" if rep.lhs.is_unique else "Empty")
            res = {"status": status, "duality_status": rep.status,
                   "max_deviation": rep.max_deviation, "detail": rep.detail,
                   "points": [_floats(s.point) for s in (rep.lhs, rep.rhs) if s.point is not None],
                   "residuals": [], "domain_flags": [],
                   "witness": _floats(rep.witness), "verification": None}
        else:  # verify
            if "candidate" not in options:
                raise InputError("verify needs options.candidate")
            mode = options.get("mode", "backward")
            if mode not in ("backward", "forward"):
                raise InputError("options.mode must be 'backward' or 'forward'")
            rep = oracle.verify_equidistance(fn, pts, options["candidate"], mode, tol)
            res = {"status": "Unique" if rep.passed else "Warning",
                   "points": [_floats(np.asarray(options["candidate"], dtype=float))],
                   "residuals": [rep.worst_residual], "domain_flags": [],
                   "verification": rep.to_dict()}
    except (NoProjectionError, InvariantViolation) as exc:
        raise SolverFailure(str(exc)) from exc
    res.update({"operation": op, "function": fn.name, "seed": seed, "tol": tol})
    return res


def _ball_directions(n, count):
    if n == 2:
        t = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.column_stack([np.cos(t), np.sin(t)])
    # Fibonacci sphere
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    theta = np.pi * (1 + 5**0.5) * i
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


def ball_boundary(fn, center, radius, backward_mode, count=72):
    """Points on {x : D_f(x, c) = r} (backward) or {y : D_f(c, y) = r} (forward).

    Rays from c are bisected on the predicate "outside the ball or outside
    the domain", so rays that hit the domain boundary first end there.
    """
    rows = []
    for u in _ball_directions(center.shape[0], count):
        def beyond(t):
            x = center + t * u
            d = (bregman.bregman_distance(fn, x, center) if backward_mode
                 else bregman.bregman_distance(fn, center, x))
            return not np.isfinite(d) or d >= radius
        hi = 1e-3
        while not beyond(hi) and hi < 1e6:
            hi *= 2
        lo = 0.0
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            if beyond(mid):
                hi = mid
            else:
                lo = mid
        rows.append(center + lo * u)
    return np.array(rows)


def write_plot_table(path, fn, pts, res, backward_mode):
    lines = ["ball_index,x,y" + (",z" if pts.shape[1] == 3 else "")]
    for i, q in enumerate(pts):
        for row in ball_boundary(fn, q, res["radius"], backward_mode):
            lines.append(",".join([str(i)] + [repr(float(v)) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n")


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run(input_path, output_path, seed=None, tol=None, emit_plot=False):
    """Solve one problem file and write the result file; returns the exit code."""
    t0 = time.perf_counter()
    try:
        raw, fn, pts, options = load_problem(input_path)
        res = solve_problem(raw, fn, pts, options, seed, tol)
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        res, code = {"status": "Error", "detail": str(exc)}, EXIT_SOLVER
    except (BregmanError, ValueError, TypeError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        res, code = {"status": "Error", "detail": str(exc)}, EXIT_INPUT
    else:
        code = EXIT_OK
        want_plot = emit_plot or bool(options.get("emit_plot", False))
        if want_plot and "radius" in res and pts.shape[1] in (2, 3):
            plot_path = Path(output_path).with_suffix(".balls.csv")
            write_plot_table(plot_path, fn, pts, res, raw["operation"].startswith("backward"))
            res["plot_table"] = plot_path.name
    res["timing"] = {"seconds": time.perf_counter() - t0}
    Path(output_path).write_text(_dump(res))
    return code


def check_expected(res, expected):
    """Compare a result dict with an ``expected`` block; returns (ok, reason)."""
    if not expected:
        return res.get("status") != "Error", "no expectation"
    want = expected.get("status")
    if want is not None and res.get("status") != want:
        return False, f"status {res.get('status')} != {want}"
    tol = float(expected.get("tol", 1e-8))
    if "point" in expected:
        if not res.get("points"):
            return False, "no point computed"
        dev = float(np.max(np.abs(np.asarray(res["points"][0]) - np.asarray(expected["point"], dtype=float))))
        if not dev <= tol:
            return False, f"point deviates by {dev:.3g} > {tol:g}"
    if "value" in expected:
        dev = abs(float(res.get("value", np.nan)) - float(expected["value"]))
        if not dev <= tol:
            return False, f"value deviates by {dev:.3g} > {tol:g}"
    if "duality_status" in expected and res.get("duality_status") != expected["duality_status"]:
        return False, f"duality status {res.get('duality_status')} != {expected['duality_status']}"
    return True, "ok"


def run_suite(directory, output_path, seed=None, tol=None):
    """Run every problem file in a directory; exit 0 only if all pass."""
    files = sorted(Path(directory).glob("*.json")) if Path(directory).is_dir() else []
    if not files:
        print(f"no problem files in {directory}", file=sys.stderr)
        Path(output_path).write_text(_dump({"cases": [], "passed": 0, "failed": 0}))
        return EXIT_INPUT
    cases = []
    for path in files:
        try:
            raw, fn, pts, options = load_problem(path)
            res = solve_problem(raw, fn, pts, options, seed, tol)
            ok, reason = check_expected(res, raw.get("expected"))
        except (SolverFailure, BregmanError, ValueError, TypeError, KeyError) as exc:
            res, ok, reason = {"status": "Error"}, False, str(exc)
        cases.append({"file": path.name, "pass": ok, "reason": reason,
                      "status": res.get("status"), "points": res.get("points"),
                      "value": res.get("value")})
    passed = sum(c["pass"] for c in cases)
    report = {"cases": cases, "passed": passed, "failed": len(cases) - passed}
    Path(output_path).write_text(_dump(report))
    return EXIT_OK if passed == len(cases) else EXIT_SOLVER


def build_parser():
    parser = argparse.ArgumentParser(prog="bregcc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("solve", "run one problem file"), ("suite", "run a directory of problem files")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--input", required=True)
        p.add_argument("--output", required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        if name == "solve":
            p.add_argument("--emit-plot", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return run(args.input, args.output, args.seed, args.tol, args.emit_plot)
    return run_suite(args.input, args.output, args.seed, args.tol)


if __name__ == "__main__":
    sys.exit(main())
