"""Command-line front end.

Exit codes::

    0  success (converged / all checks pass)
    1  schema, validation or IO error
    2  solver hit max_iter
    3  contraction refuted (sampling, live step ratios, or T^n fixed point not shared by T)
    4  solver precondition failed (banach_ball start too far from the center)
    5  axiom check found a counterexample
    6  metric violates (d4) and cannot be sliced
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .convergence import write_trace
from .errors import (
    BallPreconditionFailed,
    ContractionRefuted,
    D4Violated,
    FixedPointNotSharedByT,
    MaxIterExceeded,
    SoftConeError,
)
from .fixed_point import solve, verify_contraction
from .metric import check_axioms, check_crisp_axioms, slice_metric
from .problem import ProblemError, load_problem
from .serialize import dumps_canonical, format_float

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_MAX_ITER = 2
EXIT_REFUTED = 3
EXIT_PRECONDITION = 4
EXIT_AXIOM_FAILURE = 5
EXIT_D4 = 6


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load(path):
    try:
        return load_problem(path), None
    except (OSError, json.JSONDecodeError, ProblemError, SoftConeError, ValueError,
            KeyError, TypeError) as exc:
        _err(str(exc))
        return None, EXIT_SCHEMA


def _write_certificate(cert, out_path, status: str) -> None:
    payload = cert.to_dict()
    payload["status"] = status
    text = dumps_canonical(payload)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_solver(problem):
    """Returns (certificate or None, status, exit code)."""
    if problem.map is None or problem.spec is None:
        _err("problem needs both 'map' and 'spec' to solve")
        return None, "schema_error", EXIT_SCHEMA
    check = verify_contraction(problem.map, problem.metric, problem.spec,
                               sampler=None if problem.spec.family.value == "banach_ball"
                               else problem.sampler,
                               trials=problem.verify_trials, seed=problem.seed)
    if check.status.value == "refuted":
        x, y = check.counterexample
        _err(f"contraction refuted at x={x!r}, y={y!r}")
        return None, "contraction_refuted", EXIT_REFUTED
    try:
        cert = solve(problem.map, problem.metric, problem.spec, problem.x0, problem.stop,
                     problem.max_iter, witnessed=check.witnessed)
    except BallPreconditionFailed as exc:
        _err(str(exc))
        return None, "precondition_failed", EXIT_PRECONDITION
    except MaxIterExceeded as exc:
        _err(str(exc))
        return exc.certificate, "max_iter_exceeded", EXIT_MAX_ITER
    except (ContractionRefuted, FixedPointNotSharedByT) as exc:
        _err(str(exc))
        return exc.certificate, "contraction_refuted", EXIT_REFUTED
    except (SoftConeError, ValueError) as exc:
        _err(str(exc))
        return None, "schema_error", EXIT_SCHEMA
    return cert, "converged", EXIT_OK


def cmd_solve(problem_path, out_path=None, trace_path=None) -> int:
    problem, code = _load(problem_path)
    if problem is None:
        return code
    cert, status, code = _run_solver(problem)
    if cert is None:
        return code
    try:
        _write_certificate(cert, out_path, status)
        if trace_path:
            write_trace(trace_path, cert.steps)
    except OSError as exc:
        _err(str(exc))
        return EXIT_SCHEMA
    return code


def cmd_trace(problem_path, out_path) -> int:
    problem, code = _load(problem_path)
    if problem is None:
        return code
    cert, _status, code = _run_solver(problem)
    if cert is None:
        return code
    try:
        write_trace(out_path if out_path else sys.stdout, cert.steps)
    except OSError as exc:
        _err(str(exc))
        return EXIT_SCHEMA
    return code


def cmd_check_axioms(problem_path, trials: int = 1000, seed: int | None = None) -> int:
    if trials is None or trials < 1:
        _err("trials must be positive")
        return EXIT_SCHEMA
    problem, code = _load(problem_path)
    if problem is None:
        return code
    seed = problem.seed if seed is None else seed
    reports = check_axioms(problem.metric, problem.sampler, trials, seed)
    for rep in reports:
        print(rep)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_AXIOM_FAILURE


def cmd_slice(problem_path, label: str | None = None, trials: int = 1000,
              seed: int | None = None, rows: int = 5) -> int:
    if trials is None or trials < 1:
        _err("trials must be positive")
        return EXIT_SCHEMA
    problem, code = _load(problem_path)
    if problem is None:
        return code
    seed = problem.seed if seed is None else seed
    metric = problem.metric
    if label is not None and label not in metric.params:
        _err(f"unknown label {label!r}")
        return EXIT_SCHEMA
    try:
        family = slice_metric(metric, seed=seed)
    except D4Violated as exc:
        lab, (x1, y1), (x2, y2) = exc.witness
        _err(str(exc))
        print(f"D4 violated at label {lab}")
        print(f"  pair 1: x={x1.tolist()} y={y1.tolist()}")
        print(f"  pair 2: x={x2.tolist()} y={y2.tolist()}")
        return EXIT_D4
    labels = [label] if label is not None else list(metric.params)
    rng = np.random.default_rng(seed)
    ok = True
    for lab in labels:
        rho = family[lab]
        print(f"label {lab}:")
        print("  r | s | d_lambda(r, s)")
        for _ in range(rows):
            r, s = rng.uniform(problem.sampler.low, problem.sampler.high,
                               size=(2, metric.point_dim))
            vals = rho(r, s)
            print("  " + " | ".join(
                ",".join(format_float(v) for v in np.ravel(a)) for a in (r, s, vals)))
        if metric.family is not None:
            member = metric.family[lab]
            rs = rng.uniform(problem.sampler.low, problem.sampler.high,
                             size=(2, trials, metric.point_dim))
            same = np.array_equal(rho(rs[0], rs[1]), member(rs[0], rs[1]))
            print(f"  matches family member {member.name}: {same}")
            ok = ok and same
        for rep in check_crisp_axioms(rho, metric.point_dim, trials, seed):
            print(f"  {rep}")
            ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_AXIOM_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="softcone",
                                     description="Soft cone metric spaces and fixed points.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the fixed-point solver and write a certificate")
    p.add_argument("--problem", required=True)
    p.add_argument("--out")
    p.add_argument("--trace")

    p = sub.add_parser("trace", help="run the solver and write only the residual trace CSV")
    p.add_argument("--problem", required=True)
    p.add_argument("--out")

    p = sub.add_parser("check-axioms", help="randomized d1-d3 and cone membership checks")
    p.add_argument("--problem", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("slice", help="split a (d4) metric into per-label crisp metrics")
    p.add_argument("--problem", required=True)
    p.add_argument("--label")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return cmd_solve(args.problem, args.out, args.trace)
    if args.command == "trace":
        return cmd_trace(args.problem, args.out)
    if args.command == "check-axioms":
        return cmd_check_axioms(args.problem, args.trials, args.seed)
    return cmd_slice(args.problem, args.label, args.trials, args.seed)


if __name__ == "__main__":
    sys.exit(main())
