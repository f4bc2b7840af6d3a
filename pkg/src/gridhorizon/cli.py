"""Command-line entry point: ``gridhorizon <subcommand> ...``.

Exit codes: 0 success, 2 infeasible, 3 a limit was hit before optimality
was proven, 4 invalid input (instance, plan, spec) or a plan that fails
verification.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import bnb
from .builder import build
from .instance import (InstanceParseError, InstanceValidationError, load_instance,
                       save_instance)
from .lpformat import write_lp
from .oracle import OracleError, enumerate as oracle_enumerate
from .plan import PlanError, extract_plan, load_plan, plan_to_dict, save_plan
from .reference import reference_instance
from .render import render
from .scenarios import STUDIES
from .sweep import SweepError, load_spec, result_to_dict, run_sweep, solve_instance
from .verify import verify

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3
EXIT_INVALID = 4


def _instance(ref: str):
    """A path, ``reference``, or the name of a built-in study."""
    if ref == "reference":
        return reference_instance()
    if ref in STUDIES and not Path(ref).exists():
        return STUDIES[ref]()
    return load_instance(ref)


def _num(x):
    return x if math.isfinite(x) else None


def report_to_dict(report: bnb.SolveReport) -> dict:
    verdict = report.verification
    return {
        "status": report.status,
        "incumbent_objective": _num(report.incumbent_objective),
        "best_bound": _num(report.best_bound),
        "gap": _num(report.gap),
        "nodes_explored": report.nodes_explored,
        "lp_iterations": report.lp_iterations,
        "wall_time": report.wall_time,
        "incumbents": [{"node": i.node, "objective": i.objective} for i in report.incumbents],
        "rejected_incumbents": len(report.rejected),
        "verification": verdict.to_dict() if verdict is not None else None,
    }


def cmd_solve(args) -> int:
    inst = _instance(args.instance)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    if args.dump_lp:
        model, _ = build(inst)
        text = write_lp(model)
        if out:
            (out / "model.lp").write_text(text)
        else:
            sys.stdout.write(text)
    params = bnb.BnbParams(gap_tol=args.gap, time_limit=args.time_limit,
                           node_limit=args.node_limit, deterministic=args.deterministic,
                           log_interval=args.log_interval)
    report, plan, verdict = solve_instance(inst, params)
    print(f"status={report.status} objective={report.incumbent_objective:.6f} "
          f"bound={report.best_bound:.6f} gap={report.gap:.3e} nodes={report.nodes_explored} "
          f"time={report.wall_time:.2f}s")
    if plan is not None:
        sys.stdout.write(render(plan, "text", inst))
        print(f"verification: {verdict.render()}")
    if out:
        (out / "report.json").write_text(json.dumps(report_to_dict(report), indent=1) + "\n")
        if plan is not None:
            save_plan(plan, out / "plan.json")
            for fmt, ext in (("dot", "dot"), ("csv", "csv"), ("text", "txt")):
                (out / f"plan.{ext}").write_text(render(plan, fmt, inst))
    if report.status == bnb.STATUS_INFEASIBLE:
        return EXIT_INFEASIBLE
    if report.status != bnb.STATUS_OPTIMAL:
        return EXIT_LIMIT
    return EXIT_OK if verdict.ok else EXIT_INVALID


def cmd_sweep(args) -> int:
    spec = load_spec(args.spec)
    if args.workers:
        spec.workers = args.workers
    result = run_sweep(spec)
    sys.stdout.write(render(result, "text"))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.json").write_text(json.dumps(result_to_dict(result), indent=1) + "\n")
        for fmt, ext in (("csv", "csv"), ("text", "txt"), ("dot", "dot")):
            (out / f"sweep.{ext}").write_text(render(result, fmt))
    statuses = {p.status for p in result.points}
    if any(p.verified is False for p in result.points):
        return EXIT_INVALID
    if statuses & {bnb.STATUS_FEASIBLE, bnb.STATUS_LIMIT}:
        return EXIT_LIMIT
    if bnb.STATUS_INFEASIBLE in statuses:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _instance(args.instance)
    plan = load_plan(args.plan)
    verdict = verify(inst, plan, tol=args.tol)
    print(verdict.render())
    return EXIT_OK if verdict.ok else EXIT_INVALID


def cmd_oracle(args) -> int:
    inst = _instance(args.instance)
    model, cat = build(inst)
    try:
        res = oracle_enumerate(model, cat, limit=args.limit, workers=args.workers)
    except OracleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    print(f"status={res.status} objective={res.objective:.6f} "
          f"combinations={res.combinations_evaluated} feasible={res.combinations_feasible}")
    if not res.feasible:
        return EXIT_INFEASIBLE
    plan = extract_plan(res.assignment, cat, inst)
    sys.stdout.write(render(plan, "text", inst))
    if args.out:
        save_plan(plan, args.out)
    return EXIT_OK


def cmd_reference(args) -> int:
    inst = STUDIES[args.study]() if args.study else reference_instance()
    save_instance(inst, args.emit)
    print(f"wrote {args.emit}")
    return EXIT_OK


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridhorizon",
                                description="Multi-year grid investment planning.")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance to optimality")
    s.add_argument("instance", help="instance file, 'reference', or a study name")
    s.add_argument("--gap", type=float, default=1e-6, help="relative gap tolerance")
    s.add_argument("--time-limit", type=float, default=None, help="seconds")
    s.add_argument("--node-limit", type=int, default=None)
    s.add_argument("--deterministic", action="store_true",
                   help="single-threaded fixed-order search")
    s.add_argument("--dump-lp", action="store_true", help="write the model in LP format")
    s.add_argument("--log-interval", type=int, default=0, help="nodes between progress lines")
    s.add_argument("--out", help="directory for plan, report and renderings")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sweep", help="run a one-parameter sweep")
    s.add_argument("spec", help="sweep spec file")
    s.add_argument("--out", help="directory for sweep results")
    s.add_argument("--workers", type=int, default=0, help="points solved in parallel")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify", help="check a plan file against an instance")
    s.add_argument("instance")
    s.add_argument("plan")
    s.add_argument("--tol", type=float, default=1e-6)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", help="brute-force optimum of a small instance")
    s.add_argument("instance")
    s.add_argument("--limit", type=int, default=20, help="maximum open decision binaries")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="write the optimal plan here")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("reference", help="write the built-in reference instance")
    s.add_argument("--emit", required=True, help="output path")
    s.add_argument("--study", choices=sorted(STUDIES), help="emit a study variant instead")
    s.set_defaults(func=cmd_reference)
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        return args.func(args)
    except InstanceValidationError as exc:
        for d in exc.diagnostics:
            print(d.render(), file=sys.stderr)
        return EXIT_INVALID
    except (InstanceParseError, PlanError, SweepError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
