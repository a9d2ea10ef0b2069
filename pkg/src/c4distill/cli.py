"""Command-line interface emitting every figure's and table's underlying data.

Exit codes: 0 success, 1 usage error, 2 reproduction mismatch (a derived
quantity disagrees with its published value), 3 internal error.  Output goes
to stdout unless ``-o`` names a file; relative output paths are resolved
against ``$C4DISTILL_OUTDIR`` when that is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sci(x: float) -> str:
    return f"{x:.5e}"


def _geom_grid(lo: float, hi: float, points: int) -> list[float]:
    if not 0 < lo < hi:
        raise UsageError("grid needs 0 < min < max")
    if points < 2:
        raise UsageError("grid needs at least 2 points")
    ratio = (hi / lo) ** (1.0 / (points - 1))
    return [lo * ratio**i for i in range(points)]


def _lin_grid(lo: float, hi: float, points: int) -> list[float]:
    if not 0 < lo < hi:
        raise UsageError("grid needs 0 < min < max")
    step = (hi - lo) / (points - 1)
    return [lo + step * i for i in range(points)]


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    path = out
    outdir = os.environ.get("C4DISTILL_OUTDIR")
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _load_models(config: Optional[str]):
    from .routines import builtin_models, load_routines_config

    models = builtin_models()
    if config:
        models.update(load_routines_config(config))
    return models


def cmd_polynomials(args) -> int:
    from .enumeration import CoefficientMismatch, classification_report

    try:
        report = classification_report()
    except CoefficientMismatch as exc:
        sys.stderr.write(f"coefficient mismatch:\n{exc}\n")
        return EXIT_MISMATCH
    _emit(json.dumps(report, indent=2, sort_keys=True), args.output)
    return EXIT_OK


def cmd_threshold(args) -> int:
    from .planner import threshold

    models = _load_models(args.routines)
    if args.routine not in models:
        raise UsageError(f"unknown routine {args.routine!r}")
    value = threshold(models[args.routine])
    payload = {"routine": args.routine, "threshold": value}
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.output)
    return EXIT_OK


def cmd_curve(args) -> int:
    from .planner import TABLE_SEQUENCES, curve_crossings, error_curves, step_cost_curve

    models = _load_models(args.routines)
    lines = []
    if args.figure == "both-thresh":
        grid = _lin_grid(args.pmin or 1e-3, args.pmax or 0.2, args.points or 80)
        rows = error_curves(["A", "B"], grid, models)
        lines.append("p,no_distillation,A,B")
        for p, ea, eb in rows:
            lines.append(f"{_sci(p)},{_sci(p)},{_sci(ea)},{_sci(eb)}")
    elif args.figure == "regionplot":
        grid = _geom_grid(args.pmin or 1e-4, args.pmax or 0.12, args.points or 60)
        seqs = list(TABLE_SEQUENCES)
        rows = error_curves(seqs, grid, models)
        lines.append("p," + ",".join(seqs))
        for row in rows:
            lines.append(",".join(_sci(v) for v in row))
        if args.boundaries:
            lines.append("")
            lines.append("lower_sequence,upper_sequence,p_crossing")
            for a, b, p in curve_crossings(seqs, grid, models):
                lines.append(f"{a},{b},{_sci(p)}")
    elif args.figure == "distplot":
        grid = _geom_grid(args.eg_min or 1e-30, args.eg_max or 1e-3, args.points or 55)
        rows = step_cost_curve(args.p0, grid, models, max_rounds=args.max_rounds)
        lines.append("e_g,best_cost,best_sequence,b_only_cost,b_only_sequence")
        for eg, cost, name, bcost, bname in rows:
            lines.append(f"{_sci(eg)},{cost:.4f},{name},{bcost:.4f},{bname}")
    else:
        raise UsageError(f"unknown figure {args.figure!r}")
    _emit("\n".join(lines), args.output)
    return EXIT_OK


def cmd_table1(args) -> int:
    from .planner import table_rows

    models = _load_models(args.routines)
    rows = table_rows(p0=args.p0, available=models)
    lines = ["sequence,cost,output_error,improvement,cost_full,error_full"]
    for r in rows:
        lines.append(
            f"{r.sequence},{r.cost:.1f},{r.error:.0e},{r.improvement:.1f},"
            f"{r.cost:.4f},{_sci(r.error)}"
        )
    _emit("\n".join(lines), args.output)
    return EXIT_OK


def cmd_plan(args) -> int:
    from .planner import PlannerGoal, best_sequence, improvement_factor

    models = _load_models(args.routines)
    goal = PlannerGoal(
        p0=args.p0, e_g=args.eg, R=args.R, max_rounds=args.max_rounds
    )
    try:
        goal.validate()
    except ValueError as exc:
        raise UsageError(str(exc))
    result = best_sequence(goal, models)
    if result.plan is None:
        payload = {
            "feasible": False,
            "goal_error": goal.goal_error(),
            "best_error_achieved": (
                result.closest.final_error if result.closest else None
            ),
        }
    else:
        payload = {"feasible": True, "goal_error": goal.goal_error()}
        payload.update(result.plan.as_dict())
        payload["improvement_factor"] = improvement_factor(result.plan, models)
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .montecarlo import sample_routine

    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if not 0 <= args.p < 0.5:
        raise UsageError("--p must be in [0, 0.5)")
    stats = sample_routine(args.p, args.trials, args.seed)
    _emit(json.dumps(stats.report(), indent=2, sort_keys=True), args.output)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    from .montecarlo import pipeline_report, run_blocked_pipeline

    if not set(args.seq) <= {"A", "B"}:
        raise UsageError("--seq must name builtin routines, e.g. 'BA'")
    result = run_blocked_pipeline(
        args.k0, args.seq, args.p0, args.seed, grouping=args.grouping
    )
    _emit(json.dumps(pipeline_report(result), indent=2, sort_keys=True), args.output)
    return EXIT_OK


def cmd_verify_identities(args) -> int:
    from .identities import IDENTITIES, verify_all

    results = verify_all()
    lines = []
    ok_all = True
    for name, (ok, dist) in results.items():
        group = IDENTITIES[name][0]
        ok_all &= ok
        if args.verbose:
            lines.append(f"{'PASS' if ok else 'FAIL'} [{group}] {name} ({dist:.2e})")
        else:
            lines.append(f"{'PASS' if ok else 'FAIL'} [{group}] {name}")
    _emit("\n".join(lines), args.output)
    return EXIT_OK if ok_all else EXIT_MISMATCH


def cmd_dump_circuit(args) -> int:
    from .circuits import build_distillation_circuit, build_gadget_distillation

    if args.gadget_level:
        circuit, _ = build_gadget_distillation()
    else:
        circuit, _ = build_distillation_circuit()
    _emit(circuit.serialize(), args.output)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="c4distill", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("-o", "--output", help="write to file instead of stdout")
        p.add_argument(
            "--routines", help="config file with extra routine definitions"
        )
        return p

    add("polynomials", cmd_polynomials, "exact acceptance/error coefficients")

    p = add("threshold", cmd_threshold, "fixed point of the output error")
    p.add_argument("--routine", required=True)

    p = add("curve", cmd_curve, "CSV data behind the published figures")
    p.add_argument(
        "--figure", required=True, choices=["both-thresh", "regionplot", "distplot"]
    )
    p.add_argument("--pmin", type=float)
    p.add_argument("--pmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--eg-min", dest="eg_min", type=float)
    p.add_argument("--eg-max", dest="eg_max", type=float)
    p.add_argument("--p0", type=float, default=0.01)
    p.add_argument("--max-rounds", type=int, default=6)
    p.add_argument("--boundaries", action="store_true")

    p = add("table1", cmd_table1, "sequence cost/error/improvement table")
    p.add_argument("--p0", type=float, default=0.01)

    p = add("plan", cmd_plan, "cheapest sequence reaching a goal error")
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--eg", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--max-rounds", type=int, default=6)

    p = add("simulate", cmd_simulate, "Monte Carlo run of the 10-to-2 routine")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("pipeline", cmd_pipeline, "blocked multi-round pipeline")
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grouping", choices=["blocked", "instance"], default="blocked")

    p = add("verify-identities", cmd_verify_identities, "check circuit identities")
    p.add_argument("--verbose", action="store_true")

    p = add("dump-circuit", cmd_dump_circuit, "text form of the routine circuit")
    p.add_argument("--gadget-level", action="store_true")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
