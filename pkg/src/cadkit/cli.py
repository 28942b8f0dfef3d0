"""Command-line front end.

Subcommands: full, ec, tticad (build a CAD and print the result document),
heuristic (score candidate formulations), verify (rebuild and resample for
invariance violations), plot (render a two-variable result to SVG, with an
optional CSV of the cell table).

Exit codes: 0 success, 1 input error, 2 well-orientedness FAIL.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import engine, heuristics, problems
from .engine import EngineError
from .polyarith import PolyError


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EngineError, PolyError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cadkit",
                                description="Exact cylindrical algebraic decomposition")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("problem", help="problem file (JSON)")
        sp.add_argument("--summary", action="store_true", help="print only the cell count")
        sp.add_argument("--dump-projection", action="store_true",
                        help="include the projection set with provenance tags")
        sp.add_argument("--out", help="also write the result document to a file")
        sp.add_argument("--all-failures", action="store_true",
                        help="keep scanning after the first well-orientedness failure")
        sp.add_argument("--seed", type=int, default=0, help="verification sampling seed")

    for name, helptext in [("full", "full sign-invariant CAD"),
                           ("ec", "CAD invariant for the equational constraint"),
                           ("tticad", "truth-table invariant CAD for the clause sequence")]:
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.set_defaults(func=_run_cad, task=name)

    sp = sub.add_parser("heuristic", help="rank problem formulations")
    sp.add_argument("problem")
    sp.add_argument("--measure", default="sotd",
                    help="sotd | ndrr | sotd,ndrr | weighted:w1,w2")
    sp.add_argument("--choose", default="order", help="order | ec | split | all")
    sp.add_argument("--blocks", help="variable blocks, lowest first, e.g. 'x;y,z'")
    sp.add_argument("--limit", type=int, default=64, help="candidate cap")
    sp.set_defaults(func=_run_heuristic)

    sp = sub.add_parser("verify", help="re-derive and resample a CAD for invariance violations")
    sp.add_argument("problem")
    sp.add_argument("--task", choices=["full", "ec", "tticad"],
                    help="algorithm to verify (default: the file's task, else tticad)")
    sp.add_argument("--samples", type=int, default=5, help="extra points per full-dimensional cell")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_run_verify)

    sp = sub.add_parser("plot", help="render a two-variable result to SVG")
    sp.add_argument("problem")
    sp.add_argument("--task", choices=["full", "ec", "tticad"])
    sp.add_argument("--out", default="cad.svg", help="output SVG path")
    sp.add_argument("--viewport", help="xmin,xmax,ymin,ymax")
    sp.add_argument("--grid", type=int, default=400, help="contour grid resolution")
    sp.add_argument("--table", help="also write the cell table as CSV")
    sp.set_defaults(func=_run_plot)
    return p


def _threads_option() -> int:
    raw = os.environ.get("CADKIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise EngineError(f"CADKIT_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise EngineError("CADKIT_THREADS must be at least 1")
    return n


def _compute(problem: problems.Problem, task: str, all_failures: bool = False) -> engine.CADResult:
    _threads_option()  # validated cap; the implementation runs deterministically
    if task == "full":
        return engine.full_cad(problem.polynomials, problem.order, formula=problem.formula)
    if task == "ec":
        formula = problem.formula
        if len(formula.clauses) == 1 and formula.clauses[0].ec is not None:
            cl = formula.clauses[0]
            f = cl.constraints[cl.ec].poly
            others = [c.poly for i, c in enumerate(cl.constraints) if i != cl.ec]
        else:
            f = engine.implicit_ec(formula)
            others = [c.poly for cl in formula.clauses
                      for i, c in enumerate(cl.constraints) if i != cl.ec]
        return engine.ec_cad(f, others, problem.order, named_polys=problem.polynomials,
                             formula=formula, all_failures=all_failures)
    if task == "tticad":
        return engine.tticad(problem.formula, problem.order,
                             named_polys=problem.polynomials, all_failures=all_failures)
    raise EngineError(f"cannot compute task {task!r}")


def _run_cad(args) -> int:
    problem = problems.load_problem(args.problem)
    result = _compute(problem, args.task, all_failures=args.all_failures)
    doc = problems.build_document(result, include_projection=args.dump_projection)
    text = json.dumps(doc, indent=2, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.summary:
        if result.status == "OK":
            print(f"cells: {result.cell_count}")
        else:
            print("FAIL: not well-oriented")
    else:
        print(text)
    return 0 if result.status == "OK" else 2


def _run_heuristic(args) -> int:
    problem = problems.load_problem(args.problem)
    spec = heuristics.MeasureSpec.parse(args.measure)
    blocks = None
    if args.blocks:
        blocks = [blk.split(",") for blk in args.blocks.split(";")]
    choose = args.choose
    dims = {"order", "ec", "split"} if choose == "all" else {choose}
    if not dims <= {"order", "ec", "split"}:
        raise EngineError(f"unknown choose dimension {args.choose!r}")
    cands, truncated = heuristics.enumerate_formulations(
        problem.order, problem.formula.clauses, dims, blocks=blocks, limit=args.limit)
    best, rows = heuristics.rank_formulations(cands, spec)
    table = []
    for r in rows:
        row = {"formulation": r["formulation"].label,
               "scores": {m: s for m, s in zip(spec.measures, r["scores"])}}
        if "weighted" in r:
            row["weighted"] = str(r["weighted"])
        table.append(row)
    doc = {
        "measure": args.measure,
        "normalisation": "each measure divided by its maximum over the candidates"
                         if spec.weights else None,
        "candidates": table,
        "truncated": truncated,
        "chosen": best.label,
        "chosen_order": list(best.order.vars),
        "chosen_ec": [cl.ec for cl in best.clauses],
        "chosen_clauses": [[c.name or str(c.poly) for c in cl.constraints] for cl in best.clauses],
    }
    print(json.dumps(doc, indent=2))
    return 0


def _run_verify(args) -> int:
    problem = problems.load_problem(args.problem)
    task = args.task or problem.task or "tticad"
    if task not in ("full", "ec", "tticad"):
        task = "tticad"
    result = _compute(problem, task)
    if result.status != "OK":
        print(json.dumps(problems.build_document(result), indent=2))
        return 2
    report = engine.verify_invariance(result, args.samples, seed=args.seed)
    structure = engine.check_structure(result)
    doc = {
        "task": task,
        "cells": result.cell_count,
        "violations": report["violations"],
        "points_resampled": report["points_resampled"],
        "structure_problems": structure,
        "seed": args.seed,
    }
    print(json.dumps(doc, indent=2, default=str))
    return 0 if not report["violations"] and not structure else 1


def _run_plot(args) -> int:
    from . import plotting  # matplotlib import deferred to the plot task
    problem = problems.load_problem(args.problem)
    task = args.task or problem.task or "tticad"
    if task not in ("full", "ec", "tticad"):
        task = "tticad"
    result = _compute(problem, task)
    if result.status != "OK":
        print(json.dumps(problems.build_document(result), indent=2))
        return 2
    viewport = None
    if args.viewport:
        viewport = [float(v) for v in args.viewport.split(",")]
        if len(viewport) != 4:
            raise EngineError("viewport must be xmin,xmax,ymin,ymax")
    info = plotting.render_plot(result, args.out, viewport=viewport,
                                grid=args.grid, table_path=args.table)
    print(json.dumps(info, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
