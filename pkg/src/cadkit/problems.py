"""Problem files and result documents.

A problem file is JSON: variables in ascending order, named polynomials in
the text grammar, a formula as a list of clauses referencing the names, an
optional default task, and options.  Result documents serialise a CAD run:
variables, algorithm, cell count, per-cell index / sample / signs / truth,
and any warnings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

from .engine import CADResult, Clause, Constraint, EngineError, FormulaSequence
from .polyarith import Polynomial, PolyError, VarOrder, parse

TASKS = ("full", "ec", "tticad", "heuristic", "verify", "plot")


@dataclass
class Problem:
    order: VarOrder
    polynomials: Dict[str, Polynomial]
    formula: FormulaSequence
    task: Optional[str] = None
    options: dict = field(default_factory=dict)
    path: Optional[str] = None


def load_problem(path) -> Problem:
    with open(path) as fh:
        doc = json.load(fh)
    return problem_from_dict(doc, path=str(path))


def problem_from_dict(doc: dict, path: Optional[str] = None) -> Problem:
    try:
        variables = doc["variables"]
        poly_texts = doc["polynomials"]
        formula_doc = doc["formula"]
    except KeyError as e:
        raise EngineError(f"problem file missing key {e}") from None
    order = VarOrder(variables)
    polys = {}
    for name, text in poly_texts.items():
        try:
            polys[name] = parse(text, order)
        except PolyError as e:
            raise EngineError(f"polynomial {name!r}: {e}") from None
    clauses = []
    for i, cl in enumerate(formula_doc):
        cons = []
        for c in cl.get("constraints", []):
            pname = c.get("poly")
            if pname not in polys:
                raise EngineError(f"clause {i + 1} references undefined polynomial {pname!r}")
            cons.append(Constraint(polys[pname], c.get("relop", "="), name=pname))
        clauses.append(Clause(tuple(cons), ec=cl.get("ec")))
    task = doc.get("task")
    if task is not None and task not in TASKS:
        raise EngineError(f"unknown task {task!r}")
    return Problem(order=order, polynomials=polys, formula=FormulaSequence(tuple(clauses)),
                   task=task, options=doc.get("options", {}), path=path)


def corpus_path(name: str) -> Path:
    """Path of a bundled problem file (e.g. 'example1')."""
    if not name.endswith(".prob"):
        name = name + ".prob"
    return Path(str(resources.files("cadkit") / "corpus" / name))


def build_document(result: CADResult, include_projection: bool = False) -> dict:
    doc = {
        "variables": list(result.order.vars),
        "order": list(result.order.vars),
        "algorithm": result.algorithm,
        "status": result.status,
    }
    if result.status != "OK":
        doc["failures"] = [
            {"reason": f["reason"], "polynomial": str(f["polynomial"]),
             "cell": list(f.get("cell", ()))}
            for f in result.failures
        ]
        doc["warnings"] = result.warnings
        return doc
    cells = []
    for i, cell in enumerate(result.cells):
        entry = {
            "index": list(cell.index),
            "sample": [c.to_json() for c in cell.sample.coords],
            "signs": result.signs[i],
        }
        if result.truth:
            entry["truth"] = result.truth[i]
            entry["truth_any"] = any(result.truth[i])
        cells.append(entry)
    doc["cell_count"] = len(cells)
    doc["cells"] = cells
    doc["warnings"] = result.warnings
    doc["meta"] = {
        "base_cells": result.meta.get("base_cells"),
        "notes": [n for n in result.notes if n.get("kind") != "lifting_set"],
    }
    if include_projection and result.projection_set is not None:
        doc["projection"] = result.projection_set.to_json()
    return doc
