"""cadkit: exact cylindrical algebraic decomposition.

Sign-invariant CADs via McCallum projection, CADs invariant with respect to
a designated equational constraint, and truth-table invariant CADs for
sequences of clauses, with formulation heuristics (sotd / ndrr / greedy
variable ordering) and an exact real-algebraic-number back end.
"""

from .polyarith import Basis, Polynomial, PolyError, VarOrder, parse
from .realalg import NULLIFIED, RealAlgebraic, SamplePoint, compare, isolate_roots, sign_at
from .projection import ProjectionSet, full_projection
from .lifting import CAD, Cell, Stack, base_cad, cad_full, generate_stack, nullified_on_cell
from .engine import (
    CADResult,
    Clause,
    Constraint,
    EngineError,
    FormulaSequence,
    ec_cad,
    evaluate_truth,
    full_cad,
    implicit_ec,
    lifting_set,
    tticad,
    verify_invariance,
)
from .heuristics import Formulation, MeasureSpec, greedy_order, ndrr, rank_formulations, sotd
from .problems import Problem, build_document, corpus_path, load_problem

__version__ = "0.1.0"

__all__ = [
    "Basis", "CAD", "CADResult", "Cell", "Clause", "Constraint", "EngineError",
    "Formulation", "FormulaSequence", "MeasureSpec", "NULLIFIED", "Polynomial",
    "PolyError", "Problem", "ProjectionSet", "RealAlgebraic", "SamplePoint",
    "Stack", "VarOrder", "base_cad", "build_document", "cad_full", "compare",
    "corpus_path", "ec_cad", "evaluate_truth", "full_cad", "full_projection",
    "generate_stack", "greedy_order", "implicit_ec", "isolate_roots",
    "lifting_set", "load_problem", "ndrr", "nullified_on_cell", "parse",
    "rank_formulations", "sign_at", "sotd", "tticad", "verify_invariance",
]
