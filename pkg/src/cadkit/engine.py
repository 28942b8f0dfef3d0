"""The decomposition algorithms: full sign-invariant CAD, CAD invariant with
respect to an equational constraint, and truth-table invariant CAD for a
sequence of clauses, together with per-cell truth evaluation and the
resampling-based invariance verifier.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import lifting, projection
from .polyarith import (
    Polynomial,
    PolyError,
    VarOrder,
    finest_squarefree_basis,
    normalize,
    try_exact_div,
    _sort_key,
)
from .lifting import CAD, Cell, Stack, base_cad, generate_stack, nullified_on_cell
from .realalg import (
    NULLIFIED,
    RealAlgebraic,
    SamplePoint,
    isolate_roots_at_point,
    sign_at_sample,
)


class EngineError(ValueError):
    """Invalid algorithm input (as opposed to a well-orientedness FAIL)."""


RELOPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Constraint:
    poly: Polynomial
    relop: str
    name: Optional[str] = None

    def __post_init__(self):
        if self.relop not in RELOPS:
            raise EngineError(f"bad relational operator {self.relop!r}")
        if self.poly.is_zero:
            raise EngineError("constraint polynomial must be nonzero")

    def holds(self, sign: int) -> bool:
        r = self.relop
        if r == "=":
            return sign == 0
        if r == "!=":
            return sign != 0
        if r == "<":
            return sign < 0
        if r == "<=":
            return sign <= 0
        if r == ">":
            return sign > 0
        return sign >= 0


@dataclass(frozen=True)
class Clause:
    """A conjunction of constraints with an optional designated equational
    constraint (an index into ``constraints``)."""

    constraints: Tuple[Constraint, ...]
    ec: Optional[int] = None

    def __post_init__(self):
        if not self.constraints:
            raise EngineError("clause must have at least one constraint")
        if self.ec is not None:
            if not (0 <= self.ec < len(self.constraints)):
                raise EngineError("equational-constraint index out of range")
            if self.constraints[self.ec].relop != "=":
                raise EngineError("designated equational constraint must use '='")

    def polynomials(self) -> List[Polynomial]:
        return [c.poly for c in self.constraints]


@dataclass(frozen=True)
class FormulaSequence:
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        if not self.clauses:
            raise EngineError("formula must have at least one clause")

    def polynomials(self) -> List[Polynomial]:
        out = []
        for cl in self.clauses:
            out.extend(cl.polynomials())
        return out


def evaluate_truth(cell: Cell, clause: Clause) -> bool:
    """Truth of a conjunction at the cell's sample point (exact signs)."""
    for c in clause.constraints:
        if not c.holds(sign_at_sample(c.poly, cell.sample)):
            return False
    return True


def implicit_ec(formula: FormulaSequence) -> Polynomial:
    """Product of the designated equational constraints across all clauses."""
    polys = []
    for i, cl in enumerate(formula.clauses):
        if cl.ec is None:
            raise EngineError(f"no implicit EC exists: clause {i + 1} has no equational constraint")
        polys.append(cl.constraints[cl.ec].poly)
    out = polys[0]
    for p in polys[1:]:
        out = out * p
    return out


# ---------------------------------------------------------------------------
# results


@dataclass
class CADResult:
    status: str                       # "OK" | "FAIL"
    algorithm: str
    order: VarOrder
    cells: List[Cell] = field(default_factory=list)
    signs: List[Dict[str, int]] = field(default_factory=list)
    truth: List[List[bool]] = field(default_factory=list)
    poly_names: Dict[str, Polynomial] = field(default_factory=dict)
    formula: Optional[FormulaSequence] = None
    projection_set: Optional[projection.ProjectionSet] = None
    warnings: List[dict] = field(default_factory=list)
    notes: List[dict] = field(default_factory=list)
    failures: List[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    def truth_any(self, i: int) -> bool:
        return any(self.truth[i]) if self.truth else False


def _named(polys: Dict[str, Polynomial]) -> List[Tuple[str, Polynomial]]:
    return sorted(polys.items())


def _finish(result: CADResult) -> CADResult:
    """Compute per-cell signs and truth values."""
    named = _named(result.poly_names)
    for cell in result.cells:
        result.signs.append({name: sign_at_sample(p, cell.sample) for name, p in named})
    if result.formula is not None:
        for cell in result.cells:
            result.truth.append([evaluate_truth(cell, cl) for cl in result.formula.clauses])
    return result


def _fail(algorithm: str, order: VarOrder, failures: List[dict], *,
          warnings=None, notes=None, projection_set=None, meta=None) -> CADResult:
    failures = sorted(failures, key=lambda f: tuple(f.get("cell", ())))
    return CADResult(
        status="FAIL", algorithm=algorithm, order=order, failures=failures,
        warnings=warnings or [], notes=notes or [],
        projection_set=projection_set, meta=meta or {},
    )


def _base_case_result(algorithm: str, order: VarOrder, polys: Sequence[Polynomial],
                      names: Dict[str, Polynomial], formula) -> CADResult:
    stack = base_cad(polys, order)
    res = CADResult(status="OK", algorithm=algorithm, order=order,
                    cells=stack.cells, poly_names=names, formula=formula)
    res.meta["base_cells"] = len(stack.cells)
    res.meta["base_roots"] = [c.sample.coords[0] for c in stack.cells if c.index[0] % 2 == 0]
    res.meta["level_bases"] = {}
    res.meta["top_lifting"] = {(): list(polys)}
    return res


# ---------------------------------------------------------------------------
# the full sign-invariant CAD as a task


def full_cad(named_polys: Dict[str, Polynomial], order: VarOrder,
             formula: Optional[FormulaSequence] = None) -> CADResult:
    """Sign-invariant CAD for all input polynomials (McCallum projection)."""
    cad = lifting.cad_full(list(named_polys.values()), order, top_level=len(order))
    res = CADResult(status="OK", algorithm="full", order=order, cells=cad.cells,
                    poly_names=dict(named_polys), formula=formula,
                    projection_set=cad.projection,
                    warnings=list(cad.warnings), notes=list(cad.notes))
    res.meta["base_cells"] = len(cad.level_cells[0])
    res.meta["base_roots"] = cad.base_roots
    res.meta["level_bases"] = {k: v for k, v in cad.bases.items() if k >= 2}
    res.meta["top_lifting"] = None  # uniform lifting: level_bases[n]
    res.meta["cad"] = cad
    res.meta["invariant_names"] = sorted(named_polys)
    return _finish(res)


# ---------------------------------------------------------------------------
# the lifting-set computation (per base cell)


_LIFT_FAIL = "FAIL"


def lifting_set(cell: Cell, basis: Sequence[Polynomial], ec_basis: Sequence[Polynomial],
                var: str, record: Optional[dict] = None):
    """Polynomials to lift with over ``cell``: the equational-constraint basis
    when none of it is nullified; the full basis over a point or when the
    excluded projection is constant and nonzero on the cell; FAIL otherwise."""
    top = [p for p in ec_basis if p.main_variable() == var]
    nullified = [p for p in top if nullified_on_cell(p, cell)]
    if not nullified:
        return list(ec_basis)
    if record is not None:
        record["nullified"] = [str(p) for p in nullified]
    if cell.dimension == 0:
        if record is not None:
            record["branch"] = "point"
        return list(basis)
    a_top = [p for p in basis if p.main_variable() == var]
    e_top = [p for p in ec_basis if p.main_variable() == var]
    excl = projection.excluded(a_top, e_top, var)
    if record is not None:
        record["excluded"] = [str(p) for p in excl]
    if all(_constant_nonzero_on_cell(p, cell) for p in excl):
        if record is not None:
            record["branch"] = "rescued"
        return list(basis)
    return _LIFT_FAIL


def _constant_nonzero_on_cell(p: Polynomial, cell: Cell) -> bool:
    """True when p is constant on the cell (every variable it involves is a
    section coordinate) with a nonzero value."""
    for v in p.variables():
        k = cell.sample.order.index(v)
        if k >= cell.level or not cell.is_section_coordinate(k):
            return False
    return sign_at_sample(p, cell.sample) != 0


# ---------------------------------------------------------------------------
# CAD with respect to an equational constraint


def ec_cad(f: Polynomial, others: Iterable[Polynomial], order: VarOrder,
           named_polys: Optional[Dict[str, Polynomial]] = None,
           formula: Optional[FormulaSequence] = None,
           all_failures: bool = False) -> CADResult:
    """CAD sign-invariant for f and, on cells where f vanishes, for the other
    polynomials; FAIL when the input is not well-oriented."""
    if f.is_constant or f.is_zero:
        raise EngineError("equational constraint must be non-constant")
    others = list(others)
    names = dict(named_polys) if named_polys else _auto_names([f] + others)
    n = len(order)
    fb = finest_squarefree_basis([f])
    if n == 1:
        res = _base_case_result("ec", order, fb.polys, names, formula)
        res.meta["invariant_names"] = _globally_invariant(names, fb.polys)
        return _finish(res)
    if f.level() < n:
        raise EngineError("equational constraint must involve the highest variable")
    basis = finest_squarefree_basis([f] + others)
    ec_basis = [b for b in basis.polys if try_exact_div(f, b) is not None]
    cells, base, fails, warn, notes, ps, lift_map = _ec_style_lift(
        order, [basis], [(list(basis.polys), ec_basis)], all_failures)
    if fails:
        return _fail("ec", order, fails, warnings=warn, notes=notes, projection_set=ps)
    res = CADResult(status="OK", algorithm="ec", order=order, cells=cells,
                    poly_names=names, formula=formula, projection_set=ps,
                    warnings=warn, notes=notes)
    _attach_base_meta(res, base, lift_map)
    res.meta["invariant_names"] = _globally_invariant(names, ec_basis)
    return _finish(res)


def tticad(formula: FormulaSequence, order: VarOrder,
           named_polys: Optional[Dict[str, Polynomial]] = None,
           all_failures: bool = False) -> CADResult:
    """Truth-table invariant CAD for a sequence of clauses; clauses without a
    designated equational constraint contribute all their polynomials to the
    constraint set."""
    names = dict(named_polys) if named_polys else _auto_names(formula.polynomials())
    n = len(order)
    clause_data = []
    base_polys = []
    for cl in formula.clauses:
        a = cl.polynomials()
        if cl.ec is not None:
            e = [cl.constraints[cl.ec].poly]
        else:
            e = list(a)
        fb = finest_squarefree_basis(e)
        base_polys.extend(fb.polys)
        clause_data.append((a, e))
    if n == 1:
        fb_all = finest_squarefree_basis(base_polys)
        return _finish(_base_case_result("tticad", order, fb_all.polys, names, formula))
    pairs = []
    for a, e in clause_data:
        b = finest_squarefree_basis(a)
        ec_b = [p for p in b.polys
                if any(try_exact_div(ei, p) is not None for ei in e)]
        if not ec_b:
            raise EngineError("clause constraint set has no usable basis")
        pairs.append((b, ec_b))
    cells, base, fails, warn, notes, ps, lift_map = _ec_style_lift(
        order, [b for b, _ in pairs], [(list(b.polys), e) for (b, e) in pairs],
        all_failures)
    if fails:
        return _fail("tticad", order, fails, warnings=warn, notes=notes, projection_set=ps)
    res = CADResult(status="OK", algorithm="tticad", order=order, cells=cells,
                    poly_names=names, formula=formula, projection_set=ps,
                    warnings=warn, notes=notes)
    _attach_base_meta(res, base, lift_map)
    inv_basis = []
    for _b, e in pairs:
        inv_basis.extend(e)
    res.meta["invariant_names"] = _globally_invariant(names, inv_basis)
    return _finish(res)


def _ec_style_lift(order: VarOrder, content_bases, pairs, all_failures: bool):
    """Shared machinery: build the reduced projection set, the lower CAD, the
    per-cell lifting sets, and the final stacks."""
    n = len(order)
    var = order.vars[n - 1]
    ps = projection.ProjectionSet(order, n)
    contents = []
    for b in content_bases:
        contents.extend(b.contents)
    # level-n inputs for the record
    for bpolys, _e in pairs:
        for p in bpolys:
            ps.add(p, projection.TAG_INPUT)
    op_pairs = []
    lower = []
    for bpolys, e in pairs:
        b_top = [p for p in bpolys if p.main_variable() == var]
        e_top = [p for p in e if p.main_variable() == var]
        lower.extend(p for p in bpolys if p.main_variable() != var)
        if not e_top:
            raise EngineError("designated equational constraint must involve the highest variable")
        op_pairs.append((b_top, e_top))
    if len(op_pairs) == 1:
        proj = projection.reduced(op_pairs[0][1], op_pairs[0][0], var)
    else:
        proj = projection.clause_system(op_pairs, var)
    lower_tags = {}
    pool = []
    for c in contents:
        pool.append(c)
        lower_tags[normalize(c)] = projection.TAG_CONTENT
    for q, tag in proj.items():
        pool.append(q)
        lower_tags.setdefault(normalize(q), tag)
    for p in lower:
        pool.append(p)
        lower_tags.setdefault(normalize(p), projection.TAG_INPUT)
    d_cad = lifting.cad_full(pool, order, top_level=n - 1, tags=lower_tags)
    for k, polys in d_cad.projection.levels.items():
        for p in polys:
            ps.add(p, d_cad.projection.provenance[p])
    ps.finalize()
    warn = list(d_cad.warnings)
    notes = list(d_cad.notes)
    fails = []
    if warn:
        for w in warn:
            fails.append({"reason": "not well-oriented (projection polynomial "
                                    "nullified on a positive-dimensional cell)",
                          "polynomial": w["polynomial"], "cell": tuple(w["cell"])})
        if not all_failures:
            fails = fails[:1]
            return None, d_cad, fails, warn, notes, ps, None
    sink = lifting.CAD(order, n)
    cells = []
    lift_map = {}
    for cell in d_cad.cells:
        record = {}
        union: List[Polynomial] = []
        seen = set()
        failed = None
        for bpolys, e in pairs:
            ls = lifting_set(cell, bpolys, e, var, record)
            if ls == _LIFT_FAIL:
                failed = {"reason": "not well-oriented (equational constraint nullified, "
                                    "excluded projection not constant on cell)",
                          "polynomial": record.get("nullified", ["?"])[0],
                          "cell": cell.index}
                break
            for p in ls:
                q = normalize(p)
                if q not in seen:
                    seen.add(q)
                    union.append(p)
        if failed:
            fails.append(failed)
            if all_failures:
                continue
            return None, d_cad, fails, warn, notes, ps, None
        if record:
            notes.append({"kind": "lifting_set", "cell": list(cell.index), **record})
        top = [p for p in union if p.main_variable() == var]
        st = generate_stack(cell, top, on_nullified="omit", sink=sink)
        lift_map[cell.index] = top
        cells.extend(st.cells)
    notes.extend(sink.notes)
    warn.extend(sink.warnings)
    if fails:
        return None, d_cad, fails, warn, notes, ps, None
    return cells, d_cad, [], warn, notes, ps, lift_map


def _attach_base_meta(res: CADResult, base_cad_obj: CAD, lift_map) -> None:
    res.meta["base_cells"] = len(base_cad_obj.cells)
    res.meta["base_roots"] = base_cad_obj.base_roots
    res.meta["level_bases"] = {k: v for k, v in base_cad_obj.bases.items() if k >= 2}
    res.meta["top_lifting"] = lift_map
    res.meta["base_cad"] = base_cad_obj
    sizes: Dict[tuple, int] = {}
    for c in res.cells:
        sizes[c.index[:-1]] = sizes.get(c.index[:-1], 0) + 1
    res.meta["stack_sizes"] = sizes


def _auto_names(polys: Sequence[Polynomial]) -> Dict[str, Polynomial]:
    out = {}
    for i, p in enumerate(polys):
        out[f"p{i + 1}"] = p
    return out


def _globally_invariant(names: Dict[str, Polynomial], inv_basis: Sequence[Polynomial]) -> List[str]:
    """Names of input polynomials whose sign is invariant on every cell: those
    whose squarefree factors all belong to the always-lifted constraint basis."""
    out = []
    for name, p in sorted(names.items()):
        factors = finest_squarefree_basis([p]).polys
        if factors and all(
                any(normalize(b) == normalize(q) or try_exact_div(b, q) is not None
                    for b in inv_basis)
                for q in factors):
            out.append(name)
    return out


# ---------------------------------------------------------------------------
# invariance verification by resampling


def verify_invariance(result: CADResult, samples_per_cell: int, seed: int = 0) -> dict:
    """Check sign- and truth-invariance: recompute signs at each stored
    sample, and draw extra rational points inside every full-dimensional cell
    (coordinate-wise between its bounding section roots, re-derived at the
    drawn prefix) comparing signs and clause truth values."""
    if result.status != "OK":
        raise EngineError("cannot verify a FAIL result")
    rng = random.Random(seed)
    n = len(result.order)
    named = _named(result.poly_names)
    inv = result.meta.get("invariant_names")
    # polynomials whose sign is invariant on every cell (others are only
    # pinned over the sections of their clause's equational constraint)
    resample_named = [t for t in named if inv is None or t[0] in inv]
    violations = []
    resampled = 0

    stack_sizes_top: Dict[tuple, int] = {}
    for c in result.cells:
        stack_sizes_top[c.index[:-1]] = stack_sizes_top.get(c.index[:-1], 0) + 1
    mid_sizes: Dict[int, Dict[tuple, int]] = {}
    base_cad_obj = result.meta.get("base_cad") or result.meta.get("cad")
    if base_cad_obj is not None:
        for lvl in range(2, len(base_cad_obj.level_cells) + 1):
            sizes: Dict[tuple, int] = {}
            for c in base_cad_obj.level_cells[lvl - 1]:
                sizes[c.index[:-1]] = sizes.get(c.index[:-1], 0) + 1
            mid_sizes[lvl] = sizes

    for ci, cell in enumerate(result.cells):
        # stored-sample consistency (catches corrupted data)
        for name, p in named:
            s = sign_at_sample(p, cell.sample)
            if s != result.signs[ci][name]:
                violations.append({"cell": list(cell.index), "kind": "sign",
                                   "poly": name, "stored": result.signs[ci][name],
                                   "recomputed": s})
        if result.formula is not None and result.truth:
            for k, cl in enumerate(result.formula.clauses):
                t = evaluate_truth(cell, cl)
                if t != result.truth[ci][k]:
                    violations.append({"cell": list(cell.index), "kind": "truth",
                                       "clause": k, "stored": result.truth[ci][k],
                                       "recomputed": t})
        if cell.dimension != n:
            continue
        for _ in range(samples_per_cell):
            point = _draw_point_in_cell(result, cell, rng, mid_sizes, stack_sizes_top)
            if point is None:
                violations.append({"cell": list(cell.index), "kind": "structure",
                                   "detail": "stack shape changed at resampled prefix"})
                break
            resampled += 1
            vals = dict(zip(result.order.vars, point))
            for name, p in resample_named:
                v = p.evaluate(vals)
                s = (v > 0) - (v < 0)
                if s != result.signs[ci][name]:
                    violations.append({"cell": list(cell.index), "kind": "sign",
                                       "poly": name, "stored": result.signs[ci][name],
                                       "recomputed": s,
                                       "point": [str(q) for q in point]})
            if result.formula is not None and result.truth:
                for k, cl in enumerate(result.formula.clauses):
                    t = all(c.holds(_sign_of(c.poly.evaluate(vals))) for c in cl.constraints)
                    if t != result.truth[ci][k]:
                        violations.append({"cell": list(cell.index), "kind": "truth",
                                           "clause": k, "stored": result.truth[ci][k],
                                           "recomputed": t,
                                           "point": [str(q) for q in point]})
    return {
        "violations": violations,
        "cells_checked": len(result.cells),
        "points_resampled": resampled,
        "samples_per_cell": samples_per_cell,
        "seed": seed,
    }


def _sign_of(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def _draw_point_in_cell(result: CADResult, cell: Cell, rng: random.Random,
                        mid_sizes, stack_sizes_top) -> Optional[List[Fraction]]:
    """Random rational point in a full-dimensional cell, built level by level
    so the point provably stays inside the cell (same stack position)."""
    n = len(result.order)
    point: List[Fraction] = []
    base_roots = result.meta["base_roots"]
    for k in range(1, n + 1):
        if k == 1:
            roots = base_roots
        else:
            prefix = SamplePoint(result.order,
                                 [RealAlgebraic.from_rational(q, result.order.vars[i])
                                  for i, q in enumerate(point)])
            if k < n:
                polys = result.meta["level_bases"].get(k, [])
            else:
                lm = result.meta.get("top_lifting")
                if lm is None:
                    polys = result.meta["level_bases"].get(n, [])
                else:
                    polys = lm[cell.index[:n - 1]]
            groups = []
            for p in polys:
                r = isolate_roots_at_point(p, prefix)
                if r is NULLIFIED:
                    continue
                groups.append(r)
            roots = lifting._merge_roots(groups)
            expected = stack_sizes_top.get(cell.index[:k - 1]) if k == n else (
                mid_sizes.get(k, {}).get(cell.index[:k - 1]))
            if expected is not None and 2 * len(roots) + 1 != expected:
                return None
        gap = (cell.index[k - 1] - 1) // 2
        left = roots[gap - 1] if gap >= 1 else None
        right = roots[gap] if gap < len(roots) else None
        point.append(_random_rational_between(left, right, rng))
    return point


def _random_rational_between(left: Optional[RealAlgebraic], right: Optional[RealAlgebraic],
                             rng: random.Random) -> Fraction:
    from math import ceil, floor
    if left is None and right is None:
        return Fraction(rng.randrange(-64, 65), 32)
    if left is None:
        lo = right.interval[0]
        return Fraction(floor(lo)) - Fraction(rng.randrange(1, 129), 64)
    if right is None:
        hi = left.interval[1]
        return Fraction(ceil(hi)) + Fraction(rng.randrange(1, 129), 64)
    while not left.interval[1] < right.interval[0]:
        left.refine()
        right.refine()
    lo, hi = left.interval[1], right.interval[0]
    return lo + (hi - lo) * Fraction(rng.randrange(1, 64), 64)


# ---------------------------------------------------------------------------
# structural invariants (used by tests and the verify task)


def check_structure(result: CADResult) -> List[str]:
    """Cylindricity and stack-parity violations (empty list when sound)."""
    problems = []
    n = len(result.order)
    by_prefix: Dict[tuple, List[Cell]] = {}
    for c in result.cells:
        if len(c.index) != n or len(c.sample.coords) != n:
            problems.append(f"cell {c.index}: wrong level")
        by_prefix.setdefault(c.index[:-1], []).append(c)
    from .realalg import compare
    for prefix, cells in by_prefix.items():
        if len(cells) % 2 == 0:
            problems.append(f"stack {prefix}: even size {len(cells)}")
        cells.sort(key=lambda c: c.index[-1])
        for i, c in enumerate(cells):
            if c.index[-1] != i + 1:
                problems.append(f"stack {prefix}: index gap at {c.index}")
        sections = [c for c in cells if c.index[-1] % 2 == 0]
        for a, b in zip(sections, sections[1:]):
            if compare(a.sample.coords[-1], b.sample.coords[-1]) >= 0:
                problems.append(f"stack {prefix}: sections out of order")
        # cylindricity: identical index prefix -> identical base sample
        base0 = cells[0].sample.coords[:-1]
        for c in cells[1:]:
            if any(x is not y for x, y in zip(base0, c.sample.coords[:-1])):
                problems.append(f"stack {prefix}: differing base samples")
    return problems
