"""Problem-formulation measures and choosers: sum of total degrees (sotd),
number of distinct real roots of the univariate projection polynomials
(ndrr), a greedy variable-ordering search, and ranking of candidate
formulations (variable order, designated equational constraint, clause
splitting) by these measures.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import projection, realalg
from .engine import Clause, Constraint, EngineError, FormulaSequence
from .polyarith import Polynomial, PolyError, VarOrder, finest_squarefree_basis, normalize, try_exact_div


def sotd(polys: Iterable[Polynomial]) -> int:
    """Sum over polynomials and monomials of each monomial's total degree."""
    total = 0
    for p in polys:
        for e, _c in p.terms:
            total += sum(e)
    return total


def ndrr(polys: Iterable[Polynomial]) -> int:
    """Distinct real roots of the univariate (level-1) polynomials."""
    return realalg.ndrr(list(polys))


@dataclass(frozen=True)
class MeasureSpec:
    """How to score a projection set: a single measure, a lexicographic list
    for tie-breaking, or a weighted average (each measure normalised by its
    maximum over the candidate list before weighting)."""

    measures: Tuple[str, ...]
    weights: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        for m in self.measures:
            if m not in ("sotd", "ndrr"):
                raise EngineError(f"unknown measure {m!r}")
        if self.weights is not None:
            if len(self.weights) != len(self.measures):
                raise EngineError("weights must match measures")
            if any(w < 0 for w in self.weights) or not any(self.weights):
                raise EngineError("weights must be non-negative, not all zero")

    @classmethod
    def parse(cls, text: str) -> "MeasureSpec":
        """Accepts 'sotd', 'ndrr', 'sotd,ndrr', or 'weighted:w1,w2'."""
        if text.startswith("weighted:"):
            ws = [Fraction(w) for w in text[len("weighted:"):].split(",")]
            if len(ws) != 2:
                raise EngineError("weighted spec needs two weights (sotd, ndrr)")
            return cls(("sotd", "ndrr"), tuple(ws))
        return cls(tuple(m.strip() for m in text.split(",")))


@dataclass
class Formulation:
    """One concrete way to pose a problem to the CAD algorithms."""

    order: VarOrder
    clauses: Tuple[Clause, ...]
    label: str = ""

    def formula(self) -> FormulaSequence:
        return FormulaSequence(self.clauses)


def _projection_levels(formulation: Formulation) -> List[List[Polynomial]]:
    """All projection polynomials for a formulation, grouped by level, using
    the operator the algorithms themselves would use (the reduced operator
    for designated constraints, the clause-sequence operator for several
    clauses, the plain one otherwise)."""
    order = formulation.order
    n = len(order)
    var = order.vars[n - 1]
    polys = []
    for cl in formulation.clauses:
        polys.extend(c.poly for c in cl.constraints)
    polys = [_reorder(p, order) for p in polys]
    if n == 1:
        basis = finest_squarefree_basis(polys)
        return [list(basis.polys)]
    single_no_ec = len(formulation.clauses) == 1 and formulation.clauses[0].ec is None
    if single_no_ec:
        ps = projection.full_projection(polys, order)
        return [ps.level_polys(k) for k in range(1, n + 1)]
    pairs = []
    pool = []
    top_inputs = []
    for cl in formulation.clauses:
        a = [_reorder(c.poly, order) for c in cl.constraints]
        e = list(a) if cl.ec is None else [a[cl.ec]]
        b = finest_squarefree_basis(a)
        pool.extend(b.contents)
        top_inputs.extend(b.polys)
        e_b = [p for p in b.polys if any(try_exact_div(ei, p) is not None for ei in e)]
        b_top = [p for p in b.polys if p.main_variable() == var]
        e_top = [p for p in e_b if p.main_variable() == var]
        pool.extend(p for p in b.polys if p.main_variable() != var)
        if not e_top:
            raise EngineError("formulation's equational constraints miss the top variable")
        pairs.append((b_top, e_top))
    if len(pairs) == 1:
        out = projection.reduced(pairs[0][1], pairs[0][0], var)
    else:
        out = projection.clause_system(pairs, var)
    pool.extend(out)
    ps = projection.full_projection(pool, order, top_level=n - 1)
    levels = [ps.level_polys(k) for k in range(1, n)]
    levels.append(sorted({normalize(p) for p in top_inputs}, key=str))
    return levels


def _reorder(p: Polynomial, order: VarOrder) -> Polynomial:
    """Re-express p over another variable order (same variable names)."""
    if p.order == order:
        return p
    mapping = [order.index(v) for v in p.order.vars]
    terms = {}
    for e, c in p.terms:
        e2 = [0] * len(order)
        for i, k in enumerate(e):
            if k:
                e2[mapping[i]] = k
        terms[tuple(e2)] = c
    return Polynomial(order, terms)


def score(formulation: Formulation, measures: Sequence[str]) -> Tuple:
    levels = _projection_levels(formulation)
    out = []
    for m in measures:
        if m == "sotd":
            out.append(sotd(p for lvl in levels for p in lvl))
        else:
            out.append(ndrr(levels[0]))
    return tuple(out)


def rank_formulations(cands: Sequence[Formulation], spec: MeasureSpec):
    """Best formulation under the measure spec plus the full score table.

    Lexicographic specs compare score tuples; weighted specs normalise each
    measure by its maximum over the candidates and take the weighted sum.
    Ties keep the earliest candidate.
    """
    if not cands:
        raise EngineError("no candidate formulations")
    rows = []
    for f in cands:
        rows.append({"formulation": f, "scores": score(f, spec.measures)})
    if spec.weights is None:
        keyed = [(r["scores"], i) for i, r in enumerate(rows)]
    else:
        maxima = [max(r["scores"][j] for r in rows) or 1 for j in range(len(spec.measures))]
        keyed = []
        for i, r in enumerate(rows):
            val = sum(w * Fraction(s, m) for w, s, m in zip(spec.weights, r["scores"], maxima))
            keyed.append((val, i))
        for r, (val, _i) in zip(rows, keyed):
            r["weighted"] = val
    best = min(keyed, key=lambda t: (t[0], t[1]))[1]
    return rows[best]["formulation"], rows


def greedy_order(polys: Sequence[Polynomial], blocks: Optional[Sequence[Sequence[str]]] = None) -> VarOrder:
    """Greedy variable ordering: repeatedly choose the next projection
    variable (highest remaining position) minimising the sotd of the one-step
    McCallum projection of the current set; ties keep the input order.  When
    blocks are given (listed lowest first), the choice is restricted so the
    result respects block contiguity and block order."""
    base = polys[0].order if polys else None
    if base is None:
        raise EngineError("no polynomials")
    names = list(base.vars)
    if blocks is not None:
        flat = [v for blk in blocks for v in blk]
        if sorted(flat) != sorted(names):
            raise EngineError("blocks must partition the variables")
        groups = [list(blk) for blk in blocks]
    else:
        groups = [list(names)]
    chosen: List[str] = []  # built from the top down
    current = list(polys)
    remaining_groups = [list(g) for g in groups]
    while any(remaining_groups):
        gi = max(i for i, g in enumerate(remaining_groups) if g)
        candidates = remaining_groups[gi]
        best_v, best_cost, best_proj = None, None, None
        # prefer later input position on ties: iterate in input order and use >=
        for v in candidates:
            cost, projected = _one_step_cost(current, v, chosen, names)
            if best_cost is None or cost <= best_cost:
                best_v, best_cost, best_proj = v, cost, projected
        chosen.append(best_v)
        candidates.remove(best_v)
        current = best_proj
    return VarOrder(tuple(reversed(chosen)))


def _one_step_cost(polys: Sequence[Polynomial], v: str, taken: Sequence[str], names: Sequence[str]):
    """sotd of the set after projecting out v, plus that projected set."""
    base = polys[0].order
    rest = [nm for nm in names if nm not in taken and nm != v]
    order = VarOrder(tuple(rest) + (v,) + tuple(reversed(taken))) if taken else VarOrder(tuple(rest) + (v,))
    moved = [_reorder(p, order) for p in polys]
    top = [p for p in moved if p.main_variable() == v]
    lower = [p for p in moved if not p.is_constant and p.main_variable() != v]
    basis = finest_squarefree_basis(top)
    out = list(lower) + list(basis.contents)
    out.extend(projection.mccallum(list(basis.polys), v).keys())
    cost = sotd(out)
    return cost, out


def enumerate_formulations(order: VarOrder, clauses: Sequence[Clause],
                           dimensions: Iterable[str],
                           blocks: Optional[Sequence[Sequence[str]]] = None,
                           limit: int = 64):
    """Cartesian enumeration of formulations along the requested dimensions
    ('order', 'ec', 'split'), capped at ``limit`` candidates (with a
    truncation warning)."""
    dimensions = set(dimensions)
    orders = [order]
    if "order" in dimensions:
        orders = _orders_respecting_blocks(order, blocks)
    clause_lists = [list(clauses)]
    if "split" in dimensions:
        clause_lists = _splits(clauses)
    out = []
    truncated = False
    for o in orders:
        for cl_list in clause_lists:
            ec_choices = [_ec_options(cl) for cl in cl_list]
            if "ec" not in dimensions:
                ec_choices = [[cl.ec] for cl in cl_list]
            for combo in itertools.product(*ec_choices):
                if len(out) >= limit:
                    truncated = True
                    break
                new_clauses = tuple(
                    Clause(cl.constraints, ec=e) for cl, e in zip(cl_list, combo))
                label = f"order={','.join(o.vars)} ec={list(combo)} clauses={len(new_clauses)}"
                out.append(Formulation(order=o, clauses=new_clauses, label=label))
            if truncated:
                break
        if truncated:
            break
    return out, truncated


def _ec_options(cl: Clause) -> List[Optional[int]]:
    eqs = [i for i, c in enumerate(cl.constraints) if c.relop == "="]
    return eqs if eqs else [None]


def _orders_respecting_blocks(order: VarOrder, blocks) -> List[VarOrder]:
    if blocks is None:
        return [VarOrder(p) for p in itertools.permutations(order.vars)]
    flat = [v for blk in blocks for v in blk]
    if sorted(flat) != sorted(order.vars):
        raise EngineError("blocks must partition the variables")
    per_block = [list(itertools.permutations(blk)) for blk in blocks]
    out = []
    for combo in itertools.product(*per_block):
        seq = tuple(v for blk in combo for v in blk)
        out.append(VarOrder(seq))
    return out


def _splits(clauses: Sequence[Clause]) -> List[List[Clause]]:
    """All ways of partitioning each clause's constraints into sub-clauses
    (a finer sequence is still truth-table sufficient for the original)."""
    per_clause = []
    for cl in clauses:
        options = []
        for part in _set_partitions(list(range(len(cl.constraints)))):
            new = []
            ok = True
            for blockixs in part:
                cons = tuple(cl.constraints[i] for i in blockixs)
                ec = None
                if cl.ec is not None and cl.ec in blockixs:
                    ec = blockixs.index(cl.ec)
                try:
                    new.append(Clause(cons, ec=ec))
                except EngineError:
                    ok = False
                    break
            if ok:
                options.append(new)
        per_clause.append(options)
    out = []
    for combo in itertools.product(*per_clause):
        out.append([c for group in combo for c in group])
    return out


def _set_partitions(items: List[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part
