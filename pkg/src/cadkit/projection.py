"""Projection operators: McCallum projection, its equational-constraint
reduction, the multi-clause operator with cross-resultants, the excluded
set, and repeated projection down to the real line.

All outputs are canonicalised (integer coprime coefficients, positive leading
coefficient) so that sets can be compared up to rational constant multiples.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .polyarith import (
    Polynomial,
    PolyError,
    VarOrder,
    discriminant,
    finest_squarefree_basis,
    gcd,
    normalize,
    resultant,
    _sort_key,
)

TAG_INPUT = "input"
TAG_COEFF = "coefficient"
TAG_DISC = "discriminant"
TAG_RES = "resultant"
TAG_CROSS = "cross-resultant"
TAG_CONTENT = "content"


def necessary_coefficients(p: Polynomial, var: str) -> List[Polynomial]:
    """Coefficients needed by the projection for degree invariance.

    Walking from the leading coefficient down, collection stops once the
    current coefficient provably cannot vanish on the common zero set of the
    ones already collected: when it is a nonzero constant, or when it is
    coprime to a collected coefficient in the same single variable.  Zero
    coefficients are skipped.  This is the simplification profile the cell
    counts depend on; loosening it splits cells at spurious coefficient
    roots (e.g. at the trailing coefficient of a shifted hyperbola).
    """
    out = []
    for c in p.coefficients(var):
        if c.is_constant:
            if c.constant_value() != 0:
                break
            continue
        if _cannot_vanish_together(out, c):
            break
        out.append(normalize(c))
    return out


def _cannot_vanish_together(collected: Sequence[Polynomial], c: Polynomial) -> bool:
    cv = c.variables()
    if len(cv) != 1:
        return False
    for u in collected:
        uv = u.variables()
        if len(uv) == 1 and uv == cv and gcd(u, c).is_constant:
            return True
    return False


def _check_main_var(polys: Iterable[Polynomial], var: str) -> None:
    for p in polys:
        if p.main_variable() != var:
            raise PolyError(f"{p} does not have main variable {var!r}")


def _add(out: Dict[Polynomial, str], p: Polynomial, tag: str) -> None:
    if p.is_zero or p.is_constant:
        return
    out.setdefault(normalize(p), tag)


def mccallum(basis: Sequence[Polynomial], var: str) -> Dict[Polynomial, str]:
    """McCallum projection of a squarefree basis: necessary coefficients,
    discriminants, and pairwise resultants; constants and duplicates removed."""
    _check_main_var(basis, var)
    out: Dict[Polynomial, str] = {}
    basis = sorted(basis, key=_sort_key)
    for b in basis:
        for c in necessary_coefficients(b, var):
            _add(out, c, TAG_COEFF)
        if b.degree(var) >= 2:
            _add(out, discriminant(b, var), TAG_DISC)
    for i, b1 in enumerate(basis):
        for b2 in basis[i + 1:]:
            _add(out, resultant(b1, b2, var), TAG_RES)
    return out


def reduced(ec_basis: Sequence[Polynomial], basis: Sequence[Polynomial], var: str) -> Dict[Polynomial, str]:
    """Reduced projection for a designated equational constraint: the McCallum
    projection of the constraint's basis plus its resultants against the
    other basis elements."""
    _check_main_var(basis, var)
    ec_set = {normalize(p) for p in ec_basis}
    for p in ec_set:
        if normalize(p) not in {normalize(b) for b in basis}:
            raise PolyError("equational basis is not a subset of the basis")
    out = mccallum(sorted(ec_set, key=_sort_key), var)
    for f in sorted(ec_set, key=_sort_key):
        for g in sorted(basis, key=_sort_key):
            if normalize(g) in ec_set:
                continue
            _add(out, resultant(f, g, var), TAG_RES)
    return out


def clause_system(pairs: Sequence[Tuple[Sequence[Polynomial], Sequence[Polynomial]]], var: str) -> Dict[Polynomial, str]:
    """Projection for a sequence of clauses, each given as (basis, ec_basis):
    the union of the per-clause reduced projections plus cross-resultants
    between designated constraints of different clauses."""
    out: Dict[Polynomial, str] = {}
    for basis, ec in pairs:
        for p, tag in reduced(ec, basis, var).items():
            _add(out, p, tag)
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            for f in sorted(pairs[i][1], key=_sort_key):
                for g in sorted(pairs[j][1], key=_sort_key):
                    if normalize(f) == normalize(g):
                        continue
                    _add(out, resultant(f, g, var), TAG_CROSS)
    return out


def excluded(basis: Sequence[Polynomial], ec_basis: Sequence[Polynomial], var: str) -> List[Polynomial]:
    """Projection polynomials the reduced operator omits: the McCallum
    projection of the non-constraint part minus the reduced projection,
    modulo constant multiples."""
    ec_set = {normalize(p) for p in ec_basis}
    others = [b for b in basis if normalize(b) not in ec_set]
    if not others:
        return []
    full = mccallum(others, var)
    red = reduced(ec_basis, basis, var)
    keep = [p for p in full if p not in red]
    return sorted(keep, key=_sort_key)


class ProjectionSet:
    """Projection polynomials grouped by level, with provenance tags and the
    squarefree basis actually used for lifting at each level."""

    def __init__(self, order: VarOrder, top_level: int):
        self.order = order
        self.top_level = top_level
        self.levels: Dict[int, List[Polynomial]] = {k: [] for k in range(1, top_level + 1)}
        self.provenance: Dict[Polynomial, str] = {}
        self.bases: Dict[int, List[Polynomial]] = {}

    def add(self, p: Polynomial, tag: str) -> None:
        if p.is_zero or p.is_constant:
            return
        p = normalize(p)
        k = p.level()
        if p not in self.provenance:
            self.provenance[p] = tag
            self.levels[k].append(p)

    def finalize(self) -> None:
        for k in self.levels:
            self.levels[k].sort(key=_sort_key)

    def level_polys(self, k: int) -> List[Polynomial]:
        return list(self.levels.get(k, []))

    def all_polys(self) -> List[Polynomial]:
        out = []
        for k in sorted(self.levels, reverse=True):
            out.extend(self.levels[k])
        return out

    def to_json(self) -> list:
        blocks = []
        for k in sorted(self.levels, reverse=True):
            blocks.append({
                "level": k,
                "variable": self.order.vars[k - 1],
                "polynomials": [
                    {"poly": str(p), "provenance": self.provenance[p]}
                    for p in self.levels[k]
                ],
            })
        return blocks


def full_projection(polys: Iterable[Polynomial], order: VarOrder,
                    top_level: Optional[int] = None,
                    tags: Optional[Dict[Polynomial, str]] = None) -> ProjectionSet:
    """Apply McCallum projection repeatedly, producing one set per level.

    Inputs join the set at their natural level; contents split off during
    basis computation are pushed down to theirs.  The basis of each level is
    recorded (it is what the lifting phase uses).
    """
    if top_level is None:
        top_level = len(order)
    ps = ProjectionSet(order, top_level)
    for p in polys:
        if p.is_zero or p.is_constant:
            continue
        if p.level() > top_level:
            raise PolyError(f"{p} sits above the requested top level")
        tag = (tags or {}).get(normalize(p), TAG_INPUT)
        ps.add(p, tag)
    for k in range(top_level, 0, -1):
        basis = finest_squarefree_basis(ps.levels[k])
        ps.bases[k] = list(basis.polys)
        for c in basis.contents:
            ps.add(c, TAG_CONTENT)
        if k == 1:
            break
        var = order.vars[k - 1]
        for q, tag in mccallum(basis.polys, var).items():
            ps.add(q, tag)
    ps.finalize()
    return ps
