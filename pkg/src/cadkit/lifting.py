"""Stack construction and the sign-/order-invariant CAD builder.

Cells carry a Collins index (odd entries are sectors, even entries sections)
and an exact sample point.  Stacks over a base cell are built from the real
roots of the lifting polynomials at the base sample; sector samples are
rational and chosen deterministically (integers preferred, then dyadics).

A polynomial that vanishes identically over a base cell is handled according
to a policy: "error" (callers must prevent it), "omit" (used for the final
lift with equational constraints), or "delineate" (used inside the full CAD
builder: the stack is refined at the common roots of the lowest-order
non-vanishing partial derivatives, and a potential-failure warning is
recorded when the cell has positive dimension).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import ceil, floor
from typing import Dict, Iterable, List, Optional, Sequence

from .polyarith import Polynomial, PolyError, VarOrder, normalize, _sort_key
from .projection import ProjectionSet, full_projection
from .realalg import (
    NULLIFIED,
    RealAlgebraic,
    SamplePoint,
    compare,
    isolate_roots,
    isolate_roots_at_point,
    sign_at_sample,
)


@dataclass(frozen=True)
class Cell:
    """Cylindrical cell: Collins index plus exact sample point."""

    index: tuple
    sample: SamplePoint

    @property
    def level(self) -> int:
        return len(self.index)

    @property
    def dimension(self) -> int:
        return sum(1 for i in self.index if i % 2 == 1)

    def is_section_coordinate(self, k: int) -> bool:
        """True when coordinate k (0-based) is pinned to a section."""
        return self.index[k] % 2 == 0


@dataclass
class Stack:
    base: Optional[Cell]
    cells: List[Cell]


class CAD:
    """A CAD of R^top_level: cells per level plus lifting metadata."""

    def __init__(self, order: VarOrder, top_level: int):
        self.order = order
        self.top_level = top_level
        self.level_cells: List[List[Cell]] = []
        self.bases: Dict[int, List[Polynomial]] = {}
        self.base_roots: List[RealAlgebraic] = []
        self.projection: Optional[ProjectionSet] = None
        self.warnings: List[dict] = []
        self.notes: List[dict] = []

    @property
    def cells(self) -> List[Cell]:
        return self.level_cells[-1] if self.level_cells else []

    @property
    def cell_count(self) -> int:
        return len(self.cells)


# ---------------------------------------------------------------------------
# sample selection


def _simplest_rational_in(lo: Fraction, hi: Fraction) -> Fraction:
    """Deterministic rational in the open interval (lo, hi): the integer
    closest to zero if one exists, otherwise the coarsest dyadic."""
    ilo = floor(lo) + 1
    ihi = ceil(hi) - 1
    if ilo <= ihi:
        if ilo <= 0 <= ihi:
            return Fraction(0)
        return Fraction(ilo if ilo > 0 else ihi)
    k = 1
    while True:
        scale = 1 << k
        nlo = floor(lo * scale) + 1
        nhi = ceil(hi * scale) - 1
        if nlo <= nhi:
            n = 0 if nlo <= 0 <= nhi else (nlo if nlo > 0 else nhi)
            return Fraction(n, scale)
        k += 1


def sector_sample(left: Optional[RealAlgebraic], right: Optional[RealAlgebraic]) -> Fraction:
    """Rational value strictly between two section roots (or beyond one end)."""
    if left is None and right is None:
        return Fraction(0)
    if left is None:
        return Fraction(floor(right.interval[0]) - 1)
    if right is None:
        return Fraction(ceil(left.interval[1]) + 1)
    while not left.interval[1] < right.interval[0]:
        left.refine()
        right.refine()
    return _simplest_rational_in(left.interval[1], right.interval[0])


def _merge_roots(groups: Iterable[List[RealAlgebraic]]) -> List[RealAlgebraic]:
    """Sorted union of root lists; equal roots keep the simplest witness."""
    allr = [r for g in groups for r in g]
    allr.sort(key=cmp_to_key(compare))
    out: List[RealAlgebraic] = []
    for r in allr:
        if out and compare(out[-1], r) == 0:
            # prefer a rational witness, then the lower-degree defining polynomial
            a, b = out[-1], r
            ka = (0 if a.rational_value is not None else 1, a.defpoly.total_degree())
            kb = (0 if b.rational_value is not None else 1, b.defpoly.total_degree())
            if kb < ka:
                out[-1] = b
        else:
            out.append(r)
    return out


def _build_stack_cells(base_index: tuple, base_sample: SamplePoint, roots: List[RealAlgebraic],
                       var: str) -> List[Cell]:
    cells = []
    for i in range(2 * len(roots) + 1):
        if i % 2 == 0:
            left = roots[i // 2 - 1] if i >= 2 else None
            right = roots[i // 2] if i // 2 < len(roots) else None
            coord = RealAlgebraic.from_rational(sector_sample(left, right), var)
        else:
            coord = roots[i // 2]
        cells.append(Cell(base_index + (i + 1,), base_sample.extend(coord)))
    return cells


# ---------------------------------------------------------------------------
# base CAD of the real line


def base_cad(polys: Sequence[Polynomial], order: VarOrder) -> Stack:
    """Decompose R according to the real roots of univariate polynomials."""
    var = order.vars[0]
    groups = []
    for p in polys:
        if p.is_constant:
            continue
        if p.level() != 1:
            raise PolyError(f"{p} is not univariate in {var!r}")
        groups.append(isolate_roots(p))
    roots = _merge_roots(groups)
    empty = SamplePoint(order, ())
    cells = _build_stack_cells((), empty, roots, var)
    return Stack(None, cells)


# ---------------------------------------------------------------------------
# stacks over a cell


def nullified_on_cell(p: Polynomial, cell: Cell) -> bool:
    """True when every coefficient of p (in the variable one level above the
    cell) vanishes at the cell's sample point."""
    var = cell.sample.order.vars[cell.level]
    if p.degree(var) < 1:
        raise PolyError("polynomial is not one level above the cell")
    for c in p.coefficients(var):
        if c.is_constant:
            if c.constant_value() != 0:
                return False
        elif sign_at_sample(c, cell.sample) != 0:
            return False
    return True


def _delineating_roots(p: Polynomial, sample: SamplePoint, var: str) -> List[RealAlgebraic]:
    """Sections rescuing a nullified polynomial: the common real roots of the
    lowest-order partial derivatives that do not vanish identically over the
    sample point."""
    vars_present = [v for v in p.order.vars]
    current = {normalize(p): p}
    max_order = p.total_degree()
    for _ in range(max_order):
        nxt: Dict[Polynomial, Polynomial] = {}
        for q in current.values():
            for v in vars_present:
                d = q.derivative(v)
                if not d.is_zero:
                    nxt.setdefault(normalize(d), d)
        if not nxt:
            return []
        current = nxt
        images = []
        for q in sorted(current.values(), key=_sort_key):
            if q.degree(var) < 1:
                s = sign_at_sample(q, sample)
                if s != 0:
                    return []  # a never-vanishing partial: no common roots
                continue
            r = isolate_roots_at_point(q, sample)
            if r is NULLIFIED:
                continue
            images.append((q, r))
        if images:
            first_poly, first_roots = images[0]
            keep = []
            for root in first_roots:
                ext = sample.extend(root)
                if all(sign_at_sample(q, ext) == 0 for q, _ in images[1:]):
                    keep.append(root)
            return keep
    return []


def generate_stack(cell: Cell, polys: Sequence[Polynomial], *,
                   on_nullified: str = "error",
                   sink: Optional[CAD] = None) -> Stack:
    """Stack over ``cell`` with respect to polynomials one level up."""
    order = cell.sample.order
    var = order.vars[cell.level]
    groups = []
    for p in sorted(polys, key=_sort_key):
        if p.degree(var) < 1:
            raise PolyError(f"{p} does not involve {var!r}")
        roots = isolate_roots_at_point(p, cell.sample)
        if roots is NULLIFIED:
            if on_nullified == "error":
                raise PolyError(f"nullified in stack: {p} over cell {cell.index}")
            entry = {"polynomial": str(p), "cell": list(cell.index),
                     "dimension": cell.dimension}
            if on_nullified == "omit":
                if sink is not None:
                    sink.notes.append({"kind": "nullified_omitted", **entry})
                continue
            # delineate
            if sink is not None:
                if cell.dimension > 0:
                    sink.warnings.append({"kind": "nullified_positive_dim", **entry})
                else:
                    sink.notes.append({"kind": "nullified_point", **entry})
            groups.append(_delineating_roots(p, cell.sample, var))
            continue
        groups.append(roots)
    roots = _merge_roots(groups)
    return Stack(cell, _build_stack_cells(cell.index, cell.sample, roots, var))


# ---------------------------------------------------------------------------
# the full CAD builder


def cad_full(polys: Iterable[Polynomial], order: VarOrder,
             top_level: Optional[int] = None,
             tags: Optional[dict] = None) -> CAD:
    """Sign-invariant (by McCallum theory, order-invariant) CAD for the input
    polynomials.

    Nullification of a lifting polynomial over a cell is rescued with a
    delineating polynomial; over a positive-dimensional cell this is recorded
    as a potential-failure warning (the input is not well-oriented), over a
    point it is only noted.  The CAD is always completed.
    """
    if top_level is None:
        top_level = len(order)
    ps = full_projection(polys, order, top_level=top_level, tags=tags)
    cad = CAD(order, top_level)
    cad.projection = ps
    cad.bases = dict(ps.bases)
    stack = base_cad(ps.bases.get(1, []), order)
    cad.base_roots = [c.sample.coords[0] for c in stack.cells if c.index[0] % 2 == 0]
    cad.level_cells.append(stack.cells)
    for k in range(2, top_level + 1):
        lift = ps.bases.get(k, [])
        new_cells: List[Cell] = []
        for cell in cad.level_cells[-1]:
            st = generate_stack(cell, lift, on_nullified="delineate", sink=cad)
            new_cells.extend(st.cells)
        cad.level_cells.append(new_cells)
    return cad
