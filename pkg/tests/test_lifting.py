import random
from fractions import Fraction

import pytest

from cadkit.lifting import (
    CAD,
    Cell,
    base_cad,
    cad_full,
    generate_stack,
    nullified_on_cell,
    sector_sample,
)
from cadkit.polyarith import Polynomial, PolyError, VarOrder, parse
from cadkit.realalg import RealAlgebraic, SamplePoint, compare, sign_at_sample

X = VarOrder(["x"])
XY = VarOrder(["x", "y"])
XYZW = VarOrder(["x", "y", "z", "w"])


def P(text, order=XY):
    return parse(text, order)


def rat(q, var="x"):
    return RealAlgebraic.from_rational(Fraction(q), var)


def rational_samples(cells):
    out = []
    for c in cells:
        vals = c.sample.rational_coords()
        out.append(tuple(vals) if vals is not None else None)
    return out


# ---------------------------------------------------------------------------
# the base decomposition of the line


def test_base_cad_two_roots():
    st = base_cad([P("x^2 - 4", X)], X)
    assert len(st.cells) == 5
    assert [c.sample.coords[0].rational_value for c in st.cells] == \
        [Fraction(-3), Fraction(-2), Fraction(0), Fraction(2), Fraction(3)]


def test_base_cad_example_one_line():
    polys = [P("x^2 - 4", X), P("x", X), P("x^4 - 4*x^2 + 1", X)]
    st = base_cad(polys, X)
    assert len(st.cells) == 15


def test_base_cad_empty():
    st = base_cad([], X)
    assert len(st.cells) == 1
    assert st.cells[0].index == (1,)


# ---------------------------------------------------------------------------
# stacks


def base_cell(x):
    return Cell((1,), SamplePoint(XY, [rat(x)]))


def test_stack_no_roots():
    st = generate_stack(base_cell(-3), [P("x^2 + y^2 - 4")])
    assert len(st.cells) == 1


def test_stack_two_roots():
    st = generate_stack(base_cell(0), [P("x^2 + y^2 - 4")])
    assert len(st.cells) == 5
    assert [c.index for c in st.cells] == [(1, i) for i in range(1, 6)]


def test_stack_tangency():
    st = generate_stack(base_cell(-2), [P("x^2 + y^2 - 4")])
    assert len(st.cells) == 3
    assert st.cells[1].sample.coords[1].rational_value == 0


def test_stack_nullified_policy_error():
    o = XYZW
    g = parse("z*y - x^2*w", o)
    cell = Cell((2, 2, 2), SamplePoint(o, [rat(0, "x"), rat(0, "y"), rat(0, "z")]))
    with pytest.raises(PolyError, match="nullified"):
        generate_stack(cell, [g])


def test_nullified_on_cell_examples():
    o = XYZW
    g = parse("z*y - x^2*w", o)
    cell0 = Cell((2, 2, 2), SamplePoint(o, [rat(0, "x"), rat(0, "y"), rat(0, "z")]))
    assert nullified_on_cell(g, cell0)
    f = P("x^2 + y^2 - 4")
    c1 = base_cell(7)
    assert not nullified_on_cell(f, c1)
    h = parse("z + y*w", o)
    cell1 = Cell((1, 2, 2), SamplePoint(o, [rat(5, "x"), rat(0, "y"), rat(0, "z")]))
    assert nullified_on_cell(h, cell1)


# ---------------------------------------------------------------------------
# sector sample selection


def test_sector_sample_prefers_small_integers():
    a, b = rat(-2), rat(2)
    assert sector_sample(a, b) == 0
    assert sector_sample(None, rat(-2)) == -3
    assert sector_sample(rat(2), None) == 3
    assert sector_sample(None, None) == 0


def test_sector_sample_dyadic_fallback():
    assert sector_sample(rat(Fraction(1, 3)), rat(Fraction(2, 3))) == Fraction(1, 2)


# ---------------------------------------------------------------------------
# the full CAD builder


def test_cad_full_example_one(res_ex1):
    assert res_ex1["full"].cell_count == 83


def test_cad_full_two_circle_pairs(res_phis):
    assert res_phis["phi2"]["full"].cell_count == 317


def test_cad_full_four_variables(res_ex4):
    r = res_ex4["full"]
    assert r.cell_count == 557
    # nullification over positive-dimensional cells is warned, not fatal
    assert any(w["kind"] == "nullified_positive_dim" for w in r.warnings)


def test_cad_full_determinism(example1, xy):
    a = cad_full([example1["f"], example1["g"]], xy)
    b = cad_full([example1["f"], example1["g"]], xy)
    assert [c.index for c in a.cells] == [c.index for c in b.cells]
    for ca, cb in zip(a.cells, b.cells):
        for qa, qb in zip(ca.sample.coords, cb.sample.coords):
            assert compare(qa, qb) == 0


def _check_structure_cells(cells, n):
    by_prefix = {}
    for c in cells:
        assert len(c.index) == n
        by_prefix.setdefault(c.index[:-1], []).append(c)
    for prefix, stack in by_prefix.items():
        assert len(stack) % 2 == 1
        stack.sort(key=lambda c: c.index[-1])
        sections = [c for c in stack if c.index[-1] % 2 == 0]
        for a, b in zip(sections, sections[1:]):
            assert compare(a.sample.coords[-1], b.sample.coords[-1]) < 0
        base0 = stack[0].sample.coords[:-1]
        for c in stack[1:]:
            assert all(x is y for x, y in zip(base0, c.sample.coords[:-1]))


def test_cylindricity_and_parity(res_ex1, res_ex4):
    _check_structure_cells(res_ex1["full"].cells, 2)
    _check_structure_cells(res_ex4["full"].cells, 4)


def test_sign_invariance_spot_check(res_ex1):
    """Full-dimensional cells: signs at the stored sample agree with signs at
    extra rational points drawn inside the cell box."""
    r = res_ex1["full"]
    rng = random.Random(1)
    f, g = r.poly_names["f"], r.poly_names["g"]
    cells = r.cells
    by_prefix = {}
    for c in cells:
        by_prefix.setdefault(c.index[:-1], []).append(c)
    checked = 0
    for c in cells:
        if c.dimension != 2:
            continue
        stack = sorted(by_prefix[c.index[:-1]], key=lambda q: q.index[-1])
        pos = c.index[-1]
        left = stack[pos - 2].sample.coords[-1] if pos >= 2 else None
        right = stack[pos].sample.coords[-1] if pos <= len(stack) - 2 else None
        x0 = c.sample.coords[0].rational_value
        if x0 is None:
            continue
        for _ in range(3):
            if left is None and right is None:
                y = Fraction(rng.randrange(-16, 17), 8)
            elif left is None:
                right.refine_below(Fraction(1, 64))
                y = right.interval[0] - Fraction(rng.randrange(1, 65), 64)
            elif right is None:
                left.refine_below(Fraction(1, 64))
                y = left.interval[1] + Fraction(rng.randrange(1, 65), 64)
            else:
                while not left.interval[1] < right.interval[0]:
                    left.refine()
                    right.refine()
                lo, hi = left.interval[1], right.interval[0]
                y = lo + (hi - lo) * Fraction(rng.randrange(1, 64), 64)
            for name, p in (("f", f), ("g", g)):
                v = p.evaluate({"x": x0, "y": y})
                s = (v > 0) - (v < 0)
                assert s == r.signs[cells.index(c)][name]
            checked += 1
    assert checked > 50
