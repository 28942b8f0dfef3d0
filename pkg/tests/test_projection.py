from fractions import Fraction

import pytest

from cadkit.polyarith import (
    Polynomial,
    PolyError,
    VarOrder,
    finest_squarefree_basis,
    normalize,
    parse,
)
from cadkit.projection import (
    clause_system,
    excluded,
    full_projection,
    mccallum,
    necessary_coefficients,
    reduced,
)

XY = VarOrder(["x", "y"])


def P(text, order=XY):
    return parse(text, order)


def canon(polys):
    return {normalize(p) for p in polys}


def basis_of(*polys):
    return list(finest_squarefree_basis(list(polys)).polys)


F = P("x^2 + y^2 - 4")
G = P("x*y - 1")


# ---------------------------------------------------------------------------
# the McCallum operator


def test_mccallum_circle_hyperbola():
    out = mccallum(basis_of(F, G), "y")
    assert canon(out) == canon([P("x^2 - 4"), P("x"), P("x^4 - 4*x^2 + 1")])


def test_mccallum_parabola():
    out = mccallum(basis_of(P("y^2 - x")), "y")
    assert canon(out) == canon([P("x")])


def test_mccallum_hyperbola_only():
    out = mccallum(basis_of(G), "y")
    assert canon(out) == canon([P("x")])


def test_mccallum_requires_main_variable():
    with pytest.raises(PolyError):
        mccallum([P("x^2 - 1")], "y")


def test_necessary_coefficients_truncation():
    # trailing coefficient coprime to the leading one adds nothing
    g2 = P("(x-4)*(y-1) - 1/4")
    assert canon(necessary_coefficients(g2, "y")) == canon([P("x - 4")])
    # but a genuinely co-vanishing trailing coefficient is kept
    o = VarOrder(["x", "y", "z", "w"])
    g = parse("z*y - x^2*w", o)
    assert canon(necessary_coefficients(g, "w")) == canon(
        [parse("x^2", o), parse("z*y", o)])


# ---------------------------------------------------------------------------
# the reduced operator


def test_reduced_circle_constraint():
    out = reduced([F], basis_of(F, G), "y")
    assert canon(out) == canon([P("x^2 - 4"), P("x^4 - 4*x^2 + 1")])


def test_reduced_collapses_when_all_designated():
    b = basis_of(F, G)
    assert canon(reduced(b, b, "y")) == canon(mccallum(b, "y"))


def test_reduced_linear_constraint():
    o = VarOrder(["x", "y", "z", "w"])
    f = parse("x + y + z + w", o)
    g = parse("z*y - x^2*w", o)
    out = reduced([f], basis_of(f, g), "w")
    assert canon(out) == canon([parse("z*y + x^3 + x^2*y + x^2*z", o)])


# ---------------------------------------------------------------------------
# the clause-sequence operator


def test_clause_system_two_circles():
    f1, g1 = P("x^2 + y^2 - 1"), P("x*y - 1/4")
    f2, g2 = P("(x-4)^2 + (y-1)^2 - 1"), P("(x-4)*(y-1) - 1/4")
    pairs = [(basis_of(f1, g1), basis_of(f1)), (basis_of(f2, g2), basis_of(f2))]
    out = clause_system(pairs, "y")
    expected = canon([
        P("x^2 - 1"),
        P("(x-4)^2 - 1"),
        P("x^4 - x^2 + 1/16"),
        P("(x-4)^4 - (x-4)^2 + 1/16"),
    ])
    got = canon(out)
    assert expected <= got
    # the remaining element is the cross-resultant of the two constraints
    from cadkit.polyarith import resultant
    cross = normalize(resultant(f1, f2, "y"))
    assert got - expected == {cross}


def test_clause_system_single_clause_collapses():
    pairs = [(basis_of(F, G), basis_of(F))]
    assert canon(clause_system(pairs, "y")) == canon(reduced([F], basis_of(F, G), "y"))


def test_clause_system_subset_of_mccallum():
    f1, g1 = P("x^2 + y^2 - 1"), P("x*y - 1/4")
    f2, g2 = P("(x-4)^2 + (y-1)^2 - 1"), P("(x-4)*(y-1) - 1/4")
    b1, b2 = basis_of(f1, g1), basis_of(f2, g2)
    pairs = [(b1, b1), (b2, b2)]  # every polynomial designated
    out = canon(clause_system(pairs, "y"))
    full = canon(mccallum(basis_of(f1, g1, f2, g2), "y"))
    assert out <= full


# ---------------------------------------------------------------------------
# the excluded set


def test_excluded_circle_hyperbola():
    out = excluded(basis_of(F, G), [F], "y")
    assert canon(out) == canon([P("x")])


def test_excluded_empty_when_all_designated():
    b = basis_of(F, G)
    assert excluded(b, b, "y") == []


def test_excluded_example_six_structure():
    o = VarOrder(["x", "y", "z", "w"])
    f = parse("z + y*w", o)
    g = parse("y*x + 1", o)
    h = parse("w*(z+1) + 1", o)
    b = basis_of(f, g, h)
    top = [p for p in b if p.main_variable() == "w"]
    ec = [p for p in top if p == normalize(f)]
    out = excluded(top, ec, "w")
    assert canon(out) == canon([parse("z + 1", o)])


def test_excluded_disjoint_from_reduced():
    b = basis_of(F, G)
    red = canon(reduced([F], b, "y"))
    exc = canon(excluded(b, [F], "y"))
    assert not (red & exc)
    assert red | exc >= canon(mccallum(b, "y"))


# ---------------------------------------------------------------------------
# repeated projection


def test_full_projection_example_one():
    ps = full_projection([F, G], XY)
    assert canon(ps.level_polys(2)) == canon([F, G])
    assert canon(ps.level_polys(1)) == canon([P("x"), P("x^2 - 4"), P("x^4 - 4*x^2 + 1")])
    tags = {str(p): t for p, t in ps.provenance.items()}
    assert tags["x"] == "coefficient"
    assert tags["x^2-4"] == "discriminant"
    assert tags["x^4-4*x^2+1"] == "resultant"


def test_full_projection_univariate_unchanged():
    p = P("x^2 - 4", VarOrder(["x"]))
    ps = full_projection([p], VarOrder(["x"]))
    assert canon(ps.level_polys(1)) == canon([p])


def test_full_projection_small_circle():
    f1, g1 = P("x^2 + y^2 - 1"), P("x*y - 1/4")
    ps = full_projection([f1, g1], XY)
    assert canon(ps.level_polys(1)) == canon(
        [P("x^2 - 1"), P("x"), P("x^4 - x^2 + 1/16")])


def test_projection_levels_strictly_below():
    ps = full_projection([F, G], XY)
    for p in ps.level_polys(1):
        assert p.level() == 1
    for p in ps.level_polys(2):
        assert p.level() == 2


def test_simplification_idempotence():
    out = mccallum(basis_of(F, G), "y")
    once = canon(out)
    twice = canon(once)
    assert once == twice
