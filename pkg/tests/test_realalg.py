import random
from fractions import Fraction

import mpmath
import pytest

from cadkit.polyarith import Polynomial, PolyError, VarOrder, parse
from cadkit.realalg import (
    NULLIFIED,
    RealAlgebraic,
    SamplePoint,
    compare,
    count_real_roots,
    isolate_roots,
    isolate_roots_at_point,
    ndrr,
    sign_at,
    sign_at_sample,
    sturm_chain,
)

X = VarOrder(["x"])
XY = VarOrder(["x", "y"])


def P(text, order=X):
    return parse(text, order)


def rat(q, var="x"):
    return RealAlgebraic.from_rational(Fraction(q), var)


# ---------------------------------------------------------------------------
# Sturm chains


def test_sturm_chain_quadratic():
    chain = sturm_chain(P("x^2 - 2"))
    assert [str(c) for c in chain] == ["x^2-2", "2*x", "1"]
    assert count_real_roots(P("x^2 - 2")) == 2


def test_sturm_no_real_roots():
    assert count_real_roots(P("x^2 + 1")) == 0


def test_sturm_linear():
    assert count_real_roots(P("x")) == 1


def test_sturm_constant_errors():
    with pytest.raises(PolyError):
        sturm_chain(P("3"))


# ---------------------------------------------------------------------------
# isolation


def test_isolate_rational_detection():
    roots = isolate_roots(P("x^2 - 4"))
    assert [r.rational_value for r in roots] == [Fraction(-2), Fraction(2)]


def test_isolate_quartic():
    roots = isolate_roots(P("x^4 - 4*x^2 + 1"))
    assert len(roots) == 4
    approx = [-1.9319, -0.5176, 0.5176, 1.9319]
    for r, a in zip(roots, approx):
        r.refine_below(Fraction(1, 1024))
        lo, hi = r.interval
        assert lo <= Fraction(a).limit_denominator(10 ** 6) <= hi or abs(float((lo + hi) / 2) - a) < 1e-3
    # intervals pairwise disjoint and sorted
    for a, b in zip(roots, roots[1:]):
        assert a.interval[1] <= b.interval[0] or compare(a, b) < 0


def test_isolate_no_roots():
    assert isolate_roots(P("x^2 + 1")) == []


def test_isolate_zero_errors():
    with pytest.raises(PolyError, match="zero"):
        isolate_roots(Polynomial.zero(X))


def test_isolation_matches_sturm_count_random():
    rng = random.Random(5)
    done = 0
    while done < 1000:
        deg = rng.randrange(1, 9)
        t = {(k,): Fraction(rng.randrange(-9, 10)) for k in range(deg + 1)}
        t[(deg,)] = Fraction(rng.choice([1, 2, -1, 3]))
        p = Polynomial(X, t)
        from cadkit.polyarith import squarefree_part
        s = squarefree_part(p, "x")
        roots = isolate_roots(s)
        assert len(roots) == count_real_roots(s)
        # each interval contains exactly one sign change of s
        for r in roots:
            if r.rational_value is None:
                lo, hi = r.interval
                slo = s.evaluate({"x": lo})
                shi = s.evaluate({"x": hi})
                assert slo * shi < 0
        done += 1


# ---------------------------------------------------------------------------
# signs at algebraic numbers


def sqrt2():
    return isolate_roots(P("x^2 - 2"))[1]


def test_sign_at_defining_poly_is_zero():
    assert sign_at(P("x^2 - 2"), sqrt2()) == 0


def test_sign_at_three_halves():
    # sqrt(2) - 3/2 < 0
    assert sign_at(P("2*x - 3"), sqrt2()) == -1


def test_sign_at_rational_point():
    assert sign_at(P("x^2 - 3"), rat(-2)) == 1


def test_sign_at_agrees_with_mpmath():
    rng = random.Random(23)
    mpmath.mp.dps = 100
    checked = 0
    while checked < 120:
        deg = rng.randrange(2, 6)
        t = {(k,): Fraction(rng.randrange(-7, 8)) for k in range(deg + 1)}
        t[(deg,)] = Fraction(rng.choice([1, 2, 3]))
        p = Polynomial(X, t)
        from cadkit.polyarith import squarefree_part
        s = squarefree_part(p, "x")
        if s.degree("x") < 1:
            continue
        roots = isolate_roots(s)
        if not roots:
            continue
        gt = {(k,): Fraction(rng.randrange(-5, 6)) for k in range(3)}
        g = Polynomial(X, gt)
        if g.is_zero:
            continue
        coeffs = [float(c.constant_value()) for c in s.coefficients("x")]
        try:
            mroots = mpmath.polyroots([mpmath.mpf(c) for c in coeffs], maxsteps=200)
        except mpmath.libmp.libhyper.NoConvergence:
            continue
        realm = sorted(float(r.real) for r in mroots if abs(r.imag) < 1e-30)
        if len(realm) != len(roots):
            continue
        for r, mr in zip(roots, realm):
            val = sum(float(c) * mr ** e[0] for e, c in g.terms)
            if abs(val) < 1e-6:
                continue  # not bounded away from zero
            assert sign_at(g, r) == (1 if val > 0 else -1)
            checked += 1


# ---------------------------------------------------------------------------
# comparison


def test_compare_examples():
    assert compare(sqrt2(), rat(Fraction(3, 2))) == -1
    assert compare(rat(-2), rat(-2)) == 0
    s3 = isolate_roots(P("x^2 - 3"))[1]
    assert compare(s3, sqrt2()) == 1


def test_compare_total_order_random():
    rng = random.Random(31)
    pool = []
    for text in ("x^2-2", "x^2-3", "x^3-2", "x^2-2*x-1"):
        pool.extend(isolate_roots(P(text)))
    pool.extend(rat(Fraction(rng.randrange(-8, 9), rng.randrange(1, 5))) for _ in range(6))
    done = 0
    while done < 1000:
        a, b, c = rng.choice(pool), rng.choice(pool), rng.choice(pool)
        ab, bc, ac = compare(a, b), compare(b, c), compare(a, c)
        assert compare(a, a) == 0
        assert ab == -compare(b, a)
        if ab < 0 and bc < 0:
            assert ac < 0
        if ab == 0 and bc == 0:
            assert ac == 0
        done += 1


# ---------------------------------------------------------------------------
# roots over sample points


def test_roots_at_point_empty():
    s = SamplePoint(XY, [rat(-3)])
    assert isolate_roots_at_point(P("x^2 + y^2 - 4", XY), s) == []


def test_roots_at_point_tangency_collapses():
    s = SamplePoint(XY, [rat(-2)])
    roots = isolate_roots_at_point(P("x^2 + y^2 - 4", XY), s)
    assert [r.rational_value for r in roots] == [Fraction(0)]


def test_roots_at_point_nullified():
    o = VarOrder(["x", "y", "z", "w"])
    g = parse("z*y - x^2*w", o)
    s = SamplePoint(o, [rat(0, "x"), rat(0, "y"), rat(0, "z")])
    assert isolate_roots_at_point(g, s) is NULLIFIED


def test_roots_at_point_rational_prefix_agrees_with_substitution():
    rng = random.Random(47)
    done = 0
    while done < 200:
        t = {}
        for _ in range(rng.randrange(2, 6)):
            t[(rng.randrange(0, 3), rng.randrange(0, 4))] = Fraction(rng.randrange(-5, 6))
        p = Polynomial(XY, t)
        if p.degree("y") < 1:
            continue
        q = Fraction(rng.randrange(-6, 7), rng.randrange(1, 4))
        s = SamplePoint(XY, [rat(q)])
        via_point = isolate_roots_at_point(p, s)
        img = p.substitute({"x": q})
        if img.degree("y") < 1:
            if all(c.is_zero for c in img.coefficients("y") or [img]) or img.is_zero:
                assert via_point is NULLIFIED
                done += 1
            continue
        direct = isolate_roots(img)
        assert via_point is not NULLIFIED
        assert len(via_point) == len(direct)
        for a, b in zip(via_point, direct):
            assert compare(a, b) == 0
        done += 1


def test_sign_at_sample_nested():
    s2 = sqrt2()
    s = SamplePoint(XY, [s2])
    roots = isolate_roots_at_point(P("y^2 - x", XY), s)  # y = ±2^(1/4)
    beta = roots[1]
    full = s.extend(beta)
    assert sign_at_sample(P("y^4 - 2", XY), full) == 0
    assert sign_at_sample(P("y^4 - x^2", XY), full) == 0
    assert sign_at_sample(P("y^4 - 3", XY), full) == -1
    assert sign_at_sample(P("x*y - 1", XY), full) == 1


# ---------------------------------------------------------------------------
# ndrr


def test_ndrr_no_real_roots():
    assert ndrr([P("x^2 + 1")]) == 0


def test_ndrr_projection_line():
    assert ndrr([P("x^2 - 4"), P("x"), P("x^4 - 4*x^2 + 1")]) == 7


def test_ndrr_counts_distinct_union():
    # the union {-1, 1} u {1} has two members; the count follows the product's
    # distinct real roots (number of sections in the induced decomposition)
    assert ndrr([P("x^2 - 1"), P("x - 1")]) == 2


def test_ndrr_squarefree_basis_invariance():
    from cadkit.polyarith import finest_squarefree_basis
    rng = random.Random(53)
    for _ in range(100):
        polys = []
        for _ in range(rng.randrange(1, 4)):
            deg = rng.randrange(1, 5)
            t = {(k,): Fraction(rng.randrange(-4, 5)) for k in range(deg + 1)}
            t[(deg,)] = Fraction(rng.choice([1, 2]))
            polys.append(Polynomial(X, t))
        basis = finest_squarefree_basis(polys)
        assert ndrr(polys) == ndrr(list(basis.polys))


def test_serialization_shapes():
    r = sqrt2()
    j = r.to_json()
    assert set(j) == {"defpoly", "interval"}
    assert j["defpoly"] == "x^2-2"
    assert rat(-3).to_json() == {"rational": "-3"}
