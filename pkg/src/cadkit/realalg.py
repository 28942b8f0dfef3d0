"""Real root isolation and exact sign determination at algebraic points.

A RealAlgebraic is a squarefree integer defining polynomial together with an
isolating rational interval; rationals use the degenerate form (x - q, [q, q]).
Coordinates produced while lifting over algebraic sample points additionally
carry the multivariate polynomial that defined them, so that sign queries at
nested points can be answered exactly: zero tests go through gcd chains over
the defining tower, and nonzero signs through interval refinement.  No
floating point is used anywhere.
"""
from __future__ import annotations

from fractions import Fraction
from math import floor
from typing import Iterable, Optional, Sequence

from .polyarith import (
    Polynomial,
    PolyError,
    VarOrder,
    exact_div,
    finest_squarefree_basis,
    gcd,
    normalize,
    prem,
    resultant,
    squarefree_part,
)


class _NullifiedType:
    """Returned when a polynomial vanishes identically over a sample point."""

    def __repr__(self):
        return "NULLIFIED"

    def __bool__(self):
        return False


NULLIFIED = _NullifiedType()

_REFINE_LIMIT = 4000


# ---------------------------------------------------------------------------
# univariate helpers over the rationals


def _as_univariate(p: Polynomial) -> tuple:
    """(var name, polynomial over a single-variable order)."""
    var = p.main_variable()
    if var is None:
        raise PolyError("constant polynomial")
    if len(p.variables()) != 1:
        raise PolyError("polynomial is not univariate")
    if len(p.order) == 1:
        return var, p
    return var, p.shift_variable(var, VarOrder((var,)), var)


def _ueval(p: Polynomial, x: Fraction) -> Fraction:
    var = p.main_variable()
    if var is None:
        return p.constant_value()
    return p.evaluate({var: x})


def _usign(p: Polynomial, x: Fraction) -> int:
    v = _ueval(p, x)
    return (v > 0) - (v < 0)


def sturm_chain(p: Polynomial) -> list:
    """Sturm sequence p, p', -rem(...), ...; input must be non-constant.

    Elements after the derivative are scaled to coprime integer coefficients
    (a positive factor, so variation counts are unaffected).
    """
    var, p1 = _as_univariate(p)
    if p1.is_constant:
        raise PolyError("constant polynomial has no Sturm chain")
    chain = [p1, p1.derivative(var)]
    while not chain[-1].is_zero:
        r = -_urem(chain[-2], chain[-1], var)
        if r.is_zero:
            break
        chain.append(_strip_content(r))
    return [c for c in chain if not c.is_zero]


_CHAIN_CACHE: dict = {}


def _cached_chain(p: Polynomial) -> list:
    ch = _CHAIN_CACHE.get(p)
    if ch is None:
        ch = sturm_chain(p)
        if len(_CHAIN_CACHE) > 4096:
            _CHAIN_CACHE.clear()
        _CHAIN_CACHE[p] = ch
    return ch


def _urem(a: Polynomial, b: Polynomial, var: str) -> Polynomial:
    """Exact univariate remainder over Q."""
    if b.is_zero:
        raise PolyError("remainder by zero")
    da, db = a.degree(var), b.degree(var)
    r = a
    v = Polynomial.variable(a.order, var)
    bl = b.leading_coefficient(var).constant_value()
    while not r.is_zero and r.degree(var) >= db:
        k = r.degree(var) - db
        c = r.leading_coefficient(var).constant_value() / bl
        r = r - b * c * v ** k
    return r


def _strip_content(p: Polynomial) -> Polynomial:
    """Scale to coprime integer coefficients, keeping the sign."""
    if p.is_zero:
        return p
    n = normalize(p)
    return n if p.terms[0][1] > 0 else -n


def _variations(signs: Sequence[int]) -> int:
    out = 0
    prev = 0
    for s in signs:
        if s == 0:
            continue
        if prev and s != prev:
            out += 1
        prev = s
    return out


def _chain_variations_at(chain: Sequence[Polynomial], x: Fraction) -> int:
    return _variations([_usign(c, x) for c in chain])


def _chain_variations_at_inf(chain: Sequence[Polynomial], positive: bool) -> int:
    signs = []
    for c in chain:
        var = c.main_variable()
        if var is None:
            v = c.constant_value()
            signs.append((v > 0) - (v < 0))
        else:
            lc = c.leading_coefficient(var).constant_value()
            s = (lc > 0) - (lc < 0)
            if not positive and c.degree(var) % 2:
                s = -s
            signs.append(s)
    return _variations(signs)


def count_real_roots(p: Polynomial, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> int:
    """Distinct real roots of p in (lo, hi]; whole line when bounds omitted."""
    var, p1 = _as_univariate(p)
    chain = _cached_chain(p1)
    va = _chain_variations_at(chain, lo) if lo is not None else _chain_variations_at_inf(chain, False)
    vb = _chain_variations_at(chain, hi) if hi is not None else _chain_variations_at_inf(chain, True)
    return va - vb


# ---------------------------------------------------------------------------
# real algebraic numbers


class RealAlgebraic:
    """Exact real algebraic number.

    The defining polynomial, when present, is squarefree with integer
    coefficients and has exactly one real root in [lo, hi].  Roots produced
    while lifting over algebraic sample points also carry the multivariate
    polynomial (and prefix point) that defined them; for large towers the
    univariate defining polynomial is only computed on demand, and the
    interval then refines through the defining data instead.  The interval
    only ever shrinks; the represented value never changes, so sharing is
    safe.
    """

    __slots__ = ("var", "defpoly", "_lo", "_hi", "defining", "prefix", "_chain")

    def __init__(self, var: str, defpoly: Optional[Polynomial], lo: Fraction, hi: Fraction,
                 defining: Optional[Polynomial] = None,
                 prefix: Optional["SamplePoint"] = None):
        self.var = var
        self.defpoly = defpoly
        self._lo = Fraction(lo)
        self._hi = Fraction(hi)
        self.defining = defining
        self.prefix = prefix
        self._chain = None
        if defpoly is None and (defining is None or prefix is None):
            raise PolyError("a root needs either a defining polynomial or context")

    @classmethod
    def from_rational(cls, q, var: str = "x") -> "RealAlgebraic":
        q = Fraction(q)
        order = VarOrder((var,))
        dp = Polynomial.variable(order, var) - Polynomial.constant(order, q)
        dp = _strip_content(dp)
        return cls(var, dp, q, q)

    @property
    def rational_value(self) -> Optional[Fraction]:
        return self._lo if self._lo == self._hi else None

    @property
    def interval(self) -> tuple:
        return (self._lo, self._hi)

    def refine(self) -> None:
        """Halve the isolating interval exactly."""
        if self._lo == self._hi:
            return
        m = (self._lo + self._hi) / 2
        if self.defpoly is not None:
            sm = _usign(self.defpoly, m)
            if sm == 0:
                self._collapse(m)
            elif _usign(self.defpoly, self._lo) == sm:
                self._lo = m
            else:
                self._hi = m
            return
        # contextual refinement: count image roots in the halves
        if self._chain is None:
            self._chain = _tower_sturm(self.defining, self.var, self.prefix)
        img_m = self.defining.substitute({self.var: m})
        if sign_at_sample(img_m, self.prefix) == 0:
            self._collapse(m)
            return
        vl = _tower_variations(self._chain, self.var, self._lo, self.prefix)
        vm = _tower_variations(self._chain, self.var, m, self.prefix)
        if vl - vm >= 1:
            self._hi = m
        else:
            self._lo = m

    def _collapse(self, q: Fraction) -> None:
        self._lo = self._hi = q
        order = VarOrder((self.var,))
        dp = Polynomial.variable(order, self.var) - Polynomial.constant(order, q)
        self.defpoly = _strip_content(dp)
        self.defining = None
        self.prefix = None
        self._chain = None

    def refine_below(self, width: Fraction) -> None:
        n = 0
        while self._hi - self._lo > width:
            self.refine()
            n += 1
            if n > _REFINE_LIMIT:
                raise PolyError("refinement failed to converge")

    def ensure_defpoly(self) -> Polynomial:
        """The univariate integer defining polynomial, computing it (by
        iterated resultants over the prefix tower) when it was deferred."""
        if self.defpoly is None:
            defpoly = _univariate_defpoly(self.defining, self.var, self.prefix)
            while True:
                if (_usign(defpoly, self._lo) != 0 and _usign(defpoly, self._hi) != 0
                        and count_real_roots(defpoly, self._lo, self._hi) == 1):
                    break
                self.refine()
            self.defpoly = defpoly
        return self.defpoly

    def __repr__(self) -> str:
        q = self.rational_value
        if q is not None:
            return f"RealAlgebraic({q})"
        what = self.defpoly if self.defpoly is not None else self.defining
        return f"RealAlgebraic({what} in [{self._lo}, {self._hi}])"

    def to_json(self) -> dict:
        q = self.rational_value
        if q is not None:
            return {"rational": str(q)}
        return {"defpoly": str(self.ensure_defpoly()),
                "interval": [str(self._lo), str(self._hi)]}

    # ordering sugar used by sorts
    def __lt__(self, other) -> bool:
        return compare(self, other) < 0


def isolate_roots(p: Polynomial) -> list:
    """All distinct real roots of a nonzero univariate polynomial, sorted.

    Roots are isolated by Sturm bisection; each isolating interval is then
    tested for a rational root (denominator divides the leading coefficient),
    which is stored exactly when found.
    """
    if p.is_zero:
        raise PolyError("identically zero")
    if p.is_constant:
        return []
    var, p1 = _as_univariate(p)
    s = _strip_content(squarefree_part(p1, var))
    roots = []
    chain = _cached_chain(s)
    b = _root_bound(s, var)
    va = _chain_variations_at(chain, -b)
    vb = _chain_variations_at(chain, b)
    stack = [(-b, b, va, vb)]
    while stack:
        lo, hi, vl, vh = stack.pop()
        k = vl - vh
        if k == 0:
            continue
        if k == 1:
            q = _identify_rational(s, var, lo, hi)
            if q is not None:
                roots.append(RealAlgebraic.from_rational(q, var))
            else:
                roots.append(RealAlgebraic(var, s, lo, hi))
            continue
        m = (lo + hi) / 2
        if _usign(s, m) == 0:
            roots.append(RealAlgebraic.from_rational(m, var))
            tl, tr, vtl, vtr = _bracket_rational(s, chain, var, m, lo, hi)
            stack.append((lo, tl, vl, vtl))
            stack.append((tr, hi, vtr, vh))
        else:
            vm = _chain_variations_at(chain, m)
            stack.append((lo, m, vl, vm))
            stack.append((m, hi, vm, vh))
    rationals = [r for r in roots if r.rational_value is not None]
    if rationals:
        # deflate: irrational roots only need the rational-root-free factor
        rem = s
        for r in rationals:
            order = rem.order
            lin = Polynomial.variable(order, var) - Polynomial.constant(order, r.rational_value)
            rem = exact_div(rem, lin)
        rem = _strip_content(rem)
        if rem.degree(var) >= 1:
            for i, r in enumerate(roots):
                if r.rational_value is None:
                    roots[i] = RealAlgebraic(var, rem, r.interval[0], r.interval[1])
    roots.sort()
    return roots


def _bracket_rational(s, chain, var, m, lo, hi):
    width = min(m - lo, hi - m) / 4
    for _ in range(_REFINE_LIMIT):
        tl, tr = m - width, m + width
        if _usign(s, tl) != 0 and _usign(s, tr) != 0:
            vtl = _chain_variations_at(chain, tl)
            vtr = _chain_variations_at(chain, tr)
            if vtl - vtr == 1:
                return tl, tr, vtl, vtr
        width = width / 2
    raise PolyError("failed to bracket a rational root")


def _identify_rational(s: Polynomial, var: str, lo: Fraction, hi: Fraction):
    """The rational root of s inside (lo, hi) when there is one, else None.
    s must have exactly one root in the interval; the endpoints are not
    roots.  Only denominators dividing the (small) leading coefficient can
    occur, so the trailing coefficient is never factored."""
    lead = abs(s.leading_coefficient(var).constant_value().numerator)
    dens = _small_divisors(lead)
    if dens is None:
        return None
    slo, shi = lo, hi
    for q in dens:
        # refine so that at most one multiple of 1/q lies inside
        while (shi - slo) * q >= 1:
            m = (slo + shi) / 2
            sm = _usign(s, m)
            if sm == 0:
                return m
            if sm == _usign(s, slo):
                slo = m
            else:
                shi = m
        n0 = floor(slo * q) + 1
        cand = Fraction(n0, q)
        if slo < cand < shi and _ueval(s, cand) == 0:
            return cand
    return None


def _small_divisors(n: int, step_cap: int = 20000):
    """Divisors of n by trial division, or None when n is too large to try."""
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n:
        if d > step_cap:
            return None
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _root_bound(s: Polynomial, var: str) -> Fraction:
    coeffs = [c.constant_value() for c in s.coefficients(var)]
    lead = abs(coeffs[0])
    m = max((abs(c) / lead for c in coeffs[1:]), default=Fraction(0))
    b = 1 + m
    return Fraction(int(b) + 1)


def _isolate_irrational(s: Polynomial, var: str) -> list:
    """Isolate roots of a squarefree polynomial with no rational roots."""
    chain = _cached_chain(s)
    b = _root_bound(s, var)
    va = _chain_variations_at(chain, -b)
    vb = _chain_variations_at(chain, b)
    out = []
    stack = [(-b, b, va, vb)]
    while stack:
        lo, hi, vl, vh = stack.pop()
        k = vl - vh
        if k == 0:
            continue
        if k == 1:
            out.append(RealAlgebraic(var, s, lo, hi))
            continue
        m = (lo + hi) / 2
        vm = _chain_variations_at(chain, m)  # m is never a root: no rational roots
        stack.append((lo, m, vl, vm))
        stack.append((m, hi, vm, vh))
    return out


def sign_at(g: Polynomial, a: RealAlgebraic) -> int:
    """Exact sign of the univariate polynomial g at a."""
    q = a.rational_value
    if q is not None:
        if g.is_constant:
            v = g.constant_value()
            return (v > 0) - (v < 0)
        var, g1 = _as_univariate(g)
        return _usign(g1, q)
    if g.is_constant:
        v = g.constant_value()
        return (v > 0) - (v < 0)
    var, g1 = _as_univariate(g)
    if var != a.var:
        raise PolyError(f"sign query in {var!r} at a {a.var!r}-coordinate")
    dp = a.ensure_defpoly()
    h = gcd(g1, dp)
    if not h.is_constant and count_real_roots(h, a._lo, a._hi) >= 1:
        return 0
    for _ in range(_REFINE_LIMIT):
        lo, hi = a.interval
        vlo, vhi = _interval_eval_univariate(g1, var, lo, hi)
        if vlo > 0:
            return 1
        if vhi < 0:
            return -1
        a.refine()
    raise PolyError("sign refinement failed to converge")


def compare(a: RealAlgebraic, b: RealAlgebraic) -> int:
    """-1, 0 or +1 ordering two real algebraic numbers exactly."""
    qa, qb = a.rational_value, b.rational_value
    if qa is not None and qb is not None:
        return (qa > qb) - (qa < qb)
    if a.defpoly is None or b.defpoly is None:
        return _compare_contextual(a, b)
    for _ in range(_REFINE_LIMIT):
        alo, ahi = a.interval
        blo, bhi = b.interval
        if ahi < blo:
            return -1
        if bhi < alo:
            return 1
        # overlapping: equal iff a common defining root lies in the overlap
        if qa is not None:
            if _usign(b.defpoly, qa) == 0:
                return 0
        elif qb is not None:
            if _usign(a.defpoly, qb) == 0:
                return 0
        else:
            h = gcd(a.defpoly, b.defpoly)
            if not h.is_constant:
                lo = max(alo, blo)
                hi = min(ahi, bhi)
                if count_real_roots(h, lo, hi) >= 1:
                    return 0
        a.refine()
        b.refine()
    raise PolyError("comparison failed to converge")


def _compare_contextual(a: RealAlgebraic, b: RealAlgebraic) -> int:
    """Order roots when at least one carries only a defining context.

    b (say) is the unique root of its defining image inside its interval, so
    a equals b exactly when a is a root of that image and a's interval can be
    refined into b's.
    """
    ctx, other = (a, b) if a.defpoly is None else (b, a)
    eq = _value_is_root_of(other, ctx)
    for _ in range(_REFINE_LIMIT):
        alo, ahi = a.interval
        blo, bhi = b.interval
        if ahi < blo:
            return -1
        if bhi < alo:
            return 1
        if eq and other.interval[0] >= ctx.interval[0] and other.interval[1] <= ctx.interval[1]:
            return 0
        a.refine()
        b.refine()
    raise PolyError("contextual comparison failed to converge")


def _value_is_root_of(x: RealAlgebraic, ctx: RealAlgebraic) -> bool:
    """Exact test: is the number x a root of ctx's defining image?"""
    ext = ctx.prefix.extend(x)
    return sign_at_sample(ctx.defining, ext) == 0


def _interval_eval_univariate(g: Polynomial, var: str, lo: Fraction, hi: Fraction) -> tuple:
    i = g.order.index(var)
    tlo = Fraction(0)
    thi = Fraction(0)
    for e, c in g.terms:
        plo, phi = _ipow(lo, hi, e[i])
        mlo, mhi = (c * plo, c * phi) if c >= 0 else (c * phi, c * plo)
        tlo += mlo
        thi += mhi
    return tlo, thi


def _ipow(lo: Fraction, hi: Fraction, e: int) -> tuple:
    if e == 0:
        return Fraction(1), Fraction(1)
    if e % 2 == 1 or lo >= 0:
        return lo ** e, hi ** e
    if hi <= 0:
        return hi ** e, lo ** e
    return Fraction(0), max(lo ** e, hi ** e)


def ndrr(polys: Iterable[Polynomial]) -> int:
    """Number of distinct real roots of the product of the given univariate
    polynomials, computed via a squarefree basis."""
    basis = finest_squarefree_basis(polys)
    return sum(count_real_roots(b) for b in basis.polys)


# ---------------------------------------------------------------------------
# sample points and the algebraic tower


class SamplePoint:
    """Ordered coordinates of a point; coordinate i lives in variable x_{i+1}."""

    __slots__ = ("order", "coords", "_sign_cache")

    def __init__(self, order: VarOrder, coords: Sequence[RealAlgebraic]):
        self.order = order
        self.coords = tuple(coords)
        self._sign_cache: dict = {}

    @property
    def level(self) -> int:
        return len(self.coords)

    def extend(self, coord: RealAlgebraic) -> "SamplePoint":
        return SamplePoint(self.order, self.coords + (coord,))

    def rational_coords(self) -> Optional[list]:
        out = []
        for c in self.coords:
            q = c.rational_value
            if q is None:
                return None
            out.append(q)
        return out

    def __repr__(self) -> str:
        return f"SamplePoint({list(self.coords)!r})"


def _subst_rationals(g: Polynomial, s: SamplePoint) -> Polynomial:
    vals = {}
    for i, c in enumerate(s.coords):
        q = c.rational_value
        if q is not None:
            vals[s.order.vars[i]] = q
    return g.substitute(vals) if vals else g


def _alg_indices(g: Polynomial, s: SamplePoint) -> list:
    """Indices of algebraic coordinates whose variable occurs in g."""
    present = set(g.variables())
    out = []
    for i, c in enumerate(s.coords):
        if s.order.vars[i] in present and c.rational_value is None:
            out.append(i)
    return out


def sign_at_sample(g: Polynomial, s: SamplePoint) -> int:
    """Exact sign of a multivariate polynomial at a sample point."""
    cached = s._sign_cache.get(g)
    if cached is not None:
        return cached
    r = _subst_rationals(g, s)
    if not r.is_constant:
        lev = r.level()
        r = _reduce_mod_prefix(r, s.order.vars[lev - 1], s)
    if r.is_constant:
        v = r.constant_value()
        out = (v > 0) - (v < 0)
    elif _is_zero_at(r, s):
        out = 0
    else:
        out = _refine_sign(r, s)
    s._sign_cache[g] = out
    return out


def _is_zero_at(g: Polynomial, s: SamplePoint) -> bool:
    """Exact zero test; rational coordinates already substituted."""
    if g.is_zero:
        return True
    if g.is_constant:
        return g.constant_value() == 0
    j = g.level() - 1
    coord = s.coords[j]
    var = s.order.vars[j]
    gt = _trim(g, var, s)
    if gt.is_zero:
        return True
    if gt.degree(var) == 0:
        return False  # the surviving coefficient is nonzero at the prefix
    q = _defining_image(coord, var, s)
    gcd_img = _image_gcd(gt, q, var, s)
    if gcd_img.degree(var) < 1:
        return False
    chain = _tower_sturm(gcd_img, var, s)
    lo, hi = coord.interval
    n = _tower_variations(chain, var, lo, s) - _tower_variations(chain, var, hi, s)
    return n >= 1


def _defining_image(coord: RealAlgebraic, var: str, s: SamplePoint) -> Polynomial:
    if coord.defining is None:
        # self-contained root: the defining image is its own defpoly
        return coord.defpoly.shift_variable(coord.var, s.order, var)
    d = _reduce_mod_prefix(_subst_rationals(coord.defining, s), var, s)
    dt = _trim(d, var, s)
    if dt.degree(var) < 1:
        raise PolyError("defining image degenerated")
    return dt


def _trim(g: Polynomial, var: str, s: SamplePoint) -> Polynomial:
    """Drop leading coefficients (in var) that vanish at the prefix point."""
    coeffs = g.coefficients(var)
    k = 0
    for c in coeffs:
        if c.is_zero or _coeff_is_zero(c, s):
            k += 1
        else:
            break
    if k == 0:
        return g
    kept = coeffs[k:]
    if not kept:
        return Polynomial.zero(g.order)
    return g.from_coefficients(var, kept)


def _reduce_mod_prefix(g: Polynomial, var: str, s: SamplePoint) -> Polynomial:
    """Shrink g without changing its values over the prefix point: reduce
    modulo the (constant-leading-coefficient) defining polynomials of the
    algebraic prefix coordinates.  Keeps pseudo-remainder towers from
    blowing up in degree."""
    for j in _alg_indices(g, s):
        vj = s.order.vars[j]
        if vj == var:
            continue
        coord = s.coords[j]
        if coord.defpoly is None:
            continue
        d = coord.defpoly
        if g.degree(vj) < d.degree(coord.var):
            continue
        dj = d.shift_variable(coord.var, s.order, vj)
        g = _rem_by_constant_lc(g, dj, vj)
    return g


def _rem_by_constant_lc(g: Polynomial, d: Polynomial, var: str) -> Polynomial:
    """Remainder of g by d in ``var``; d must have a constant leading
    coefficient, so the division is exact over the rationals."""
    dd = d.degree(var)
    lc = d.leading_coefficient(var).constant_value()
    v = Polynomial.variable(g.order, var)
    while g.degree(var) >= dd:
        k = g.degree(var) - dd
        c = g.leading_coefficient(var)
        g = g - d * (c * (1 / lc)) * v ** k
    return g


def _coeff_is_zero(c: Polynomial, s: SamplePoint) -> bool:
    if c.is_constant:
        return c.constant_value() == 0
    return _is_zero_at(c, s)


def _shrink(r: Polynomial, var: str, s: SamplePoint) -> Polynomial:
    """Divide a (trimmed) chain element by its coefficient content, keeping
    the scaling factor positive at the sample point, and strip the integer
    content.  Values at the point change only by a positive factor, so both
    root sets and Sturm variation counts are preserved."""
    if r.is_zero:
        return r
    coeffs = r.coefficients(var)
    cont = None
    for c in coeffs:
        if c.is_zero:
            continue
        cont = c if cont is None else gcd(cont, c)
        if cont.is_constant:
            break
    if cont is not None and not cont.is_constant:
        r = exact_div(r, cont)
        if sign_at_sample(cont, s) < 0:
            r = -r
    return _strip_content(r)


def _image_gcd(a: Polynomial, b: Polynomial, var: str, s: SamplePoint) -> Polynomial:
    """Gcd of the images of a and b at the prefix, up to a nonzero factor."""
    a = _shrink(_trim(_reduce_mod_prefix(a, var, s), var, s), var, s)
    b = _shrink(_trim(_reduce_mod_prefix(b, var, s), var, s), var, s)
    if a.degree(var) < b.degree(var):
        a, b = b, a
    while True:
        if b.degree(var) == 0:
            return b  # images coprime
        r = _trim(_reduce_mod_prefix(prem(a, b, var), var, s), var, s)
        if r.is_zero:
            return b
        a, b = b, _shrink(r, var, s)


def _tower_sturm(g: Polynomial, var: str, s: SamplePoint) -> list:
    """Sturm-like chain for the image of g at the prefix.

    Elements equal the exact Sturm chain of the image up to positive factors
    (pseudo-remainders are sign-corrected by the parity of the multiplier),
    so sign variation counts are preserved.  Coefficients are reduced modulo
    the prefix tower to keep degrees bounded.
    """
    f0 = _shrink(_trim(_reduce_mod_prefix(g, var, s), var, s), var, s)
    chain = [f0]
    f1 = _shrink(_trim(f0.derivative(var), var, s), var, s)
    if f1.is_zero:
        return chain
    chain.append(f1)
    while True:
        a, b = chain[-2], chain[-1]
        if b.degree(var) == 0:
            break
        delta = a.degree(var) - b.degree(var) + 1
        r = _trim(_reduce_mod_prefix(prem(a, b, var), var, s), var, s)
        if r.is_zero:
            break
        if delta % 2 == 0:
            sigma = 1
        else:
            sigma = sign_at_sample(b.leading_coefficient(var), s)
        nxt = -r if sigma > 0 else r
        chain.append(_shrink(nxt, var, s))
    return chain


def _tower_variations(chain: Sequence[Polynomial], var: str, t: Fraction, s: SamplePoint) -> int:
    signs = []
    for f in chain:
        ft = f.substitute({var: t})
        signs.append(sign_at_sample(ft, s))
    return _variations(signs)


def _refine_sign(g: Polynomial, s: SamplePoint) -> int:
    idxs = _alg_indices(g, s)
    for _ in range(_REFINE_LIMIT):
        lo, hi = _box_eval(g, s)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        for i in idxs:
            s.coords[i].refine()
    raise PolyError("sign refinement failed to converge")


def _box_eval(g: Polynomial, s: SamplePoint) -> tuple:
    tlo = Fraction(0)
    thi = Fraction(0)
    ivs = {}
    for e, c in g.terms:
        plo, phi = Fraction(1), Fraction(1)
        for i, k in enumerate(e):
            if not k:
                continue
            iv = ivs.get(i)
            if iv is None:
                iv = s.coords[i].interval
                ivs[i] = iv
            blo, bhi = _ipow(iv[0], iv[1], k)
            cand = (plo * blo, plo * bhi, phi * blo, phi * bhi)
            plo, phi = min(cand), max(cand)
        mlo, mhi = (c * plo, c * phi) if c >= 0 else (c * phi, c * plo)
        tlo += mlo
        thi += mhi
    return tlo, thi


# ---------------------------------------------------------------------------
# root isolation over a sample point


def isolate_roots_at_point(p: Polynomial, s: SamplePoint):
    """Distinct real roots of p(s, x_k) for the next variable x_k, sorted,
    or NULLIFIED when every coefficient vanishes at s."""
    k = s.level
    var = s.order.vars[k]
    if p.degree(var) < 1:
        raise PolyError(f"polynomial has no positive degree in {var!r}")
    g = _subst_rationals(p, s)
    gt = _trim(g, var, s)
    if gt.is_zero:
        return NULLIFIED
    if gt.degree(var) == 0:
        return []
    if not _alg_indices(gt, s) and len(gt.variables()) == 1:
        # fully rational prefix: plain univariate isolation
        return isolate_roots(gt)
    return _isolate_over_tower(gt, var, s)


def _isolate_over_tower(g: Polynomial, var: str, s: SamplePoint) -> list:
    g = _reduce_mod_prefix(g, var, s)
    chain = _tower_sturm(g, var, s)
    b = _tower_root_bound(g, var, s)
    va = _tower_variations(chain, var, -b, s)
    vb = _tower_variations(chain, var, b, s)
    roots = []
    work = [(-b, b, va, vb)]
    while work:
        lo, hi, vl, vh = work.pop()
        k = vl - vh
        if k == 0:
            continue
        if k == 1:
            roots.append(_make_tower_root(g, var, s, lo, hi, chain))
            continue
        m = (lo + hi) / 2
        sm = sign_at_sample(g.substitute({var: m}), s)
        if sm == 0:
            roots.append(RealAlgebraic.from_rational(m, var))
            tl, tr, vtl, vtr = _bracket_root(g, chain, var, s, m, lo, hi)
            work.append((lo, tl, vl, vtl))
            work.append((tr, hi, vtr, vh))
        else:
            vm = _tower_variations(chain, var, m, s)
            work.append((lo, m, vl, vm))
            work.append((m, hi, vm, vh))
    roots.sort()
    return roots


def _bracket_root(g, chain, var, s, m, lo, hi):
    """Non-root points tl < m < tr such that m is the only image root in
    (tl, tr]; returns (tl, tr, variations(tl), variations(tr))."""
    width = min(m - lo, hi - m) / 4
    for _ in range(_REFINE_LIMIT):
        tl, tr = m - width, m + width
        if (sign_at_sample(g.substitute({var: tl}), s) != 0
                and sign_at_sample(g.substitute({var: tr}), s) != 0):
            vtl = _tower_variations(chain, var, tl, s)
            vtr = _tower_variations(chain, var, tr, s)
            if vtl - vtr == 1:
                return tl, tr, vtl, vtr
        width = width / 2
    raise PolyError("failed to bracket a rational root")


def _tower_root_bound(g: Polynomial, var: str, s: SamplePoint) -> Fraction:
    coeffs = g.coefficients(var)
    lead = coeffs[0]
    for _ in range(_REFINE_LIMIT):
        if lead.is_constant:
            llo = lhi = lead.constant_value()
        else:
            llo, lhi = _box_eval(lead, s)
        if llo > 0 or lhi < 0:
            lmin = min(abs(llo), abs(lhi))
            m = Fraction(0)
            for c in coeffs[1:]:
                if c.is_constant:
                    clo = chi = c.constant_value()
                else:
                    clo, chi = _box_eval(c, s)
                m = max(m, max(abs(clo), abs(chi)) / lmin)
            return Fraction(int(1 + m) + 1)
        for i in _alg_indices(lead, s):
            s.coords[i].refine()
    raise PolyError("root bound refinement failed")


_EAGER_DEFPOLY_BOUND = 32


def _make_tower_root(g: Polynomial, var: str, s: SamplePoint, lo: Fraction, hi: Fraction,
                     chain: list) -> RealAlgebraic:
    # estimated elimination degree decides whether the univariate defining
    # polynomial is built now or deferred until somebody asks for it
    est = g.degree(var)
    for j in _alg_indices(g, s):
        if s.order.vars[j] != var and s.coords[j].defpoly is not None:
            est *= s.coords[j].defpoly.total_degree()
    if est > _EAGER_DEFPOLY_BOUND:
        return RealAlgebraic(var, None, lo, hi, defining=g, prefix=s)
    defpoly = _univariate_defpoly(g, var, s)
    # refine (by image root counts) until the interval isolates a defpoly root
    for _ in range(_REFINE_LIMIT):
        if (_usign(defpoly, lo) != 0 and _usign(defpoly, hi) != 0
                and count_real_roots(defpoly, lo, hi) == 1):
            q = _identify_rational(defpoly, var, lo, hi)
            if q is not None:
                return RealAlgebraic.from_rational(q, var)
            return RealAlgebraic(var, defpoly, lo, hi, defining=g, prefix=s)
        m = (lo + hi) / 2
        if sign_at_sample(g.substitute({var: m}), s) == 0:
            return RealAlgebraic.from_rational(m, var)
        vl = _tower_variations(chain, var, lo, s)
        vm = _tower_variations(chain, var, m, s)
        if vl - vm >= 1:
            hi = m
        else:
            lo = m
    raise PolyError("failed to certify isolating interval")


def _univariate_defpoly(g: Polynomial, var: str, s: SamplePoint) -> Polynomial:
    """Integer defining polynomial for a root of the image of g at s,
    eliminating the algebraic prefix coordinates by iterated resultants
    (after stripping any shared factor, so the resultant cannot vanish)."""
    r = _reduce_mod_prefix(g, var, s)
    for j in sorted(_alg_indices(r, s), reverse=True):
        vj = s.order.vars[j]
        if vj == var or r.degree(vj) < 1:
            continue
        coord = s.coords[j]
        d = coord.ensure_defpoly().shift_variable(coord.var, s.order, vj)
        w = gcd(d, r)
        if w.degree(vj) >= 1:
            d = exact_div(d, w)
        if d.degree(vj) < 1:
            raise PolyError("defining polynomial collapsed during elimination")
        r = normalize(resultant(d, r, vj))
    var_only, runi = _as_univariate(r)
    s_part = _strip_content(squarefree_part(runi, var_only))
    return s_part
