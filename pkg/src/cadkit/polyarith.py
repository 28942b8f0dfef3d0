"""Exact sparse multivariate polynomial arithmetic over the rationals.

Polynomials are immutable values over a fixed ascending variable order, so
they can be shared across threads and used as dictionary keys.  Everything
here is exact: no floating point, no rounding.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, Iterator, Mapping, Optional, Sequence


class PolyError(ValueError):
    """Raised on domain errors (zero polynomial, wrong main variable, ...)."""


class VarOrder:
    """An ascending list of variable names, x_1 lowest ... x_n highest."""

    __slots__ = ("vars", "_index")

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if not names:
            raise PolyError("variable order must be non-empty")
        if len(set(names)) != len(names):
            raise PolyError("variable names must be unique")
        self.vars = names
        self._index = {v: i for i, v in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PolyError(f"unknown variable {name!r}") from None

    def __len__(self) -> int:
        return len(self.vars)

    def __iter__(self) -> Iterator[str]:
        return iter(self.vars)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VarOrder) and self.vars == other.vars

    def __hash__(self) -> int:
        return hash(self.vars)

    def __repr__(self) -> str:
        return f"VarOrder({list(self.vars)!r})"


def _term_key(expt: tuple) -> tuple:
    # highest variable dominates, then the next one down, etc.
    return tuple(reversed(expt))


class Polynomial:
    """Sparse multivariate polynomial with Fraction coefficients.

    Terms map exponent vectors (one entry per variable of ``order``) to
    nonzero coefficients.  Identical polynomials always have identical
    term tuples, so ``==`` and ``hash`` are structural.
    """

    __slots__ = ("order", "terms", "_hash")

    def __init__(self, order: VarOrder, terms: Mapping[tuple, Fraction]):
        clean = {}
        width = len(order)
        for e, c in terms.items():
            if len(e) != width:
                raise PolyError("exponent vector has wrong length")
            if type(c) is not Fraction:
                c = Fraction(c)
            if c:
                clean[tuple(e)] = c
        self.order = order
        self.terms = tuple(sorted(clean.items(), key=lambda t: _term_key(t[0]), reverse=True))
        self._hash = None

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, order: VarOrder) -> "Polynomial":
        return cls(order, {})

    @classmethod
    def constant(cls, order: VarOrder, c) -> "Polynomial":
        return cls(order, {(0,) * len(order): Fraction(c)})

    @classmethod
    def variable(cls, order: VarOrder, name: str) -> "Polynomial":
        e = [0] * len(order)
        e[order.index(name)] = 1
        return cls(order, {tuple(e): Fraction(1)})

    # -- basic queries -----------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return len(self.terms) == 0 or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise PolyError("not a constant")
        return self.terms[0][1]

    def degree(self, var: str) -> int:
        """Degree in ``var``; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        i = self.order.index(var)
        return max(e[i] for e, _ in self.terms)

    def total_degree(self) -> int:
        if self.is_zero:
            return -1
        return max(sum(e) for e, _ in self.terms)

    def variables(self) -> tuple:
        """Names of variables actually present."""
        present = [False] * len(self.order)
        for e, _ in self.terms:
            for i, k in enumerate(e):
                if k:
                    present[i] = True
        return tuple(v for i, v in enumerate(self.order.vars) if present[i])

    def level(self) -> int:
        """1-based index of the highest variable present; 0 for constants."""
        lev = 0
        for e, _ in self.terms:
            for i in range(len(e) - 1, lev - 1, -1):
                if e[i]:
                    lev = max(lev, i + 1)
                    break
        return lev

    def main_variable(self) -> Optional[str]:
        lev = self.level()
        return self.order.vars[lev - 1] if lev else None

    # -- arithmetic --------------------------------------------------

    def _comb(self, other: "Polynomial", sign: int) -> "Polynomial":
        if self.order != other.order:
            raise PolyError("mixed variable orders")
        d = dict(self.terms)
        for e, c in other.terms:
            d[e] = d.get(e, Fraction(0)) + sign * c
        return Polynomial(self.order, d)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return self._comb(other, 1)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self._comb(other, -1)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.order, {e: -c for e, c in self.terms})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return Polynomial(self.order, {e: c * q for e, c in self.terms})
        if self.order != other.order:
            raise PolyError("mixed variable orders")
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.order, d)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise PolyError("negative power")
        r = Polynomial.constant(self.order, 1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.order == other.order
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.order, self.terms))
        return self._hash

    # -- structure in one variable -----------------------------------

    def coefficients(self, var: str) -> list:
        """Coefficients of var^d, ..., var^0 as polynomials, leading first."""
        i = self.order.index(var)
        d = self.degree(var)
        if d < 0:
            return []
        buckets = [dict() for _ in range(d + 1)]
        for e, c in self.terms:
            k = e[i]
            e0 = list(e)
            e0[i] = 0
            buckets[k][tuple(e0)] = c
        return [Polynomial(self.order, buckets[k]) for k in range(d, -1, -1)]

    def leading_coefficient(self, var: str) -> "Polynomial":
        return self.coefficients(var)[0]

    def from_coefficients(self, var: str, coeffs: Sequence["Polynomial"]) -> "Polynomial":
        """Rebuild sum coeffs[j] * var^(d-j) (leading first)."""
        i = self.order.index(var)
        d = {}
        deg = len(coeffs) - 1
        for j, p in enumerate(coeffs):
            k = deg - j
            for e, c in p.terms:
                e2 = list(e)
                e2[i] += k
                e2 = tuple(e2)
                d[e2] = d.get(e2, Fraction(0)) + c
        return Polynomial(self.order, d)

    def derivative(self, var: str) -> "Polynomial":
        i = self.order.index(var)
        d = {}
        for e, c in self.terms:
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                d[tuple(e2)] = d.get(tuple(e2), Fraction(0)) + c * e[i]
        return Polynomial(self.order, d)

    # -- substitution and evaluation ----------------------------------

    def substitute(self, values: Mapping[str, Fraction]) -> "Polynomial":
        """Exact substitution of rationals for some variables."""
        idx = {self.order.index(v): Fraction(q) for v, q in values.items()}
        d = {}
        for e, c in self.terms:
            coef = c
            e2 = list(e)
            for i, q in idx.items():
                if e[i]:
                    coef *= q ** e[i]
                    e2[i] = 0
            if coef:
                e2 = tuple(e2)
                d[e2] = d.get(e2, Fraction(0)) + coef
        return Polynomial(self.order, d)

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        r = self.substitute(values)
        if not r.is_constant:
            missing = [v for v in r.variables()]
            raise PolyError(f"evaluation left variables {missing}")
        return r.constant_value()

    def shift_variable(self, src: str, dst_order: VarOrder, dst: str) -> "Polynomial":
        """Re-express a univariate polynomial in ``src`` over another order."""
        i = self.order.index(src)
        j = dst_order.index(dst)
        d = {}
        for e, c in self.terms:
            if any(k and m != i for m, k in enumerate(e)):
                raise PolyError("polynomial is not univariate in src")
            e2 = [0] * len(dst_order)
            e2[j] = e[i]
            d[tuple(e2)] = c
        return Polynomial(dst_order, d)

    # -- printing ------------------------------------------------------

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for e, c in self.terms:
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(self.order.vars[i])
                elif k > 1:
                    factors.append(f"{self.order.vars[i]}^{k}")
            if not factors:
                body = _frac_str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = _frac_str(abs(c)) + "*" + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        sign0, body0 = parts[0]
        out = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# parsing


def parse(text: str, order: VarOrder) -> Polynomial:
    """Parse the problem-file grammar: integers, rationals, variables, + - * ^, parens."""
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take(kind=None):
        t = peek()
        if t is None:
            raise PolyError(f"unexpected end of input in {text!r}")
        if kind is not None and t[0] != kind:
            raise PolyError(f"expected {kind}, got {t[1]!r} in {text!r}")
        pos[0] += 1
        return t

    def parse_expr():
        t = peek()
        neg = False
        while t and t[0] == "op" and t[1] in "+-":
            take()
            if t[1] == "-":
                neg = not neg
            t = peek()
        p = parse_term()
        if neg:
            p = -p
        while True:
            t = peek()
            if t and t[0] == "op" and t[1] in "+-":
                take()
                q = parse_term()
                p = p - q if t[1] == "-" else p + q
            else:
                return p

    def parse_term():
        p = parse_factor()
        while True:
            t = peek()
            if t and t[0] == "op" and t[1] == "*":
                take()
                p = p * parse_factor()
            else:
                return p

    def parse_factor():
        p = parse_primary()
        t = peek()
        if t and t[0] == "op" and t[1] == "^":
            take()
            neg = False
            while peek() and peek()[0] == "op" and peek()[1] == "-":
                take()
                neg = not neg
            k = take("int")[1]
            if neg:
                raise PolyError("negative exponents are not polynomials")
            return p ** int(k)
        return p

    def parse_primary():
        t = take()
        if t[0] == "int":
            num = int(t[1])
            nxt = peek()
            if nxt and nxt[0] == "op" and nxt[1] == "/":
                take()
                den = int(take("int")[1])
                return Polynomial.constant(order, Fraction(num, den))
            return Polynomial.constant(order, num)
        if t[0] == "name":
            return Polynomial.variable(order, t[1])
        if t[0] == "op" and t[1] == "(":
            p = parse_expr()
            take_close = take()
            if take_close[1] != ")":
                raise PolyError(f"expected ')' in {text!r}")
            return p
        if t[0] == "op" and t[1] == "-":
            return -parse_primary()
        raise PolyError(f"unexpected token {t[1]!r} in {text!r}")

    p = parse_expr()
    if pos[0] != len(tokens):
        raise PolyError(f"trailing input {tokens[pos[0]][1]!r} in {text!r}")
    return p


def _tokenize(text: str):
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(("int", text[i:j]))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(("name", text[i:j]))
            i = j
        elif ch in "+-*^()/":
            out.append(("op", ch))
            i += 1
        else:
            raise PolyError(f"bad character {ch!r} in polynomial text")
    return out


# ---------------------------------------------------------------------------
# contents, gcd, division


def content_primitive(p: Polynomial, var: str):
    """Split p = content * primitive with respect to ``var``.

    The content is the gcd of p's coefficients viewed as polynomials in the
    remaining variables; the primitive part has trivial coefficient gcd.
    """
    if p.is_zero:
        raise PolyError("zero polynomial")
    coeffs = p.coefficients(var)
    cont = coeffs[0]
    for c in coeffs[1:]:
        if cont.is_constant and not cont.is_zero:
            break
        if not c.is_zero:
            cont = gcd(cont, c)
    if cont.is_constant:
        # rational scalars are units: the content is trivial
        return Polynomial.constant(p.order, 1), p
    prim = exact_div(p, cont)
    return cont, prim


def try_exact_div(p: Polynomial, q: Polynomial) -> Optional[Polynomial]:
    """p / q when the division is exact, else None."""
    if q.is_zero:
        raise PolyError("division by zero polynomial")
    if p.is_zero:
        return p
    if q.is_constant:
        return p * (1 / q.constant_value())
    order = p.order
    rem = dict(p.terms)
    quot = {}
    qlead_e, qlead_c = q.terms[0]
    while rem:
        e, c = max(rem.items(), key=lambda t: _term_key(t[0]))
        de = tuple(a - b for a, b in zip(e, qlead_e))
        if any(k < 0 for k in de):
            return None
        f = c / qlead_c
        quot[de] = quot.get(de, Fraction(0)) + f
        for e2, c2 in q.terms:
            e3 = tuple(a + b for a, b in zip(de, e2))
            v = rem.get(e3, Fraction(0)) - f * c2
            if v:
                rem[e3] = v
            else:
                rem.pop(e3, None)
    return Polynomial(order, quot)


def exact_div(p: Polynomial, q: Polynomial) -> Polynomial:
    r = try_exact_div(p, q)
    if r is None:
        raise PolyError("inexact polynomial division")
    return r


def prem(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Pseudo-remainder of p by q with respect to ``var``:
    exactly lc(q)^(deg p - deg q + 1) * p mod q."""
    dp, dq = p.degree(var), q.degree(var)
    if dq < 0:
        raise PolyError("pseudo-division by zero")
    if dp < dq:
        return p
    v = Polynomial.variable(p.order, var)
    lq = q.leading_coefficient(var)
    r = p
    steps = 0
    while not r.is_zero and r.degree(var) >= dq:
        dr = r.degree(var)
        lr = r.leading_coefficient(var)
        r = r * lq - q * lr * v ** (dr - dq)
        steps += 1
        if not r.is_zero and r.degree(var) >= dr:
            raise PolyError("pseudo-division failed to reduce degree")
    missing = dp - dq + 1 - steps
    if missing > 0 and not r.is_zero:
        r = r * lq ** missing
    return r


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Multivariate gcd by primitive remainder sequences, sign/content normalised."""
    if p.is_zero:
        return normalize(q)
    if q.is_zero:
        return normalize(p)
    if p.is_constant or q.is_constant:
        return Polynomial.constant(p.order, 1)
    lev_p, lev_q = p.level(), q.level()
    var = p.order.vars[max(lev_p, lev_q) - 1]
    if lev_p != lev_q:
        # one side is free of the top variable: gcd divides the other's content
        lo, hi = (p, q) if lev_p < lev_q else (q, p)
        cont, _ = content_primitive(hi, var)
        return gcd(lo, cont)
    cp, pp = content_primitive(p, var)
    cq, pq = content_primitive(q, var)
    cont = gcd(cp, cq)
    a, b = pp, pq
    if a.degree(var) < b.degree(var):
        a, b = b, a
    while True:
        r = prem(a, b, var)
        if r.is_zero:
            break
        _, r = content_primitive(r, var)
        a, b = b, r
        if b.is_constant:
            return normalize(cont)
    return normalize(cont * b)


def normalize(p: Polynomial) -> Polynomial:
    """Canonical representative up to a rational constant: integer coprime
    coefficients with positive leading coefficient."""
    if p.is_zero:
        return p
    den = 1
    for _, c in p.terms:
        den = den * c.denominator // int_gcd(den, c.denominator)
    num = 0
    for _, c in p.terms:
        num = int_gcd(num, abs(c.numerator * (den // c.denominator)))
    scale = Fraction(den, num)
    lead_c = p.terms[0][1]
    if lead_c < 0:
        scale = -scale
    return p * scale


# ---------------------------------------------------------------------------
# squarefree bases


class Basis:
    """A finest squarefree basis: pairwise coprime, squarefree, primitive
    polynomials plus the stripped non-constant contents."""

    __slots__ = ("polys", "contents")

    def __init__(self, polys: Iterable[Polynomial], contents: Iterable[Polynomial]):
        self.polys = tuple(polys)
        self.contents = tuple(contents)

    def __repr__(self) -> str:
        return f"Basis(polys={[str(p) for p in self.polys]}, contents={[str(c) for c in self.contents]})"


def squarefree_factors(p: Polynomial, var: str) -> list:
    """Distinct squarefree factors of p with respect to ``var`` (multiplicity
    structure discarded; each returned factor is squarefree, not necessarily
    coprime to the others)."""
    out = []
    cur = p
    while cur.degree(var) > 0:
        g = gcd(cur, cur.derivative(var))
        if g.is_constant:
            out.append(normalize(cur))
            break
        out.append(normalize(exact_div(cur, g)))
        cur = g
    return out


def squarefree_part(p: Polynomial, var: str) -> Polynomial:
    g = gcd(p, p.derivative(var))
    if g.is_constant:
        return normalize(p)
    return normalize(exact_div(p, g))


def finest_squarefree_basis(polys: Iterable[Polynomial]) -> Basis:
    """Squarefree decomposition of the primitive parts followed by pairwise
    gcd refinement until the set is pairwise coprime.  Constants are dropped;
    non-constant contents are collected separately."""
    contents = []
    work = []
    for p in polys:
        if p.is_zero or p.is_constant:
            continue
        var = p.main_variable()
        cont, prim = content_primitive(p, var)
        if not cont.is_constant:
            contents.append(normalize(cont))
        for f in squarefree_factors(prim, var):
            if not f.is_constant:
                work.append(f)
    work = _dedupe(work)
    # pairwise refinement
    changed = True
    while changed:
        changed = False
        n = len(work)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = work[i], work[j]
                g = gcd(a, b)
                if g.is_constant:
                    continue
                repl = [g]
                qa = exact_div(a, g)
                qb = exact_div(b, g)
                if not qa.is_constant:
                    repl.append(normalize(qa))
                if not qb.is_constant:
                    repl.append(normalize(qb))
                work = [w for k, w in enumerate(work) if k not in (i, j)] + repl
                work = _dedupe(work)
                changed = True
                break
            if changed:
                break
    return Basis(sorted(work, key=_sort_key), _dedupe(contents))


def _dedupe(polys: Iterable[Polynomial]) -> list:
    seen = {}
    for p in polys:
        seen.setdefault(normalize(p), None)
    return list(seen)


def _sort_key(p: Polynomial):
    return (p.level(), p.total_degree(), str(p))


# ---------------------------------------------------------------------------
# resultants and discriminants


def resultant(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Resultant of p and q with respect to ``var``, equal to the Sylvester
    matrix determinant (sign included).

    Computed by the subresultant polynomial remainder sequence; the Sylvester
    determinant (sylvester_resultant) serves as an independent cross-check.
    """
    m, n = p.degree(var), q.degree(var)
    if m < 1 or n < 1:
        raise PolyError("not in main variable")
    sign = 1
    if m < n:
        p, q, m, n = q, p, n, m
        if (m * n) % 2:
            sign = -sign
    one = Polynomial.constant(p.order, 1)
    g, h = one, one
    a, b = p, q
    while True:
        da, db = a.degree(var), b.degree(var)
        delta = da - db
        if da % 2 and db % 2:
            sign = -sign
        r = prem(a, b, var)
        if r.is_zero:
            return Polynomial.zero(p.order)
        a = b
        b = exact_div(r, g * h ** delta)
        g = a.leading_coefficient(var)
        if delta == 1:
            h = g
        elif delta > 1:
            h = exact_div(g ** delta, h ** (delta - 1))
        if b.degree(var) == 0:
            break
    da = a.degree(var)
    res = b if da == 1 else exact_div(b ** da, h ** (da - 1))
    return res * sign if sign < 0 else res


def sylvester_resultant(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Resultant as the Sylvester matrix determinant via fraction-free
    (Bareiss) elimination; used as an independent oracle."""
    m, n = p.degree(var), q.degree(var)
    if m < 1 or n < 1:
        raise PolyError("not in main variable")
    pc = p.coefficients(var)
    qc = q.coefficients(var)
    size = m + n
    zero = Polynomial.zero(p.order)
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return _bareiss_det(rows)


def _bareiss_det(m: list) -> Polynomial:
    n = len(m)
    if n == 0:
        raise PolyError("empty matrix")
    order = m[0][0].order
    sign = 1
    prev = Polynomial.constant(order, 1)
    m = [row[:] for row in m]
    for k in range(n - 1):
        if m[k][k].is_zero:
            pivot = next((i for i in range(k + 1, n) if not m[i][k].is_zero), None)
            if pivot is None:
                return Polynomial.zero(order)
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = exact_div(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev)
            m[i][k] = Polynomial.zero(order)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def discriminant(p: Polynomial, var: str) -> Polynomial:
    """disc(p) = (-1)^(d(d-1)/2) resultant(p, p') / lc, d = deg(p)."""
    d = p.degree(var)
    if d < 2:
        raise PolyError("degree too low")
    r = resultant(p, p.derivative(var), var)
    lc = p.leading_coefficient(var)
    r = exact_div(r, lc)
    if (d * (d - 1) // 2) % 2:
        r = -r
    return r
