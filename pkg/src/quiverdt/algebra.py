"""Exact arithmetic: rationals, Laurent polynomials and rational functions.

Coefficients are arbitrary-precision rationals (``fractions.Fraction``;
plain ``int`` is accepted wherever it is exact).  Polynomials are sparse
dictionaries mapping exponents to nonzero coefficients, so all identities
tested in this package are exact, never approximate.

Three value types live here:

* ``LaurentPoly`` -- elements of Q[y, y^-1], the value type of kappa.
* ``BiLaurent``   -- elements of Q[y^±1, t^±1].
* ``RatFunc``     -- normalized fractions of BiLaurent; equality is decided
  by cross-multiplication, so no multivariate gcd is ever required.

The canonical text rendering (ascending y-exponent, then ascending
t-exponent, explicit signs, ``y^-1``-style exponents) is the bit-exact
output contract of the CLI.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import InvalidInput

# Arbitrary-precision rational; reduced form and positive denominator are
# maintained by the stdlib type itself.
BigRat = Fraction


def _coeff(value) -> Fraction | int:
    """Coerce a coefficient-like input, keeping exact ints as ints."""
    if isinstance(value, (int, Fraction)):
        return value
    raise TypeError(f"not an exact coefficient: {value!r}")


class LaurentPoly:
    """Sparse Laurent polynomial in y with rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            for exp, c in terms.items():
                c = _coeff(c)
                if c:
                    data[int(exp)] = c
        self._terms = data

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def const(c) -> "LaurentPoly":
        return LaurentPoly({0: c})

    @staticmethod
    def monomial(exp: int, c=1) -> "LaurentPoly":
        return LaurentPoly({exp: c})

    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._terms.items())))

    def __add__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = out
        return res

    def __neg__(self) -> "LaurentPoly":
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = {e: -c for e, c in self._terms.items()}
        return res

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-other if isinstance(other, LaurentPoly) else LaurentPoly.const(-other))

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return LaurentPoly()
            res = LaurentPoly.__new__(LaurentPoly)
            res._terms = {e: c * other for e, c in self._terms.items()}
            return res
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = out
        return res

    __rmul__ = __mul__

    def eval_at_one(self):
        """Value at y = 1 (the sum of all coefficients)."""
        return sum(self._terms.values())

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self._terms.values())

    def to_bilaurent(self) -> "BiLaurent":
        return BiLaurent({(e, 0): c for e, c in self._terms.items()})

    def render(self) -> str:
        return _render({(e,): c for e, c in self._terms.items()}, ("y",))

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"


@lru_cache(maxsize=None)
def kappa(x: int) -> LaurentPoly:
    """(-1)^x (y^x - y^-x)/(y - y^-1), expanded as a Laurent polynomial.

    kappa(0) = 0 and kappa(-x) = -kappa(x).
    """
    if x == 0:
        return LaurentPoly.zero()
    n = abs(x)
    sign = 1 if (x % 2 == 0) else -1
    if x < 0:
        sign = -sign
    return LaurentPoly({n - 1 - 2 * j: sign for j in range(n)})


class BiLaurent:
    """Sparse Laurent polynomial in (y, t) with rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            for (ye, te), c in terms.items():
                c = _coeff(c)
                if c:
                    data[(int(ye), int(te))] = c
        self._terms = data

    @staticmethod
    def zero() -> "BiLaurent":
        return BiLaurent()

    @staticmethod
    def const(c) -> "BiLaurent":
        return BiLaurent({(0, 0): c})

    @staticmethod
    def monomial(ye: int, te: int, c=1) -> "BiLaurent":
        return BiLaurent({(ye, te): c})

    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = BiLaurent.const(other)
        if not isinstance(other, BiLaurent):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._terms.items())))

    def __add__(self, other) -> "BiLaurent":
        if isinstance(other, (int, Fraction)):
            other = BiLaurent.const(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        res = BiLaurent.__new__(BiLaurent)
        res._terms = out
        return res

    def __neg__(self) -> "BiLaurent":
        res = BiLaurent.__new__(BiLaurent)
        res._terms = {e: -c for e, c in self._terms.items()}
        return res

    def __sub__(self, other) -> "BiLaurent":
        if isinstance(other, (int, Fraction)):
            other = BiLaurent.const(other)
        return self + (-other)

    def __mul__(self, other) -> "BiLaurent":
        if isinstance(other, (int, Fraction)):
            if not other:
                return BiLaurent()
            res = BiLaurent.__new__(BiLaurent)
            res._terms = {e: c * other for e, c in self._terms.items()}
            return res
        out = {}
        for (y1, t1), c1 in self._terms.items():
            for (y2, t2), c2 in other._terms.items():
                e = (y1 + y2, t1 + t2)
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        res = BiLaurent.__new__(BiLaurent)
        res._terms = out
        return res

    __rmul__ = __mul__

    def substitute_power(self, k: int) -> "BiLaurent":
        """Map every exponent pair (a, b) to (k a, k b): f(y, t) -> f(y^k, t^k)."""
        if k < 1:
            raise InvalidInput(f"substitution power must be >= 1, got {k}")
        if k == 1:
            return self
        res = BiLaurent.__new__(BiLaurent)
        res._terms = {(k * ye, k * te): c for (ye, te), c in self._terms.items()}
        return res

    def smallest_term(self):
        """Lexicographically smallest (y-exp, t-exp) term as ((ye, te), coeff)."""
        if not self._terms:
            raise ValueError("zero polynomial has no terms")
        e = min(self._terms)
        return e, self._terms[e]

    def is_univariate_y(self) -> bool:
        return all(te == 0 for (_, te) in self._terms)

    def exact_div(self, other: "BiLaurent"):
        """Return self / other when the division is exact, else None.

        Both polynomials are shifted into nonnegative exponents, where
        single-divisor lex division terminates; a leading remainder term
        not divisible by the divisor's leading term proves the quotient
        does not exist (lex-leading terms are multiplicative).
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return BiLaurent.zero()
        shift_n = (min(e[0] for e in self._terms), min(e[1] for e in self._terms))
        shift_d = (min(e[0] for e in other._terms), min(e[1] for e in other._terms))
        rem = {(e[0] - shift_n[0], e[1] - shift_n[1]): c for e, c in self._terms.items()}
        den = {(e[0] - shift_d[0], e[1] - shift_d[1]): c for e, c in other._terms.items()}
        lead_e = max(den)
        lead_c = den[lead_e]
        quo = {}
        while rem:
            e = max(rem)
            if e[0] < lead_e[0] or e[1] < lead_e[1]:
                return None
            q_e = (e[0] - lead_e[0], e[1] - lead_e[1])
            q_c = rem[e] / lead_c
            quo[q_e] = q_c
            for (oy, ot), oc in den.items():
                key = (q_e[0] + oy, q_e[1] + ot)
                s = rem.get(key, 0) - q_c * oc
                if s:
                    rem[key] = s
                elif key in rem:
                    del rem[key]
        off = (shift_n[0] - shift_d[0], shift_n[1] - shift_d[1])
        res = BiLaurent.__new__(BiLaurent)
        res._terms = {(e[0] + off[0], e[1] + off[1]): c for e, c in quo.items() if c}
        return res

    def render(self) -> str:
        return _render(self._terms, ("y", "t"))

    def __repr__(self) -> str:
        return f"BiLaurent({self.render()})"


def substitute_power(f: BiLaurent, k: int) -> BiLaurent:
    """f(y, t) -> f(y^k, t^k)."""
    return f.substitute_power(k)


def _gcd_poly_y(a: dict, b: dict) -> dict:
    """Monic gcd of two nonzero polynomials in y given as {exp: coeff}, exps >= 0."""
    def degree(p):
        return max(p)

    def monic(p):
        lc = p[degree(p)]
        return {e: c / lc for e, c in p.items()} if lc != 1 else p

    while b:
        # a mod b
        db = degree(b)
        lb = b[db]
        r = dict(a)
        while r and degree(r) >= db:
            dr = degree(r)
            q = r[dr] / lb
            for e, c in b.items():
                key = dr - db + e
                s = r.get(key, 0) - q * c
                if s:
                    r[key] = s
                elif key in r:
                    del r[key]
        a, b = b, r
    return monic(a)


class RatFunc:
    """Normalized fraction of two BiLaurent polynomials.

    The stored pair is canonicalized by dividing numerator and denominator
    by the denominator's lexicographically smallest term (coefficient and
    monomial), so the denominator's smallest term is the constant +1.
    When the denominator only involves y, the common univariate gcd is
    also removed; this keeps repeated sums from snowballing.  Equality is
    exact, by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, LaurentPoly):
            num = num.to_bilaurent()
        if isinstance(num, (int, Fraction)):
            num = BiLaurent.const(num)
        if den is None:
            den = BiLaurent.const(1)
        if isinstance(den, LaurentPoly):
            den = den.to_bilaurent()
        if isinstance(den, (int, Fraction)):
            den = BiLaurent.const(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def zero() -> "RatFunc":
        return RatFunc(0)

    @staticmethod
    def one() -> "RatFunc":
        return RatFunc(1)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __add__(self, other) -> "RatFunc":
        other = _as_ratfunc(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        return self + (-_as_ratfunc(other))

    def __mul__(self, other) -> "RatFunc":
        other = _as_ratfunc(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        return RatFunc(self.den, self.num)

    def __eq__(self, other) -> bool:
        other = _as_ratfunc(other)
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        # Hash through the canonical polynomial when there is one; fractions
        # that only differ by a common factor then still hash alike only if
        # reduced alike, which normalization guarantees for our value flow.
        return hash((self.num, self.den))

    def substitute_power(self, k: int) -> "RatFunc":
        return RatFunc(self.num.substitute_power(k), self.den.substitute_power(k))

    def to_bilaurent(self) -> BiLaurent:
        """Exact polynomial value; raises NotPolynomial when the fraction is not one."""
        from .errors import NotPolynomial

        q = self.num.exact_div(self.den)
        if q is None:
            raise NotPolynomial(f"not a Laurent polynomial: {self.render()}")
        return q

    def is_polynomial(self) -> bool:
        return self.num.exact_div(self.den) is not None

    def render(self) -> str:
        if self.den == BiLaurent.const(1):
            return self.num.render()
        return f"({self.num.render()}) / ({self.den.render()})"

    def __repr__(self) -> str:
        return f"RatFunc({self.render()})"


def _as_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc(x)


def _normalize(num: BiLaurent, den: BiLaurent):
    if num.is_zero():
        return BiLaurent.zero(), BiLaurent.const(1)
    (ye, te), c = den.smallest_term()
    if (ye, te) != (0, 0) or c != 1:
        scale = BiLaurent.monomial(-ye, -te, Fraction(1, 1) / c)
        num = num * scale
        den = den * scale
    if den.is_univariate_y() and len(den._terms) > 1:
        num, den = _reduce_univariate_y(num, den)
    return num, den


def _reduce_univariate_y(num: BiLaurent, den: BiLaurent):
    """Cancel the gcd over Q[y] of a y-only denominator against the numerator."""
    shift = min(e for (e, _) in den._terms)
    den_p = {e - shift: c for (e, _), c in den._terms.items()}
    g = den_p
    for t_exp in {te for (_, te) in num._terms}:
        slice_terms = {ye for (ye, te) in num._terms if te == t_exp}
        lo = min(slice_terms)
        p = {ye - lo: num._terms[(ye, t_exp)] for ye in slice_terms}
        g = _gcd_poly_y(g, p)
        if max(g) == 0:
            return num, den
    g_bi = BiLaurent({(e, 0): c for e, c in g.items()})
    num_q = num.exact_div(g_bi)
    den_q = den.exact_div(g_bi)
    if num_q is None or den_q is None:  # pragma: no cover - gcd guarantees exactness
        return num, den
    (ye, te), c = den_q.smallest_term()
    scale = BiLaurent.monomial(-ye, -te, Fraction(1, 1) / c)
    return num_q * scale, den_q * scale


# ---------------------------------------------------------------------------
# canonical rendering and parsing


def _fmt_rational(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _render(terms: dict, variables: tuple) -> str:
    if not terms:
        return "0"
    parts = []
    for exps in sorted(terms):
        c = terms[exps]
        mono = "*".join(
            v if e == 1 else f"{v}^{e}"
            for v, e in zip(variables, exps)
            if e != 0
        )
        mag = abs(Fraction(c))
        if not mono:
            body = _fmt_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_rational(mag)}*{mono}"
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def parse_bilaurent(text: str) -> BiLaurent:
    """Parse the canonical rendering back into a BiLaurent polynomial."""
    text = text.strip()
    if text == "0":
        return BiLaurent.zero()
    terms: dict = {}
    for sign, chunk in _split_signed(text):
        coeff, ye, te = _parse_term(chunk)
        key = (ye, te)
        s = terms.get(key, 0) + sign * coeff
        if s:
            terms[key] = s
        elif key in terms:
            del terms[key]
    return BiLaurent(terms)


def parse_laurent(text: str) -> LaurentPoly:
    bi = parse_bilaurent(text)
    terms = {}
    for (ye, te), c in bi.terms().items():
        if te != 0:
            raise InvalidInput(f"unexpected t-power in y-polynomial: {text!r}")
        terms[ye] = c
    return LaurentPoly(terms)


def _split_signed(text: str):
    out = []
    i = 0
    sign = 1
    if text.startswith("-"):
        sign = -1
        i = 1
    elif text.startswith("+"):
        i = 1
    start = i
    while i < len(text):
        if text[i] in "+-" and i > start and text[i - 1] == " ":
            out.append((sign, text[start:i - 1].strip()))
            sign = 1 if text[i] == "+" else -1
            i += 1
            start = i
        else:
            i += 1
    out.append((sign, text[start:].strip()))
    return out


def _parse_term(chunk: str):
    coeff = Fraction(1)
    ye = te = 0
    saw_coeff = False
    for factor in chunk.split("*"):
        factor = factor.strip()
        if not factor:
            raise InvalidInput(f"empty factor in term {chunk!r}")
        if factor[0] in "yt":
            var = factor[0]
            exp = 1
            if len(factor) > 1:
                if factor[1] != "^":
                    raise InvalidInput(f"bad monomial {factor!r}")
                exp = int(factor[2:])
            if var == "y":
                ye += exp
            else:
                te += exp
        else:
            if saw_coeff:
                coeff *= Fraction(factor)
            else:
                coeff = Fraction(factor)
                saw_coeff = True
    return coeff, ye, te
