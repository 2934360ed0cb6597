"""Exact homogeneous polynomial arithmetic over Q.

Forms live in Q[z, w] (two variables, maps of P^1) or Q[z, w, t] (three
variables, maps of P^2).  Coefficients are ``fractions.Fraction`` throughout;
nothing in this module ever rounds.  The monomial order used for normal forms
and printing is degree-reverse-lexicographic with z > w > t.

The heavy ring operations (gcd, square-free decomposition, irreducible
factorization over Q) are delegated to ``sympy.polys``; this module owns the
representation, the parser, the normal form, and both resultants (Sylvester
for binary forms, Macaulay for ternary forms, including the perturbation
fallback used when the Macaulay denominator degenerates).
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import sympy as sp

from .config import Config, resolve
from .errors import (
    ArityError,
    BudgetError,
    InhomogeneityError,
    ParseError,
)

#: the exact scalar type used across the package
Rational = Fraction

VAR_NAMES = ("z", "w", "t")

_SYMS = sp.symbols("z w t")


def _order_key(expo: tuple[int, ...]) -> tuple:
    """Sort key realizing degrevlex with z > w > t (larger key = larger monomial)."""
    return (sum(expo), tuple(-e for e in reversed(expo)))


def monomials_of_degree(num_vars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of the given total degree, degrevlex-descending."""
    out: list[tuple[int, ...]] = []
    if num_vars == 2:
        out = [(degree - j, j) for j in range(degree + 1)]
    elif num_vars == 3:
        for a in range(degree, -1, -1):
            for b in range(degree - a, -1, -1):
                out.append((a, b, degree - a - b))
    else:  # pragma: no cover - guarded by callers
        raise ArityError(f"unsupported variable count {num_vars}")
    out.sort(key=_order_key, reverse=True)
    return out


class HomogPoly:
    """A homogeneous polynomial with exact rational coefficients.

    Instances are immutable in practice (nothing mutates ``terms`` after
    construction) and hashable.  The zero polynomial is allowed and has
    ``degree is None``.
    """

    __slots__ = ("num_vars", "terms", "degree", "_hash")

    def __init__(self, num_vars: int, terms: dict[tuple[int, ...], Fraction] | None = None):
        if num_vars not in (2, 3):
            raise ArityError(f"forms must have 2 or 3 variables, got {num_vars}")
        clean: dict[tuple[int, ...], Fraction] = {}
        degree: int | None = None
        for expo, coeff in (terms or {}).items():
            c = Fraction(coeff)
            if c == 0:
                continue
            if len(expo) != num_vars or any(e < 0 for e in expo):
                raise ArityError(f"bad exponent tuple {expo!r} for {num_vars} variables")
            d = sum(expo)
            if degree is None:
                degree = d
            elif d != degree:
                raise InhomogeneityError(degree, d)
            clean[tuple(expo)] = c
        self.num_vars = num_vars
        self.terms = clean
        self.degree = degree
        self._hash: int | None = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "HomogPoly":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, value) -> "HomogPoly":
        return cls(num_vars, {(0,) * num_vars: Fraction(value)})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "HomogPoly":
        expo = [0] * num_vars
        expo[index] = 1
        return cls(num_vars, {tuple(expo): Fraction(1)})

    # -- basic protocol ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogPoly):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"HomogPoly({self})"

    # -- arithmetic ----------------------------------------------------------

    def _combine(self, other: "HomogPoly", sign: int) -> "HomogPoly":
        if self.num_vars != other.num_vars:
            raise ArityError("mixed variable counts")
        terms = dict(self.terms)
        for expo, c in other.terms.items():
            terms[expo] = terms.get(expo, Fraction(0)) + sign * c
        return HomogPoly(self.num_vars, terms)

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        return self._combine(other, +1)

    def __sub__(self, other: "HomogPoly") -> "HomogPoly":
        return self._combine(other, -1)

    def __neg__(self) -> "HomogPoly":
        return HomogPoly(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return HomogPoly.zero(self.num_vars)
            return HomogPoly(
                self.num_vars, {e: c * other for e, c in self.terms.items()}
            )
        if not isinstance(other, HomogPoly):
            return NotImplemented
        if self.num_vars != other.num_vars:
            raise ArityError("mixed variable counts")
        terms: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                terms[key] = terms.get(key, Fraction(0)) + ca * cb
        return HomogPoly(self.num_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "HomogPoly":
        if n < 0:
            raise ArityError("negative power of a form")
        result = HomogPoly.constant(self.num_vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus / evaluation ----------------------------------------------

    def partial(self, index: int) -> "HomogPoly":
        """Partial derivative with respect to variable ``index``."""
        terms: dict[tuple[int, ...], Fraction] = {}
        for expo, c in self.terms.items():
            e = expo[index]
            if e == 0:
                continue
            key = tuple(x - 1 if i == index else x for i, x in enumerate(expo))
            terms[key] = terms.get(key, Fraction(0)) + c * e
        return HomogPoly(self.num_vars, terms)

    def evaluate(self, point: Sequence):
        """Evaluate at a coordinate tuple (Fractions, floats or complex)."""
        acc = None
        for expo, c in self.terms.items():
            term = c if isinstance(point[0], Fraction) else complex(c)
            for v, e in zip(point, expo):
                if e:
                    term = term * v**e
            acc = term if acc is None else acc + term
        if acc is None:
            return Fraction(0) if (point and isinstance(point[0], Fraction)) else 0.0
        return acc

    def compose(self, forms: Sequence["HomogPoly"]) -> "HomogPoly":
        """Substitute ``forms[i]`` for variable ``i``."""
        if len(forms) != self.num_vars:
            raise ArityError("substitution needs one form per variable")
        nv = forms[0].num_vars
        acc = HomogPoly.zero(nv)
        for expo, c in self.terms.items():
            term = HomogPoly.constant(nv, c)
            for f, e in zip(forms, expo):
                if e:
                    term = term * f**e
            acc = acc + term
        return acc

    # -- normal form ---------------------------------------------------------

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        if not self.terms:
            raise ArityError("zero polynomial has no leading term")
        expo = max(self.terms, key=_order_key)
        return expo, self.terms[expo]

    def content(self) -> Fraction:
        """Positive rational c with self = c * primitive-integer-part (0 for 0)."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def normalized(self) -> "HomogPoly":
        """Normal form: primitive integer coefficients, positive leading sign."""
        if not self.terms:
            return self
        scale = 1 / self.content()
        if self.terms[max(self.terms, key=_order_key)] < 0:
            scale = -scale
        return self * scale

    def content_and_primitive(self) -> tuple[Fraction, "HomogPoly"]:
        """Split as (c, p) with self = c * p and p in normal form."""
        if not self.terms:
            return Fraction(0), self
        prim = self.normalized()
        _, lc_self = self.leading_term()
        _, lc_prim = prim.leading_term()
        return lc_self / lc_prim, prim

    # -- printing ------------------------------------------------------------

    def sort_key(self) -> tuple:
        """Deterministic total-order key (degree, then term data)."""
        items = sorted(self.terms.items(), key=lambda kv: _order_key(kv[0]), reverse=True)
        return (self.degree if self.degree is not None else -1, tuple(items))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = VAR_NAMES[: self.num_vars]
        parts: list[str] = []
        for expo, c in sorted(self.terms.items(), key=lambda kv: _order_key(kv[0]), reverse=True):
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, expo) if e
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {body}")
        return " ".join(parts)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

# Grammar (whitespace insignificant):
#
#   expr     := term (("+" | "-") term)*
#   term     := signed (("*" | "/") signed)*
#   signed   := ("+" | "-")* power
#   power    := atom ("^" natural)?
#   atom     := natural | variable | "(" expr ")"
#   variable := "z" | "w" | "t"
#
# "/" requires a constant divisor, so rational coefficients are written 3/4
# or 3/4*z^2.  Exponents are literal naturals.  The result must be
# homogeneous; a mix of total degrees raises InhomogeneityError with both
# degrees, anything unparseable raises ParseError with the offset.

_TOKEN_CHARS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in string.whitespace:
            i += 1
            continue
        if ch in _TOKEN_CHARS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if ch in VAR_NAMES:
            tokens.append(("var", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser producing possibly-inhomogeneous term dicts."""

    def __init__(self, text: str, num_vars: int):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.num_vars = num_vars

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, val, at = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", at)
        self.advance()

    # term dicts here may mix degrees; homogeneity is checked by the caller
    def parse(self) -> dict[tuple[int, ...], Fraction]:
        result = self.expr()
        kind, val, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing {val!r}", at)
        return result

    def expr(self) -> dict:
        acc = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                sign = 1 if val == "+" else -1
                for e, c in rhs.items():
                    acc[e] = acc.get(e, Fraction(0)) + sign * c
            else:
                return acc

    def term(self) -> dict:
        acc = self.signed()
        while True:
            kind, val, at = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                acc = self._mul(acc, self.signed())
            elif kind == "op" and val == "/":
                self.advance()
                rhs = self.signed()
                const = {e: c for e, c in rhs.items() if c}
                if len(const) > 1 or (const and sum(next(iter(const))) != 0):
                    raise ParseError("division only by a nonzero constant", at)
                if not const:
                    raise ParseError("division by zero", at)
                value = next(iter(const.values()))
                acc = {e: c / value for e, c in acc.items()}
            else:
                return acc

    def signed(self) -> dict:
        sign = 1
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                if val == "-":
                    sign = -sign
            else:
                break
        body = self.power()
        if sign == -1:
            body = {e: -c for e, c in body.items()}
        return body

    def power(self) -> dict:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            kind, val, at = self.peek()
            if kind != "int":
                raise ParseError("exponent must be a literal natural number", at)
            self.advance()
            n = int(val)
            acc = {(0,) * self.num_vars: Fraction(1)}
            for _ in range(n):
                acc = self._mul(acc, base)
            return acc
        return base

    def atom(self) -> dict:
        kind, val, at = self.advance()
        if kind == "int":
            return {(0,) * self.num_vars: Fraction(int(val))}
        if kind == "var":
            idx = VAR_NAMES.index(val)
            if idx >= self.num_vars:
                raise ParseError(
                    f"variable {val!r} not available with {self.num_vars} variables", at
                )
            expo = [0] * self.num_vars
            expo[idx] = 1
            return {tuple(expo): Fraction(1)}
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected {val!r}" if val else "unexpected end of input", at)

    def _mul(self, a: dict, b: dict) -> dict:
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return out


def poly_parse(text: str, num_vars: int | None = None) -> HomogPoly:
    """Parse polynomial text into a homogeneous form.

    Parameters
    ----------
    text:
        Expression over the variables z, w, t with integer or p/q rational
        coefficients and the operators ``+ - * / ^`` plus parentheses (see
        the grammar comment above).
    num_vars:
        2 or 3.  When omitted, 3 is used if the text mentions ``t``,
        otherwise 2.

    Raises
    ------
    ParseError
        On any syntax problem, with the character offset.
    InhomogeneityError
        When the expanded polynomial mixes two total degrees (both reported).
    """
    if num_vars is None:
        num_vars = 3 if "t" in text else 2
    raw = _Parser(text, num_vars).parse()
    return HomogPoly(num_vars, raw)  # homogeneity enforced by the constructor


# ---------------------------------------------------------------------------
# sympy bridge
# ---------------------------------------------------------------------------


def to_sympy(p: HomogPoly) -> sp.Poly:
    gens = _SYMS[: p.num_vars]
    return sp.Poly.from_dict(
        {e: sp.Rational(c.numerator, c.denominator) for e, c in p.terms.items()},
        *gens,
        domain=sp.QQ,
    )


def from_sympy(poly: sp.Poly, num_vars: int) -> HomogPoly:
    terms: dict[tuple[int, ...], Fraction] = {}
    for expo, c in poly.as_dict().items():
        q = sp.Rational(c)
        terms[tuple(expo)] = Fraction(int(q.p), int(q.q))
    return HomogPoly(num_vars, terms)


def poly_gcd(a: HomogPoly, b: HomogPoly) -> HomogPoly:
    if a.num_vars != b.num_vars:
        raise ArityError("mixed variable counts")
    g = sp.gcd(to_sympy(a), to_sympy(b))
    return from_sympy(g, a.num_vars).normalized()


def poly_divides(a: HomogPoly, b: HomogPoly) -> bool:
    """Exact divisibility a | b over Q."""
    if a.is_zero():
        return b.is_zero()
    if b.is_zero():
        return True
    _, r = sp.div(to_sympy(b), to_sympy(a))
    return r.is_zero


# ---------------------------------------------------------------------------
# square-free part and factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    """Exact factorization ``unit * prod(base^mult)`` over Q.

    Bases are irreducible, pairwise distinct, and in normal form (primitive
    integer coefficients, positive leading sign); the unit absorbs content
    and signs so reassembly reproduces the input exactly.
    """

    unit: Fraction
    factors: tuple[tuple[HomogPoly, int], ...]

    def reassemble(self) -> HomogPoly:
        acc = HomogPoly.constant(self.num_vars, self.unit)
        for base, mult in self.factors:
            acc = acc * base**mult
        return acc

    @property
    def num_vars(self) -> int:
        if self.factors:
            return self.factors[0][0].num_vars
        return 3

    def __iter__(self):
        return iter(self.factors)


def square_free(p: HomogPoly) -> HomogPoly:
    """Product of the distinct irreducible factors of p, in normal form."""
    if p.is_zero():
        return p
    _, pairs = to_sympy(p).sqf_list()
    acc = HomogPoly.constant(p.num_vars, 1)
    for base, _mult in pairs:
        acc = acc * from_sympy(base, p.num_vars)
    return acc.normalized()


def factor(p: HomogPoly, cfg: Config | None = None) -> Factorization:
    """Irreducible factorization over Q.

    Inputs above the configured degree cap are refused with BudgetError
    (factoring cost is the one genuinely superpolynomial step exposed to
    user-controlled input).
    """
    cfg = resolve(cfg)
    if p.is_zero():
        raise ArityError("cannot factor the zero polynomial")
    if p.degree is not None and p.degree > cfg.factor_degree_cap:
        raise BudgetError(
            f"degree {p.degree} exceeds the factorization cap {cfg.factor_degree_cap}"
        )
    _, pairs = sp.factor_list(to_sympy(p))
    bases: list[tuple[HomogPoly, int]] = []
    for base, mult in pairs:
        q = from_sympy(sp.Poly(base, *_SYMS[: p.num_vars]), p.num_vars).normalized()
        if q.degree == 0:
            continue  # content handled through the unit below
        bases.append((q, int(mult)))
    bases.sort(key=lambda bm: (bm[0].degree, bm[0].sort_key()))
    lc_product = Fraction(1)
    for base, mult in bases:
        lc_product *= base.leading_term()[1] ** mult
    unit = p.leading_term()[1] / lc_product if not p.is_zero() else Fraction(0)
    return Factorization(unit=unit, factors=tuple(bases))


# ---------------------------------------------------------------------------
# determinants (fraction-free)
# ---------------------------------------------------------------------------


def _bareiss_det(matrix: list[list[int]]) -> int:
    """Exact integer determinant by Bareiss elimination with pivot search."""
    m = [row[:] for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for col in range(n - 1):
        pivot_row = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot_row is None:
            return 0
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            sign = -sign
        pivot = m[col][col]
        for r in range(col + 1, n):
            for c in range(col + 1, n):
                m[r][c] = (m[r][c] * pivot - m[r][col] * m[col][c]) // prev
            m[r][col] = 0
        prev = pivot
    return sign * m[-1][-1]


def _clear_denominators(p: HomogPoly) -> tuple[int, dict[tuple[int, ...], int]]:
    """Return (L, integer terms) with L*p having the integer coefficients."""
    L = 1
    for c in p.terms.values():
        L = lcm(L, c.denominator)
    return L, {e: int(c * L) for e, c in p.terms.items()}


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------


def _sylvester_resultant(a: HomogPoly, b: HomogPoly) -> Fraction:
    m, n = a.degree, b.degree
    La, ia = _clear_denominators(a)
    Lb, ib = _clear_denominators(b)
    ca = [ia.get((m - j, j), 0) for j in range(m + 1)]
    cb = [ib.get((n - j, j), 0) for j in range(n + 1)]
    size = m + n
    rows: list[list[int]] = []
    for shift in range(n):
        rows.append([0] * shift + ca + [0] * (size - shift - m - 1))
    for shift in range(m):
        rows.append([0] * shift + cb + [0] * (size - shift - n - 1))
    det = _bareiss_det(rows)
    # Res(La*a, Lb*b) = La^n * Lb^m * Res(a, b)
    return Fraction(det, La**n * Lb**m)


def _macaulay_structure(
    degrees: tuple[int, int, int],
) -> tuple[list[tuple[int, ...]], list[int], list[int]]:
    """Monomial basis and row assignment for the classical Macaulay matrix.

    Returns (monomials T of the critical degree, assigned form index per row,
    indices of the non-reduced rows/columns that make up the denominator
    minor).
    """
    D = 1 + sum(d - 1 for d in degrees)
    mons = monomials_of_degree(3, D)
    assigned: list[int] = []
    nonreduced: list[int] = []
    for idx, mono in enumerate(mons):
        divisors = [i for i in range(3) if mono[i] >= degrees[i]]
        assigned.append(divisors[0])
        if len(divisors) >= 2:
            nonreduced.append(idx)
    return mons, assigned, nonreduced


def _macaulay_matrices(
    int_terms: list[dict[tuple[int, ...], int]], degrees: tuple[int, int, int]
) -> tuple[list[list[int]], list[int]]:
    mons, assigned, nonreduced = _macaulay_structure(degrees)
    index_of = {mono: j for j, mono in enumerate(mons)}
    big: list[list[int]] = []
    for mono, i in zip(mons, assigned):
        shift = tuple(
            e - (degrees[i] if v == i else 0) for v, e in enumerate(mono)
        )
        row = [0] * len(mons)
        for expo, c in int_terms[i].items():
            row[index_of[tuple(a + b for a, b in zip(expo, shift))]] = c
        big.append(row)
    return big, nonreduced


def _lagrange_value_at_zero(points: list[tuple[int, Fraction]]) -> Fraction:
    """Interpolate the polynomial through ``points`` and evaluate at 0."""
    total = Fraction(0)
    for i, (xi, yi) in enumerate(points):
        weight = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if i != j:
                weight *= Fraction(-xj, xi - xj)
        total += yi * weight
    return total


def _macaulay_resultant(forms: Sequence[HomogPoly]) -> Fraction:
    degrees = tuple(f.degree for f in forms)
    cleared = [_clear_denominators(f) for f in forms]
    scales = [L for L, _ in cleared]
    int_terms = [terms for _, terms in cleared]
    big, nonreduced = _macaulay_matrices(int_terms, degrees)
    minor = [[big[r][c] for c in nonreduced] for r in nonreduced]
    det_minor = _bareiss_det(minor)
    if det_minor != 0:
        det_big = _bareiss_det(big)
        if det_big % det_minor != 0:  # pragma: no cover - theory says exact
            raise ArityError("Macaulay quotient failed to divide exactly")
        res_int = det_big // det_minor
    else:
        res_int = _macaulay_perturbed(big, nonreduced)
    # Res is homogeneous of degree prod(d_j, j != i) in the coefficients of f_i
    scale = Fraction(1)
    for i, L in enumerate(scales):
        e = 1
        for j, d in enumerate(degrees):
            if j != i:
                e *= d
        scale *= Fraction(L) ** e
    return Fraction(res_int) / scale


def _macaulay_perturbed(big: list[list[int]], nonreduced: list[int]) -> int:
    """Degenerate-denominator fallback via the perturbed system.

    Replacing f_i by f_i - s*x_i^(d_i) subtracts s down the diagonal of the
    Macaulay matrix, so the perturbed resultant is the polynomial quotient
    det(M - sI)/det(M' - sI) in s.  Both determinants are sampled at integer
    values of s (skipping roots of the denominator), the quotient polynomial
    is recovered by interpolation, and the true resultant is its value at 0.
    """
    n = len(big)
    quotient_degree = n - len(nonreduced)
    samples: list[tuple[int, Fraction]] = []
    s = 0
    while len(samples) < quotient_degree + 1:
        s += 1
        for cand in (s, -s):
            shifted = [row[:] for row in big]
            for i in range(n):
                shifted[i][i] -= cand
            minor = [[shifted[r][c] for c in nonreduced] for r in nonreduced]
            dm = _bareiss_det(minor)
            if dm == 0:
                continue
            db = _bareiss_det(shifted)
            samples.append((cand, Fraction(db, dm)))
            if len(samples) == quotient_degree + 1:
                break
        if s > n + 8:  # pragma: no cover - needs > n integer eigenvalues
            raise ArityError("perturbation sampling failed to find valid points")
    value = _lagrange_value_at_zero(samples)
    if value.denominator != 1:  # pragma: no cover - theory says integer
        raise ArityError("perturbed Macaulay interpolation was not integral")
    return value.numerator


def resultant(forms: Sequence[HomogPoly]) -> Fraction:
    """Multivariate resultant of a square system of forms.

    Parameters
    ----------
    forms:
        Exactly ``num_vars`` forms, all nonzero, of degree >= 1: two binary
        forms (Sylvester determinant) or three ternary forms (Macaulay
        quotient, with the perturbation fallback when the denominator minor
        is singular).

    Returns
    -------
    Fraction
        Nonzero iff the forms have no common zero in projective space.
        Normalized so the coordinate forms give 1, e.g.
        resultant([z, w, t]) == 1.
    """
    forms = list(forms)
    if not forms:
        raise ArityError("resultant of an empty system")
    nv = forms[0].num_vars
    if any(f.num_vars != nv for f in forms):
        raise ArityError("resultant needs forms in a common variable set")
    if len(forms) != nv:
        raise ArityError(
            f"resultant needs exactly {nv} forms for {nv} variables, got {len(forms)}"
        )
    if any(f.is_zero() or f.degree == 0 for f in forms):
        raise ArityError("resultant requires nonzero forms of degree >= 1")
    if nv == 2:
        return _sylvester_resultant(forms[0], forms[1])
    return _macaulay_resultant(forms)
