"""Projective points, algebraic sets, and exact curve geometry on P^1 / P^2.

Points carry either exact rational coordinates (primitive integer vectors,
first nonzero coordinate positive) or inexact complex ones (scaled so the
largest-magnitude coordinate is exactly 1).  Distances between points are
measured in the chordal metric ``||p ^ q|| / (||p|| ||q||)`` — symmetric,
scale and phase invariant, and chart-free — and every clustering or
membership tolerance in the package applies to that metric or to
coefficient-normalized residuals.

The two geometric workhorses:

* ``curve_image`` computes the image of an irreducible curve under a
  morphism by finding the minimal-degree form whose pullback the curve
  divides (the coefficient conditions are linear over Q, so the image drops
  out of an exact nullspace and is certified by divisibility plus
  irreducibility).
* ``solve_form_pair`` intersects two coprime ternary forms by projecting
  from a point off both curves (deterministic retry ladder), eliminating via
  a resultant, and splitting fibers exactly over Q where possible and by
  polished floating roots otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np
import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from .algebra import (
    HomogPoly,
    factor,
    from_sympy,
    monomials_of_degree,
    poly_gcd,
    to_sympy,
)
from .config import Config, resolve
from .errors import (
    ArityError,
    BudgetError,
    DegenerateEliminationError,
    InputError,
    SolverError,
)

_RING3, _RZ, _RW, _RT = ring("z,w,t", QQ, order="grevlex")


class Membership(enum.Enum):
    """Tri-state membership verdict with an explicit ambiguity band."""

    IN = "in"
    OUT = "out"
    UNDECIDED = "undecided"


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


class ProjPoint:
    """A point of P^1 or P^2 with exact or inexact homogeneous coordinates."""

    __slots__ = ("coords", "exact")

    def __init__(self, coords: Sequence, exact: bool):
        self.coords = tuple(coords)
        self.exact = exact

    @classmethod
    def exact_point(cls, coords: Sequence) -> "ProjPoint":
        vals = [Fraction(c) for c in coords]
        if all(v == 0 for v in vals):
            raise InputError("projective point needs a nonzero coordinate")
        from math import gcd, lcm

        den = 1
        for v in vals:
            den = lcm(den, v.denominator)
        ints = [int(v * den) for v in vals]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        ints = [v // g for v in ints]
        first = next(v for v in ints if v != 0)
        if first < 0:
            ints = [-v for v in ints]
        return cls(tuple(Fraction(v) for v in ints), exact=True)

    @classmethod
    def inexact(cls, coords: Sequence) -> "ProjPoint":
        vals = [complex(c) for c in coords]
        mags = [abs(v) for v in vals]
        top = max(mags)
        if top == 0.0 or not all(np.isfinite([v.real, v.imag]).all() for v in vals):
            raise InputError("inexact point must have finite, not-all-zero coordinates")
        pivot = vals[mags.index(top)]
        return cls(tuple(v / pivot for v in vals), exact=False)

    # -- views --------------------------------------------------------------

    @property
    def dim(self) -> int:
        """Dimension of the ambient projective space (1 or 2)."""
        return len(self.coords) - 1

    def to_complex(self) -> tuple[complex, ...]:
        if self.exact:
            return tuple(complex(c) for c in self.coords)
        return self.coords  # type: ignore[return-value]

    def chart(self) -> int:
        """Index of the largest-magnitude coordinate (ties: lowest index)."""
        mags = [abs(complex(c)) for c in self.coords]
        return mags.index(max(mags))

    # -- comparison -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.exact == other.exact and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.exact, self.coords))

    def chordal(self, other: "ProjPoint") -> float:
        """Chordal distance ||p ^ q||_2 / (||p||_2 ||q||_2), in [0, 1]."""
        p = self.to_complex()
        q = other.to_complex()
        if len(p) != len(q):
            raise ArityError("points live in different spaces")
        wedge = 0.0
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                wedge += abs(p[i] * q[j] - p[j] * q[i]) ** 2
        np_ = sum(abs(c) ** 2 for c in p)
        nq = sum(abs(c) ** 2 for c in q)
        return float(np.sqrt(wedge / (np_ * nq)))

    def is_close(self, other: "ProjPoint", tol: float) -> bool:
        if self.exact and other.exact:
            return self == other
        return self.chordal(other) <= tol

    def snap_to_rational(self, cfg: Config | None = None) -> "ProjPoint | None":
        """Exact rational point reproducing this one to within snap_tol, if any."""
        cfg = resolve(cfg)
        if self.exact:
            return self
        c = self.chart()
        pivot = self.coords[c]
        ratios = [complex(v) / pivot for v in self.coords]
        cand: list[Fraction] = []
        for r in ratios:
            if abs(r.imag) > cfg.snap_tol:
                return None
            cand.append(Fraction(r.real).limit_denominator(cfg.snap_max_denominator))
        try:
            snapped = ProjPoint.exact_point(cand)
        except InputError:
            return None
        return snapped if self.chordal(snapped) <= cfg.snap_tol else None

    def __repr__(self) -> str:
        if self.exact:
            return "[" + " : ".join(str(c) for c in self.coords) + "]"
        return "[" + " : ".join(f"{c:.6g}" for c in self.coords) + "]~"


# ---------------------------------------------------------------------------
# components and sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    """One irreducible piece of an algebraic set: a curve or a point."""

    kind: str  # "curve" | "point"
    poly: HomogPoly | None = None
    point: ProjPoint | None = None

    @classmethod
    def curve(cls, poly: HomogPoly) -> "Component":
        if poly.is_zero() or poly.degree == 0:
            raise InputError("a curve component needs a nonconstant form")
        return cls(kind="curve", poly=poly.normalized())

    @classmethod
    def of_point(cls, point: ProjPoint) -> "Component":
        return cls(kind="point", point=point)

    @property
    def codim(self) -> int:
        if self.kind == "curve":
            return 1
        return self.point.dim  # points: codim k in P^k

    @property
    def degree(self) -> int:
        return self.poly.degree if self.kind == "curve" else 0

    @property
    def is_exact(self) -> bool:
        return True if self.kind == "curve" else self.point.exact

    def sort_key(self) -> tuple:
        if self.kind == "curve":
            return (0, self.poly.degree, str(self.poly))
        pt = self.point
        if pt.exact:
            return (1, 0, tuple((c.numerator, c.denominator) for c in pt.coords))
        rounded = tuple((round(c.real, 9), round(c.imag, 9)) for c in pt.coords)
        return (1, 1, rounded)

    def __str__(self) -> str:
        if self.kind == "curve":
            return f"{{{self.poly} = 0}}"
        return repr(self.point)


class AlgebraicSet:
    """A duplicate-free, deterministically ordered union of components."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Component] = (), cluster_tol: float | None = None):
        tol = resolve(None).cluster_tol if cluster_tol is None else cluster_tol
        kept: list[Component] = []
        for comp in components:
            if any(_same_component(comp, other, tol) for other in kept):
                continue
            kept.append(comp)
        kept.sort(key=Component.sort_key)
        self.components = tuple(kept)

    def union(self, other: "AlgebraicSet") -> "AlgebraicSet":
        return AlgebraicSet(self.components + other.components)

    def curves(self) -> list[Component]:
        return [c for c in self.components if c.kind == "curve"]

    def points(self) -> list[Component]:
        return [c for c in self.components if c.kind == "point"]

    @property
    def is_empty(self) -> bool:
        return not self.components

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __repr__(self) -> str:
        inner = ", ".join(str(c) for c in self.components)
        return f"AlgebraicSet({inner})"


def _same_component(a: Component, b: Component, tol: float) -> bool:
    if a.kind != b.kind:
        return False
    if a.kind == "curve":
        return a.poly == b.poly
    return a.point.is_close(b.point, tol)


def curve_residual(poly: HomogPoly, point: ProjPoint) -> float:
    """Scale-free residual |q(p^)| / ||q||_1 with p^ at unit max-norm."""
    coords = point.to_complex()
    top = max(abs(c) for c in coords)
    hat = [c / top for c in coords]
    norm = float(sum(abs(c) for c in poly.terms.values()))
    return abs(complex(poly.evaluate(hat))) / norm


def contains(s: AlgebraicSet, p: ProjPoint, tol: float | None = None, cfg: Config | None = None) -> Membership:
    """Tri-state membership of a point in a set.

    Exact point against an exact curve or point is decided exactly.
    Otherwise the residual (curves) or chordal distance (points) is compared
    against ``tol``: below means IN, above ``ambiguity_factor * tol`` means
    OUT, and the band in between is reported as UNDECIDED rather than
    guessed.
    """
    cfg = resolve(cfg)
    tol = cfg.residual_tol if tol is None else tol
    undecided = False
    for comp in s.components:
        if comp.kind == "curve":
            if p.exact:
                if comp.poly.evaluate(p.coords) == 0:
                    return Membership.IN
                continue
            r = curve_residual(comp.poly, p)
        else:
            if p.exact and comp.point.exact:
                if p == comp.point:
                    return Membership.IN
                continue
            r = p.chordal(comp.point)
        if r < tol:
            return Membership.IN
        if r <= cfg.ambiguity_factor * tol:
            undecided = True
    return Membership.UNDECIDED if undecided else Membership.OUT


def set_equal(a: AlgebraicSet, b: AlgebraicSet) -> bool:
    """Exact equality of algebraic sets (component lists in normal form)."""
    for s in (a, b):
        for comp in s.components:
            if not comp.is_exact:
                raise InputError("set_equal requires exact components")
    return [c.sort_key() for c in a.components] == [c.sort_key() for c in b.components]


# ---------------------------------------------------------------------------
# point images and binary-form roots
# ---------------------------------------------------------------------------


def map_point(forms: Sequence[HomogPoly], p: ProjPoint) -> ProjPoint:
    """Image of a point under a morphism's coordinate forms."""
    if p.exact:
        vals = [f.evaluate(p.coords) for f in forms]
        return ProjPoint.exact_point(vals)
    coords = p.to_complex()
    vals = [complex(f.evaluate(coords)) for f in forms]
    return ProjPoint.inexact(vals)


def _coeff_floats(coeffs: list[Fraction]) -> list[complex]:
    top = max(abs(c) for c in coeffs)
    return [complex(c / top) for c in coeffs]


def _polish_univariate(coeffs: list[complex], root: complex, max_steps: int) -> complex:
    deriv = [c * (len(coeffs) - 1 - i) for i, c in enumerate(coeffs[:-1])]
    x = root
    for _ in range(max_steps):
        fx = 0j
        for c in coeffs:
            fx = fx * x + c
        dfx = 0j
        for c in deriv:
            dfx = dfx * x + c
        if dfx == 0:
            break
        step = fx / dfx
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def binary_roots(p: HomogPoly, cfg: Config | None = None) -> list[tuple[ProjPoint, int]]:
    """Projective roots of a binary form with multiplicities.

    Rational roots come out exact (from the linear factors of the exact
    factorization); roots of higher-degree irreducible factors are floating
    and Newton-polished.
    """
    cfg = resolve(cfg)
    if p.num_vars != 2:
        raise ArityError("binary_roots needs a two-variable form")
    if p.is_zero():
        raise ArityError("zero form has every root")
    # the degree cap guards user-facing factor() calls; internal resultants
    # legitimately reach higher degrees and must still split exactly
    fac_cfg = cfg.with_overrides(
        factor_degree_cap=max(cfg.factor_degree_cap, p.degree or 0)
    )
    out: list[tuple[ProjPoint, int]] = []
    for base, mult in factor(p, fac_cfg).factors:
        if base.degree == 1:
            a = base.terms.get((1, 0), Fraction(0))
            b = base.terms.get((0, 1), Fraction(0))
            out.append((ProjPoint.exact_point([-b, a]), mult))
            continue
        # irreducible of degree >= 2 over Q: no roots at (1:0) or (0:1)
        coeffs = [base.terms.get((base.degree - j, j), Fraction(0)) for j in range(base.degree + 1)]
        floats = _coeff_floats(coeffs)
        for root in np.roots(floats):
            polished = _polish_univariate(floats, complex(root), cfg.newton_max_steps)
            out.append((ProjPoint.inexact([polished, 1.0]), mult))
    return out


# ---------------------------------------------------------------------------
# curve images under a morphism
# ---------------------------------------------------------------------------


def _to_ring3(p: HomogPoly):
    return _RING3.from_dict(
        {e: QQ(c.numerator, c.denominator) for e, c in p.terms.items()}
    )


def _from_ring3(elt) -> HomogPoly:
    terms = {
        expo: Fraction(int(c.numerator), int(c.denominator))
        for expo, c in elt.terms()
    }
    return HomogPoly(3, terms)


def curve_image(f, c: Component, cfg: Config | None = None) -> Component:
    """Image of an irreducible curve under a morphism of P^2.

    Searches for the minimal degree D admitting a form q with c | q(f);
    since reduction modulo the principal ideal (c) is linear over Q, such q
    form the exact nullspace of a rational matrix.  At the minimal D the
    nullspace is one-dimensional and spanned by the defining polynomial of
    f(V(c)); the returned component is certified by re-checking divisibility
    exactly and verifying irreducibility.

    Raises BudgetError when the degree bound d*deg(c) exceeds the configured
    curve-degree cap, and SolverError if no degree admits a divisor (cannot
    happen for a genuine morphism; kept as a hard failure, not a guess).
    """
    cfg = resolve(cfg)
    forms = list(getattr(f, "forms", f))
    if len(forms) != 3:
        raise ArityError("curve_image needs a self-map of P^2")
    if c.kind != "curve":
        raise InputError("curve_image needs a curve component")
    d = forms[0].degree
    bound = d * c.poly.degree
    if bound > cfg.factor_degree_cap:
        raise BudgetError(
            f"image degree bound {bound} exceeds the curve degree cap "
            f"{cfg.factor_degree_cap}"
        )
    cr = _to_ring3(c.poly)
    fr = [_to_ring3(fi) for fi in forms]
    pows = [[_RING3.one], [_RING3.one], [_RING3.one]]

    def power(i: int, e: int):
        while len(pows[i]) <= e:
            pows[i].append(pows[i][-1] * fr[i])
        return pows[i][e]

    for D in range(1, bound + 1):
        target = monomials_of_degree(3, D)
        columns = []
        support: dict[tuple[int, ...], int] = {}
        for (a, b, e) in target:
            remainder = (power(0, a) * power(1, b) * power(2, e)).rem([cr])
            col = {}
            for expo, coeff in remainder.terms():
                if expo not in support:
                    support[expo] = len(support)
                col[support[expo]] = coeff
            columns.append(col)
        if not support:
            # every pullback reduced to zero: any q of this degree works;
            # impossible for a morphism, and caught here rather than papered over
            raise SolverError("curve reduction degenerated to zero")
        rows = len(support)
        data = [[QQ.zero] * len(target) for _ in range(rows)]
        for j, col in enumerate(columns):
            for i, coeff in col.items():
                data[i][j] = coeff
        null = DomainMatrix(data, (rows, len(target)), QQ).nullspace()
        if null.shape[0] == 0:
            continue
        if null.shape[0] > 1:
            raise SolverError(
                f"nullspace dimension {null.shape[0]} at minimal degree {D}; "
                "the image is not a single curve"
            )
        vec = null.to_list()[0]
        terms = {
            mono: Fraction(int(v.numerator), int(v.denominator))
            for mono, v in zip(target, vec)
            if v != 0
        }
        q = HomogPoly(3, terms).normalized()
        # certify: divisibility (structural, but re-checked) + irreducibility
        pullback = _to_ring3(q.compose(forms))
        if not pullback.rem([cr]) == _RING3.zero:
            raise SolverError("image candidate failed exact divisibility")
        fac = factor(q, cfg)
        if len(fac.factors) != 1 or fac.factors[0][1] != 1:
            raise SolverError("image candidate is not irreducible")
        return Component.curve(q)
    raise SolverError("no image degree up to d*deg(c) admitted a divisor")


# ---------------------------------------------------------------------------
# intersections: the shared elimination engine
# ---------------------------------------------------------------------------

#: deterministic ladder of projection centers: the substitution
#: (z, w, t) -> (z + a*t, w + b*t, t) moves the center of projection to
#: [a : b : 1]; the identity (projection from [0:0:1]) is tried first.
_PROJECTION_SHIFTS: list[tuple[int, int]] = [
    (0, 0), (1, 0), (0, 1), (1, 1), (-1, 0), (0, -1),
    (1, -1), (-1, 1), (2, 1), (1, 2), (-2, 1), (3, 2),
]

_TSYM = sp.Symbol("t")


def _shift_form(p: HomogPoly, a: int, b: int) -> HomogPoly:
    if (a, b) == (0, 0):
        return p
    z = HomogPoly.variable(3, 0)
    w = HomogPoly.variable(3, 1)
    t = HomogPoly.variable(3, 2)
    return p.compose([z + t * Fraction(a), w + t * Fraction(b), t])


def _fiber_poly(p: HomogPoly, z0, w0) -> list:
    """Coefficients (descending in t) of p(z0, w0, t); exact iff inputs are."""
    deg = p.degree
    coeffs = [Fraction(0) if isinstance(z0, Fraction) else 0j] * (deg + 1)
    for (i, j, k), c in p.terms.items():
        if isinstance(z0, Fraction):
            coeffs[deg - k] += c * z0**i * w0**j
        else:
            coeffs[deg - k] += complex(c) * z0**i * w0**j
    return coeffs


def _exact_univariate_roots(coeffs: list[Fraction], cfg: Config) -> list[tuple[object, bool]]:
    """Roots of an exact univariate (descending coeffs): (value, is_exact)."""
    # strip leading zeros; trailing zeros are roots at tau = 0
    poly = sp.Poly(coeffs, _TSYM, domain="QQ")
    out: list[tuple[object, bool]] = []
    for base, _m in poly.factor_list()[1]:
        if base.degree() == 1:
            c1, c0 = base.all_coeffs()
            root = sp.Rational(-c0, c1)
            out.append((Fraction(int(root.p), int(root.q)), True))
        else:
            fl = _coeff_floats([Fraction(int(sp.Rational(v).p), int(sp.Rational(v).q)) for v in base.all_coeffs()])
            for r in np.roots(fl):
                out.append((_polish_univariate(fl, complex(r), cfg.newton_max_steps), False))
    return out


def _newton_system(
    A: HomogPoly, B: HomogPoly, start: tuple[complex, complex, complex], cfg: Config
) -> tuple[complex, complex, complex]:
    """Polish a root of the system {A = B = 0} in the chart of its largest coord."""
    coords = list(start)
    mags = [abs(c) for c in coords]
    chart = mags.index(max(mags))
    pivot = coords[chart]
    coords = [c / pivot for c in coords]
    free = [i for i in range(3) if i != chart]
    pa = [A.partial(i) for i in range(3)]
    pb = [B.partial(i) for i in range(3)]
    for _ in range(cfg.newton_max_steps):
        fa = complex(A.evaluate(coords))
        fb = complex(B.evaluate(coords))
        j00 = complex(pa[free[0]].evaluate(coords))
        j01 = complex(pa[free[1]].evaluate(coords))
        j10 = complex(pb[free[0]].evaluate(coords))
        j11 = complex(pb[free[1]].evaluate(coords))
        det = j00 * j11 - j01 * j10
        if abs(det) < 1e-300:
            break
        du = (fa * j11 - fb * j01) / det
        dv = (fb * j00 - fa * j10) / det
        coords[free[0]] -= du
        coords[free[1]] -= dv
        if max(abs(du), abs(dv)) <= 1e-16 * max(1.0, abs(coords[free[0]]), abs(coords[free[1]])):
            break
    return tuple(coords)  # type: ignore[return-value]


def _resultant_t(A: HomogPoly, B: HomogPoly) -> HomogPoly:
    """Eliminate t from two ternary forms, returning a binary form in (z, w)."""
    ra = to_sympy(A).as_expr()
    rb = to_sympy(B).as_expr()
    zs, ws, ts = sp.symbols("z w t")
    res = sp.resultant(sp.Poly(ra, ts), sp.Poly(rb, ts))
    poly = sp.Poly(res, zs, ws, domain="QQ")
    return from_sympy(poly, 2)


def solve_form_pair(
    A: HomogPoly, B: HomogPoly, cfg: Config | None = None
) -> list[tuple[ProjPoint, int]]:
    """All common zeros of two coprime ternary forms, with multiplicities.

    Multiplicities sum to deg(A) * deg(B).  The projection center is moved
    down a deterministic ladder until every resultant fiber carries a single
    intersection point (so the fiber multiplicity is attributable); exact
    rational fibers stay exact, floating ones are Newton-polished on the
    original system and verified against the residual tolerance.

    Raises DegenerateEliminationError when every center fails — in practice
    only for inputs violating the coprimality precondition.
    """
    cfg = resolve(cfg)
    if A.num_vars != 3 or B.num_vars != 3:
        raise ArityError("solve_form_pair needs ternary forms")
    expected = A.degree * B.degree
    failures: list[str] = []
    for a, b in _PROJECTION_SHIFTS[: cfg.max_projection_retries]:
        As = _shift_form(A, a, b)
        Bs = _shift_form(B, a, b)
        # the center [0:0:1] must avoid both curves, i.e. full t-degree
        if As.terms.get((0, 0, As.degree)) is None or Bs.terms.get((0, 0, Bs.degree)) is None:
            failures.append(f"center ({a},{b}) lies on a curve")
            continue
        R = _resultant_t(As, Bs)
        if R.is_zero():
            raise DegenerateEliminationError(
                "elimination vanished identically; the forms share a component"
            )
        if R.degree != expected:
            failures.append(f"center ({a},{b}) dropped resultant degree")
            continue
        found = _split_fibers(As, Bs, R, a, b, cfg)
        if found is None:
            failures.append(f"center ({a},{b}) produced an ambiguous fiber")
            continue
        total = sum(m for _, m in found)
        if total != expected:  # pragma: no cover - structural identity
            failures.append(f"center ({a},{b}) multiplicity sum {total} != {expected}")
            continue
        return found
    raise DegenerateEliminationError(
        "no projection center separated the intersection: " + "; ".join(failures)
    )


def _split_fibers(
    As: HomogPoly, Bs: HomogPoly, R: HomogPoly, a: int, b: int, cfg: Config
) -> list[tuple[ProjPoint, int]] | None:
    results: list[tuple[ProjPoint, int]] = []
    for direction, mult in binary_roots(R, cfg):
        if direction.exact:
            z0, w0 = direction.coords
            pa = _fiber_poly(As, z0, w0)
            pb = _fiber_poly(Bs, z0, w0)
            g = sp.gcd(sp.Poly(pa, _TSYM, domain="QQ"), sp.Poly(pb, _TSYM, domain="QQ"))
            roots = _exact_univariate_roots([Fraction(int(sp.Rational(v).p), int(sp.Rational(v).q)) for v in g.all_coeffs()], cfg)
        else:
            z0, w0 = direction.to_complex()
            pa = _fiber_poly(As, z0, w0)
            pb = _fiber_poly(Bs, z0, w0)
            roots = _match_numeric_fiber(pa, pb, cfg)
        points: list[ProjPoint] = []
        for tau, tau_exact in roots:
            # solutions live in the shifted frame; the original coordinates
            # are (z' + a t', w' + b t', t')
            if direction.exact and tau_exact:
                points.append(ProjPoint.exact_point([z0 + a * tau, w0 + b * tau, tau]))
                continue
            zc, wc = (complex(z0), complex(w0))
            polished = _newton_system(As, Bs, (zc, wc, complex(tau)), cfg)
            back = (
                polished[0] + a * polished[2],
                polished[1] + b * polished[2],
                polished[2],
            )
            points.append(ProjPoint.inexact(back))
        # dedupe within the fiber; a clean projection leaves exactly one point
        unique: list[ProjPoint] = []
        for pt in points:
            if not any(pt.is_close(u, cfg.cluster_tol) for u in unique):
                unique.append(pt)
        if len(unique) != 1:
            return None
        results.append((unique[0], mult))
    return results


def _match_numeric_fiber(
    pa: list[complex], pb: list[complex], cfg: Config
) -> list[tuple[complex, bool]]:
    """Common roots of two floating univariates, paired within a loose gate."""
    ra = np.roots(_strip_tiny_leading(pa))
    rb = np.roots(_strip_tiny_leading(pb))
    gate = 1e-5
    cands: list[complex] = []
    for x in ra:
        if rb.size and min(abs(rb - x)) < gate * max(1.0, abs(x)):
            cands.append(complex(x))
    out: list[tuple[complex, bool]] = []
    for x in cands:
        if not any(abs(x - y) <= cfg.cluster_tol * max(1.0, abs(x)) for y, _ in out):
            out.append((x, False))
    return out


def _strip_tiny_leading(coeffs: list[complex]) -> list[complex]:
    top = max(abs(c) for c in coeffs)
    vals = [c / top for c in coeffs]
    i = 0
    while i < len(vals) - 1 and abs(vals[i]) < 1e-13:
        i += 1
    return vals[i:]


def curve_intersect(
    a: Component, b: Component, cfg: Config | None = None
) -> list[tuple[ProjPoint, int]]:
    """Intersection points of two distinct irreducible curves in P^2.

    Multiplicities sum to the product of the degrees (Bezout).  Exact
    rational intersection points come back exact; the rest are polished
    floating points.  Distinctness is enforced; sharing a component is an
    input error surfaced through the coprimality check.
    """
    cfg = resolve(cfg)
    if a.kind != "curve" or b.kind != "curve":
        raise InputError("curve_intersect needs curve components")
    if a.poly == b.poly:
        raise InputError("curve_intersect needs two distinct curves")
    if poly_gcd(a.poly, b.poly).degree != 0:
        raise InputError("curves share a common component")
    points = solve_form_pair(a.poly, b.poly, cfg)
    # final residual gate (exact points are exact zeros by construction)
    for pt, _m in points:
        if pt.exact:
            assert a.poly.evaluate(pt.coords) == 0 and b.poly.evaluate(pt.coords) == 0
        else:
            ra = curve_residual(a.poly, pt)
            rb = curve_residual(b.poly, pt)
            if max(ra, rb) > cfg.residual_tol:
                raise SolverError(
                    f"intersection point {pt} failed the residual gate "
                    f"({max(ra, rb):.2e})"
                )
    return points


# ---------------------------------------------------------------------------
# inexact elimination (floating complex coefficients)
# ---------------------------------------------------------------------------


class InexactForm:
    """A homogeneous form with floating complex coefficients.

    Arises when a form pair is assembled from genuinely complex scalars
    (backward fibers over non-real floating points), where the rational
    elimination pipeline cannot run.  Quacks enough like ``HomogPoly``
    (``terms``, ``degree``, ``evaluate``, ``partial``) for the fiber and
    Newton machinery above to work unchanged; exact factorization is of
    course unavailable, so roots and their multiplicities come from
    clustering instead.
    """

    __slots__ = ("num_vars", "terms", "degree")

    def __init__(self, num_vars: int, terms: dict, degree: int):
        self.num_vars = num_vars
        self.terms = {e: complex(c) for e, c in terms.items() if c != 0}
        self.degree = degree

    @classmethod
    def combination(cls, ca, p: HomogPoly, cb, q: HomogPoly) -> "InexactForm":
        """The form ca * p + cb * q for complex scalars ca, cb.

        The result is rescaled so its largest coefficient has magnitude one,
        and coefficients below 1e-14 of that are treated as cancellation dust
        and dropped.  A combination that cancels entirely means p and q were
        proportional, which the morphism precondition excludes.
        """
        if p.num_vars != q.num_vars or p.degree != q.degree:
            raise ArityError("combination needs two forms of the same shape")
        terms: dict[tuple, complex] = {}
        for e, c in p.terms.items():
            terms[e] = terms.get(e, 0j) + complex(ca) * complex(c)
        for e, c in q.terms.items():
            terms[e] = terms.get(e, 0j) + complex(cb) * complex(c)
        top = max((abs(v) for v in terms.values()), default=0.0)
        if top == 0.0:
            raise DegenerateEliminationError("scalar combination vanished identically")
        kept = {e: v / top for e, v in terms.items() if abs(v) > 1e-14 * top}
        return cls(p.num_vars, kept, p.degree)

    def evaluate(self, coords: Sequence) -> complex:
        total = 0j
        for expo, c in self.terms.items():
            term = c
            for x, e in zip(coords, expo):
                if e:
                    term *= complex(x) ** e
            total += term
        return total

    def partial(self, var: int) -> "InexactForm":
        terms: dict[tuple, complex] = {}
        for expo, c in self.terms.items():
            if expo[var] == 0:
                continue
            lowered = list(expo)
            lowered[var] -= 1
            terms[tuple(lowered)] = c * expo[var]
        return InexactForm(self.num_vars, terms, max(self.degree - 1, 0))

    def __repr__(self) -> str:
        return f"InexactForm(deg={self.degree}, {len(self.terms)} terms)"


def _shift_inexact(p: InexactForm, a: int, b: int) -> InexactForm:
    """p(z + a*t, w + b*t, t), expanded term by term."""
    if (a, b) == (0, 0):
        return p
    terms: dict[tuple, complex] = {}
    for (i, j, k), c in p.terms.items():
        for r in range(i + 1):
            ca = comb(i, r) * a ** (i - r)
            for s in range(j + 1):
                cb = comb(j, s) * b ** (j - s)
                key = (r, s, k + (i - r) + (j - s))
                terms[key] = terms.get(key, 0j) + c * ca * cb
    top = max(abs(v) for v in terms.values())
    kept = {e: v for e, v in terms.items() if abs(v) > 1e-14 * top}
    return InexactForm(3, kept, p.degree)


def _sylvester_det(pa: list[complex], pb: list[complex]) -> complex:
    da, db = len(pa) - 1, len(pb) - 1
    n = da + db
    M = np.zeros((n, n), dtype=complex)
    for r in range(db):
        M[r, r : r + da + 1] = pa
    for r in range(da):
        M[db + r, r : r + db + 1] = pb
    return complex(np.linalg.det(M))


def _interp_resultant_t(As: InexactForm, Bs: InexactForm) -> np.ndarray:
    """Descending coefficients of Res_t(As, Bs)(z, 1) by DFT interpolation.

    The resultant is a binary form of degree deg(As)*deg(Bs); evaluating the
    Sylvester determinant at roots of unity and inverting the DFT recovers
    its coefficients with unit-circle conditioning.
    """
    n = As.degree * Bs.degree + 1
    samples = np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.array(
        [
            _sylvester_det(_fiber_poly(As, complex(z0), 1.0), _fiber_poly(Bs, complex(z0), 1.0))
            for z0 in samples
        ]
    )
    coeffs_ascending = np.fft.fft(vals) / n
    return coeffs_ascending[::-1]


def _cluster_roots(values, gate: float) -> list[tuple[complex, int]]:
    """Greedy clustering of floating roots; cluster size is the multiplicity."""
    clusters: list[list[complex]] = []
    for x in values:
        for cl in clusters:
            if abs(complex(x) - cl[0]) <= gate * max(1.0, abs(cl[0])):
                cl.append(complex(x))
                break
        else:
            clusters.append([complex(x)])
    return [(sum(cl) / len(cl), len(cl)) for cl in clusters]


# multiple roots of a numerically computed polynomial split by roughly
# eps^(1/m); this gate re-merges them up to multiplicity three or so
_CLUSTER_GATE = 1e-5


def binary_roots_inexact(
    coeffs: Sequence[complex], cfg: Config | None = None
) -> list[tuple[ProjPoint, int]]:
    """Projective roots of a floating binary form, multiplicities by clustering.

    ``coeffs`` are the descending coefficients of p(z, 1), all deg(p) + 1 of
    them: leading entries below 1e-10 of the largest magnitude are read as
    roots at [1 : 0].  Multiplicities sum to the degree by construction.
    """
    cfg = resolve(cfg)
    if len(coeffs) < 2:
        raise ArityError("binary_roots_inexact needs a form of positive degree")
    top = max(abs(c) for c in coeffs)
    if top == 0.0:
        raise ArityError("zero form has every root")
    vals = [complex(c) / top for c in coeffs]
    at_infinity = 0
    while len(vals) > 1 and abs(vals[0]) < 1e-10:
        vals.pop(0)
        at_infinity += 1
    out: list[tuple[ProjPoint, int]] = []
    if at_infinity:
        out.append((ProjPoint.inexact([1.0, 0.0]), at_infinity))
    if len(vals) > 1:
        for mean, mult in _cluster_roots(np.roots(vals), _CLUSTER_GATE):
            polished = _polish_univariate(vals, mean, cfg.newton_max_steps)
            out.append((ProjPoint.inexact([polished, 1.0]), mult))
    return out


def solve_form_pair_inexact(
    A: InexactForm, B: InexactForm, cfg: Config | None = None
) -> list[tuple[ProjPoint, int]]:
    """Common zeros of two floating ternary forms, multiplicities by clustering.

    The floating sibling of ``solve_form_pair``: same projection-center
    ladder, but the t-resultant is interpolated from Sylvester determinants
    and root multiplicities come from clustering the resultant's roots.
    Every returned point is Newton-polished on the shifted system.  Fibers
    that refuse to separate exhaust the ladder and raise, exactly as in the
    exact pipeline — never a silently short answer.
    """
    cfg = resolve(cfg)
    if A.num_vars != 3 or B.num_vars != 3:
        raise ArityError("solve_form_pair_inexact needs ternary forms")
    expected = A.degree * B.degree
    failures: list[str] = []
    for a, b in _PROJECTION_SHIFTS[: cfg.max_projection_retries]:
        As = _shift_inexact(A, a, b)
        Bs = _shift_inexact(B, a, b)
        # the center [0:0:1] must be far from both curves: full t-degree
        # with a leading coefficient of honest magnitude
        scale_a = max(abs(c) for c in As.terms.values())
        scale_b = max(abs(c) for c in Bs.terms.values())
        if (
            abs(As.terms.get((0, 0, As.degree), 0j)) < 1e-10 * scale_a
            or abs(Bs.terms.get((0, 0, Bs.degree), 0j)) < 1e-10 * scale_b
        ):
            failures.append(f"center ({a},{b}) lies too near a curve")
            continue
        rc = _interp_resultant_t(As, Bs)
        rtop = max(abs(c) for c in rc)
        if rtop == 0.0:
            raise DegenerateEliminationError(
                "elimination vanished identically; the forms share a component"
            )
        directions = binary_roots_inexact(list(rc), cfg)
        found = _split_fibers_inexact(As, Bs, directions, a, b, cfg)
        if found is None:
            failures.append(f"center ({a},{b}) produced an ambiguous fiber")
            continue
        total = sum(m for _, m in found)
        if total != expected:  # pragma: no cover - structural identity
            failures.append(f"center ({a},{b}) multiplicity sum {total} != {expected}")
            continue
        return found
    raise DegenerateEliminationError(
        "no projection center separated the intersection: " + "; ".join(failures)
    )


def _split_fibers_inexact(
    As: InexactForm,
    Bs: InexactForm,
    directions: list[tuple[ProjPoint, int]],
    a: int,
    b: int,
    cfg: Config,
) -> list[tuple[ProjPoint, int]] | None:
    results: list[tuple[ProjPoint, int]] = []
    for direction, mult in directions:
        z0, w0 = direction.to_complex()
        pa = _fiber_poly(As, z0, w0)
        pb = _fiber_poly(Bs, z0, w0)
        points: list[ProjPoint] = []
        for tau, _ in _match_numeric_fiber(pa, pb, cfg):
            polished = _newton_system(As, Bs, (z0, w0, complex(tau)), cfg)
            back = (
                polished[0] + a * polished[2],
                polished[1] + b * polished[2],
                polished[2],
            )
            points.append(ProjPoint.inexact(back))
        unique: list[ProjPoint] = []
        for pt in points:
            if not any(pt.is_close(u, cfg.cluster_tol) for u in unique):
                unique.append(pt)
        if len(unique) != 1:
            return None
        results.append((unique[0], mult))
    return results
