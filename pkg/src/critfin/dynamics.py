"""Endomorphisms of P^1 and P^2: validation, iteration, differentials,
periodic points, and superattracting certification.

A map is accepted only when its coordinate forms have a nonvanishing
resultant (no common zero anywhere, so the map is a morphism).  Iterates
reuse that certificate: a composition of morphisms is a morphism, so only
degree bookkeeping and content removal run on iterates.

Local differentials are honest chart computations: the source chart is the
largest-magnitude coordinate of the point, the target chart the
largest-magnitude coordinate of its image, and cycle differentials compose
step jacobians whose chart choices match up by construction.  Nilpotency of
a 2x2 cycle differential is decided on trace and determinant — exactly for
exact cycles, with an explicit ambiguity band for floating ones.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd as int_gcd
from typing import Sequence

import sympy as sp

from .algebra import HomogPoly, factor, poly_gcd, resultant, to_sympy, from_sympy
from .config import Config, resolve
from .errors import (
    ArityError,
    BudgetError,
    DegenerateEliminationError,
    InputError,
    NotAMorphismError,
    SolverError,
)
from .geometry import (
    AlgebraicSet,
    Component,
    ProjPoint,
    binary_roots,
    map_point,
    solve_form_pair,
)

SUPERATTRACTING_ZERO = "superattracting-with-zero-differential"
SUPERATTRACTING_NILPOTENT = "superattracting-nilpotent-nonzero"
ATTRACTING = "attracting"
OTHER = "other"
UNDECIDED = "undecided"


def _primitive_tuple(forms: list[HomogPoly]) -> tuple[HomogPoly, ...]:
    """Remove the common rational content of the tuple, keeping relative scales."""
    from math import lcm

    den = 1
    for f in forms:
        for c in f.terms.values():
            den = lcm(den, c.denominator)
    num = 0
    for f in forms:
        for c in f.terms.values():
            num = int_gcd(num, abs(c.numerator * (den // c.denominator)))
    scale = Fraction(den, num)
    lead = forms[0].leading_term()[1]
    if lead < 0:
        scale = -scale
    return tuple(f * scale for f in forms)


class Endomorphism:
    """A validated self-map of P^1 (two forms) or P^2 (three forms)."""

    __slots__ = ("forms", "k", "degree", "_jacobian", "_det_jacobian")

    def __init__(self, forms: Sequence[HomogPoly], _validated: bool = False):
        forms = list(forms)
        if not forms:
            raise ArityError("an endomorphism needs coordinate forms")
        nv = forms[0].num_vars
        if len(forms) != nv or any(f.num_vars != nv for f in forms):
            raise ArityError(
                f"a self-map of P^{nv - 1} needs exactly {nv} forms in {nv} variables"
            )
        if any(f.is_zero() for f in forms):
            raise InputError("coordinate forms must be nonzero")
        d = forms[0].degree
        if any(f.degree != d for f in forms):
            degs = sorted({f.degree for f in forms})
            raise InputError(f"coordinate forms mix degrees {degs}")
        if d < 2:
            raise InputError(f"dynamical degree must be at least 2, got {d}")
        self.forms = _primitive_tuple(forms)
        self.k = nv - 1
        self.degree = d
        self._jacobian: tuple[tuple[HomogPoly, ...], ...] | None = None
        self._det_jacobian: HomogPoly | None = None

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return map_point(self.forms, p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Endomorphism):
            return NotImplemented
        return self.forms == other.forms

    def __hash__(self) -> int:
        return hash(self.forms)

    def __repr__(self) -> str:
        inner = " : ".join(str(f) for f in self.forms)
        return f"[{inner}]"

    @property
    def num_vars(self) -> int:
        return self.k + 1

    def jacobian(self) -> tuple[tuple[HomogPoly, ...], ...]:
        """Matrix of partials d f_i / d x_j as forms."""
        if self._jacobian is None:
            self._jacobian = tuple(
                tuple(f.partial(j) for j in range(self.num_vars)) for f in self.forms
            )
        return self._jacobian

    def det_jacobian(self) -> HomogPoly:
        if self._det_jacobian is None:
            J = self.jacobian()
            if self.k == 1:
                det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
            else:
                det = HomogPoly.zero(3)
                for j0, j1, j2, sign in (
                    (0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1),
                    (2, 1, 0, -1), (1, 0, 2, -1), (0, 2, 1, -1),
                ):
                    det = det + J[0][j0] * J[1][j1] * J[2][j2] * sign
            self._det_jacobian = det
        return self._det_jacobian


def endo_new(forms: Sequence[HomogPoly], cfg: Config | None = None) -> Endomorphism:
    """Validate and wrap coordinate forms as a morphism.

    Raises NotAMorphismError when the forms share a projective zero (checked
    by an exact resultant: Sylvester on P^1, Macaulay on P^2).
    """
    endo = Endomorphism(forms)
    if resultant(list(endo.forms)) == 0:
        raise NotAMorphismError(
            "coordinate forms share a common zero; the map is not a morphism"
        )
    return endo


def iterate(f: Endomorphism, n: int, cfg: Config | None = None) -> Endomorphism:
    """The n-th iterate f^n, with tuple content removed.

    The morphism certificate is inherited rather than recomputed: a
    composition of morphisms is a morphism, and re-running the resultant on
    iterated forms would dwarf every runtime budget.
    """
    cfg = resolve(cfg)
    if n < 1:
        raise InputError("iterate needs n >= 1")
    if f.degree**n > cfg.max_iterate_degree:
        raise BudgetError(
            f"iterate degree {f.degree}^{n} exceeds the cap {cfg.max_iterate_degree}"
        )
    current = f
    for _ in range(n - 1):
        composed = [g.compose(list(current.forms)) for g in f.forms]
        current = Endomorphism(composed, _validated=True)
    return current


def critical_set(f: Endomorphism, cfg: Config | None = None) -> AlgebraicSet:
    """The critical set as components: curves on P^2, points on P^1.

    The jacobian determinant has degree (k+1)(d-1) — asserted — and is
    factored exactly; on P^1 irrational critical points come back as
    polished floating components.
    """
    cfg = resolve(cfg)
    det = f.det_jacobian()
    expected = (f.k + 1) * (f.degree - 1)
    if det.is_zero() or det.degree != expected:  # pragma: no cover - morphism guarantee
        raise SolverError("jacobian determinant degenerated")
    if f.k == 1:
        return AlgebraicSet(
            [Component.of_point(pt) for pt, _m in binary_roots(det, cfg)],
            cluster_tol=cfg.cluster_tol,
        )
    comps = [Component.curve(base) for base, _m in factor(det, cfg).factors]
    return AlgebraicSet(comps, cluster_tol=cfg.cluster_tol)


# ---------------------------------------------------------------------------
# local differentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalJacobian:
    """Differential of the map in affine charts at a point.

    ``matrix[b][a]`` is the partial of the b-th target chart coordinate with
    respect to the a-th source chart coordinate; coordinates in a chart are
    the remaining homogeneous coordinates in their original order.  Entries
    are Fractions for exact points, complex otherwise.
    """

    point: ProjPoint
    source_chart: int
    target_chart: int
    matrix: tuple[tuple[object, ...], ...]
    exact: bool


def differential_at(
    f: Endomorphism,
    p: ProjPoint,
    source_chart: int | None = None,
    target_chart: int | None = None,
) -> LocalJacobian:
    """Exact (or floating) local jacobian of f at p.

    Charts default to the largest-magnitude coordinate of the point and of
    its image; any chart whose coordinate is nonzero at the respective point
    may be forced explicitly, which changes the matrix by the expected
    similarity but never the nilpotency verdict.
    """
    image = f(p)
    s = p.chart() if source_chart is None else source_chart
    tgt = image.chart() if target_chart is None else target_chart
    exact = p.exact
    coords = list(p.coords if exact else p.to_complex())
    pivot = coords[s]
    if pivot == 0:
        raise InputError(f"chart {s} is not admissible at {p}")
    lift = [c / pivot for c in coords]
    ftau = f.forms[tgt]
    denom = ftau.evaluate(lift)
    if denom == 0:
        raise InputError(f"target chart {tgt} is not admissible at the image of {p}")
    J = f.jacobian()
    free_src = [a for a in range(f.num_vars) if a != s]
    free_tgt = [b for b in range(f.num_vars) if b != tgt]
    rows = []
    for b in free_tgt:
        fb = f.forms[b].evaluate(lift)
        row = []
        for a in free_src:
            # d/dx_a (f_b / f_tgt) by the quotient rule at x_s = 1
            num = J[b][a].evaluate(lift) * denom - fb * J[tgt][a].evaluate(lift)
            row.append(num / denom**2)
        rows.append(tuple(row))
    return LocalJacobian(
        point=p, source_chart=s, target_chart=tgt, matrix=tuple(rows), exact=exact
    )


def _matmul(A: Sequence[Sequence], B: Sequence[Sequence]):
    n = len(A)
    return tuple(
        tuple(sum(A[i][l] * B[l][j] for l in range(n)) for j in range(n))
        for i in range(n)
    )


def cycle_differential(f: Endomorphism, cycle: Sequence[ProjPoint]) -> LocalJacobian:
    """Differential of f^n along a cycle, composed through matching charts."""
    n = len(cycle)
    step_jacobians = []
    for i, p in enumerate(cycle):
        nxt = cycle[(i + 1) % n]
        step_jacobians.append(
            differential_at(f, p, source_chart=None, target_chart=nxt.chart())
        )
    M = step_jacobians[0].matrix
    for J in step_jacobians[1:]:
        M = _matmul(J.matrix, M)
    return LocalJacobian(
        point=cycle[0],
        source_chart=step_jacobians[0].source_chart,
        target_chart=step_jacobians[-1].target_chart,
        matrix=M,
        exact=all(J.exact for J in step_jacobians),
    )


# ---------------------------------------------------------------------------
# periodic points
# ---------------------------------------------------------------------------


@dataclass
class PeriodicPoint:
    """A periodic point with its minimal period and certification data."""

    point: ProjPoint
    period: int
    classification: str = UNDECIDED
    #: multiplier for k = 1; (trace, det) of the cycle differential for k = 2
    eigen_data: tuple = ()
    residual: float = 0.0
    diagnostics: str = ""

    def is_superattracting(self) -> bool:
        return self.classification in (SUPERATTRACTING_ZERO, SUPERATTRACTING_NILPOTENT)


def _expected_fixed_points(f: Endomorphism, n: int) -> int:
    dn = f.degree**n
    if f.k == 1:
        return dn + 1
    return dn * dn + dn + 1


def _fixed_point_candidates(g: Endomorphism, cfg: Config) -> list[ProjPoint]:
    """Solutions of the fixed-point minor system of g, unfiltered."""
    if g.k == 1:
        z = HomogPoly.variable(2, 0)
        w = HomogPoly.variable(2, 1)
        form = g.forms[0] * w - g.forms[1] * z
        return [pt for pt, _m in binary_roots(form, cfg)]
    x = [HomogPoly.variable(3, i) for i in range(3)]
    minors = {
        (0, 1): g.forms[0] * x[1] - g.forms[1] * x[0],
        (0, 2): g.forms[0] * x[2] - g.forms[2] * x[0],
        (1, 2): g.forms[1] * x[2] - g.forms[2] * x[1],
    }
    last_error: Exception | None = None
    for (ia, ib) in [((0, 1), (0, 2)), ((0, 1), (1, 2)), ((0, 2), (1, 2))]:
        A, B = minors[ia], minors[ib]
        third = next(m for key, m in minors.items() if key not in (ia, ib))
        try:
            return _solve_degenerate_pair(A, B, third, cfg)
        except (DegenerateEliminationError, SolverError) as exc:
            last_error = exc
    raise DegenerateEliminationError(
        f"every fixed-point minor pair degenerated: {last_error}"
    )


def _solve_degenerate_pair(
    A: HomogPoly, B: HomogPoly, third: HomogPoly, cfg: Config
) -> list[ProjPoint]:
    """Common zeros of {A, B}, splitting off any shared curve through `third`.

    Minor pairs legitimately share factors (for the power map every pair
    does); on the shared curve the remaining minor cuts out the candidates.
    """
    g = poly_gcd(A, B)
    candidates: list[ProjPoint] = []
    if g.degree and g.degree > 0:
        for base, _m in factor(g, cfg.with_overrides(factor_degree_cap=max(cfg.factor_degree_cap, g.degree))).factors:
            if poly_gcd(base, third).degree != 0:
                # the base would have to divide all three minors: a curve of
                # fixed points, impossible for a morphism
                raise SolverError("minor system shares a full component")
            candidates.extend(pt for pt, _m2 in solve_form_pair(base, third, cfg))
        qa, ra = sp.div(to_sympy(A), to_sympy(g))
        qb, rb = sp.div(to_sympy(B), to_sympy(g))
        assert ra.is_zero and rb.is_zero
        A = from_sympy(qa, A.num_vars)
        B = from_sympy(qb, B.num_vars)
    if A.degree and B.degree:
        if poly_gcd(A, B).degree != 0:
            raise DegenerateEliminationError("minor pair still shares a component")
        candidates.extend(pt for pt, _m in solve_form_pair(A, B, cfg))
    return candidates


def find_periodic(f: Endomorphism, n_max: int, cfg: Config | None = None) -> list[PeriodicPoint]:
    """All periodic points of period <= n_max, with minimal periods.

    Points found at period n are demoted to the smallest divisor m of n
    with f^m(x) = x; duplicates across periods are merged.  Every returned
    point satisfies the fixed-point residual gate (exact zero for rational
    points, chordal distance below the residual tolerance otherwise), and
    each comes back certified by ``certify_superattracting``.
    """
    cfg = resolve(cfg)
    if n_max < 1:
        raise InputError("find_periodic needs n_max >= 1")
    worst = _expected_fixed_points(f, n_max)
    if worst > cfg.budget_point_nodes:
        raise BudgetError(
            f"{worst} expected period-{n_max} points exceed the point budget "
            f"{cfg.budget_point_nodes}"
        )
    found: list[PeriodicPoint] = []
    for n in range(1, n_max + 1):
        g = iterate(f, n, cfg)
        for cand in _fixed_point_candidates(g, cfg):
            cand = _snap_candidate(g, cand, cfg)
            if not _is_fixed(g, cand, cfg):
                continue
            if any(pp.point.is_close(cand, cfg.cluster_tol) for pp in found):
                continue
            period = n
            for m in range(1, n):
                if n % m == 0 and _is_fixed(iterate(f, m, cfg), cand, cfg):
                    period = m
                    break
            pp = PeriodicPoint(point=cand, period=period)
            found.append(certify_superattracting(f, pp, cfg))
    return found


def _snap_candidate(g: Endomorphism, cand: ProjPoint, cfg: Config) -> ProjPoint:
    if cand.exact:
        return cand
    snapped = cand.snap_to_rational(cfg)
    if snapped is not None and g(snapped) == snapped:
        return snapped
    return cand


def _is_fixed(g: Endomorphism, p: ProjPoint, cfg: Config) -> bool:
    image = g(p)
    if p.exact and image.exact:
        return image == p
    return image.chordal(p) < cfg.residual_tol


def _orbit_points(f: Endomorphism, pp: PeriodicPoint, cfg: Config) -> list[ProjPoint]:
    pts = [pp.point]
    for _ in range(pp.period - 1):
        pts.append(f(pts[-1]))
    return pts


def certify_superattracting(
    f: Endomorphism, pp: PeriodicPoint, cfg: Config | None = None
) -> PeriodicPoint:
    """Classify a periodic point by its cycle differential.

    On P^2 the verdict is decided by trace and determinant of the chain-rule
    product: both zero means nilpotent, split into zero-differential and
    nilpotent-nonzero by the matrix itself.  Exact cycles get exact
    verdicts; floating ones use the residual tolerance with an ambiguity
    band of one order of magnitude reported as "undecided" rather than
    forced either way.
    """
    cfg = resolve(cfg)
    cycle = _orbit_points(f, pp, cfg)
    J = cycle_differential(f, cycle)
    pp.residual = _fixed_residual(f, pp, cycle, cfg)
    if f.k == 1:
        lam = J.matrix[0][0]
        pp.eigen_data = (lam,)
        pp.classification = _classify_multiplier(lam, J.exact, cfg)
        return pp
    (a, b), (c, d) = J.matrix
    tr = a + d
    det = a * d - b * c
    pp.eigen_data = (tr, det)
    pp.classification = _classify_matrix(J.matrix, tr, det, J.exact, cfg)
    return pp


def _fixed_residual(f, pp, cycle, cfg) -> float:
    closing = f(cycle[-1])
    if closing.exact and pp.point.exact:
        return 0.0 if closing == pp.point else 1.0
    return closing.chordal(pp.point)


def _classify_multiplier(lam, exact: bool, cfg: Config) -> str:
    if exact:
        if lam == 0:
            return SUPERATTRACTING_ZERO
        return ATTRACTING if abs(lam) < 1 else OTHER
    mag = abs(complex(lam))
    if mag < cfg.residual_tol:
        return SUPERATTRACTING_ZERO
    if mag <= cfg.ambiguity_factor * cfg.residual_tol:
        return UNDECIDED
    if abs(mag - 1.0) <= cfg.residual_tol:
        return UNDECIDED
    return ATTRACTING if mag < 1 else OTHER


def _classify_matrix(matrix, tr, det, exact: bool, cfg: Config) -> str:
    if exact:
        if tr == 0 and det == 0:
            zero = all(v == 0 for row in matrix for v in row)
            return SUPERATTRACTING_ZERO if zero else SUPERATTRACTING_NILPOTENT
        return _attracting_exact(tr, det)
    scale = max(max(abs(complex(v)) for row in matrix for v in row), 1.0)
    tr_r = abs(complex(tr)) / scale
    det_r = abs(complex(det)) / scale**2
    tol = cfg.residual_tol
    if tr_r < tol and det_r < tol:
        zero = all(abs(complex(v)) / scale < tol for row in matrix for v in row)
        return SUPERATTRACTING_ZERO if zero else SUPERATTRACTING_NILPOTENT
    if tr_r <= cfg.ambiguity_factor * tol and det_r <= cfg.ambiguity_factor * tol:
        return UNDECIDED
    return _attracting_numeric(tr, det, cfg)


def _attracting_exact(tr, det) -> str:
    # both roots of x^2 - tr x + det strictly inside the unit circle
    # (Schur-Cohn for real rational coefficients)
    if isinstance(tr, Fraction) and isinstance(det, Fraction):
        if abs(det) < 1 and abs(tr) < 1 + det:
            return ATTRACTING
        return OTHER
    return _attracting_numeric(tr, det, resolve(None))


def _attracting_numeric(tr, det, cfg: Config) -> str:
    trc, detc = complex(tr), complex(det)
    disc = cmath.sqrt(trc * trc - 4 * detc)
    lams = ((trc + disc) / 2, (trc - disc) / 2)
    mags = [abs(l) for l in lams]
    if any(abs(m - 1.0) <= cfg.residual_tol for m in mags):
        return UNDECIDED
    return ATTRACTING if all(m < 1 for m in mags) else OTHER
