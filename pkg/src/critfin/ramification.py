"""Backward orbit trees and the bounded-ramification certificate.

For a map whose postcritical orbits close, the visits of any backward orbit
to the critical set are uniformly bounded: a j-th preimage p of a point q
off the exceptional locus satisfies

    #{ i < j : f^i(p) critical }  <=  l_1 + ... + l_n,

where l_m is the stabilization time of the order-m postcritical orbit.  The
bound is blind to j — backward orbits may pass through the critical set only
a bounded number of times no matter how deep they run.  This module
materializes backward orbits as preimage trees (every node solved to its
full fiber, multiplicities certified) and audits the bound path by path,
stratifying passages by order when order-2 data is available.

Fibers over rational points are solved exactly; floating real points are
lifted to the dyadic rationals they denote and solved exactly as well, so
only genuinely complex nodes go through the floating elimination pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .config import Config, resolve
from .dynamics import Endomorphism
from .errors import (
    BudgetError,
    DegenerateEliminationError,
    InputError,
    SolverError,
)
from .geometry import (
    AlgebraicSet,
    InexactForm,
    Membership,
    ProjPoint,
    binary_roots,
    binary_roots_inexact,
    contains,
    solve_form_pair,
    solve_form_pair_inexact,
)
from .postcritical import ClassificationReport, classify

# a leaf must map back to the root under f^depth within this chordal residual
_PATH_RESIDUAL_TOL = 1e-8


# ---------------------------------------------------------------------------
# the bound
# ---------------------------------------------------------------------------


def ramification_bound(report: ClassificationReport, order: int) -> int:
    """The uniform passage bound l_1 + ... + l_order from a classification.

    Every contributing level must have closed: a bound read off an
    unfinished orbit computation would be meaningless, so missing or
    budget-exhausted levels are input errors rather than guesses.  Levels
    with an empty seed inventory contribute nothing — no passage of that
    order can occur, so its stabilization time never lengthens a path.
    """
    if order not in (1, 2):
        raise InputError(f"passage bounds exist for orders 1 and 2, not {order}")
    total = 0
    for m in range(1, order + 1):
        lvl = report.levels.get(m)
        if lvl is None:
            raise InputError(f"report has no order-{m} level")
        if lvl.finite_order is not True or lvl.omega is None:
            raise InputError(
                f"order-{m} orbit did not close; no stabilization time available"
            )
        if not lvl.C.is_empty:
            total += lvl.omega.l
    return total


# ---------------------------------------------------------------------------
# preimage trees
# ---------------------------------------------------------------------------


@dataclass
class PreimageNode:
    """One backward-orbit point; multiplicity is its local fiber degree."""

    point: ProjPoint
    multiplicity: int
    depth: int
    children: list["PreimageNode"] = field(default_factory=list)


@dataclass
class PreimageTree:
    """The full deg^(k*depth)-sheeted backward orbit of ``root.point``."""

    f: Endomorphism
    root: PreimageNode
    depth: int

    def paths(self) -> list[list[PreimageNode]]:
        """Every root-to-leaf node path, root first."""
        out: list[list[PreimageNode]] = []

        def walk(node: PreimageNode, acc: list[PreimageNode]) -> None:
            acc = acc + [node]
            if not node.children:
                out.append(acc)
            else:
                for child in node.children:
                    walk(child, acc)

        walk(self.root, [])
        return out

    def level(self, depth: int) -> list[PreimageNode]:
        """All nodes at the given depth (0 = the root itself)."""
        nodes = [self.root]
        for _ in range(depth):
            nodes = [c for n in nodes for c in n.children]
        return nodes

    def weighted_leaf_count(self) -> int:
        """Leaves counted with multiplicity, i.e. deg^(k*depth)."""
        total = 0
        for path in self.paths():
            weight = 1
            for node in path[1:]:
                weight *= node.multiplicity
            total += weight
        return total


def preimage_tree(
    f: Endomorphism,
    q: ProjPoint,
    depth: int | None = None,
    cfg: Config | None = None,
) -> PreimageTree:
    """Materialize every backward orbit of q down to the given depth.

    Each node's fiber carries exactly deg(f)^k preimages with multiplicity
    (asserted per node); a fiber the solver cannot fully separate is a hard
    failure naming the node, never a silently thin tree.  Depth defaults to
    the configured preimage depth and is capped — fibers multiply fast, and
    the cumulative node count is also checked against the point budget up
    front so the failure arrives before any solving starts.
    """
    cfg = resolve(cfg)
    if len(q.coords) != f.k + 1:
        raise InputError(
            f"root point has {len(q.coords)} coordinates; the map lives on P^{f.k}"
        )
    if depth is None:
        depth = cfg.preimage_depth_default
    if depth < 1:
        raise InputError("preimage depth must be at least 1")
    if depth > cfg.preimage_depth_cap:
        raise InputError(
            f"preimage depth {depth} exceeds the cap {cfg.preimage_depth_cap}"
        )
    per_node = f.degree**f.k
    total = sum(per_node**j for j in range(1, depth + 1))
    if total > cfg.budget_point_nodes:
        raise BudgetError(
            f"a depth-{depth} preimage tree holds {total} nodes, over the "
            f"budget of {cfg.budget_point_nodes}"
        )
    root = PreimageNode(point=q, multiplicity=1, depth=0)
    frontier = [root]
    for level in range(1, depth + 1):
        next_frontier: list[PreimageNode] = []
        for parent in frontier:
            try:
                fiber = _fiber(f, parent.point, cfg)
            except (DegenerateEliminationError, SolverError) as exc:
                raise SolverError(
                    f"could not certify the fiber over {parent.point} "
                    f"(depth {level}): {exc}"
                ) from exc
            for child_point, mult in fiber:
                child = PreimageNode(child_point, mult, level)
                parent.children.append(child)
                next_frontier.append(child)
            assert sum(c.multiplicity for c in parent.children) == per_node
        frontier = next_frontier
    return PreimageTree(f=f, root=root, depth=depth)


def _real_lift(p: ProjPoint) -> ProjPoint | None:
    """Exact dyadic lift of a floating point, or None if genuinely complex.

    Floats denote dyadic rationals exactly, so a real floating point can be
    re-read as the rational point it already is; imaginary dust below 1e-13
    of the largest coordinate is rounding noise and dropped.
    """
    coords = p.to_complex()
    scale = max(abs(c) for c in coords)
    if any(abs(c.imag) > 1e-13 * scale for c in coords):
        return None
    return ProjPoint.exact_point([Fraction(c.real) for c in coords])


def _fiber(
    f: Endomorphism, parent: ProjPoint, cfg: Config
) -> list[tuple[ProjPoint, int]]:
    """All preimages of one point with multiplicities summing to deg^k."""
    exact_parent = parent if parent.exact else _real_lift(parent)
    if exact_parent is not None:
        pairs = _fiber_exact(f, exact_parent, cfg)
    else:
        pairs = _fiber_inexact(f, parent, cfg)
    return _gate_fiber(f, parent, exact_parent, pairs, cfg)


def _fiber_exact(
    f: Endomorphism, y: ProjPoint, cfg: Config
) -> list[tuple[ProjPoint, int]]:
    if f.k == 1:
        y0, y1 = (Fraction(c) for c in y.coords)
        form = f.forms[0] * y1 - f.forms[1] * y0
        return binary_roots(form, cfg)
    # eliminate against the largest coordinate: the two minors
    # y_p * f_i - y_i * f_p vanish together exactly on the fiber
    mags = [abs(c) for c in y.coords]
    pivot = mags.index(max(mags))
    o1, o2 = (i for i in range(3) if i != pivot)
    yp = Fraction(y.coords[pivot])
    A = f.forms[o1] * yp - f.forms[pivot] * Fraction(y.coords[o1])
    B = f.forms[o2] * yp - f.forms[pivot] * Fraction(y.coords[o2])
    return solve_form_pair(A, B, cfg)


def _fiber_inexact(
    f: Endomorphism, y: ProjPoint, cfg: Config
) -> list[tuple[ProjPoint, int]]:
    coords = y.to_complex()
    if f.k == 1:
        d = f.degree
        coeffs = [
            complex(f.forms[0].terms.get((d - j, j), 0)) * coords[1]
            - complex(f.forms[1].terms.get((d - j, j), 0)) * coords[0]
            for j in range(d + 1)
        ]
        return binary_roots_inexact(coeffs, cfg)
    mags = [abs(c) for c in coords]
    pivot = mags.index(max(mags))
    o1, o2 = (i for i in range(3) if i != pivot)
    A = InexactForm.combination(coords[pivot], f.forms[o1], -coords[o1], f.forms[pivot])
    B = InexactForm.combination(coords[pivot], f.forms[o2], -coords[o2], f.forms[pivot])
    return solve_form_pair_inexact(A, B, cfg)


def _gate_fiber(
    f: Endomorphism,
    parent: ProjPoint,
    exact_parent: ProjPoint | None,
    pairs: list[tuple[ProjPoint, int]],
    cfg: Config,
) -> list[tuple[ProjPoint, int]]:
    """Verify f(child) = parent for every solution, snapping where exactness
    can be restored (floating children of a rational parent that verify
    exactly under the map)."""
    out: list[tuple[ProjPoint, int]] = []
    for x, mult in pairs:
        if x.exact:
            # minor solutions of a morphism are genuine fiber points
            assert exact_parent is not None and f(x) == exact_parent
            out.append((x, mult))
            continue
        if exact_parent is not None:
            snapped = x.snap_to_rational(cfg)
            if snapped is not None and f(snapped) == exact_parent:
                out.append((snapped, mult))
                continue
        residual = f(x).chordal(exact_parent if exact_parent is not None else parent)
        if residual > cfg.residual_tol:
            raise SolverError(
                f"fiber point {x} misses its parent {parent} by {residual:.2e}"
            )
        out.append((x, mult))
    return out


# ---------------------------------------------------------------------------
# the certificate
# ---------------------------------------------------------------------------


@dataclass
class PassageRecord:
    """One visit of a backward orbit to the critical set.

    ``level`` is the tree depth of the visiting node (1 = immediate
    preimage of the root); ``stratum`` is 1 for plain critical visits and 2
    for visits landing on the order-2 point inventory.
    """

    level: int
    point: ProjPoint
    stratum: int


@dataclass
class PathRecord:
    """Passage audit of one root-to-leaf backward orbit."""

    leaf: ProjPoint
    passages: list[PassageRecord]
    stratum_counts: dict[int, int]
    total: int
    undecided: bool
    forward_residual: float


@dataclass
class RamificationCertificate:
    """Outcome of checking every backward orbit against the passage bound.

    Verdicts: ``all-within-bound`` (every decided path obeys the bound),
    ``violation`` (some decided path exceeds it; see ``violations``),
    ``not-applicable`` (the root lies in the excluded locus, where the
    bound genuinely does not hold), or ``undecided`` (every membership
    query that mattered fell in the tolerance ambiguity band).
    """

    root: ProjPoint
    depth: int
    order: int
    bound: int
    stratum_bounds: dict[int, int]
    verdict: str
    paths: list[PathRecord] = field(default_factory=list)
    violations: list[PathRecord] = field(default_factory=list)
    max_passages: int | None = None
    diagnostics: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "root": _point_dict(self.root),
            "depth": self.depth,
            "order": self.order,
            "bound": self.bound,
            "stratum_bounds": {str(m): b for m, b in sorted(self.stratum_bounds.items())},
            "verdict": self.verdict,
            "max_passages": self.max_passages,
            "paths": [_path_dict(p) for p in self.paths],
            "violations": [_path_dict(p) for p in self.violations],
            "diagnostics": list(self.diagnostics),
        }


def _point_dict(p: ProjPoint) -> dict:
    if p.exact:
        coords = [str(c) for c in p.coords]
    else:
        coords = [[c.real, c.imag] for c in p.to_complex()]
    return {"coords": coords, "exact": p.exact}


def _path_dict(rec: PathRecord) -> dict:
    return {
        "leaf": _point_dict(rec.leaf),
        "total": rec.total,
        "stratum_counts": {str(m): c for m, c in sorted(rec.stratum_counts.items())},
        "undecided": rec.undecided,
        "forward_residual": rec.forward_residual,
        "passages": [
            {"level": p.level, "point": _point_dict(p.point), "stratum": p.stratum}
            for p in rec.passages
        ],
    }


def check_bounded_ramification(
    tree: PreimageTree,
    C1: AlgebraicSet,
    bound: int,
    stratum_bounds: dict[int, int] | None = None,
    order2_points: AlgebraicSet | None = None,
    excluded: AlgebraicSet | None = None,
    order: int | None = None,
    cfg: Config | None = None,
) -> RamificationCertificate:
    """Audit every backward orbit in the tree against the passage bound.

    Passages are counted on tree levels 1..depth — the leaf's own position
    counts, the root's does not, matching the bound's quantifier (the root
    is the point whose preimages are being taken, not one of them).  When
    ``order2_points`` is supplied, visits landing on that inventory count
    toward stratum 2 and each stratum is checked against its own bound as
    well as the total.

    ``excluded`` is the locus where the bound genuinely fails (the
    stabilized postcritical set below top order, the critical cycle locus
    at top order): a root inside it yields a not-applicable verdict rather
    than a vacuous pass.  Membership queries landing in the tolerance
    ambiguity band never guess — the affected path (or the whole
    certificate, for the root) is reported undecided instead.

    Every leaf is checked to map back to the root under the appropriate
    iterate; a miss is a solver failure, not a diagnostic.
    """
    cfg = resolve(cfg)
    if order is None:
        order = 2 if order2_points is not None else 1
    bounds = dict(stratum_bounds) if stratum_bounds else {}
    cert = RamificationCertificate(
        root=tree.root.point,
        depth=tree.depth,
        order=order,
        bound=bound,
        stratum_bounds=bounds,
        verdict="all-within-bound",
    )
    if excluded is not None and not excluded.is_empty:
        membership = contains(excluded, tree.root.point, cfg=cfg)
        if membership is Membership.IN:
            cert.verdict = "not-applicable"
            cert.diagnostics.append(
                "root lies in the excluded locus; the passage bound does not apply"
            )
            return cert
        if membership is Membership.UNDECIDED:
            cert.verdict = "undecided"
            cert.diagnostics.append(
                "root membership in the excluded locus is ambiguous at the "
                "working tolerance"
            )
            return cert
    for path in tree.paths():
        record = _audit_path(tree.f, path, C1, order2_points, cert, cfg)
        cert.paths.append(record)
        if record.undecided:
            continue
        over_total = record.total > bound
        over_stratum = any(
            count > bounds[m] for m, count in record.stratum_counts.items() if m in bounds
        )
        if over_total or over_stratum:
            cert.violations.append(record)
            cert.diagnostics.append(
                f"bound violated along the backward orbit ending at {record.leaf}: "
                f"{record.total} passages at "
                + ", ".join(f"{p.point} (depth {p.level})" for p in record.passages)
            )
    decided = [r for r in cert.paths if not r.undecided]
    cert.max_passages = max((r.total for r in decided), default=None)
    undecided_count = len(cert.paths) - len(decided)
    if undecided_count:
        cert.diagnostics.append(
            f"{undecided_count} of {len(cert.paths)} paths undecided at the "
            "working tolerance and excluded from the verdict"
        )
    if cert.violations:
        cert.verdict = "violation"
    elif not decided:
        cert.verdict = "undecided"
    return cert


def _audit_path(
    f: Endomorphism,
    path: list[PreimageNode],
    C1: AlgebraicSet,
    order2_points: AlgebraicSet | None,
    cert: RamificationCertificate,
    cfg: Config,
) -> PathRecord:
    passages: list[PassageRecord] = []
    undecided = False
    for node in path[1:]:
        m1 = contains(C1, node.point, cfg=cfg)
        if m1 is Membership.UNDECIDED:
            undecided = True
            cert.diagnostics.append(
                f"critical membership of {node.point} (depth {node.depth}) is "
                "ambiguous at the working tolerance"
            )
            continue
        if m1 is Membership.OUT:
            continue
        stratum = 1
        if order2_points is not None and not order2_points.is_empty:
            m2 = contains(order2_points, node.point, cfg=cfg)
            if m2 is Membership.UNDECIDED:
                undecided = True
                cert.diagnostics.append(
                    f"order-2 membership of {node.point} (depth {node.depth}) "
                    "is ambiguous at the working tolerance"
                )
            elif m2 is Membership.IN:
                stratum = 2
        passages.append(PassageRecord(node.depth, node.point, stratum))
    counts: dict[int, int] = {}
    for p in passages:
        counts[p.stratum] = counts.get(p.stratum, 0) + 1
    leaf = path[-1].point
    residual = _forward_residual(f, leaf, len(path) - 1, path[0].point)
    if residual > _PATH_RESIDUAL_TOL:
        raise SolverError(
            f"leaf {leaf} does not map back to the root under f^{len(path) - 1} "
            f"(residual {residual:.2e})"
        )
    return PathRecord(
        leaf=leaf,
        passages=passages,
        stratum_counts=counts,
        total=len(passages),
        undecided=undecided,
        forward_residual=residual,
    )


def _forward_residual(
    f: Endomorphism, leaf: ProjPoint, steps: int, root: ProjPoint
) -> float:
    x = leaf
    for _ in range(steps):
        x = f(x)
    return x.chordal(root)


# ---------------------------------------------------------------------------
# end-to-end certification
# ---------------------------------------------------------------------------


def certify_ramification(
    f: Endomorphism,
    q: ProjPoint,
    depth: int | None = None,
    report: ClassificationReport | None = None,
    cfg: Config | None = None,
) -> RamificationCertificate:
    """End-to-end bounded-ramification certificate for one root point.

    Classifies the map (or reuses a supplied report), derives the passage
    bound and the exclusion locus at the deepest cleanly certified order,
    materializes the preimage tree, and audits every backward orbit.

    The exclusion locus depends on the order in play.  Below top order the
    bound needs the root off the whole stabilized postcritical set; at top
    order it only needs the root off the critical cycle locus — for a
    surface map with order-2 data that locus is the critical cycle curves
    together with the critical point cycles, and a root in the stabilized
    order-2 set but off those cycles still gets a certificate (flagged as
    the order-2 case in the diagnostics).
    """
    cfg = resolve(cfg)
    if report is None:
        report = classify(f, order=min(f.k, 2), cfg=cfg)
    lvl1 = report.level(1)
    if lvl1 is None or lvl1.finite_order is not True or lvl1.omega is None:
        raise BudgetError(
            "the order-1 postcritical orbit did not close; no passage bound "
            "is available"
        )
    notes: list[str] = []
    clean1 = not lvl1.omega.diagnostics
    lvl2 = report.level(2)
    clean2 = (
        lvl2 is not None
        and lvl2.finite_order is True
        and lvl2.omega is not None
        and not lvl2.omega.diagnostics
    )
    if f.k == 1:
        order_used = 1
        if clean1:
            excluded = lvl1.omega.F
        else:
            excluded = lvl1.omega.E
            notes.append(
                "order-1 cycle classification carried diagnostics; excluding "
                "the whole stabilized postcritical set to stay conservative"
            )
        order2_points = None
        bounds = {1: lvl1.omega.l}
    elif clean1 and clean2:
        order_used = 2
        # the critical cycle locus in full: cycle curves plus cycle points
        excluded = lvl1.omega.F.union(lvl2.omega.F)
        order2_points = None if lvl2.C.is_empty else lvl2.C
        bounds = {1: lvl1.omega.l}
        if not lvl2.C.is_empty:
            bounds[2] = lvl2.omega.l
    else:
        order_used = 1
        excluded = lvl1.omega.E
        order2_points = None
        bounds = {1: lvl1.omega.l}
        notes.append(
            "order-2 data unavailable or uncertified; using the order-1 "
            "exclusion locus and bound"
        )
    bound = ramification_bound(report, order_used)
    tree = preimage_tree(f, q, depth, cfg)
    cert = check_bounded_ramification(
        tree,
        lvl1.C,
        bound,
        stratum_bounds=bounds,
        order2_points=order2_points,
        excluded=excluded,
        order=order_used,
        cfg=cfg,
    )
    cert.diagnostics.extend(notes)
    if (
        order_used == 2
        and cert.verdict not in ("not-applicable", "undecided")
        and contains(lvl2.omega.E, q, cfg=cfg) is Membership.IN
    ):
        cert.diagnostics.append(
            "root lies in the stabilized order-2 locus but on no critical "
            "cycle; the passage bound still applies (order-2 case)"
        )
    return cert
