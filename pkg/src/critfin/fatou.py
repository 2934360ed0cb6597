"""Empirical orbit classification: basin sampling, escape rates, renders.

Everything here is numerical evidence, not certification: orbits are iterated
in adaptive charts (the lift is renormalized to unit max-norm every step, so
the working chart follows the largest coordinate), and each orbit is scored
against a ``TargetSet`` of certified periodic cycles and stabilized
postcritical components.  An orbit that sits within the convergence tolerance
of a cycle for a full window of consecutive steps is ``converged``; one whose
late iterates approach a postcritical component is ``accumulates-near``;
everything else is ``undecided``.  Slice renders classify a whole pixel grid
of start points at once and can be written out as a PPM image with a JSON
legend sidecar.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import Config, resolve
from .dynamics import (
    UNDECIDED,
    Endomorphism,
    find_periodic,
)
from .errors import InputError
from .geometry import Component, HomogPoly, ProjPoint
from .postcritical import ClassificationReport, classify

CONVERGED = "converged"
ACCUMULATES = "accumulates-near"

# image label conventions: 0 undecided, 1..m the target cycles, m+1 escape
UNDECIDED_LABEL = 0

_CYCLE_COLORS = (
    (198, 57, 70),
    (69, 123, 157),
    (244, 162, 97),
    (42, 157, 143),
    (231, 111, 81),
    (131, 56, 236),
    (255, 183, 3),
    (0, 119, 182),
    (214, 40, 40),
    (6, 214, 160),
    (239, 71, 111),
    (17, 138, 178),
)


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------


@dataclass
class TargetSet:
    """What sampled orbits are scored against.

    ``cycles[i]`` lists the points of one periodic cycle (the cycle id is the
    index ``i``), ``classifications[i]`` is its certified multiplier class,
    and ``components`` collects the stabilized postcritical pieces orbits may
    accumulate on.
    """

    cycles: list[list[ProjPoint]] = field(default_factory=list)
    classifications: list[str] = field(default_factory=list)
    components: list[Component] = field(default_factory=list)

    def superattracting(self, i: int) -> bool:
        return self.classifications[i].startswith("superattracting")


def _known_component(comp: Component, seen: list[Component], tol: float) -> bool:
    for other in seen:
        if comp.kind != other.kind:
            continue
        if comp.kind == "curve":
            if comp.poly == other.poly:
                return True
        elif comp.point.is_close(other.point, tol):
            return True
    return False


def build_targets(
    f: Endomorphism,
    report: ClassificationReport | None = None,
    n_max: int = 2,
    cfg: Config | None = None,
) -> TargetSet:
    """Certified cycles up to period ``n_max`` plus the stabilized components.

    When no classification report is supplied one is computed (up to the
    order the dimension supports).  Periodic points coming back from the
    solver are grouped into cycles by following the map around the orbit;
    the component list is the union of the stabilized sets across computed
    orders, deduplicated.
    """
    cfg = resolve(cfg)
    if report is None:
        report = classify(f, order=min(f.k, 2), cfg=cfg)

    components: list[Component] = []
    for order in sorted(report.levels):
        omega = report.levels[order].omega
        if omega is None:
            continue
        for comp in omega.E:
            if not _known_component(comp, components, cfg.cluster_tol):
                components.append(comp)

    cycles: list[list[ProjPoint]] = []
    classifications: list[str] = []
    claimed: list[ProjPoint] = []
    for pp in find_periodic(f, n_max, cfg):
        if any(pp.point.is_close(q, cfg.cluster_tol) for q in claimed):
            continue
        orbit = [pp.point]
        for _ in range(pp.period - 1):
            orbit.append(f(orbit[-1]))
        claimed.extend(orbit)
        cycles.append(orbit)
        classifications.append(pp.classification)
    return TargetSet(cycles=cycles, classifications=classifications, components=components)


# ---------------------------------------------------------------------------
# orbit sampling
# ---------------------------------------------------------------------------


@dataclass
class OrbitVerdict:
    """Outcome of sampling one forward orbit against certified targets."""

    start: ProjPoint
    outcome: str  # "converged" | "accumulates-near" | "undecided"
    cycle: int | None = None  # index into the target cycles when converged
    component: Component | None = None  # the component being approached
    iterations: int = 0  # step of confirmation, or the budget spent
    distance: float = math.inf  # final distance to the named target
    diagnostics: str = ""


def _form_terms(forms: Sequence[HomogPoly]) -> list[list[tuple[tuple[int, ...], complex]]]:
    # sorted term order keeps float summation (and hence rendered bytes)
    # identical from run to run
    return [[(e, complex(c)) for e, c in sorted(f.terms.items())] for f in forms]


def _eval_terms(terms: list[tuple[tuple[int, ...], complex]], coords: np.ndarray) -> np.ndarray:
    acc = np.zeros(coords.shape[1], dtype=complex)
    for exps, c in terms:
        t = np.full(coords.shape[1], c, dtype=complex)
        for var, e in enumerate(exps):
            if e == 1:
                t = t * coords[var]
            elif e:
                t = t * coords[var] ** e
        acc += t
    return acc


def _eval_forms(all_terms: list[list], coords: np.ndarray) -> np.ndarray:
    out = np.empty((len(all_terms), coords.shape[1]), dtype=complex)
    for i, terms in enumerate(all_terms):
        out[i] = _eval_terms(terms, coords)
    return out


def _cycle_anchors(cycles: list[list[ProjPoint]]) -> list[tuple[int, int, np.ndarray]]:
    """Each cycle member as (cycle id, chart index, chart-normalized lift)."""
    anchors = []
    for ci, cycle in enumerate(cycles):
        for p in cycle:
            v = np.asarray(p.to_complex(), dtype=complex)
            chart = int(np.argmax(np.abs(v)))
            anchors.append((ci, chart, v / v[chart]))
    return anchors


def _cycle_distances(coords: np.ndarray, anchors: list, n_cycles: int) -> np.ndarray:
    """Distance to each cycle: min over members of chart max-norm distance.

    The member's own chart anchors the comparison; an orbit point with a
    vanishing coordinate there is simply far away in that chart.
    """
    out = np.full((coords.shape[1], n_cycles), np.inf)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for ci, chart, anchor in anchors:
            ratios = coords / coords[chart]
            diff = np.abs(ratios - anchor[:, None]).max(axis=0)
            diff = np.where(np.isfinite(diff), diff, np.inf)
            np.minimum(out[:, ci], diff, out=out[:, ci])
    return out


def _curve_residual_batch(poly: HomogPoly, coords: np.ndarray) -> np.ndarray:
    # same normalization as geometry.curve_residual; the kernel keeps every
    # lift at unit max-norm, so no per-point rescaling is needed here
    terms = [(e, complex(c)) for e, c in sorted(poly.terms.items())]
    norm = float(sum(abs(complex(c)) for _, c in terms))
    return np.abs(_eval_terms(terms, coords)) / norm


def _point_chordal_batch(coords: np.ndarray, q: ProjPoint) -> np.ndarray:
    qv = np.asarray(q.to_complex(), dtype=complex)
    wedge = np.zeros(coords.shape[1])
    for i in range(len(qv)):
        for j in range(i + 1, len(qv)):
            wedge += np.abs(coords[i] * qv[j] - coords[j] * qv[i]) ** 2
    norms = np.sqrt((np.abs(coords) ** 2).sum(axis=0)) * math.sqrt(float((np.abs(qv) ** 2).sum()))
    return np.sqrt(wedge) / norms


def _component_distances(coords: np.ndarray, comps: list[Component]) -> np.ndarray:
    out = np.empty((coords.shape[1], len(comps)))
    for j, comp in enumerate(comps):
        if comp.kind == "curve":
            out[:, j] = _curve_residual_batch(comp.poly, coords)
        else:
            out[:, j] = _point_chordal_batch(coords, comp.point)
    return out


def _orbit_kernel(
    f: Endomorphism,
    coords: np.ndarray,
    targets: TargetSet,
    max_iter: int,
    cfg: Config,
) -> tuple[np.ndarray, ...]:
    """Iterate every column of ``coords`` at once and classify each orbit.

    Returns per-column arrays: converged cycle index (-1 if none), the step
    of confirmation, the confirming distance, the step at which the lift
    degenerated (0 if never), the nearest-component index over the tail
    window (-1 if unmeasured), and that best tail distance.
    """
    n = coords.shape[1]
    terms = _form_terms(f.forms)
    anchors = _cycle_anchors(targets.cycles)
    n_cycles = len(targets.cycles)
    comps = targets.components

    cycle_idx = np.full(n, -1, dtype=np.int64)
    conv_iter = np.zeros(n, dtype=np.int64)
    conv_dist = np.full(n, np.inf)
    overflow = np.zeros(n, dtype=np.int64)
    comp_idx = np.full(n, -1, dtype=np.int64)
    comp_dist = np.full(n, np.inf)
    streak = np.zeros((n, max(n_cycles, 1)), dtype=np.int64)

    mags = np.abs(coords).max(axis=0)
    coords = coords / mags
    active = np.arange(n)
    tail_start = max_iter - cfg.convergence_window

    for it in range(1, max_iter + 1):
        if not active.size:
            break
        img = _eval_forms(terms, coords[:, active])
        m = np.abs(img).max(axis=0)
        good = np.isfinite(m) & (m > 0.0)
        if not good.all():
            overflow[active[~good]] = it
            img[:, ~good] = coords[:, active][:, ~good]  # freeze the last finite lift
            m = np.where(good, m, 1.0)
        img = img / m
        coords[:, active] = img

        if n_cycles:
            dist = _cycle_distances(img, anchors, n_cycles)
            hit = dist < cfg.convergence_tol
            st = np.where(hit, streak[active] + 1, 0)
            streak[active] = st
            done = st >= cfg.convergence_window
            done_rows = done.any(axis=1)
            if done_rows.any():
                rows = active[done_rows]
                which = done[done_rows].argmax(axis=1)
                cycle_idx[rows] = which
                conv_iter[rows] = it
                conv_dist[rows] = dist[np.nonzero(done_rows)[0], which]

        active = active[(cycle_idx[active] < 0) & (overflow[active] == 0)]
        if comps and it > tail_start and active.size:
            d = _component_distances(coords[:, active], comps)
            best = d.min(axis=1)
            better = best < comp_dist[active]
            comp_dist[active] = np.where(better, best, comp_dist[active])
            comp_idx[active] = np.where(better, d.argmin(axis=1), comp_idx[active])

    return cycle_idx, conv_iter, conv_dist, overflow, comp_idx, comp_dist


def _verdicts(
    starts: Sequence[ProjPoint],
    kernel_out: tuple[np.ndarray, ...],
    targets: TargetSet,
    max_iter: int,
    cfg: Config,
) -> list[OrbitVerdict]:
    cycle_idx, conv_iter, conv_dist, overflow, comp_idx, comp_dist = kernel_out
    out = []
    for i, start in enumerate(starts):
        if cycle_idx[i] >= 0:
            out.append(
                OrbitVerdict(
                    start=start,
                    outcome=CONVERGED,
                    cycle=int(cycle_idx[i]),
                    iterations=int(conv_iter[i]),
                    distance=float(conv_dist[i]),
                )
            )
        elif overflow[i]:
            out.append(
                OrbitVerdict(
                    start=start,
                    outcome=UNDECIDED,
                    iterations=max_iter,
                    diagnostics=(
                        f"lift degenerated at iteration {int(overflow[i])}"
                        " despite chart renormalization"
                    ),
                )
            )
        elif comp_idx[i] >= 0 and comp_dist[i] < cfg.accumulation_tol:
            out.append(
                OrbitVerdict(
                    start=start,
                    outcome=ACCUMULATES,
                    component=targets.components[int(comp_idx[i])],
                    iterations=max_iter,
                    distance=float(comp_dist[i]),
                )
            )
        else:
            out.append(
                OrbitVerdict(
                    start=start,
                    outcome=UNDECIDED,
                    iterations=max_iter,
                    distance=float(comp_dist[i]),
                )
            )
    return out


def sample_orbits(
    f: Endomorphism,
    starts: Sequence[ProjPoint],
    targets: TargetSet,
    max_iter: int | None = None,
    cfg: Config | None = None,
) -> list[OrbitVerdict]:
    """Classify many forward orbits in one vectorized pass.

    All orbits advance in lockstep on a shared coordinate array; a column
    retires as soon as its verdict is known.  Convergence means the distance
    to one cycle stayed below the convergence tolerance for a full window of
    consecutive steps; orbits that never confirm are checked over their last
    window of iterates against the postcritical components and reported as
    accumulating when they come within the accumulation tolerance.
    """
    cfg = resolve(cfg)
    max_iter = cfg.max_orbit_iters if max_iter is None else max_iter
    if max_iter < 1:
        raise InputError("orbit sampling needs at least one iteration")
    starts = list(starts)
    for p in starts:
        if p.dim != f.k:
            raise InputError(f"start point {p} does not live in the map's space P^{f.k}")
    if not starts:
        return []
    coords = np.array([p.to_complex() for p in starts], dtype=complex).T
    kernel_out = _orbit_kernel(f, coords, targets, max_iter, cfg)
    return _verdicts(starts, kernel_out, targets, max_iter, cfg)


def sample_orbit(
    f: Endomorphism,
    x: ProjPoint,
    targets: TargetSet,
    max_iter: int | None = None,
    cfg: Config | None = None,
) -> OrbitVerdict:
    """Classify a single forward orbit; see ``sample_orbits``."""
    return sample_orbits(f, [x], targets, max_iter, cfg)[0]


# ---------------------------------------------------------------------------
# escape rate
# ---------------------------------------------------------------------------


def escape_rate(
    f: Endomorphism,
    x: ProjPoint | Sequence[complex],
    n: int,
    cfg: Config | None = None,
) -> float:
    """Green-function value of a lift of x after n averaging steps.

    Accumulates d^-(i+1) * log||F(x_i)|| over max-norm-renormalized iterates;
    the partial sum equals d^-n * log||F^n(lift)|| exactly.  The value is an
    invariant of the lift, shifting by log|lambda| under lift rescaling, so a
    ``ProjPoint`` contributes its stored canonical representative (primitive
    integer coordinates for exact points, largest coordinate pinned to 1 for
    floating ones) and the result depends only on the point.  Pass an
    explicit coordinate sequence to evaluate a specific lift instead.
    """
    resolve(cfg)
    if n < 1:
        raise InputError("escape rate needs n >= 1")
    if isinstance(x, ProjPoint):
        coords = x.to_complex()
    else:
        coords = tuple(complex(c) for c in x)
        if all(c == 0 for c in coords):
            raise InputError("a lift needs a nonzero coordinate")
    if len(coords) != f.k + 1:
        raise InputError(f"the lift must have {f.k + 1} coordinates")

    total = 0.0
    d = float(f.degree)
    for i in range(n):
        img = [complex(form.evaluate(coords)) for form in f.forms]
        m = max(abs(c) for c in img)
        if m == 0.0 or not math.isfinite(m):
            break  # the lift underflowed onto a totally invariant point; the
            # remaining contributions vanish
        total += math.log(m) / d ** (i + 1)
        coords = tuple(c / m for c in img)
    return total


# ---------------------------------------------------------------------------
# slices and rendering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SliceSpec:
    """An affine 2-plane of start points: base + u*dir_u + v*dir_v in a chart.

    ``base`` and the direction vectors hold the affine coordinates of the
    chart whose homogeneous coordinate ``chart`` is pinned to 1.  The window
    is the square of side ``extent`` centered at ``center`` in the (u, v)
    parameters; pixels sample the window at their centers, row-major with v
    decreasing down the image.  On the line the chart is one complex
    coordinate, so a real 2-plane needs directions independent over the
    reals only (the default pair 1, 1j sweeps the full complex chart).
    """

    base: tuple[complex, ...]
    dir_u: tuple[complex, ...]
    dir_v: tuple[complex, ...]
    chart: int
    center: tuple[float, float] = (0.0, 0.0)
    extent: float = 3.0
    width: int = 128
    height: int = 128

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(complex(c) for c in self.base))
        object.__setattr__(self, "dir_u", tuple(complex(c) for c in self.dir_u))
        object.__setattr__(self, "dir_v", tuple(complex(c) for c in self.dir_v))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        k = len(self.base)
        if k < 1 or len(self.dir_u) != k or len(self.dir_v) != k:
            raise InputError("base point and direction vectors need matching lengths")
        if not 0 <= self.chart <= k:
            raise InputError(f"chart index must lie in 0..{k}")
        if self.width < 1 or self.height < 1:
            raise InputError("resolution must be at least 1x1")
        if not self.extent > 0:
            raise InputError("window extent must be positive")
        # independence over the reals: Cauchy-Schwarz must be strict for the
        # real inner product Re<u, v> on C^k viewed as R^(2k)
        uu = sum(abs(c) ** 2 for c in self.dir_u)
        vv = sum(abs(c) ** 2 for c in self.dir_v)
        uv = sum((a.conjugate() * b).real for a, b in zip(self.dir_u, self.dir_v))
        if uu * vv - uv * uv <= 1e-12 * uu * vv or uu == 0 or vv == 0:
            raise InputError("direction vectors must be linearly independent")

    @classmethod
    def default(
        cls,
        k: int,
        width: int = 128,
        height: int = 128,
        extent: float = 3.0,
        center: tuple[float, float] = (0.0, 0.0),
    ) -> "SliceSpec":
        """The standard affine chart around the origin.

        On the plane: the real (x, y) window of the chart with last
        coordinate 1.  On the line: the complex chart coordinate itself.
        """
        if k == 1:
            return cls((0,), (1,), (1j,), 1, center, extent, width, height)
        if k == 2:
            return cls((0, 0), (1, 0), (0, 1), 2, center, extent, width, height)
        raise InputError("slices are defined for maps of P^1 and P^2")

    def params(self, col: int, row: int) -> tuple[float, float]:
        """(u, v) at the center of pixel (col, row); row 0 is the top."""
        u = self.center[0] - self.extent / 2 + (col + 0.5) * self.extent / self.width
        v = self.center[1] + self.extent / 2 - (row + 0.5) * self.extent / self.height
        return u, v

    def pixel_at(self, u: float, v: float) -> tuple[int, int]:
        """(col, row) of the pixel whose window cell contains (u, v)."""
        col = int((u - self.center[0] + self.extent / 2) / self.extent * self.width)
        row = int((self.center[1] + self.extent / 2 - v) / self.extent * self.height)
        return min(max(col, 0), self.width - 1), min(max(row, 0), self.height - 1)

    def point(self, col: int, row: int) -> ProjPoint:
        """The start point sampled by pixel (col, row)."""
        u, v = self.params(col, row)
        affine = [b + u * du + v * dv for b, du, dv in zip(self.base, self.dir_u, self.dir_v)]
        affine.insert(self.chart, 1.0 + 0.0j)
        return ProjPoint.inexact(affine)

    def grid(self) -> np.ndarray:
        """All pixel-center lifts as one (k+1, width*height) array, row-major."""
        us = self.center[0] - self.extent / 2 + (np.arange(self.width) + 0.5) * (
            self.extent / self.width
        )
        vs = self.center[1] + self.extent / 2 - (np.arange(self.height) + 0.5) * (
            self.extent / self.height
        )
        vgrid, ugrid = np.meshgrid(vs, us, indexing="ij")
        u = ugrid.ravel()
        v = vgrid.ravel()
        rows = [b + u * du + v * dv for b, du, dv in zip(self.base, self.dir_u, self.dir_v)]
        rows.insert(self.chart, np.ones(u.size, dtype=complex))
        return np.array(rows, dtype=complex)


@dataclass
class BasinImage:
    """A classified pixel grid plus the legend explaining its labels.

    ``labels[row, col]`` uses 0 for undecided, 1..m for the target cycles in
    order, and m+1 for escape toward the postcritical components;
    ``iterations`` records the confirmation step (converged pixels) or the
    full budget.  ``summary`` gives the fraction of pixels per legend entry.
    """

    width: int
    height: int
    labels: np.ndarray
    iterations: np.ndarray
    legend: dict[int, str]
    summary: dict[str, float]

    def label_color(self, label: int) -> tuple[int, int, int]:
        """Fixed palette: black undecided, white escape, colors per cycle."""
        if label == UNDECIDED_LABEL:
            return (0, 0, 0)
        if label == len(self.legend) - 1:  # escape carries the last label
            return (255, 255, 255)
        return _CYCLE_COLORS[(label - 1) % len(_CYCLE_COLORS)]


def _legend_for(targets: TargetSet) -> dict[int, str]:
    legend = {UNDECIDED_LABEL: "undecided"}
    for i, cycle in enumerate(targets.cycles):
        legend[i + 1] = (
            f"cycle {i} (period {len(cycle)}, {targets.classifications[i]}): {cycle[0]}"
        )
    legend[len(targets.cycles) + 1] = "escape-to-E"
    return legend


def render_slice(
    f: Endomorphism,
    spec: SliceSpec,
    targets: TargetSet,
    max_iter: int | None = None,
    cfg: Config | None = None,
) -> BasinImage:
    """Classify every pixel of a slice by sampling its center's orbit.

    Each pixel runs the same classification as ``sample_orbit`` on its slice
    point; the result is deterministic for a fixed spec and configuration.
    """
    cfg = resolve(cfg)
    max_iter = cfg.max_orbit_iters if max_iter is None else max_iter
    if max_iter < 1:
        raise InputError("rendering needs at least one iteration")
    if len(spec.base) != f.k:
        raise InputError(f"the slice lives in P^{len(spec.base)}, the map on P^{f.k}")

    coords = spec.grid()
    cycle_idx, conv_iter, _, overflow, comp_idx, comp_dist = _orbit_kernel(
        f, coords, targets, max_iter, cfg
    )

    m = len(targets.cycles)
    labels = np.zeros(coords.shape[1], dtype=np.int16)
    converged = cycle_idx >= 0
    labels[converged] = (cycle_idx[converged] + 1).astype(np.int16)
    escaped = (
        ~converged & (overflow == 0) & (comp_idx >= 0) & (comp_dist < cfg.accumulation_tol)
    )
    labels[escaped] = m + 1
    iterations = np.where(converged, conv_iter, max_iter).astype(np.int32)

    legend = _legend_for(targets)
    n_pix = float(coords.shape[1])
    summary = {
        name: float(np.count_nonzero(labels == label)) / n_pix
        for label, name in sorted(legend.items())
    }
    return BasinImage(
        width=spec.width,
        height=spec.height,
        labels=labels.reshape(spec.height, spec.width),
        iterations=iterations.reshape(spec.height, spec.width),
        legend=legend,
        summary=summary,
    )


def write_ppm(image: BasinImage, path) -> None:
    """Binary P6 image, 8-bit RGB, row-major, no comment lines."""
    lut = np.zeros((len(image.legend), 3), dtype=np.uint8)
    for label in image.legend:
        lut[label] = image.label_color(label)
    rgb = lut[image.labels]
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(rgb.tobytes())


def write_legend(image: BasinImage, path) -> None:
    """JSON sidecar: label descriptions, palette colors, label fractions."""
    payload = {
        "legend": {str(label): name for label, name in image.legend.items()},
        "colors": {str(label): list(image.label_color(label)) for label in image.legend},
        "summary": image.summary,
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
