"""Numerical continuity and univalence diagnostics for evolution families.

Nothing here proves continuity — numerics can only falsify it or pile up
consistency evidence.  The module therefore reports *moduli*: for a ladder
of shrinking parameter gaps ``delta``, the largest locally-uniform distance
observed between transition maps whose parameters differ by at most
``delta``.  A family consistent with continuity shows moduli that decay with
``delta`` (the heuristic verdict asks for a factor <= 0.75 per halving); a
genuinely discontinuous family shows a floor that refinement cannot shake.

"Locally uniform" is discretized as the max over a fixed ladder of circles
(|z| = 0.25, 0.5, 0.75, 0.9 by default) — by the maximum principle the sup
over a closed subdisk is attained on its boundary circle, so sampling
circles loses only angular resolution, not correctness.

The univalence side implements a constructive certificate: conjugate the
family to fix the origin, then subdivide the parameter interval until each
step's origin-derivative ratio exceeds a threshold sigma, at which point
each step map — and hence the whole composition — is injective on the disk
of radius ``landau_radius(sigma)``.  Its falsification counterpart samples
point pairs looking for collisions.

Randomized bound audits drive the sharp closed-form estimates of
:mod:`evofam.diskmap` against thousands of sampled maps; any violation
beyond slack 1e-12 indicates an implementation bug, and the offending map
and point are reported verbatim.

Scans honor the ``EVOFAM_THREADS`` environment variable (default: serial);
every diagnostic is pure and leaves the family untouched.
"""

from __future__ import annotations

import csv
import math
import os
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .diskmap import (BoundLedger, Compose, DiskMap, DiskRegion, Identity,
                      Mobius, center_bound, fixed_origin_growth,
                      identity_deviation, landau_radius, lipschitz_bound,
                      sample_map, schwarz_pick_upper)
from .errors import CertificationFailure, DomainError, EvofamError
from .evolution import (EvolutionFamily, ReverseFamily,
                        conjugate_to_fix_origin, time_value)

__all__ = [
    "EF2_TOL",
    "EF3_TOL",
    "EF3_TOL_ITERATIVE",
    "DECAY_RATIO",
    "HYPERBOLIC_MARGIN",
    "GridSpec",
    "ContinuityModulus",
    "UnivalenceCertificate",
    "SampleTestResult",
    "BoundAuditReport",
    "DiagnosticsReport",
    "quasi_disk_points",
    "lu_distance",
    "ef1_score",
    "ef2_residual",
    "semigroup_residual",
    "hyperbolic_bound_sup",
    "right_parameter_modulus",
    "left_parameter_modulus",
    "joint_continuity_modulus",
    "diagonal_limits",
    "finest_gap",
    "modulus_decays",
    "modulus_worst_ratio",
    "univalence_certificate",
    "univalence_sample_test",
    "bound_audit",
    "run_verification",
    "report_to_dict",
    "render_json",
    "write_modulus_csv",
]

# Tolerances and knobs.  EF2/EF3 thresholds apply to closed-form families;
# iteratively inverted families get the looser EF3 bound since every map
# evaluation carries the Newton tolerance.
EF2_TOL = 1e-12
EF3_TOL = 1e-10
EF3_TOL_ITERATIVE = 1e-8
NONCONSTANCY_TOL = 1e-14
HYPERBOLIC_MARGIN = 1e-6
DECAY_RATIO = 0.75
DECAY_FLOOR = 1e-15
COLLISION_TOL = 1e-10
SEPARATION_TOL = 1e-6

_BASE_SAMPLES = 65          # one-parameter scan resolution (continuum)
_JOINT_SAMPLES = 13         # joint-scan base grid (continuum)
_JOINT_SAMPLES_LATTICE = 9


@dataclass(frozen=True, slots=True)
class GridSpec:
    """Sampling resolution for family diagnostics."""

    n_time: int = 9
    radii: tuple[float, ...] = (0.25, 0.5, 0.75, 0.9)
    n_angles: int = 64

    def __post_init__(self) -> None:
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if self.n_time < 2:
            raise DomainError(f"n_time must be >= 2, got {self.n_time}")
        if self.n_angles < 8:
            raise DomainError(f"n_angles must be >= 8, got {self.n_angles}")
        if not self.radii:
            raise DomainError("at least one radius required")
        prev = 0.0
        for r in self.radii:
            if not (prev < r < 1.0):
                raise DomainError(
                    f"radii must be strictly increasing inside (0, 1), got {self.radii}")
            prev = r


def _pmap(fn: Callable, items: Sequence):
    """Map preserving order, threaded when EVOFAM_THREADS asks for it."""
    items = list(items)
    try:
        workers = int(os.environ.get("EVOFAM_THREADS", "1"))
    except ValueError:
        workers = 1
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Sampling primitives
# ---------------------------------------------------------------------------

_PLASTIC = 1.32471795724474602596  # real root of x^3 = x + 1


def quasi_disk_points(n: int, radius: float, seed: int = 0) -> np.ndarray:
    """Low-discrepancy points in the closed disk of the given radius.

    A rank-2 additive recurrence (steps 1/c and 1/c^2 for the plastic
    constant c) fills the unit square evenly; the square maps onto the disk
    area-uniformly via (u, v) -> radius * sqrt(u) * e^{2 pi i v}.  The seed
    only shifts the starting phases, through a stdlib RNG for stability.
    """
    if n < 1:
        raise DomainError("need at least one sample point")
    radius = float(radius)
    if not (0.0 < radius < 1.0):
        raise DomainError(f"sampling radius must lie in (0, 1), got {radius}")
    rng = random.Random(seed)
    u0, v0 = rng.random(), rng.random()
    k = np.arange(1, n + 1, dtype=float)
    u = np.mod(u0 + k / _PLASTIC, 1.0)
    v = np.mod(v0 + k / (_PLASTIC * _PLASTIC), 1.0)
    return radius * np.sqrt(u) * np.exp(2j * math.pi * v)


def lu_distance(f: DiskMap, g: DiskMap, region: Union[DiskRegion, float],
                n_angles: int = 64) -> float:
    """Locally uniform distance: max of |f - g| over the circle |z| = r.

    Equals the sup over the closed subdisk up to angular discretization, by
    the maximum principle applied to the holomorphic difference.
    """
    if not isinstance(region, DiskRegion):
        region = DiskRegion(float(region))
    if region.r >= 1.0:
        raise DomainError("locally uniform distance needs a radius < 1")
    if n_angles < 8:
        raise DomainError(f"n_angles must be >= 8, got {n_angles}")
    ring = region.r * np.exp(2j * math.pi * np.arange(n_angles) / n_angles)
    return float(np.max(np.abs(f.eval_many(ring) - g.eval_many(ring))))


# ---------------------------------------------------------------------------
# Family residuals
# ---------------------------------------------------------------------------

def ef1_score(family: EvolutionFamily, grid: Optional[GridSpec] = None) -> float:
    """Non-constancy score: the weakest transition map's variation.

    For each sampled pair (s, t) with s < t, take the larger of the origin
    derivative modulus and the value spread over eight disk points; return
    the minimum over pairs.  A score at numerical zero means some transition
    map is (indistinguishable from) constant.  Audited, not enforced:
    non-constancy is only semidecidable numerically.
    """
    grid = grid or GridSpec()
    times = family.sample_times(grid.n_time)
    probe = 0.6 * np.exp(2j * math.pi * np.arange(8) / 8)
    score = math.inf
    for i, s in enumerate(times):
        for t in times[i + 1:]:
            m = family.at(s, t)
            variation = max(abs(m.deriv(0j)),
                            float(np.max(np.abs(m.eval_many(probe) - m.eval(probe[0])))))
            score = min(score, variation)
    return score


def ef2_residual(family: EvolutionFamily, grid: Optional[GridSpec] = None) -> float:
    """Identity-on-the-diagonal residual: worst distance of a diagonal map
    from the identity, at the largest ladder radius."""
    grid = grid or GridSpec()
    times = family.sample_times(max(21, grid.n_time))
    region = DiskRegion(grid.radii[-1])
    ident = Identity()
    return max(lu_distance(family.at(t, t), ident, region, grid.n_angles)
               for t in times)


def semigroup_residual(family: EvolutionFamily, grid: Optional[GridSpec] = None,
                       seed: int = 0) -> float:
    """Composition-law residual over a full grid of ordered triples.

    For every s <= u <= t on the time grid and a quasi-random batch of disk
    points at the outermost ladder radius, compares the composed evaluation
    against the direct transition pointwise; returns the worst absolute gap.
    A :class:`~evofam.evolution.ReverseFamily` is tested against its own
    (flipped) composition order.
    """
    grid = grid or GridSpec()
    times = family.sample_times(grid.n_time)
    pts = quasi_disk_points(grid.n_angles, grid.radii[-1], seed)
    n = len(times)
    reversed_order = isinstance(family, ReverseFamily)
    triples = [(i, j, k)
               for i in range(n) for j in range(i, n) for k in range(j, n)]

    def one(idx):
        i, j, k = idx
        s, u, t = times[i], times[j], times[k]
        if reversed_order:
            through = family.at(s, u).eval_many(family.at(u, t).eval_many(pts))
        else:
            through = family.at(u, t).eval_many(family.at(s, u).eval_many(pts))
        direct = family.at(s, t).eval_many(pts)
        return float(np.max(np.abs(through - direct)))

    return max(_pmap(one, triples))


def hyperbolic_bound_sup(family: EvolutionFamily,
                         grid: Optional[GridSpec] = None) -> float:
    """Largest modulus of an origin image over the parameter grid.

    Families fixing the origin by construction give exactly 0.0; a family is
    considered hyperbolically bounded when the sup stays below 1 by at least
    ``HYPERBOLIC_MARGIN``.
    """
    grid = grid or GridSpec()
    times = family.sample_times(grid.n_time)
    return max(abs(family.at(s, t).eval(0j))
               for i, s in enumerate(times) for t in times[i:])


# ---------------------------------------------------------------------------
# Continuity moduli
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ContinuityModulus:
    """Observed moduli per shrinking parameter gap.

    ``radius_moduli`` maps each ladder radius to its per-delta track of
    locally-uniform distances; ``scalar_moduli`` carries named pointwise
    tracks (transition values and derivatives at a base point).
    """

    deltas: tuple[float, ...]
    radius_moduli: dict
    scalar_moduli: dict


def _track_ratios(track: Sequence[float], floor: float) -> list[float]:
    out = []
    for prev, nxt in zip(track, track[1:]):
        if nxt <= floor:
            continue  # decayed to numerical zero — fine whatever came before
        out.append(math.inf if prev <= floor else nxt / prev)
    return out


def modulus_worst_ratio(modulus: ContinuityModulus,
                        floor: float = DECAY_FLOOR) -> float:
    """Largest consecutive-rung ratio over every track (0.0 if all flat)."""
    ratios: list[float] = []
    for track in modulus.radius_moduli.values():
        ratios.extend(_track_ratios(track, floor))
    for track in modulus.scalar_moduli.values():
        ratios.extend(_track_ratios(track, floor))
    return max(ratios) if ratios else 0.0


def modulus_decays(modulus: ContinuityModulus, ratio: float = DECAY_RATIO,
                   floor: float = DECAY_FLOOR) -> bool:
    """Heuristic continuity verdict: every rung shrinks by the given factor."""
    return modulus_worst_ratio(modulus, floor) <= ratio


def _default_deltas(family) -> tuple[float, ...]:
    span = time_value(family.b) - time_value(family.a)
    return tuple(span / 8.0 / 2.0 ** k for k in range(7))


class _CircleCache:
    """Circle samples of one-parameter maps, keyed by real parameter value."""

    def __init__(self, build: Callable, radii: tuple[float, ...], n_angles: int):
        self._build = build
        self._radii = radii
        self._n_angles = n_angles
        ring = np.exp(2j * math.pi * np.arange(n_angles) / n_angles)
        self._points = np.concatenate([r * ring for r in radii])
        self._circles: dict = {}
        self._scalars: dict = {}

    def circles(self, x) -> np.ndarray:
        key = time_value(x)
        got = self._circles.get(key)
        if got is None:
            got = self._build(x).eval_many(self._points).reshape(
                len(self._radii), self._n_angles)
            self._circles[key] = got
        return got

    def scalars(self, x, z0: complex) -> tuple[complex, complex]:
        key = time_value(x)
        got = self._scalars.get(key)
        if got is None:
            m = self._build(x)
            got = (m.eval(z0), m.deriv(z0))
            self._scalars[key] = got
        return got


def _one_parameter_modulus(family: EvolutionFamily, build: Callable,
                           z0: complex, grid: GridSpec,
                           deltas: Optional[Sequence[float]]) -> ContinuityModulus:
    """Shared scan engine for the right- and left-parameter moduli.

    Continuum families probe each base time against its two delta-shifted
    neighbors (clamped into the interval); lattice families instead pair up
    every two of their own sample times within delta — float offsets would
    fall off the lattice.
    """
    deltas = tuple(float(d) for d in (deltas if deltas is not None
                                      else _default_deltas(family)))
    if not deltas or any(d <= 0 for d in deltas):
        raise DomainError("deltas must be positive")
    av, bv = time_value(family.a), time_value(family.b)
    cache = _CircleCache(build, grid.radii, grid.n_angles)
    base = family.sample_times(_BASE_SAMPLES)

    radius_tracks: dict = {r: [] for r in grid.radii}
    value_track: list[float] = []
    deriv_track: list[float] = []

    for delta in deltas:
        if family.lattice:
            vals = [time_value(x) for x in base]
            pairs = [(base[i], base[j])
                     for i in range(len(base)) for j in range(i + 1, len(base))
                     if vals[j] - vals[i] <= delta * (1.0 + 1e-12)]
        else:
            pairs = []
            for x in base:
                xv = time_value(x)
                for partner in (min(bv, xv + delta), max(av, xv - delta)):
                    if partner != xv:
                        pairs.append((x, partner))
        per_radius = np.zeros(len(grid.radii))
        worst_value = 0.0
        worst_deriv = 0.0
        for x, y in pairs:
            gap = np.max(np.abs(cache.circles(x) - cache.circles(y)), axis=1)
            per_radius = np.maximum(per_radius, gap)
            vx, dx = cache.scalars(x, z0)
            vy, dy = cache.scalars(y, z0)
            worst_value = max(worst_value, abs(vx - vy))
            worst_deriv = max(worst_deriv, abs(dx - dy))
        for r, g in zip(grid.radii, per_radius):
            radius_tracks[r].append(float(g))
        value_track.append(worst_value)
        deriv_track.append(worst_deriv)

    return ContinuityModulus(
        deltas,
        {r: tuple(track) for r, track in radius_tracks.items()},
        {"value": tuple(value_track), "deriv": tuple(deriv_track)},
    )


def right_parameter_modulus(family: EvolutionFamily, z0: complex,
                            grid: Optional[GridSpec] = None,
                            deltas: Optional[Sequence[float]] = None) -> ContinuityModulus:
    """Continuity scan of t -> (transition from the left endpoint to t).

    Radius tracks hold locally-uniform distances; the scalar tracks follow
    the transition value and derivative at ``z0``.
    """
    z0 = complex(z0)
    if abs(z0) >= 1.0:
        raise DomainError(f"base point {z0} must lie inside the open disk")
    grid = grid or GridSpec()
    anchor = family.a
    return _one_parameter_modulus(
        family, lambda t: family.at(anchor, t), z0, grid, deltas)


def left_parameter_modulus(family: EvolutionFamily,
                           grid: Optional[GridSpec] = None,
                           deltas: Optional[Sequence[float]] = None) -> ContinuityModulus:
    """Continuity scan of s -> (transition from s to the right endpoint);
    scalar tracks are taken at the origin."""
    grid = grid or GridSpec()
    anchor = family.b
    return _one_parameter_modulus(
        family, lambda s: family.at(s, anchor), 0j, grid, deltas)


def joint_continuity_modulus(family: EvolutionFamily,
                             grid: Optional[GridSpec] = None,
                             deltas: Optional[Sequence[float]] = None) -> ContinuityModulus:
    """Continuity scan over pairs of admissible parameter pairs.

    Two cells (s, t) and (s', t') count as delta-close when both coordinate
    gaps are at most delta.  Continuum families compare each base cell
    against its delta-shifted neighbor cells; lattice families compare every
    two of their own cells within delta.
    """
    grid = grid or GridSpec()
    deltas = tuple(float(d) for d in (deltas if deltas is not None
                                      else _default_deltas(family)))
    if not deltas or any(d <= 0 for d in deltas):
        raise DomainError("deltas must be positive")
    av, bv = time_value(family.a), time_value(family.b)

    ring = np.exp(2j * math.pi * np.arange(grid.n_angles) / grid.n_angles)
    points = np.concatenate([r * ring for r in grid.radii])
    shape = (len(grid.radii), grid.n_angles)
    circle_cache: dict = {}

    def circles(s, t):
        key = (time_value(s), time_value(t))
        got = circle_cache.get(key)
        if got is None:
            got = family.at(s, t).eval_many(points).reshape(shape)
            circle_cache[key] = got
        return got

    radius_tracks: dict = {r: [] for r in grid.radii}

    if family.lattice:
        base = family.sample_times(_JOINT_SAMPLES_LATTICE)
        cells = [(s, t) for i, s in enumerate(base) for t in base[i:]]
        svals = np.array([time_value(s) for s, _ in cells])
        tvals = np.array([time_value(t) for _, t in cells])
        stack = np.stack([circles(s, t) for s, t in cells])
        ii, jj = np.triu_indices(len(cells), 1)
        gaps = np.maximum(np.abs(svals[ii] - svals[jj]),
                          np.abs(tvals[ii] - tvals[jj]))
        for delta in deltas:
            sel = gaps <= delta * (1.0 + 1e-12)
            per_radius = np.zeros(len(grid.radii))
            si, sj = ii[sel], jj[sel]
            for lo in range(0, len(si), 2048):
                hi = lo + 2048
                diff = np.abs(stack[si[lo:hi]] - stack[sj[lo:hi]])
                if diff.size:
                    per_radius = np.maximum(per_radius, diff.max(axis=2).max(axis=0))
            for r, g in zip(grid.radii, per_radius):
                radius_tracks[r].append(float(g))
    else:
        base = family.sample_times(_JOINT_SAMPLES)
        base_vals = [time_value(x) for x in base]
        cells = [(s, t) for i, s in enumerate(base_vals) for t in base_vals[i:]]
        for delta in deltas:
            def cell_worst(cell):
                s, t = cell
                mine = circles(s, t)
                s_cands = {s, min(bv, s + delta), max(av, s - delta)}
                t_cands = {t, min(bv, t + delta), max(av, t - delta)}
                worst = np.zeros(len(grid.radii))
                for s2 in s_cands:
                    for t2 in t_cands:
                        if s2 <= t2 and (s2, t2) != (s, t):
                            gap = np.max(np.abs(mine - circles(s2, t2)), axis=1)
                            worst = np.maximum(worst, gap)
                return worst
            per_radius = np.zeros(len(grid.radii))
            for worst in _pmap(cell_worst, cells):
                per_radius = np.maximum(per_radius, worst)
            for r, g in zip(grid.radii, per_radius):
                radius_tracks[r].append(float(g))

    return ContinuityModulus(
        deltas, {r: tuple(track) for r, track in radius_tracks.items()}, {})


def finest_gap(family: EvolutionFamily, n_time: int) -> float:
    """Smallest positive gap between consecutive sample times."""
    times = family.sample_times(n_time)
    vals = [time_value(t) for t in times]
    gaps = [b - a for a, b in zip(vals, vals[1:]) if b > a]
    if not gaps:
        raise DomainError("sample grid is degenerate")
    return min(gaps)


def diagonal_limits(family: EvolutionFamily, c, grid: Optional[GridSpec] = None
                    ) -> tuple[float, float]:
    """Shrinking-wedge behavior at an interior parameter ``c``.

    Over sampled pairs s <= c <= t whose gap is at most the finest grid gap,
    returns (max |transition(0)|, max |transition'(0) - 1|).  Both tend to 0
    under refinement exactly when the family behaves continuously across the
    diagonal at ``c``; a discontinuous family keeps a floor.  When no
    sampled pair brackets ``c`` that tightly, the tightest bracketing pair
    is used instead.
    """
    grid = grid or GridSpec()
    cv = time_value(c)
    av, bv = time_value(family.a), time_value(family.b)
    if not (av <= cv <= bv):
        raise DomainError(f"c={cv} outside [{av}, {bv}]")
    times = family.sample_times(grid.n_time)
    vals = [time_value(t) for t in times]
    h = finest_gap(family, grid.n_time)

    pairs = [(times[i], times[j])
             for i in range(len(times)) for j in range(i, len(times))
             if vals[i] <= cv <= vals[j] and vals[j] - vals[i] <= h * (1.0 + 1e-9)]
    if not pairs:
        below = max((i for i in range(len(times)) if vals[i] <= cv), default=0)
        above = min((j for j in range(len(times)) if vals[j] >= cv),
                    default=len(times) - 1)
        pairs = [(times[below], times[above])]

    worst_origin = 0.0
    worst_deriv = 0.0
    for s, t in pairs:
        m = family.at(s, t)
        worst_origin = max(worst_origin, abs(m.eval(0j)))
        worst_deriv = max(worst_deriv, abs(m.deriv(0j) - 1.0))
    return worst_origin, worst_deriv


# ---------------------------------------------------------------------------
# Univalence: certificate and falsification
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class UnivalenceCertificate:
    """Constructive witness that one transition map is injective on a disk.

    The subdivision covers [s0, t0]; every consecutive origin-derivative
    ratio of the origin-fixed conjugate exceeds ``sigma``, and the disk of
    radius ``landau`` (the univalence radius for sigma) contains the target
    disk of radius ``radius``.
    """

    s0: float
    t0: float
    radius: float
    sigma: float
    subdivision: tuple[float, ...]
    ratios: tuple[float, ...]
    landau: float

    def __post_init__(self) -> None:
        if not (0.0 < self.sigma < 1.0):
            raise DomainError("sigma must lie in (0, 1)")
        if self.landau <= self.radius:
            raise DomainError("certified univalence disk does not cover the target")
        if len(self.ratios) != len(self.subdivision) - 1:
            raise DomainError("one ratio per subdivision step required")
        if any(x >= y for x, y in zip(self.subdivision, self.subdivision[1:])):
            raise DomainError("subdivision must increase strictly")
        if self.subdivision[0] != self.s0 or self.subdivision[-1] != self.t0:
            raise DomainError("subdivision must run from s0 to t0")
        if any(r <= self.sigma for r in self.ratios):
            raise DomainError("every derivative ratio must exceed sigma")

    @property
    def steps(self) -> int:
        return len(self.ratios)


_ALPHA_FLOOR = 1e-12


def univalence_certificate(family: EvolutionFamily, s0, t0,
                           region: Union[DiskRegion, float], z0: complex = 0j,
                           max_steps: int = 10000) -> UnivalenceCertificate:
    """Certify injectivity of the (s0, t0) transition map on a subdisk.

    Strategy: conjugate the family to fix the origin at base point ``z0``;
    pick sigma halfway between 1 and the smallest value whose univalence
    radius covers the target disk (sigma_min = 2r/(1+r^2), inverting the
    radius formula in closed form — the midpoint leaves headroom for ratio
    noise); then greedily extend each step as far as the origin-derivative
    ratio stays above sigma, refining by bisection.  Each step map is then
    injective on the covering disk, hence so is the composition.

    Raises :class:`CertificationFailure` when the derivative collapses below
    1e-12, a step cannot make forward progress, or the subdivision exceeds
    ``max_steps`` — for a family continuous in its parameters none of these
    can happen.
    """
    if not isinstance(region, DiskRegion):
        region = DiskRegion(float(region))
    r = region.r
    if r >= 1.0:
        raise DomainError("certification needs a target radius < 1")
    s0v, t0v = time_value(s0), time_value(t0)
    if not (s0v < t0v):
        raise DomainError(f"need s0 < t0, got ({s0v}, {t0v})")
    av, bv = time_value(family.a), time_value(family.b)
    if not (av <= s0v and t0v <= bv):
        raise DomainError(f"target pair ({s0v}, {t0v}) leaves [{av}, {bv}]")

    conjugated, _ = conjugate_to_fix_origin(family, z0)
    sigma_min = 2.0 * r / (1.0 + r * r)
    sigma = 0.5 * (sigma_min + 1.0)
    rho = landau_radius(sigma)

    alpha_cache: dict = {}

    def alpha(tau) -> float:
        key = time_value(tau)
        got = alpha_cache.get(key)
        if got is None:
            got = abs(conjugated.at(s0, tau).deriv(0j))
            alpha_cache[key] = got
        return got

    current = s0
    cur_alpha = alpha(s0)
    if cur_alpha < _ALPHA_FLOOR:
        raise CertificationFailure("origin derivative already below 1e-12 at s0")
    taus = [s0]
    ratios: list[float] = []
    span = t0v - s0v

    while not time_value(current) == t0v:
        if len(ratios) >= max_steps:
            raise CertificationFailure(
                f"subdivision exceeded {max_steps} steps — derivative decays "
                "too fast for this sigma (or the family is not continuous)")
        full = alpha(t0)
        if full < _ALPHA_FLOOR:
            raise CertificationFailure("origin derivative collapsed below 1e-12")
        if full / cur_alpha > sigma:
            taus.append(t0)
            ratios.append(full / cur_alpha)
            current, cur_alpha = t0, full
            continue
        lo, lo_alpha = time_value(current), cur_alpha
        hi = t0v
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            am = alpha(mid)
            if am >= _ALPHA_FLOOR and am / cur_alpha > sigma:
                lo, lo_alpha = mid, am
            else:
                hi = mid
        if lo - time_value(current) <= span * 1e-13:
            raise CertificationFailure(
                "no forward step satisfies the derivative-ratio condition — "
                "the origin derivative is not continuous here")
        taus.append(lo)
        ratios.append(lo_alpha / cur_alpha)
        current, cur_alpha = lo, lo_alpha

    return UnivalenceCertificate(
        s0v, t0v, r, sigma,
        tuple(time_value(x) for x in taus), tuple(ratios), rho)


@dataclass(frozen=True, slots=True)
class SampleTestResult:
    """Outcome of the randomized injectivity test."""

    passed: bool
    witness: Optional[tuple[complex, complex]]
    pairs: int
    seed: int


def univalence_sample_test(m: DiskMap, region: Union[DiskRegion, float],
                           n: int, seed: int = 0) -> SampleTestResult:
    """Try to falsify injectivity on a subdisk by sampling point pairs.

    Fails (with the pair as witness) when two points at least 1e-6 apart map
    within 1e-10 of each other.  The first few pairs are antipodal (z, -z) —
    the classic collision for even maps — and the rest are independent
    quasi-random draws.  Passing is evidence, not proof.
    """
    if not isinstance(region, DiskRegion):
        region = DiskRegion(float(region))
    if region.r >= 1.0:
        raise DomainError("sample test needs a radius < 1")
    if n < 1:
        raise DomainError("need at least one pair")
    first = quasi_disk_points(n, region.r, seed)
    second = quasi_disk_points(n, region.r, seed + 101)
    n_anti = min(32, n)
    second = second.copy()
    second[:n_anti] = -first[:n_anti]

    left = m.eval_many(first)
    right = m.eval_many(second)
    collide = (np.abs(first - second) > SEPARATION_TOL) \
        & (np.abs(left - right) < COLLISION_TOL)
    if bool(np.any(collide)):
        k = int(np.argmax(collide))
        return SampleTestResult(False, (complex(first[k]), complex(second[k])), n, seed)
    return SampleTestResult(True, None, n, seed)


# ---------------------------------------------------------------------------
# Randomized bound audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Violation:
    kind: str
    map_repr: str
    detail: str


@dataclass(frozen=True, slots=True)
class BoundAuditReport:
    trials: int
    seed: int
    checks: int
    violations: tuple[Violation, ...]
    ledger: BoundLedger

    @property
    def passed(self) -> bool:
        return not self.violations


def bound_audit(trials: int = 1000, seed: int = 0, depth: int = 6,
                n_points: int = 64, slack: float = 1e-12,
                extra_maps: Sequence[DiskMap] = ()) -> BoundAuditReport:
    """Drive the closed-form bounds against randomized expression trees.

    Per map: the two-point growth bound and its center version, the uniform
    Lipschitz bound on |z| <= 0.9, and — after normalizing the map to fix
    the origin by postcomposing a disk automorphism — the origin-fixing
    growth and identity-deviation bounds, plus a small injectivity sample on
    the certified univalence disk.  The bounds are theorems, so any reported
    violation (beyond ``slack``) is an implementation bug; ``extra_maps``
    lets callers audit deliberately broken maps and watch them get caught.
    """
    if trials < 0:
        raise DomainError("trial count must be nonnegative")
    rng = random.Random(seed)
    maps = [sample_map(rng, depth) for _ in range(trials)]
    maps.extend(extra_maps)

    violations: list[Violation] = []
    checks = 0
    growth_hi = deviation_hi = lipschitz_hi = 0.0
    landau_lo = 1.0

    def flag(kind: str, m: DiskMap, detail: str) -> None:
        violations.append(Violation(kind, repr(m), detail))

    for index, m in enumerate(maps):
        pts = quasi_disk_points(n_points, 0.98, seed=seed * 100003 + index)
        vals = m.eval_many(pts)
        w0 = m.eval(0j)
        # Clamped so a broken extra map cannot crash the audit with a domain
        # error; genuine self-maps never reach the clamp.
        w0_abs = min(abs(w0), 1.0 - 1e-15)

        for z, w in zip(pts, vals):
            bound = schwarz_pick_upper(abs(z), w0_abs) + slack
            growth_hi = max(growth_hi, bound)
            checks += 1
            if abs(w) > bound:
                flag("growth", m, f"z={z!r}: |value|={abs(w):.17g} > {bound:.17g}")
            wz_abs = min(abs(w), 1.0 - 1e-15)
            checks += 1
            if w0_abs > center_bound(abs(z), wz_abs) + slack:
                flag("center", m,
                     f"z={z!r}: |value at 0|={w0_abs:.17g} > "
                     f"{center_bound(abs(z), wz_abs) + slack:.17g}")

        lip_pts = quasi_disk_points(n_points, 0.9 * (1.0 - 1e-9),
                                    seed=seed * 100003 + index + 1)
        lip_vals = m.eval_many(lip_pts)
        for z1, z2, w1, w2 in zip(lip_pts, lip_pts[1:], lip_vals, lip_vals[1:]):
            bound = lipschitz_bound(z1, z2, 0.9) + slack
            lipschitz_hi = max(lipschitz_hi, bound)
            checks += 1
            if abs(w1 - w2) > bound:
                flag("lipschitz", m,
                     f"pair ({z1!r}, {z2!r}): |diff|={abs(w1 - w2):.17g} > {bound:.17g}")

        if abs(w0) >= 1.0:
            continue  # broken extra map; growth checks above already flagged it
        g = Compose(Mobius(-w0), m)
        g_vals = g.eval_many(pts)
        lam = g.deriv(0j)
        lam_abs = abs(lam)
        # Rounding can push an automorphism derivative a few ulp past 1;
        # pull it strictly inside (the bound moves by far less than slack).
        lam_clamped = lam if lam_abs <= 1.0 else lam * ((1.0 - 1e-15) / lam_abs)
        s_abs = min(lam_abs, 1.0)
        for z, w in zip(pts, g_vals):
            bound = fixed_origin_growth(abs(z), s_abs) + slack
            checks += 1
            if abs(w) > bound:
                flag("origin-growth", m,
                     f"z={z!r}: |normalized value|={abs(w):.17g} > {bound:.17g}")
            bound = identity_deviation(abs(z), lam_clamped) + slack
            deviation_hi = max(deviation_hi, bound)
            checks += 1
            if abs(w - z) > bound:
                flag("identity-deviation", m,
                     f"z={z!r}: |value - z|={abs(w - z):.17g} > {bound:.17g}")

        # The collision test uses absolute tolerances (1e-6 separation,
        # 1e-10 collision), so it can only resolve injectivity when the
        # derivative — hence the certified disk — is not microscopic:
        # points 1e-6 apart then map >= ~1e-8 apart, two orders above the
        # collision threshold.
        if s_abs >= 1e-2:
            rad = landau_radius(s_abs)
            landau_lo = min(landau_lo, rad)
            outcome = univalence_sample_test(
                g, DiskRegion(min(rad * 0.999, 0.95)), 16,
                seed=seed * 100003 + index + 2)
            checks += 1
            if not outcome.passed:
                flag("landau-univalence", m,
                     f"collision witness {outcome.witness!r} inside radius "
                     f"{rad:.17g}")

    return BoundAuditReport(trials, seed, checks, tuple(violations),
                            BoundLedger(growth_hi, deviation_hi, lipschitz_hi,
                                        landau_lo))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class DiagnosticsReport:
    """Structured outcome of a verification or scan run."""

    family: str
    grid: GridSpec
    seed: int
    residuals: dict
    hyperbolic_sup: float
    moduli: dict
    certificates: tuple
    verdicts: dict
    counterexample: Optional[dict] = None


def run_verification(family: EvolutionFamily, grid: Optional[GridSpec] = None,
                     seed: int = 0, ef3_tol: float = EF3_TOL) -> DiagnosticsReport:
    """Axiom suite: non-constancy, diagonal identity, composition law,
    hyperbolic boundedness — residuals plus thresholded verdicts."""
    grid = grid or GridSpec()
    ef1 = ef1_score(family, grid)
    ef2 = ef2_residual(family, grid)
    ef3 = semigroup_residual(family, grid, seed=seed)
    hyp = hyperbolic_bound_sup(family, grid)
    gdesc = _grid_dict(grid)
    verdicts = {
        "nonconstant": {
            "pass": ef1 > NONCONSTANCY_TOL, "observed": ef1,
            "threshold": NONCONSTANCY_TOL, "grid": gdesc,
        },
        "identity_on_diagonal": {
            "pass": ef2 < EF2_TOL, "observed": ef2,
            "threshold": EF2_TOL, "grid": gdesc,
        },
        "composition_law": {
            "pass": ef3 < ef3_tol, "observed": ef3,
            "threshold": ef3_tol, "grid": gdesc,
        },
        "hyperbolically_bounded": {
            "pass": hyp <= 1.0 - HYPERBOLIC_MARGIN, "observed": hyp,
            "threshold": 1.0 - HYPERBOLIC_MARGIN, "grid": gdesc,
        },
    }
    return DiagnosticsReport(
        family.label, grid, seed,
        {"ef1": ef1, "ef2": ef2, "ef3": ef3}, hyp,
        {"right": None, "left": None, "joint": None, "diagonal": None},
        (), verdicts)


def _grid_dict(grid: GridSpec) -> dict:
    return {"n_time": grid.n_time, "radii": list(grid.radii),
            "n_angles": grid.n_angles}


def _modulus_dict(m) -> Optional[dict]:
    if m is None or isinstance(m, dict):
        return m
    return {
        "deltas": list(m.deltas),
        "radius_moduli": {format(r, ".17g"): list(track)
                          for r, track in m.radius_moduli.items()},
        "scalar_moduli": {name: list(track)
                          for name, track in m.scalar_moduli.items()},
    }


def _certificate_dict(c: UnivalenceCertificate) -> dict:
    return {
        "s0": c.s0, "t0": c.t0, "radius": c.radius, "sigma": c.sigma,
        "landau": c.landau, "steps": c.steps,
        "subdivision": list(c.subdivision), "ratios": list(c.ratios),
    }


def report_to_dict(report: DiagnosticsReport) -> dict:
    """Plain-value form of a report, key order fixed for reproducibility."""
    out = {
        "family": report.family,
        "grid": _grid_dict(report.grid),
        "seed": report.seed,
        "residuals": dict(report.residuals),
        "hyperbolic_sup": report.hyperbolic_sup,
        "moduli": {name: _modulus_dict(m) for name, m in report.moduli.items()},
        "certificates": [_certificate_dict(c) for c in report.certificates],
        "verdicts": report.verdicts,
    }
    if report.counterexample is not None:
        out["counterexample"] = report.counterexample
    return out


def render_json(value) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant
    digits (round-trip exact), complex numbers as {re, im} pairs, trailing
    newline.  Byte-identical output for equal inputs is the contract."""
    pieces: list[str] = []
    _render(value, pieces, 0)
    pieces.append("\n")
    return "".join(pieces)


def _render(value, pieces: list[str], indent: int) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for i, (key, item) in enumerate(value.items()):
            pieces.append(f'{inner}"{key}": ')
            _render(item, pieces, indent + 1)
            pieces.append(",\n" if i < len(value) - 1 else "\n")
        pieces.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for i, item in enumerate(value):
            pieces.append(inner)
            _render(item, pieces, indent + 1)
            pieces.append(",\n" if i < len(value) - 1 else "\n")
        pieces.append(pad + "]")
    elif isinstance(value, bool):
        pieces.append("true" if value else "false")
    elif value is None:
        pieces.append("null")
    elif isinstance(value, int):
        pieces.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise EvofamError(f"cannot serialize non-finite float {value}")
        pieces.append(format(value, ".17g"))
    elif isinstance(value, complex):
        _render({"re": value.real, "im": value.imag}, pieces, indent)
    elif isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        pieces.append(f'"{escaped}"')
    else:
        raise EvofamError(f"cannot serialize {type(value).__name__} to JSON")


def write_modulus_csv(path, modulus: ContinuityModulus) -> None:
    """Modulus table as CSV with columns delta, radius, modulus."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["delta", "radius", "modulus"])
        for i, delta in enumerate(modulus.deltas):
            for r, track in modulus.radius_moduli.items():
                writer.writerow([format(delta, ".17g"), format(r, ".17g"),
                                 format(track[i], ".17g")])
