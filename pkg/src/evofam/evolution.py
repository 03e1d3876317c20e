"""Two-parameter families of disk self-maps and their constructions.

An ``EvolutionFamily`` assigns to every ordered parameter pair ``a <= s <= t
<= b`` a holomorphic self-map of the unit disk, subject to three sampled
axioms:

* non-constancy of every transition map,
* the diagonal maps ``(t, t)`` are the identity,
* the composition law: the ``(u, t)`` map after the ``(s, u)`` map equals the
  ``(s, t)`` map.

Transition maps are materialized lazily, one expression tree per ``(s, t)``
query, so families live on a continuum while diagnostics pick their own
grids.  A ``ReverseFamily`` is the same shape with the composition order
flipped; the two notions are exchanged by time reversal (``reverse_dual``).

Besides the closed-form builders this module provides:

* ``glue`` — concatenation of two families sharing an endpoint,
* ``conjugate_to_fix_origin`` — Möbius conjugation along the orbit of a base
  point, producing an origin-fixing family plus the orbit ``Trajectory``,
* ``from_loewner_chain`` — recovery of a family from a chain of univalent
  maps by solving ``chain(t)(w) = chain(s)(z)`` with damped Newton iteration.

Time parameters are usually floats; any object exposing an exact
``real_value`` attribute (see the lattice times in :mod:`evofam.hamel`) is
accepted wherever a float would be, with ordering decided by that value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .diskmap import Compose, Custom, DiskMap, Identity, Mobius, Rotation, Scale
from .errors import DomainError, IntervalMismatch, InversionFailure, RangeError

__all__ = [
    "EvolutionFamily",
    "ReverseFamily",
    "Trajectory",
    "time_value",
    "make_radial",
    "make_rotation",
    "make_corrupted",
    "glue",
    "conjugate_to_fix_origin",
    "reverse_dual",
    "from_loewner_chain",
]

TimeLike = Union[float, int, object]


def time_value(t: TimeLike) -> float:
    """Real value of a time parameter.

    Floats pass through; exact lattice times expose ``real_value`` and are
    never coerced any other way.
    """
    rv = getattr(t, "real_value", None)
    if rv is not None:
        return float(rv)
    return float(t)


def _check_interval(a: TimeLike, b: TimeLike) -> None:
    if not (time_value(a) < time_value(b)):
        raise DomainError(
            f"interval endpoints must satisfy a < b, got ({time_value(a)}, {time_value(b)})")


def _same_time(x: TimeLike, y: TimeLike) -> bool:
    if hasattr(x, "coords") and hasattr(y, "coords"):
        return x == y
    return time_value(x) == time_value(y)


@dataclass(frozen=True, slots=True)
class EvolutionFamily:
    """Lazily evaluated two-parameter family over the interval ``[a, b]``.

    ``transition(s, t)`` must return the map for ``a <= s <= t <= b``; the
    public accessor :meth:`at` validates the ordering.  ``times_hook``, when
    set, overrides the default uniform parameter sampling — lattice-restricted
    families use it to emit their own admissible times, and flag themselves
    with ``lattice=True`` so diagnostics avoid off-grid probing.
    """

    a: TimeLike
    b: TimeLike
    transition: Callable[[TimeLike, TimeLike], DiskMap] = field(repr=False)
    label: str = "family"
    times_hook: Optional[Callable[[int], tuple]] = field(default=None, repr=False)
    lattice: bool = False

    def __post_init__(self) -> None:
        _check_interval(self.a, self.b)

    def at(self, s: TimeLike, t: TimeLike) -> DiskMap:
        """The transition map for the ordered pair ``(s, t)``."""
        sv, tv = time_value(s), time_value(t)
        av, bv = time_value(self.a), time_value(self.b)
        if not (av <= sv <= tv <= bv):
            raise DomainError(
                f"(s, t)=({sv}, {tv}) violates {av} <= s <= t <= {bv}")
        return self.transition(s, t)

    def sample_times(self, n: int) -> tuple:
        """``n`` admissible parameter values including both endpoints."""
        if n < 2:
            raise DomainError("need at least two time samples")
        if self.times_hook is not None:
            return tuple(self.times_hook(n))
        a, b = time_value(self.a), time_value(self.b)
        step = (b - a) / (n - 1)
        return tuple(a + k * step for k in range(n - 1)) + (b,)


@dataclass(frozen=True, slots=True)
class ReverseFamily:
    """Two-parameter family composed in the opposite order.

    The diagonal maps are still the identity, but consecutive maps chain as
    "the (s, u) map after the (u, t) map gives the (s, t) map".  Produced
    from an :class:`EvolutionFamily` by :func:`reverse_dual`.
    """

    a: TimeLike
    b: TimeLike
    transition: Callable[[TimeLike, TimeLike], DiskMap] = field(repr=False)
    label: str = "reverse-family"
    times_hook: Optional[Callable[[int], tuple]] = field(default=None, repr=False)
    lattice: bool = False

    def __post_init__(self) -> None:
        _check_interval(self.a, self.b)

    def at(self, s: TimeLike, t: TimeLike) -> DiskMap:
        sv, tv = time_value(s), time_value(t)
        av, bv = time_value(self.a), time_value(self.b)
        if not (av <= sv <= tv <= bv):
            raise DomainError(
                f"(s, t)=({sv}, {tv}) violates {av} <= s <= t <= {bv}")
        return self.transition(s, t)

    def sample_times(self, n: int) -> tuple:
        if n < 2:
            raise DomainError("need at least two time samples")
        if self.times_hook is not None:
            return tuple(self.times_hook(n))
        a, b = time_value(self.a), time_value(self.b)
        step = (b - a) / (n - 1)
        return tuple(a + k * step for k in range(n - 1)) + (b,)


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Disk-valued curve on ``[a, b]``; evaluation checks the image stays
    strictly inside the disk."""

    a: TimeLike
    b: TimeLike
    curve: Callable[[TimeLike], complex] = field(repr=False)

    def __call__(self, t: TimeLike) -> complex:
        tv = time_value(t)
        if not (time_value(self.a) <= tv <= time_value(self.b)):
            raise DomainError(f"t={tv} outside the trajectory interval")
        value = complex(self.curve(t))
        if abs(value) >= 1.0:
            raise RangeError(f"trajectory left the open disk at t={tv}: {value}")
        return value


# ---------------------------------------------------------------------------
# Closed-form builders
# ---------------------------------------------------------------------------

def make_radial(a: float, b: float, label: str = "radial") -> EvolutionFamily:
    """Exponential contraction toward the origin: ``(s,t) -> e^{s-t} z``.

    Fixes the origin, satisfies the composition law up to one rounding of
    the exponentials, and is jointly continuous — the canonical well-behaved
    example.
    """
    _check_interval(a, b)

    def transition(s, t):
        return Scale(math.exp(time_value(s) - time_value(t)))

    return EvolutionFamily(float(a), float(b), transition, label=label)


def make_rotation(a: float, b: float, phase: Callable[[float], float],
                  label: str = "rotation") -> EvolutionFamily:
    """Rotation family ``(s,t) -> e^{i(phase(t)-phase(s))} z``.

    Jointly continuous exactly when ``phase`` is continuous on ``[a, b]``.
    """
    _check_interval(a, b)

    def transition(s, t):
        return Rotation(float(phase(time_value(t))) - float(phase(time_value(s))))

    return EvolutionFamily(float(a), float(b), transition, label=label)


def make_corrupted(a: float, b: float) -> EvolutionFamily:
    """Deliberately broken family ``(s,t) -> e^{-(t-s)^2} z``.

    The squared gap is not additive ((u-s)^2 + (t-u)^2 != (t-s)^2), so the
    composition law fails by a large margin on any interval of length >= 2:
    at (s,u,t) = (0,1,2) the composed factor is e^{-2} versus the direct
    e^{-4}.  Exists purely to calibrate failure detection; registered on the
    command line as "corrupted-demo".
    """
    _check_interval(a, b)

    def transition(s, t):
        gap = time_value(t) - time_value(s)
        return Scale(math.exp(-gap * gap))

    return EvolutionFamily(float(a), float(b), transition, label="corrupted-demo")


# ---------------------------------------------------------------------------
# Constructions on existing families
# ---------------------------------------------------------------------------

def glue(first: EvolutionFamily, second: EvolutionFamily,
         label: Optional[str] = None) -> EvolutionFamily:
    """Concatenate two families meeting at a shared endpoint.

    Inside either sub-square the result delegates to the corresponding input
    (the very same expression trees); a straddling pair composes the second
    family's map after the first's, split at the seam.
    """
    if not _same_time(first.b, second.a):
        raise IntervalMismatch(
            f"first family ends at {time_value(first.b)} but second starts at "
            f"{time_value(second.a)}")
    seam = first.b
    seam_v = time_value(seam)

    def transition(s, t):
        if time_value(t) <= seam_v:
            return first.at(s, t)
        if time_value(s) >= seam_v:
            return second.at(s, t)
        return Compose(second.at(seam, t), first.at(s, seam))

    hook = None
    if first.times_hook is not None or second.times_hook is not None:
        def hook(n):
            half = max(2, (n + 1) // 2)
            pts = sorted(list(first.sample_times(half)) + list(second.sample_times(half)),
                         key=time_value)
            out = [pts[0]]
            for p in pts[1:]:
                if not _same_time(out[-1], p):
                    out.append(p)
            return tuple(out)

    return EvolutionFamily(
        first.a, second.b, transition,
        label=label or f"glued:{first.label}+{second.label}",
        times_hook=hook,
        lattice=first.lattice or second.lattice,
    )


def conjugate_to_fix_origin(family: EvolutionFamily,
                            z0: complex) -> tuple[EvolutionFamily, Trajectory]:
    """Conjugate a family so every transition map fixes the origin.

    Let ``c(t)`` be the orbit of ``z0`` under the maps starting at the left
    endpoint.  Sandwiching the ``(s, t)`` map between the disk automorphism
    sending 0 to ``c(s)`` and the inverse of the one sending 0 to ``c(t)``
    moves the orbit to the constant point 0: the conjugated map takes 0 ->
    c(s) -> c(t) -> 0, the middle step by the composition law.  Returns the
    conjugated family together with the orbit as a :class:`Trajectory`.

    The origin derivative of the conjugated map comes out, via the chain
    rule, as (1-|c(s)|^2)/(1-|c(t)|^2) times the original derivative at
    c(s) — the certified-univalence machinery relies on that identity.
    """
    z0 = complex(z0)
    if abs(z0) >= 1.0:
        raise DomainError(f"base point {z0} must lie inside the open disk")
    start = family.a

    def curve(t):
        return family.at(start, t).eval(z0)

    orbit = Trajectory(family.a, family.b, curve)

    def transition(s, t):
        cs = orbit(s)
        inner = family.at(s, t)
        # Recenter by the transition's own image of c(s) rather than by
        # orbit(t): the two agree exactly in real arithmetic, but using the
        # image makes the conjugated map send 0 to literally 0.0 instead of
        # to a few-ulp residue of float non-associativity along the orbit.
        ct = inner.eval(cs)
        return Compose(Mobius(-ct), Compose(inner, Mobius(cs)))

    conjugated = EvolutionFamily(
        family.a, family.b, transition,
        label=f"origin-fixed:{family.label}",
        times_hook=family.times_hook,
        lattice=family.lattice,
    )
    return conjugated, orbit


def reverse_dual(family):
    """Time reversal: swap evolution and reverse families.

    The ``(s, t)`` map of the dual is the ``(-t, -s)`` map of the input, on
    the negated interval.  Applying the construction twice returns maps that
    are literally the original expression trees, so the round trip is exact.
    """
    if isinstance(family, EvolutionFamily):
        result_cls = ReverseFamily
    elif isinstance(family, ReverseFamily):
        result_cls = EvolutionFamily
    else:
        raise DomainError(f"cannot dualize {type(family).__name__}")

    def transition(s, t):
        return family.at(-t, -s)

    hook = None
    if family.times_hook is not None:
        def hook(n):
            return tuple(-t for t in reversed(family.sample_times(n)))

    return result_cls(
        -family.b, -family.a, transition,
        label=f"reverse:{family.label}",
        times_hook=hook,
        lattice=family.lattice,
    )


# ---------------------------------------------------------------------------
# Inversion of univalent chains
# ---------------------------------------------------------------------------

_NEWTON_CAP = 100
_RESCUE_RADII = 32
_RESCUE_ANGLES = 32


def _residuals(f: DiskMap, w: np.ndarray, target: np.ndarray) -> np.ndarray:
    r = np.abs(np.asarray(f._val(w), dtype=complex) - target)
    return np.where(np.isfinite(r), r, np.inf)


def _newton(f: DiskMap, target: np.ndarray, w0: np.ndarray,
            tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton solve of ``f(w) = target``, elementwise over arrays.

    A trial step is only accepted when it reduces the residual; rejection
    halves the damping factor, acceptance doubles it back toward 1.  Iterates
    that run past |w| = 1.5 are pulled back radially — the solution, if the
    chain is monotone, lies in the closed unit disk anyway.
    """
    w = w0.astype(complex, copy=True)
    res = _residuals(f, w, target)
    damp = np.ones(w.shape)
    for _ in range(_NEWTON_CAP):
        if bool(np.all(res <= tol)):
            break
        val = np.asarray(f._val(w), dtype=complex)
        val = np.where(np.isfinite(val), val, 0.0)
        der = np.asarray(f._der(w), dtype=complex)
        der = np.where(np.isfinite(der) & (der != 0), der, 1e-30)
        trial = w - damp * (val - target) / der
        mag = np.abs(trial)
        runaway = mag > 1.5
        if bool(np.any(runaway)):
            trial = np.where(runaway, trial * (1.5 / np.where(mag == 0.0, 1.0, mag)), trial)
        trial_res = _residuals(f, trial, target)
        accept = trial_res < res
        w = np.where(accept, trial, w)
        res = np.where(accept, trial_res, res)
        damp = np.where(accept, np.minimum(1.0, 2.0 * damp), 0.5 * damp)
    return w, res


def _rescue(f: DiskMap, target: np.ndarray, tol: float) -> np.ndarray:
    """Polar-grid search for starting points, then one more Newton run each."""
    radii = np.linspace(0.03, 0.985, _RESCUE_RADII)
    angles = np.exp(2j * math.pi * np.arange(_RESCUE_ANGLES) / _RESCUE_ANGLES)
    grid = (radii[:, None] * angles[None, :]).reshape(-1)
    on_grid = np.asarray(f._val(grid), dtype=complex)
    finite = np.isfinite(on_grid)
    out = np.empty(len(target), dtype=complex)
    for i, tgt in enumerate(target):
        dist = np.where(finite, np.abs(on_grid - tgt), np.inf)
        w0 = grid[int(np.argmin(dist))]
        w, res = _newton(f, np.array([tgt]), np.array([w0]), tol)
        if float(res[0]) > tol:
            raise InversionFailure(
                f"Newton iteration stalled at residual {float(res[0]):.3e} "
                f"(tolerance {tol:.1e}) even after grid-search restart")
        out[i] = w[0]
    return out


def from_loewner_chain(a: float, b: float,
                       chain: Callable[[float], DiskMap],
                       inversion_tol: float = 1e-12) -> EvolutionFamily:
    """Evolution family recovered from a Loewner chain of univalent maps.

    The ``(s, t)`` transition sends ``z`` to the solution ``w`` of
    ``chain(t)(w) = chain(s)(z)``.  Univalence of each ``chain(t)`` is the
    caller's responsibility (a coarse three-point injectivity probe runs at
    construction); range monotonicity is only checked pointwise, through the
    range test on each solved ``w``.
    """
    _check_interval(a, b)
    tol = float(inversion_tol)
    if not (tol > 0.0 and math.isfinite(tol)):
        raise DomainError(f"inversion tolerance must be positive, got {tol}")

    probe = np.array([0.35 + 0.0j, -0.2 + 0.4j, -0.45j])
    for tau in (float(a), 0.5 * (float(a) + float(b)), float(b)):
        m = chain(tau)
        vals = m.eval_many(probe)
        if not bool(np.all(np.isfinite(vals))):
            raise DomainError(f"chain map at t={tau} produced non-finite values")
        gaps = [abs(vals[i] - vals[j]) for i in range(3) for j in range(i + 1, 3)]
        if min(gaps) < 1e-9:
            raise DomainError(
                f"chain map at t={tau} collapses probe points — not univalent")

    def transition(s, t):
        sv, tv = time_value(s), time_value(t)
        if sv == tv:
            return Identity()
        f_s = chain(sv)
        f_t = chain(tv)

        def value(z):
            arr = np.asarray(z, dtype=complex)
            scalar = arr.ndim == 0
            flat = arr.reshape(1) if scalar else arr.reshape(-1)
            target = np.asarray(f_s._val(flat), dtype=complex)
            w, res = _newton(f_t, target, flat, tol)
            bad = res > tol
            if bool(np.any(bad)):
                w = w.copy()
                w[bad] = _rescue(f_t, target[bad], tol)
            mag = np.abs(w)
            worst = float(np.max(mag))
            if worst > 1.0 + tol:
                raise RangeError(
                    f"inverted point left the closed unit disk (|w|={worst:.12g}); "
                    "the chain is not range-monotone at this pair")
            crowding = mag >= 1.0
            if bool(np.any(crowding)):
                w = np.where(crowding, w * ((1.0 - 1e-15) / mag), w)
            if scalar:
                return complex(w[0])
            return w.reshape(arr.shape)

        def deriv(z):
            w = value(z)
            return np.asarray(f_s._der(z), dtype=complex) / np.asarray(f_t._der(w), dtype=complex) \
                if isinstance(z, np.ndarray) else f_s._der(complex(z)) / f_t._der(complex(w))

        return Custom(value, deriv, label=f"chain-inverse[{sv:.6g},{tv:.6g}]",
                      vector_ok=True)

    return EvolutionFamily(float(a), float(b), transition, label="loewner")
