"""Exact lattice construction of a discontinuous evolution family.

Additivity without continuity is impossible for functions defined by a
formula, but easy on a finite rationally-independent basis: declare the
value of ``f`` on each basis element and extend by linearity over the
rationals.  With basis ``(1, sqrt(2))`` and images ``(pi, 0)`` the function
sends every rational to a multiple of pi yet vanishes on multiples of
sqrt(2) — additive on the lattice, wildly discontinuous on the line.

Feeding that ``f`` into the rotation family ``(s, t) -> e^{i f(t-s)} z``
yields a family whose axioms hold *exactly* (all angle bookkeeping happens
in ``fractions.Fraction`` before any float conversion) while continuity in
the parameters fails along explicit in-lattice sequences: the continued-
fraction convergents ``p/q`` of sqrt(2) are rational lattice points crowding
the lattice point sqrt(2), but ``f`` jumps from ``pi p/q`` (near pi sqrt(2))
to 0 in the limit.

Everything here is immutable and exact; floats appear only in reported
``real_value`` projections and in the final rotation angles.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .diskmap import DiskRegion, Rotation
from .errors import (BasisMismatch, ConfigError, DomainError, EvofamError,
                     LatticeError, NotDiscontinuous)
from .evolution import EvolutionFamily

try:  # tomllib landed in the 3.11 stdlib; tomli is its backport
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as _toml

__all__ = [
    "HamelBasis",
    "TimeVector",
    "AdditiveSpec",
    "DEFAULT_BASIS",
    "default_spec",
    "additive_eval",
    "additive_eval_exact",
    "is_linear",
    "sqrt2_convergents",
    "hamel_family",
    "discontinuity_witness",
    "semigroup_exact_check",
    "load_spec_file",
]

RationalLike = Union[int, str, Fraction]


@dataclass(frozen=True, slots=True)
class HamelBasis:
    """Real numbers assumed rationally independent, with display labels."""

    labels: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if len(self.labels) != len(self.values):
            raise BasisMismatch("basis labels and values differ in length")
        if not self.values:
            raise BasisMismatch("basis must contain at least one element")
        for v in self.values:
            if not math.isfinite(v) or v == 0.0:
                raise BasisMismatch(f"basis value {v} must be finite and nonzero")

    def __len__(self) -> int:
        return len(self.values)


DEFAULT_BASIS = HamelBasis(("1", "sqrt2"), (1.0, math.sqrt(2.0)))


@dataclass(frozen=True, slots=True)
class TimeVector:
    """Exact lattice time: rational coordinates over a declared basis.

    Addition, subtraction, negation and multiplication by rationals act on
    the coordinates and are exact.  Equality is exact and coordinate-wise.
    Ordering goes through the float ``real_value`` projection — good enough
    to sort sample grids, never used for arithmetic.
    """

    basis: HamelBasis
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(Fraction(q) for q in self.coords))
        if len(self.coords) != len(self.basis):
            raise BasisMismatch(
                f"{len(self.coords)} coordinates over a basis of {len(self.basis)}")

    @property
    def real_value(self) -> float:
        return math.fsum(float(q) * v for q, v in zip(self.coords, self.basis.values))

    def _require_same_basis(self, other: "TimeVector") -> None:
        if self.basis != other.basis:
            raise BasisMismatch("operands live over different bases")

    def __add__(self, other):
        if not isinstance(other, TimeVector):
            return NotImplemented
        self._require_same_basis(other)
        return TimeVector(self.basis, tuple(p + q for p, q in zip(self.coords, other.coords)))

    def __sub__(self, other):
        if not isinstance(other, TimeVector):
            return NotImplemented
        self._require_same_basis(other)
        return TimeVector(self.basis, tuple(p - q for p, q in zip(self.coords, other.coords)))

    def __neg__(self):
        return TimeVector(self.basis, tuple(-q for q in self.coords))

    def __mul__(self, factor):
        if not isinstance(factor, (int, Fraction)):
            return NotImplemented
        return TimeVector(self.basis, tuple(q * factor for q in self.coords))

    __rmul__ = __mul__

    def __lt__(self, other):
        if not isinstance(other, TimeVector):
            return NotImplemented
        return self.real_value < other.real_value

    def __le__(self, other):
        if not isinstance(other, TimeVector):
            return NotImplemented
        return self == other or self.real_value <= other.real_value

    def is_zero(self) -> bool:
        return all(q == 0 for q in self.coords)

    def __repr__(self) -> str:
        parts = [f"{q}*{lab}" for q, lab in zip(self.coords, self.basis.labels)]
        return f"TimeVector({' + '.join(parts)})"


@dataclass(frozen=True, slots=True)
class AdditiveSpec:
    """Values of the additive function on each basis element."""

    basis: HamelBasis
    images: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(float(x) for x in self.images))
        if len(self.images) != len(self.basis):
            raise BasisMismatch("one image per basis element required")
        for v in self.images:
            if not math.isfinite(v):
                raise DomainError(f"image {v} must be finite")


def default_spec() -> tuple[AdditiveSpec, TimeVector, TimeVector]:
    """The stock discontinuous setup: basis (1, sqrt2), images (pi, 0),
    interval from 0 to 2."""
    spec = AdditiveSpec(DEFAULT_BASIS, (math.pi, 0.0))
    start = TimeVector(DEFAULT_BASIS, (Fraction(0), Fraction(0)))
    end = TimeVector(DEFAULT_BASIS, (Fraction(2), Fraction(0)))
    return spec, start, end


def additive_eval_exact(spec: AdditiveSpec, t: TimeVector) -> Fraction:
    """Exact rational value sum_i q_i * f(b_i).

    ``Fraction(float)`` is exact (binary floats are rationals), so the whole
    computation happens in arbitrary-precision rationals; additivity holds
    on the nose, not merely to rounding.
    """
    if not isinstance(t, TimeVector):
        raise LatticeError(f"additive function needs an exact lattice time, got {t!r}")
    if t.basis != spec.basis:
        raise BasisMismatch("time vector and spec use different bases")
    total = Fraction(0)
    for q, image in zip(t.coords, spec.images):
        total += q * Fraction(image)
    return total


def additive_eval(spec: AdditiveSpec, t: TimeVector) -> float:
    """Float projection of :func:`additive_eval_exact` (one rounding)."""
    return float(additive_eval_exact(spec, t))


def is_linear(spec: AdditiveSpec) -> bool:
    """Whether the declared images are proportional to the basis values.

    Proportional images make the additive function plain multiplication by a
    constant — continuous, hence useless as a counterexample.  Checked via
    pairwise cross-products to dodge division by zero.
    """
    vals = spec.basis.values
    imgs = spec.images
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            lhs = imgs[i] * vals[j]
            rhs = imgs[j] * vals[i]
            scale = max(1.0, abs(lhs), abs(rhs))
            if abs(lhs - rhs) > 1e-12 * scale:
                return False
    return True


def sqrt2_convergents(n: int = 20) -> tuple[tuple[int, int], ...]:
    """First ``n`` continued-fraction convergents (p, q) of sqrt(2).

    1/1, 3/2, 7/5, 17/12, 41/29, ... via p' = p + 2q, q' = p + q.  Every
    numerator is odd, which is what pins the witness rotations at half a
    turn.  Capped at 20 terms; the 20th already matches sqrt(2) to ~1e-15,
    beyond which float geometry cannot tell the times apart anyway.
    """
    if not (1 <= n <= 20):
        raise DomainError(f"convergent count must lie in 1..20, got {n}")
    out = []
    p, q = 1, 1
    for _ in range(n):
        out.append((p, q))
        p, q = p + 2 * q, p + q
    return tuple(out)


# Index range of the convergents whose lattice offsets |q*sqrt2 - p| seed the
# clustered sample times below.  The upper end is a float-accuracy budget:
# offset 12 is ~2.6e-5 (finer than any scan window in use), while its witness
# rotation angle is ~6e4 — large enough that going deeper would let the one
# rounding per angle grow past the composition-law tolerance of 1e-10.
_CLUSTER_RANGE = range(8, 13)


def _cluster_offsets(basis: HamelBasis) -> tuple[TimeVector, ...]:
    """Positive lattice offsets |q*sqrt2 - p| along the convergents.

    The additive function of the stock spec sends each offset to an odd
    multiple of pi, so two sample times separated by one of these tiny
    offsets carry rotations half a turn apart.
    """
    convs = sqrt2_convergents(max(_CLUSTER_RANGE))
    offsets = []
    for j in _CLUSTER_RANGE:
        p, q = convs[j - 1]
        if j % 2:  # odd index: p/q < sqrt2, so q*sqrt2 - p > 0
            coords = (Fraction(-p), Fraction(q))
        else:
            coords = (Fraction(p), Fraction(-q))
        offsets.append(TimeVector(basis, coords))
    return tuple(offsets)


def _is_unit_sqrt2_basis(basis: HamelBasis) -> bool:
    return (len(basis) == 2
            and abs(basis.values[0] - 1.0) < 1e-12
            and abs(basis.values[1] - math.sqrt(2.0)) < 1e-12)


def hamel_family(spec: AdditiveSpec, a: TimeVector, b: TimeVector) -> EvolutionFamily:
    """Rotation family driven by the additive function, on exact lattice times.

    The transition for ``(s, t)`` rotates by ``f(t - s)``; since ``f`` is
    exactly additive, the diagonal gives the literal zero rotation and the
    composition law holds in rational arithmetic.  Queries at non-lattice
    times raise :class:`LatticeError` — there is no sensible float fallback.
    """
    if not isinstance(a, TimeVector) or not isinstance(b, TimeVector):
        raise LatticeError("interval endpoints must be exact lattice times")
    if a.basis != spec.basis or b.basis != spec.basis:
        raise BasisMismatch("endpoints and spec must share one basis")
    if not (a.real_value < b.real_value):
        raise DomainError("interval endpoints must satisfy a < b")

    def transition(s, t):
        if not isinstance(s, TimeVector) or not isinstance(t, TimeVector):
            raise LatticeError(
                f"time parameters must be exact lattice points, got ({s!r}, {t!r})")
        if s.basis != spec.basis or t.basis != spec.basis:
            raise BasisMismatch("query times use a different basis")
        gap = t - s
        if gap.is_zero():
            return Rotation(0.0)
        return Rotation(additive_eval(spec, gap))

    clustered = _is_unit_sqrt2_basis(spec.basis)
    offsets = _cluster_offsets(spec.basis) if clustered else ()

    def times(n):
        span = b - a
        points = {a, b}
        for k in range(1, n - 1):
            points.add(a + span * Fraction(k, n - 1))
        for delta in offsets:
            if delta.real_value <= span.real_value:
                points.add(a + delta)
                points.add(b - delta)
        return tuple(sorted(points, key=lambda t: t.real_value))

    return EvolutionFamily(a, b, transition, label="hamel",
                           times_hook=times, lattice=True)


def discontinuity_witness(spec: AdditiveSpec, family: EvolutionFamily,
                          region: DiskRegion) -> tuple[tuple[TimeVector, ...], float]:
    """In-lattice sequence refuting right-parameter continuity, with its gap.

    The times ``a + p_n/q_n`` (convergents of sqrt(2), n = 3..20) converge in
    real value to the lattice point ``a + sqrt(2)``, yet the transition maps
    from ``a`` stay a fixed distance from the limit map: the reported gap is
    the smallest locally-uniform distance along the tail, about 1.59 * r for
    the stock spec.  Raises :class:`NotDiscontinuous` for proportional
    (linear) specs, where no such sequence exists.
    """
    from .diagnostics import lu_distance  # local import; diagnostics sits above

    if is_linear(spec):
        raise NotDiscontinuous(
            "images are proportional to the basis — the additive function is "
            "plain scaling, hence continuous")
    if not _is_unit_sqrt2_basis(spec.basis):
        raise DomainError(
            "the witness construction is wired to the (1, sqrt2) basis; "
            "other bases need their own approximation sequence")
    if not isinstance(region, DiskRegion):
        region = DiskRegion(float(region))
    a, b = family.a, family.b
    if b.real_value - a.real_value < 1.5:
        raise DomainError(
            "interval too short: the convergent times reach up to a + 17/12, "
            "so the witness needs length >= 1.5")

    star = a + TimeVector(spec.basis, (Fraction(0), Fraction(1)))
    limit_map = family.at(a, star)
    sequence = []
    gap = math.inf
    for p, q in sqrt2_convergents(20)[2:]:  # tail n >= 3; early terms sit too far out
        t_n = a + TimeVector(spec.basis, (Fraction(p, q), Fraction(0)))
        sequence.append(t_n)
        gap = min(gap, lu_distance(family.at(a, t_n), limit_map, region))
    return tuple(sequence), gap


def semigroup_exact_check(spec: AdditiveSpec, family: EvolutionFamily,
                          n: int = 100, seed: int = 0) -> float:
    """Exercise the composition law on random lattice triples, exactly.

    Draws triples s <= u <= t of lattice times, verifies in rational
    arithmetic that the angles compose additively (a failure would be an
    implementation bug, not rounding), and returns the worst float
    discrepancy after projection — the one rounding the family's rotations
    actually see.
    """
    rng = random.Random(seed)
    a, b = family.a, family.b
    span = b - a
    worst = 0.0
    for _ in range(n):
        picks = sorted(Fraction(rng.randrange(0, 65), 64) for _ in range(3))
        s, u, t = (a + span * lam for lam in picks)
        first = additive_eval_exact(spec, u - s)
        second = additive_eval_exact(spec, t - u)
        direct = additive_eval_exact(spec, t - s)
        if first + second != direct:
            raise EvofamError(
                "exact additivity failed on a lattice triple — implementation bug")
        drift = abs((float(first) + float(second)) - float(direct))
        worst = max(worst, drift)
    return worst


# ---------------------------------------------------------------------------
# Spec files
# ---------------------------------------------------------------------------

_BASIS_LITERALS = {
    "1": 1.0,
    "sqrt2": math.sqrt(2.0),
    "sqrt3": math.sqrt(3.0),
    "sqrt5": math.sqrt(5.0),
}

_IMAGE_LITERALS = {
    "pi": math.pi,
    "-pi": -math.pi,
    "pi/2": math.pi / 2.0,
    "pi*sqrt2": math.pi * math.sqrt(2.0),
}


def _parse_basis_entry(raw) -> tuple[str, float]:
    if isinstance(raw, str):
        key = raw.strip()
        if key in _BASIS_LITERALS:
            return key, _BASIS_LITERALS[key]
        try:
            return key, float(key)
        except ValueError:
            raise ConfigError(f"unknown basis element {raw!r}") from None
    if isinstance(raw, (int, float)):
        return str(raw), float(raw)
    raise ConfigError(f"basis entries must be strings or numbers, got {raw!r}")


def _parse_image_entry(raw) -> float:
    if isinstance(raw, str):
        key = raw.strip()
        if key in _IMAGE_LITERALS:
            return _IMAGE_LITERALS[key]
        try:
            return float(key)
        except ValueError:
            raise ConfigError(f"unknown image literal {raw!r}") from None
    if isinstance(raw, (int, float)):
        return float(raw)
    raise ConfigError(f"images must be numbers or literals, got {raw!r}")


def _parse_coords(raw, basis: HamelBasis, what: str) -> TimeVector:
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(f"{what} must be a list of rational strings")
    if len(raw) != len(basis):
        raise ConfigError(f"{what} needs {len(basis)} coordinates")
    coords = []
    for item in raw:
        try:
            coords.append(Fraction(str(item)))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad rational {item!r} in {what}") from None
    return TimeVector(basis, tuple(coords))


def load_spec_file(path) -> tuple[AdditiveSpec, TimeVector, TimeVector]:
    """Read an additive-function spec (TOML) plus its lattice interval.

    Layout::

        basis = ["1", "sqrt2"]        # literals or plain numbers
        images = ["pi", 0.0]          # numbers or pi-literals
        [interval]                    # optional; defaults to 0..2 along
        start = ["0", "0"]            # the first basis element
        end = ["2", "0"]

    Malformed files raise :class:`ConfigError`.
    """
    try:
        with open(path, "rb") as fh:
            data = _toml.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read spec file {path}: {exc}") from None
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from None

    if "basis" not in data or "images" not in data:
        raise ConfigError("spec file needs 'basis' and 'images' entries")
    if not isinstance(data["basis"], list) or not isinstance(data["images"], list):
        raise ConfigError("'basis' and 'images' must be lists")

    labels, values = [], []
    for raw in data["basis"]:
        lab, val = _parse_basis_entry(raw)
        labels.append(lab)
        values.append(val)
    try:
        basis = HamelBasis(tuple(labels), tuple(values))
        spec = AdditiveSpec(basis, tuple(_parse_image_entry(x) for x in data["images"]))
    except EvofamError as exc:
        raise ConfigError(str(exc)) from None

    interval = data.get("interval", {})
    if not isinstance(interval, dict):
        raise ConfigError("'interval' must be a table with 'start' and 'end'")
    if interval:
        start = _parse_coords(interval.get("start"), basis, "interval.start")
        end = _parse_coords(interval.get("end"), basis, "interval.end")
    else:
        zero = [0] * len(basis)
        two = [0] * len(basis)
        two[0] = 2
        start = TimeVector(basis, tuple(Fraction(c) for c in zero))
        end = TimeVector(basis, tuple(Fraction(c) for c in two))
    if not (start.real_value < end.real_value):
        raise ConfigError("interval start must precede end in real value")
    return spec, start, end
