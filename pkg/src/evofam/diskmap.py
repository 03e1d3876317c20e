"""Holomorphic self-maps of the unit disk as immutable expression trees.

A ``DiskMap`` is a finite expression tree over a small primitive grammar:

    Identity            z
    Rotation(theta)     e^{i theta} z
    Scale(factor)       factor * z,               |factor| <= 1
    Mobius(mu)          (z + mu) / (1 + conj(mu) z),   |mu| < 1
    Compose(outer, inner)
    Custom(value_fn, deriv_fn)   caller-certified self-map

Derivatives are propagated symbolically through the tree by the chain rule,
never by numeric differencing, so the bound audits downstream are free of
finite-difference noise.

The module also exposes the sharp closed-form distortion estimates for
self-maps of the disk:

* ``schwarz_pick_upper``  --  |w(z)| <= (|z| + |w(0)|) / (1 + |w(0)| |z|)
* ``center_bound``        --  |w(0)| <= (|z| + |w(z)|) / (1 + |z| |w(z)|)
* ``fixed_origin_growth`` --  |w(z)| <= |z| (|z| + s) / (1 + s |z|)  when
  w(0) = 0 and s = |w'(0)|
* ``identity_deviation``  --  |w(z) - z| <= |z| (1 + |z|) |1 - L| / (1 - |L| |z|)
  when w(0) = 0 and L = w'(0)
* ``landau_radius``       --  an origin-fixing self-map with |w'(0)| = s is
  injective on the disk of radius s / (1 + sqrt(1 - s^2))
* ``lipschitz_bound``     --  2 |z1 - z0| / (1 - r^2) on |z| <= r
* ``hyperbolic_sum``      --  (e1 + e2) / (1 + e1 e2), the additive recursion
  for pseudo-hyperbolic radii

All bound operations take real magnitudes, not maps; the audit suite pairs
them with ``eval`` so each constant stays testable in isolation.  Everything
here is pure and immutable, hence safe under concurrent evaluation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError

__all__ = [
    "DiskMap",
    "Identity",
    "Rotation",
    "Scale",
    "Mobius",
    "Compose",
    "Custom",
    "DiskRegion",
    "BoundLedger",
    "schwarz_pick_upper",
    "center_bound",
    "fixed_origin_growth",
    "identity_deviation",
    "landau_radius",
    "lipschitz_bound",
    "hyperbolic_sum",
    "sample_map",
]

ComplexLike = Union[complex, float, int]


def _inside_open_disk(z: complex) -> bool:
    return (z.real * z.real + z.imag * z.imag) < 1.0


class DiskMap:
    """Abstract holomorphic self-map of the open unit disk.

    Subclasses implement ``_val`` and ``_der``; both are polymorphic over a
    scalar ``complex`` and a complex ``numpy`` array, which is what makes the
    grid diagnostics cheap.  The public entry points validate the domain.
    """

    __slots__ = ()

    def _val(self, z):  # pragma: no cover - abstract
        raise NotImplementedError

    def _der(self, z):  # pragma: no cover - abstract
        raise NotImplementedError

    def eval(self, z: ComplexLike) -> complex:
        """Evaluate the map at a point of the open disk."""
        z = complex(z)
        if not _inside_open_disk(z):
            raise DomainError(f"point {z} is not inside the open unit disk")
        return complex(self._val(z))

    def deriv(self, z: ComplexLike) -> complex:
        """Analytic derivative at ``z``, via the chain rule on the tree."""
        z = complex(z)
        if not _inside_open_disk(z):
            raise DomainError(f"point {z} is not inside the open unit disk")
        return complex(self._der(z))

    def eval_many(self, zs: Sequence[ComplexLike]) -> np.ndarray:
        """Vectorized ``eval`` over an array of disk points."""
        arr = np.asarray(zs, dtype=complex)
        if arr.size and float(np.max(np.abs(arr))) >= 1.0:
            raise DomainError("a sample point is not inside the open unit disk")
        return np.asarray(self._val(arr), dtype=complex)


@dataclass(frozen=True, slots=True)
class Identity(DiskMap):
    """The identity map z -> z."""

    def _val(self, z):
        return z

    def _der(self, z):
        return z * 0.0 + 1.0


@dataclass(frozen=True, slots=True)
class Rotation(DiskMap):
    """z -> e^{i angle} z for a real angle in radians."""

    angle: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.angle):
            raise DomainError("rotation angle must be finite")

    def _factor(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def _val(self, z):
        return self._factor() * z

    def _der(self, z):
        return z * 0.0 + self._factor()


@dataclass(frozen=True, slots=True)
class Scale(DiskMap):
    """z -> factor * z with |factor| <= 1.

    The unimodular case |factor| = 1 is deliberately admitted: rotations are
    self-maps of the disk even though they are not strict contractions, and
    the exact rotation families downstream need them.
    """

    factor: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "factor", complex(self.factor))
        if abs(self.factor) > 1.0:
            raise DomainError(f"scale factor {self.factor} exceeds modulus 1")

    def _val(self, z):
        return self.factor * z

    def _der(self, z):
        return z * 0.0 + self.factor


@dataclass(frozen=True, slots=True)
class Mobius(DiskMap):
    """The disk automorphism z -> (z + mu) / (1 + conj(mu) z), |mu| < 1.

    Maps 0 to ``origin_image`` (= mu); its inverse is the same automorphism
    with parameter -mu.  Derivative: (1 - |mu|^2) / (1 + conj(mu) z)^2.
    """

    origin_image: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin_image", complex(self.origin_image))
        if abs(self.origin_image) >= 1.0:
            raise DomainError(
                f"Mobius parameter {self.origin_image} must lie inside the open disk"
            )

    def _val(self, z):
        mu = self.origin_image
        return (z + mu) / (1.0 + mu.conjugate() * z)

    def _der(self, z):
        mu = self.origin_image
        den = 1.0 + mu.conjugate() * z
        return (1.0 - abs(mu) ** 2) / (den * den)


@dataclass(frozen=True, slots=True)
class Compose(DiskMap):
    """outer after inner: z -> outer(inner(z))."""

    outer: DiskMap
    inner: DiskMap

    def _val(self, z):
        return self.outer._val(self.inner._val(z))

    def _der(self, z):
        # Chain rule on the tree; no numeric differencing anywhere.
        w = self.inner._val(z)
        return self.outer._der(w) * self.inner._der(z)


@dataclass(frozen=True, slots=True, repr=False)
class Custom(DiskMap):
    """Caller-supplied value/derivative callbacks with a declared self-map
    guarantee.

    The library trusts the declaration that ``value_fn`` maps the disk into
    itself; the audit suite samples it.  Set ``vector_ok`` when the callbacks
    accept numpy arrays; otherwise vectorized evaluation falls back to a
    scalar loop.
    """

    value_fn: Callable
    deriv_fn: Callable
    label: str = "custom"
    vector_ok: bool = False

    def _val(self, z):
        if isinstance(z, np.ndarray) and not self.vector_ok:
            return np.array([self.value_fn(complex(w)) for w in z.ravel()],
                            dtype=complex).reshape(z.shape)
        return self.value_fn(z)

    def _der(self, z):
        if isinstance(z, np.ndarray) and not self.vector_ok:
            return np.array([self.deriv_fn(complex(w)) for w in z.ravel()],
                            dtype=complex).reshape(z.shape)
        return self.deriv_fn(z)

    def __repr__(self) -> str:
        return f"Custom({self.label!r})"


@dataclass(frozen=True, slots=True)
class DiskRegion:
    """The closed subdisk |z| <= r, 0 < r <= 1."""

    r: float

    def __post_init__(self) -> None:
        r = float(self.r)
        object.__setattr__(self, "r", r)
        if not (0.0 < r <= 1.0) or not math.isfinite(r):
            raise DomainError(f"disk radius must lie in (0, 1], got {r}")


@dataclass(frozen=True, slots=True)
class BoundLedger:
    """Named scalar bounds collected during an audit.

    ``growth`` / ``deviation`` / ``lipschitz`` are the largest bound values a
    run evaluated; ``landau_radius`` is the smallest univalence radius it
    certified.  Purely bookkeeping: the ledger makes a bound-audit report
    self-describing.
    """

    growth: float = 0.0
    deviation: float = 0.0
    lipschitz: float = 0.0
    landau_radius: float = 1.0

    def __post_init__(self) -> None:
        for name in ("growth", "deviation", "lipschitz"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"ledger bound {name} must be finite and nonnegative")
        lr = float(self.landau_radius)
        object.__setattr__(self, "landau_radius", lr)
        if not (0.0 < lr <= 1.0):
            raise DomainError(f"ledger landau_radius must lie in (0, 1], got {lr}")


# ---------------------------------------------------------------------------
# Closed-form bounds
# ---------------------------------------------------------------------------

def _check_range(name: str, x: float, lo: float, hi: float, *, top_open: bool) -> float:
    x = float(x)
    ok = (lo <= x < hi) if top_open else (lo <= x <= hi)
    if not (math.isfinite(x) and ok):
        top = ")" if top_open else "]"
        raise DomainError(f"{name}={x} outside [{lo}, {hi}{top}")
    return x


def schwarz_pick_upper(z_abs: float, w0_abs: float) -> float:
    """Growth bound (|z| + |w(0)|) / (1 + |w(0)| |z|) for a self-map w."""
    z_abs = _check_range("z_abs", z_abs, 0.0, 1.0, top_open=True)
    w0_abs = _check_range("w0_abs", w0_abs, 0.0, 1.0, top_open=True)
    return (z_abs + w0_abs) / (1.0 + w0_abs * z_abs)


def center_bound(z_abs: float, wz_abs: float) -> float:
    """Bound on |w(0)| given |w(z)|: the same closed form with the roles of
    the two magnitudes swapped."""
    z_abs = _check_range("z_abs", z_abs, 0.0, 1.0, top_open=True)
    wz_abs = _check_range("wz_abs", wz_abs, 0.0, 1.0, top_open=True)
    return (z_abs + wz_abs) / (1.0 + z_abs * wz_abs)


def fixed_origin_growth(z_abs: float, deriv_abs: float) -> float:
    """Growth bound |z| (|z| + s) / (1 + s |z|) for w(0) = 0, s = |w'(0)|.

    At s = 1 it degenerates to |z|; at s = 0 it is the quadratic Schwarz
    bound |z|^2.
    """
    z_abs = _check_range("z_abs", z_abs, 0.0, 1.0, top_open=True)
    deriv_abs = _check_range("deriv_abs", deriv_abs, 0.0, 1.0, top_open=False)
    return z_abs * (z_abs + deriv_abs) / (1.0 + deriv_abs * z_abs)


def identity_deviation(z_abs: float, deriv: ComplexLike) -> float:
    """Deviation bound |z| (1 + |z|) |1 - L| / (1 - |L| |z|) for w(0) = 0 and
    L = w'(0) (complex; its argument matters through |1 - L|)."""
    z_abs = _check_range("z_abs", z_abs, 0.0, 1.0, top_open=True)
    lam = complex(deriv)
    lam_abs = abs(lam)
    if lam_abs > 1.0:
        raise DomainError(f"origin derivative modulus {lam_abs} exceeds 1")
    if lam_abs * z_abs >= 1.0:
        raise DomainError("degenerate denominator: |L| * z_abs >= 1")
    return z_abs * (1.0 + z_abs) * abs(1.0 - lam) / (1.0 - lam_abs * z_abs)


def landau_radius(sigma: float) -> float:
    """Univalence radius s / (1 + sqrt(1 - s^2)) of an origin-fixing self-map
    with |w'(0)| = s.

    Strictly increasing in s, tends to 1 as s -> 1.  The radicand is clamped
    at 0 so rounding at the s = 1 endpoint cannot produce a NaN.
    """
    sigma = float(sigma)
    if not (math.isfinite(sigma) and 0.0 < sigma <= 1.0):
        raise DomainError(f"sigma={sigma} outside (0, 1]")
    radicand = max(0.0, 1.0 - sigma * sigma)
    return sigma / (1.0 + math.sqrt(radicand))


def lipschitz_bound(z0: ComplexLike, z1: ComplexLike, r: float) -> float:
    """Uniform Lipschitz bound 2 |z1 - z0| / (1 - r^2) valid for any self-map
    of the disk on the subdisk |z| <= r < 1."""
    z0 = complex(z0)
    z1 = complex(z1)
    r = float(r)
    if not (math.isfinite(r) and 0.0 <= r < 1.0):
        raise DomainError(f"radius r={r} outside [0, 1)")
    if abs(z0) > r or abs(z1) > r:
        raise DomainError("a point lies outside the closed disk of radius r")
    return 2.0 * abs(z1 - z0) / (1.0 - r * r)


def hyperbolic_sum(e1: float, e2: float) -> float:
    """The recursion (e1 + e2) / (1 + e1 e2) on [0, 1).

    This is addition of pseudo-hyperbolic radii: commutative, associative,
    monotone in each argument, with 0 as identity, and the result stays
    strictly below 1 whenever both inputs do.
    """
    e1 = _check_range("e1", e1, 0.0, 1.0, top_open=True)
    e2 = _check_range("e2", e2, 0.0, 1.0, top_open=True)
    return (e1 + e2) / (1.0 + e1 * e2)


# ---------------------------------------------------------------------------
# Random maps for audits
# ---------------------------------------------------------------------------

def sample_map(
    rng: random.Random,
    max_depth: int = 6,
    *,
    mobius_cap: float = 0.9,
    scale_range: tuple[float, float] = (0.05, 0.98),
    leaf_prob: float = 0.35,
    unimodular_prob: float = 0.1,
) -> DiskMap:
    """Draw a random expression tree over the primitive grammar.

    Composition depth is bounded by ``max_depth``.  ``mobius_cap`` bounds the
    modulus of Mobius parameters (keeps denominators away from 0 inside the
    disk), ``scale_range`` bounds non-unimodular scale factors away from the
    degenerate constant-zero map.  Deterministic given the ``rng`` state.
    """
    if max_depth > 1 and rng.random() >= leaf_prob:
        return Compose(sample_map(rng, max_depth - 1,
                                  mobius_cap=mobius_cap,
                                  scale_range=scale_range,
                                  leaf_prob=leaf_prob,
                                  unimodular_prob=unimodular_prob),
                       sample_map(rng, max_depth - 1,
                                  mobius_cap=mobius_cap,
                                  scale_range=scale_range,
                                  leaf_prob=leaf_prob,
                                  unimodular_prob=unimodular_prob))
    u = rng.random()
    if u < 0.08:
        return Identity()
    if u < 0.30:
        return Rotation(rng.uniform(0.0, 2.0 * math.pi))
    if u < 0.60:
        if rng.random() < unimodular_prob:
            rho = 1.0
        else:
            rho = rng.uniform(*scale_range)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        return Scale(rho * complex(math.cos(theta), math.sin(theta)))
    rho = rng.uniform(0.0, mobius_cap)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return Mobius(rho * complex(math.cos(theta), math.sin(theta)))
