"""Exception taxonomy shared across the package.

Every error raised by the library is a subclass of :class:`EvofamError`, so
callers (notably the CLI) can distinguish library failures from genuine bugs
with a single ``except`` clause.
"""

from __future__ import annotations

__all__ = [
    "EvofamError",
    "DomainError",
    "IntervalMismatch",
    "InversionFailure",
    "RangeError",
    "CertificationFailure",
    "BasisMismatch",
    "LatticeError",
    "NotDiscontinuous",
    "ConfigError",
]


class EvofamError(Exception):
    """Base class for all library errors."""


class DomainError(EvofamError, ValueError):
    """An argument left its mathematical domain (point outside the disk,
    parameter out of range, interval order violated, ...)."""


class IntervalMismatch(EvofamError, ValueError):
    """Two families were combined whose parameter intervals do not meet."""


class InversionFailure(EvofamError, RuntimeError):
    """Newton inversion of a chain map did not converge within the cap."""


class RangeError(EvofamError, RuntimeError):
    """A numerically solved preimage left the closed unit disk by more than
    the inversion tolerance, i.e. the target was not in the chain map's range."""


class CertificationFailure(EvofamError, RuntimeError):
    """The univalence certificate could not be completed: the derivative at
    the origin vanished numerically, or the subdivision exceeded its cap."""


class BasisMismatch(EvofamError, ValueError):
    """Arithmetic combined exact time vectors over different bases."""


class LatticeError(EvofamError, ValueError):
    """A lattice-restricted family was queried at a time that is not a known
    lattice point."""


class NotDiscontinuous(EvofamError, ValueError):
    """A discontinuity witness was requested for an additive spec that is
    linear, hence continuous."""


class ConfigError(EvofamError, ValueError):
    """Invalid CLI configuration or spec file (maps to exit code 2)."""
