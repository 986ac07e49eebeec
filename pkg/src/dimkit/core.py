"""Shared value types, tolerance configuration, and the error hierarchy.

Everything downstream (special functions, radial measures, loop integrals,
propagators, spectral flow, cosmology) talks in terms of these types: a
complex analytically-continued dimension with pole bookkeeping, a tolerance
profile threaded through series/quadrature evaluators, and a uniform result
record carrying an error estimate and convergence metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "Dimension",
    "ToleranceConfig",
    "EvalResult",
    "DimkitError",
    "PoleAtArgument",
    "PoleAtDimension",
    "DomainError",
    "OrderOutOfRange",
    "OutsideDisk",
    "OutsideDomain",
    "NotConverged",
    "InconsistentTheta",
    "ThetaMismatch",
    "PreconditionViolated",
    "InsufficientSamples",
    "InsufficientTrials",
    "ForbiddenExponent",
    "WrongWindow",
    "EndpointSingularity",
    "ZeroDimension",
    "NoConvergentRegion",
    "OracleMismatch",
    "RootNotBracketed",
    "SaturatedClock",
    "StepRejected",
    "as_dimension",
    "near_nonpositive_integer",
]

#: Hard raise threshold: evaluations this close to a Gamma pole refuse to
#: return a huge number and raise instead.
HARD_POLE_TOL = 1e-8

#: Default flagging distance for near-pole classification on Dimension.
DEFAULT_POLE_TOL = 1e-6


class DimkitError(Exception):
    """Base class for all library errors."""


class PoleAtArgument(DimkitError):
    """A Gamma-type evaluation was requested at (or too close to) a pole."""


class PoleAtDimension(DimkitError):
    """A dimension-dependent Gamma argument sits on a pole."""


class DomainError(DimkitError):
    """Argument outside the mathematical domain of the operation."""


class OrderOutOfRange(DimkitError):
    """Bessel order outside the supported band."""


class OutsideDisk(DimkitError):
    """Series argument outside the convergence disk."""


class OutsideDomain(DimkitError):
    """Point outside the convergence domain of a double series."""


class NotConverged(DimkitError):
    """Iteration/series budget exhausted before reaching tolerance."""


class DivergentSeries(DimkitError):
    """Series evaluation requested where the classification says it diverges."""


class InconsistentTheta(DimkitError):
    """Reflection bookkeeping exponent does not match the declared value."""


class ThetaMismatch(DimkitError):
    """Descriptor-level reflection exponent failed the consistency check."""


class PreconditionViolated(DimkitError):
    """A documented precondition on the inputs does not hold."""


class InsufficientSamples(DimkitError):
    """Extrapolation requested from too few samples."""


class InsufficientTrials(DimkitError):
    """Monte Carlo estimate requested with too small a trial budget."""


class ForbiddenExponent(DimkitError):
    """Power-law exponent on the excluded lattice of the transform."""


class WrongWindow(DimkitError):
    """Dimension outside the validity window of the subtraction scheme."""


class EndpointSingularity(DimkitError):
    """Non-integrable endpoint singularity in a parameter integral."""


class ZeroDimension(DimkitError):
    """Operation undefined at D = 0."""


class NoConvergentRegion(DimkitError):
    """No series solution converges at the requested parameter point."""


class OracleMismatch(DimkitError):
    """Validated evaluation disagreed with its quadrature oracle."""


class RootNotBracketed(DimkitError):
    """Root search failed to bracket a sign change."""


class SaturatedClock(DimkitError):
    """Diffusion-clock inversion requested at the saturation point."""


class StepRejected(DimkitError):
    """Integrator produced a non-finite or inadmissible state."""


class UnknownCommand(DimkitError):
    """Command-line dispatch received an unrecognized subcommand."""


class InvalidInput(DimkitError):
    """Command-line input could not be parsed into a valid request."""


def near_nonpositive_integer(z: complex, tol: float = HARD_POLE_TOL) -> bool:
    """True when ``z`` lies within ``tol`` of {0, -1, -2, ...}."""
    zr, zi = complex(z).real, complex(z).imag
    if abs(zi) > tol:
        return False
    n = round(zr)
    return n <= 0 and abs(zr - n) <= tol


@dataclass(frozen=True)
class Dimension:
    """An analytically continued dimension with pole-proximity bookkeeping.

    ``classification()`` is a pure function of ``value`` and
    ``pole_tolerance``: near-pole detection fires when the distance to either
    even-integer pole lattice ({2, 4, 6, ...} for the positive branch,
    {-2, -4, -6, ...} for the excluded negative set) is at most the tolerance.
    """

    value: complex
    pole_tolerance: float = DEFAULT_POLE_TOL

    def __post_init__(self) -> None:
        if self.pole_tolerance <= 0:
            raise PreconditionViolated("pole_tolerance must be positive")

    @property
    def re(self) -> float:
        return complex(self.value).real

    @property
    def im(self) -> float:
        return complex(self.value).imag

    def distance_to_pole(self) -> float:
        """Distance to the nearest nonzero even integer (both signs)."""
        re, im = self.re, self.im
        n = round(re / 2.0)
        if n == 0:
            # nearest nonzero even integers are +-2
            return min(abs(complex(self.value) - 2.0), abs(complex(self.value) + 2.0))
        return math.hypot(re - 2.0 * n, im)

    @property
    def near_pole(self) -> bool:
        return self.distance_to_pole() <= self.pole_tolerance

    def classification(self) -> str:
        if self.near_pole:
            return "near-pole"
        if abs(self.im) > 0.0:
            return "complex"
        if self.re < 0.0:
            return "negative"
        return "positive"


def as_dimension(value, pole_tolerance: float = DEFAULT_POLE_TOL) -> Dimension:
    """Coerce a number (or pass through a Dimension) to a Dimension."""
    if isinstance(value, Dimension):
        return value
    return Dimension(complex(value), pole_tolerance)


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerance profile threaded through series and quadrature evaluators."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    max_terms: int = 2000
    quad_points: int = 200
    eps_reg: float = 1e-2

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise PreconditionViolated("tolerances must be positive")
        if self.max_terms < 1 or self.quad_points < 1:
            raise PreconditionViolated("budgets must be positive integers")
        if not (0.0 < self.eps_reg < 1.0):
            raise PreconditionViolated("eps_reg must lie in (0, 1)")


@dataclass
class EvalResult:
    """Numeric value with an error estimate and convergence metadata.

    ``classification`` carries a label when the operation defines one (for
    example the unit-circle convergence class of a hypergeometric value);
    ``phase`` keeps symbolic phase markers that must not be folded into the
    numeric value; ``meta`` holds auxiliary embedding data.
    """

    value: complex
    error: float = 0.0
    converged: bool = True
    classification: str = ""
    phase: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def real(self) -> float:
        return complex(self.value).real
