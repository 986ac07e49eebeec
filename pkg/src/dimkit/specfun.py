"""Special functions for analytic continuation in the dimension.

Gamma with pole guarding, Pochhammer symbols with the negative-index
identity, the reflection ("flip") transform for Gamma ratios, Bessel
evaluation, the Gauss hypergeometric series with its unit-circle
convergence classification, and the fourth Appell double series summed by
diagonals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from scipy import special as sp

from .core import (
    HARD_POLE_TOL,
    DomainError,
    EvalResult,
    InconsistentTheta,
    NotConverged,
    OrderOutOfRange,
    OutsideDisk,
    OutsideDomain,
    PoleAtArgument,
    ToleranceConfig,
    near_nonpositive_integer,
)

__all__ = [
    "PochhammerTerm",
    "gamma",
    "loggamma",
    "gamma_ratio_flip",
    "pochhammer",
    "bessel",
    "gauss_2f1",
    "hyp2f1_class",
    "appell_f4",
]


@dataclass(frozen=True)
class PochhammerTerm:
    """A rising-factorial factor (base)_shift with an integer shift."""

    base: complex
    shift: int

    def value(self) -> complex:
        return pochhammer(self.base, self.shift)


def gamma(x: complex) -> complex:
    """Gamma function with hard pole guarding.

    Arguments within ``HARD_POLE_TOL`` of a nonpositive integer raise
    ``PoleAtArgument`` instead of returning a huge number. Real inputs give
    real outputs; complex inputs are evaluated through the complex branch.
    """
    z = complex(x)
    if near_nonpositive_integer(z):
        raise PoleAtArgument(f"gamma pole at argument {x}")
    if z.imag == 0.0:
        return complex(float(sp.gamma(z.real)))
    return complex(sp.gamma(z))


def loggamma(x: complex) -> complex:
    """Principal-branch log-Gamma (complex capable), pole guarded."""
    z = complex(x)
    if near_nonpositive_integer(z):
        raise PoleAtArgument(f"log-gamma pole at argument {x}")
    return complex(sp.loggamma(z))


def pochhammer(z: complex, n: int) -> complex:
    """Rising factorial (z)_n for integer n of either sign.

    Nonnegative n uses the ascending product; negative n uses the identity
    (z)_{-n} = (-1)^n / (1-z)_n. A zero denominator in the negative-index
    identity means the symbol has a pole.
    """
    if n != int(n):
        raise DomainError("pochhammer shift must be an integer")
    n = int(n)
    zc = complex(z)
    if n >= 0:
        out = complex(1.0)
        for k in range(n):
            out *= zc + k
        return out
    m = -n
    denom = pochhammer(1.0 - zc, m)
    if denom == 0:
        raise PoleAtArgument(f"pochhammer({z}, {n}) hits a pole")
    return (-1.0) ** m / denom


def gamma_ratio_flip(
    numerator_args: Sequence[complex],
    denominator_args: Sequence[complex],
    theta: complex,
) -> tuple[complex, list[complex], list[complex]]:
    """Reflect a Gamma ratio: prod Gamma(alpha)/Gamma(beta) -> sign * prod Gamma(1-beta)/Gamma(1-alpha).

    The declared ``theta`` must equal Sum(beta-alpha) (relative 1e-9); the returned
    numeric sign is the exact reflection factor Prod sin(pibeta)/Prod sin(pialpha), which
    reduces to (-1)^Theta whenever every beta-alpha is an integer and plays the formal
    role of (-1)^Theta in the half-integer bookkeeping of loop descriptors.
    """
    alphas = [complex(a) for a in numerator_args]
    betas = [complex(b) for b in denominator_args]
    if len(alphas) != len(betas):
        raise InconsistentTheta("flip requires equally many numerator and denominator args")
    total = sum(betas) - sum(alphas)
    scale = max(1.0, abs(complex(theta)))
    if abs(total - complex(theta)) > 1e-9 * scale:
        raise InconsistentTheta(
            f"declared theta {theta} but arguments give {total}"
        )
    sign = complex(1.0)
    for a, b in zip(alphas, betas):
        sign *= cmath.sin(math.pi * b) / cmath.sin(math.pi * a)
    flipped_num = [1.0 - b for b in betas]
    flipped_den = [1.0 - a for a in alphas]
    return sign, flipped_num, flipped_den


_BESSEL_KINDS = {"J", "I", "K"}


def bessel(kind: str, order: float, x: float) -> float:
    """Bessel J/I/K of real order on x in (0, 50].

    Orders are limited to |order| <= 20 (the band where the evaluation is
    validated to 1e-10 relative accuracy); x must be positive.
    """
    if kind not in _BESSEL_KINDS:
        raise DomainError(f"unknown Bessel kind {kind!r}")
    if not (0.0 < x <= 50.0):
        raise DomainError(f"Bessel argument {x} outside (0, 50]")
    if abs(order) > 20.0:
        raise OrderOutOfRange(f"Bessel order {order} outside [-20, 20]")
    if kind == "J":
        return float(sp.jv(order, x))
    if kind == "I":
        return float(sp.iv(order, x))
    return float(sp.kv(order, x))


def hyp2f1_class(gamma_param: float) -> str:
    """Unit-circle convergence class from the boundary parameter.

    The parameter is gamma = Re(a + b - c): the series diverges on |z| = 1 for
    gamma >= 1, converges absolutely for gamma < 0, and converges except at z = 1
    for 0 <= gamma < 1.
    """
    if gamma_param >= 1.0:
        return "diverges"
    if gamma_param < 0.0:
        return "converges-absolutely"
    return "converges-except-z=1"


def gauss_2f1(
    a: complex,
    b: complex,
    c: complex,
    z: complex,
    tol: ToleranceConfig | None = None,
    gamma_param: float | None = None,
) -> EvalResult:
    """Gauss hypergeometric series 2F1(a, b; c; z) inside the unit disk.

    Summed by direct term recursion; the result carries the unit-circle
    convergence class computed from gamma = Re(a+b-c) unless the caller supplies
    its own boundary parameter (propagator evaluations report the
    measure-exponent form of the same quantity).
    """
    tol = tol or ToleranceConfig()
    zc = complex(z)
    if abs(zc) >= 1.0:
        raise OutsideDisk(f"|z| = {abs(zc)} is not inside the unit disk")
    if near_nonpositive_integer(complex(c)):
        raise PoleAtArgument(f"2F1 lower parameter c = {c} is a nonpositive integer")
    gp = float(gamma_param) if gamma_param is not None else (complex(a) + complex(b) - complex(c)).real
    label = hyp2f1_class(gp)

    term = complex(1.0)
    total = complex(1.0)
    for n in range(tol.max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * zc
        total += term
        if abs(term) <= tol.abs_tol * (1.0 + abs(total)):
            return EvalResult(
                value=total,
                error=abs(term),
                converged=True,
                classification=label,
            )
    raise NotConverged(
        f"2F1 series did not reach tolerance within {tol.max_terms} terms"
    )


def appell_f4(
    alpha: complex,
    beta: complex,
    gamma1: complex,
    gamma2: complex,
    x: complex,
    y: complex,
    tol: ToleranceConfig | None = None,
) -> EvalResult:
    """Fourth Appell double series summed along diagonals m + n = s.

    Convergence domain: sqrt|x| + sqrt|y| < 1. The tail is controlled by the
    geometric decay of consecutive diagonal sums; two consecutive diagonals
    below tolerance terminate the sum.
    """
    tol = tol or ToleranceConfig()
    if math.sqrt(abs(x)) + math.sqrt(abs(y)) >= 1.0:
        raise OutsideDomain(
            f"sqrt|x|+sqrt|y| = {math.sqrt(abs(x)) + math.sqrt(abs(y)):.6g} >= 1"
        )
    for g, name in ((gamma1, "gamma1"), (gamma2, "gamma2")):
        if near_nonpositive_integer(complex(g)):
            raise PoleAtArgument(f"F4 lower parameter {name} = {g} is a nonpositive integer")

    # Diagonal recursion on the exact term ratio keeps each term O(1) work.
    total = complex(0.0)
    prev = [complex(1.0)]  # terms on diagonal s, indexed by m; starts at s=0
    quiet = 0
    s = 0
    while s <= tol.max_terms:
        diag_sum = sum(prev)
        total += diag_sum
        if abs(diag_sum) <= tol.abs_tol * (1.0 + abs(total)):
            quiet += 1
            if quiet >= 2 and s >= 2:
                return EvalResult(value=total, error=abs(diag_sum), converged=True)
        else:
            quiet = 0
        # Build diagonal s+1 by exact term ratios: entry m holds term(m, s+1-m).
        nxt = []
        for m in range(s + 2):
            n = s + 1 - m
            if m > 0 and m - 1 <= s:
                # step (m-1, n) -> (m, n): ratio in m
                base = prev[m - 1]
                ratio = (alpha + s) * (beta + s) / ((gamma1 + m - 1) * m) * x
                nxt.append(base * ratio)
            else:
                # m == 0: step (0, s) -> (0, s+1): ratio in n
                base = prev[0]
                ratio = (alpha + s) * (beta + s) / ((gamma2 + n - 1) * n) * y
                nxt.append(base * ratio)
        prev = nxt
        s += 1
    raise NotConverged(
        f"F4 diagonal sum did not reach tolerance within {tol.max_terms} diagonals"
    )
