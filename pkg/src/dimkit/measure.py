"""Radial measures for positive and negative dimension.

The positive branch carries the familiar surface-area weight S_D r^{D-1};
the negative branch is a distribution-flavored weight built from the real
part of a regularized inverse power, with the regulator taken to zero by
geometric-sequence extrapolation. A log-moment expansion turns radial
integrals into power series in the dimension, and a closed-form Fourier
image handles pure power laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .core import (
    Dimension,
    DomainError,
    EvalResult,
    ForbiddenExponent,
    InsufficientSamples,
    PoleAtDimension,
    PreconditionViolated,
    ToleranceConfig,
    as_dimension,
    near_nonpositive_integer,
)
from .specfun import gamma

__all__ = [
    "RadialMeasureSpec",
    "ExpansionCoefficients",
    "sphere_factor",
    "radial_weight",
    "radial_integral",
    "expansion_coefficients",
    "dimensional_series",
    "power_law_fourier",
    "eps_extrapolate",
]

#: Number of regulator halvings used for the negative-branch limit.
EPS_LEVELS = 8


def sphere_factor(D: complex) -> complex:
    """Angular normalization 2 pi^{D/2} / Gamma(D/2) of the radial measure.

    Defined by continuation for any non-pole D; negative for D in (-2, 0),
    which is what makes the negative-branch weight carry its sign.
    """
    d = complex(D)
    return 2.0 * np.power(np.pi, d / 2.0) / gamma(d / 2.0)


@dataclass(frozen=True)
class RadialMeasureSpec:
    """Branch-tagged radial measure at a fixed (possibly negative) dimension."""

    dimension: Dimension
    branch: str = "positive"
    eps: float = 1e-2

    def __post_init__(self) -> None:
        object.__setattr__(self, "dimension", as_dimension(self.dimension))
        if self.branch not in ("positive", "negative"):
            raise PreconditionViolated(f"unknown branch {self.branch!r}")
        if not (0.0 < self.eps < 1.0):
            raise PreconditionViolated("eps must lie in (0, 1)")
        d = self.dimension
        if self.branch == "positive":
            if d.re <= 0.0:
                raise PreconditionViolated("positive branch needs Re(D) > 0")
        else:
            if d.re >= 0.0:
                raise PreconditionViolated("negative branch needs Re(D) < 0")
            if d.im != 0.0:
                raise DomainError("negative branch is defined for real dimension")
            # The negative-branch prefactor has Gamma(D/2) in the denominator;
            # even negative integers sit on its pole lattice and are excluded.
            if near_nonpositive_integer(d.value / 2.0, d.pole_tolerance):
                raise PoleAtDimension(f"D = {d.value} is on the excluded even lattice")


def radial_weight(spec: RadialMeasureSpec, r: float) -> float:
    """Pointwise weight of the radial measure at radius r > 0."""
    if r <= 0.0:
        raise DomainError("radius must be positive")
    D = spec.dimension.value
    if spec.branch == "positive":
        w = sphere_factor(D) * np.power(complex(r), D - 1.0)
        return float(w.real)
    a = -D.real  # |D| for the real negative-branch dimension
    pref = float(sphere_factor(D).real)  # 2 pi^{-a/2} / Gamma(-a/2), negative on (-2, 0)
    x = r ** (a + 1.0)
    return pref * x / (x * x + spec.eps**2)


def _quad(f: Callable[[float], float], lo: float, hi: float, points=None) -> tuple[float, float]:
    val, err = integrate.quad(f, lo, hi, limit=200, points=points)
    return val, err


def radial_integral(
    spec: RadialMeasureSpec,
    f: Callable[[float], float],
    tol: ToleranceConfig | None = None,
) -> EvalResult:
    """Integral of f against the radial measure.

    Positive branch: adaptive quadrature of S_D r^{D-1} f(r), split at r = 1
    to isolate the possible algebraic endpoint. Negative branch: requires
    f(0) = 0, evaluates the regulated integral on a geometric regulator
    ladder and extrapolates the regulator to zero.
    """
    tol = tol or ToleranceConfig()
    D = spec.dimension.value

    if spec.branch == "positive":
        s = float(sphere_factor(D).real)
        dm1 = D.real - 1.0

        def integrand(r: float) -> float:
            return r**dm1 * f(r)

        v1, e1 = _quad(integrand, 0.0, 1.0)
        v2, e2 = _quad(integrand, 1.0, np.inf)
        return EvalResult(value=s * (v1 + v2), error=abs(s) * (e1 + e2), converged=True)

    f0 = f(0.0)
    if abs(f0) > 1e-12:
        raise PreconditionViolated(f"negative branch requires f(0) = 0, got {f0}")
    a = -D.real
    pref = float(sphere_factor(D).real)
    samples = []
    for k in range(EPS_LEVELS):
        eps = spec.eps * 2.0**-k
        peak = eps ** (1.0 / (a + 1.0))

        def integrand(r: float, _e=eps) -> float:
            x = r ** (a + 1.0)
            return x / (x * x + _e * _e) * f(r)

        v1, _ = _quad(integrand, 0.0, 1.0, points=[min(peak, 0.99)])
        v2, _ = _quad(integrand, 1.0, np.inf)
        samples.append((eps, pref * (v1 + v2)))
    return eps_extrapolate(samples)


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Log-moment coefficients of the dimensional power series.

    ``values[n]`` multiplies D^n / n! in the series whose prefactor is
    pi^{D/2} / Gamma(1 + D/2); coefficient 0 is f(0) and the rest are
    c_n = -integral of (ln r)^n f'(r).
    """

    values: tuple
    branch: str = "positive"


def expansion_coefficients(
    f: Callable[[float], float],
    f_prime: Callable[[float], float],
    order: int,
    branch: str = "positive",
    eps: float = 1e-2,
) -> ExpansionCoefficients:
    """Log-moment coefficients c_0..c_order of the radial integrand.

    The negative branch requires f(0) = 0 and regularizes the logarithm as
    ln(r + i*eps) on a short regulator ladder, extrapolated to eps = 0.
    """
    if order < 0:
        raise PreconditionViolated("order must be nonnegative")
    if branch not in ("positive", "negative"):
        raise PreconditionViolated(f"unknown branch {branch!r}")
    f0 = f(0.0)
    if branch == "negative" and abs(f0) > 1e-12:
        raise PreconditionViolated("negative branch requires f(0) = 0")

    coeffs: list[complex] = [complex(f0)]
    for n in range(1, order + 1):
        if branch == "positive":

            def real_part(r: float, _n=n) -> float:
                return math.log(r) ** _n * f_prime(r)

            v1, _ = _quad(real_part, 0.0, 1.0)
            v2, _ = _quad(real_part, 1.0, np.inf)
            coeffs.append(complex(-(v1 + v2)))
        else:
            samples = []
            for k in range(3):
                e = eps * 2.0**-k

                def re_int(r: float, _n=n, _e=e) -> float:
                    return (np.log(r + 1j * _e) ** _n).real * f_prime(r)

                def im_int(r: float, _n=n, _e=e) -> float:
                    return (np.log(r + 1j * _e) ** _n).imag * f_prime(r)

                vr = _quad(re_int, 0.0, 1.0)[0] + _quad(re_int, 1.0, np.inf)[0]
                vi = _quad(im_int, 0.0, 1.0)[0] + _quad(im_int, 1.0, np.inf)[0]
                samples.append((e, -(vr + 1j * vi)))
            coeffs.append(complex(eps_extrapolate(samples).value))
    return ExpansionCoefficients(values=tuple(coeffs), branch=branch)


def dimensional_series(coeffs: ExpansionCoefficients, D: complex) -> complex:
    """Resum the log-moment series: pi^{D/2}/Gamma(1+D/2) * sum c_n D^n / n!."""
    d = complex(D)
    acc = complex(0.0)
    for n, c in enumerate(coeffs.values):
        acc += c * d**n / math.factorial(n)
    return np.power(np.pi, d / 2.0) / gamma(1.0 + d / 2.0) * acc


def power_law_fourier(lam: float, D: float) -> tuple[float, float]:
    """Fourier image of r^lam in dimension D: (coefficient, exponent).

    The image is coefficient * k^exponent with exponent = -lam - D and
    coefficient 2^{lam+D} pi^{D/2} Gamma((lam+D)/2) / Gamma(-lam/2).
    Exponents with lam + D on the nonpositive even lattice are excluded.
    """
    half = (lam + D) / 2.0
    if near_nonpositive_integer(half, 1e-9):
        raise ForbiddenExponent(
            f"lam = {lam} sits on the excluded lattice lam in {{-D, -D-2, ...}}"
        )
    if near_nonpositive_integer(-lam / 2.0, 1e-12):
        coeff = 0.0  # 1/Gamma pole: the image degenerates to a contact term
    else:
        coeff = float(2.0 ** (lam + D) * np.pi ** (D / 2.0) * gamma(half).real / gamma(-lam / 2.0).real)
    return coeff, -lam - D


def eps_extrapolate(samples: Sequence[tuple[float, complex]]) -> EvalResult:
    """Extrapolate regulator samples (eps_k, value_k) to eps = 0.

    Requires at least three samples on a strictly decreasing positive
    regulator ladder. Each pass removes one geometric error mode (iterated
    Aitken), which is exact for ladders with a fixed halving ratio; the
    error estimate is the spread of the final pass.
    """
    if len(samples) < 3:
        raise InsufficientSamples("need at least 3 regulator samples")
    eps = [s[0] for s in samples]
    vals = [complex(s[1]) for s in samples]
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise InsufficientSamples("regulator ladder must be positive and strictly decreasing")

    col = vals
    last_pair = (vals[-2], vals[-1])
    while len(col) >= 3:
        nxt = []
        for v0, v1, v2 in zip(col, col[1:], col[2:]):
            d1, d2 = v1 - v0, v2 - v1
            denom = d2 - d1
            if abs(denom) <= 1e-300 + 1e-14 * abs(v2):
                nxt.append(v2)
            else:
                nxt.append(v2 - d2 * d2 / denom)
        last_pair = (col[-1], nxt[-1]) if len(nxt) == 1 else (nxt[-2], nxt[-1])
        col = nxt
    best = col[-1]
    err = abs(last_pair[1] - last_pair[0])
    return EvalResult(value=best, error=err, converged=True)
