"""Two-point functions in continued dimension and multifractal propagators.

Configuration-space massive propagators are evaluated through their closed
modified-Bessel form, with an oscillatory Hankel-integral route kept as an
independent cross-check. A second family handles radial Green functions built
on negative measure exponents: power-law massless forms, their Bessel-K
massive continuations matched at small mass, and the momentum-space
hypergeometric series classified by unit-circle convergence. All results are
Euclidean; continuation back to real time is a phase bookkeeping step that is
left to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.integrate as integrate
import scipy.special as sp

from .core import (
    Dimension,
    DivergentSeries,
    DomainError,
    EvalResult,
    OutsideDisk,
    PreconditionViolated,
    ToleranceConfig,
    as_dimension,
)
from .specfun import gauss_2f1, hyp2f1_class


@dataclass(frozen=True)
class PropagatorQuery:
    """Two-point query embedded in an integer-dimensional ambient space.

    The topological dimension is the integer ambient tag; the continuation
    dimension is the one the propagator is actually evaluated in and may not
    exceed the ambient value.
    """

    topological_dimension: int
    continuation_dimension: Dimension
    separation: float
    mass: float

    def __post_init__(self) -> None:
        n = self.topological_dimension
        if int(n) != n or n < 1:
            raise PreconditionViolated("topological dimension must be a positive integer")
        object.__setattr__(self, "topological_dimension", int(n))
        object.__setattr__(
            self, "continuation_dimension", as_dimension(self.continuation_dimension)
        )
        if self.separation <= 0.0:
            raise PreconditionViolated("separation must be positive")
        if self.mass < 0.0:
            raise PreconditionViolated("mass must be nonnegative")
        if self.continuation_dimension.re > self.topological_dimension + 1e-12:
            raise PreconditionViolated(
                "continuation dimension cannot exceed the topological dimension"
            )


@dataclass(frozen=True)
class MeasureExponent:
    """Negative radial measure exponent driving the multifractal weight.

    Holds the real part of the exponent on its negative branch. Several
    formulas additionally exclude the ladder alpha = -2k/D for positive
    integers k, where the massive matching coefficient degenerates; that
    check needs the ambient dimension and happens at the point of use.
    """

    alpha: float

    def __post_init__(self) -> None:
        if not self.alpha < 0.0:
            raise PreconditionViolated("measure exponent must be negative")


def _sphere_area(n: int) -> float:
    """Surface area 2 pi^{n/2} / Gamma(n/2) of the unit sphere in n dimensions."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _alpha_value(alpha) -> float:
    if isinstance(alpha, MeasureExponent):
        return alpha.alpha
    return float(alpha)


def _require_topological(D_t) -> int:
    if int(D_t) != D_t or D_t < 1:
        raise DomainError("topological dimension must be a positive integer")
    return int(D_t)


def _check_not_excluded(n: int, alpha: float) -> None:
    """Reject exponents on the degenerate ladder alpha = -2k/n, k = 1, 2, ..."""
    a_param = n * alpha / 2.0
    nearest = round(a_param)
    if nearest <= -1 and abs(a_param - nearest) < 1e-9:
        raise DomainError(
            f"alpha = {alpha} sits on the excluded ladder -2k/{n} where the "
            "matching coefficient degenerates"
        )


def schwinger(D, r: float, m: float) -> EvalResult:
    """Free massive two-point function at separation r in dimension D.

    Closed form (2 pi)^{-D/2} (m/r)^{D/2-1} K_{D/2-1}(mr). It solves the
    radial equation G'' + ((D-1)/r) G' - m^2 G = 0 and decays like e^{-mr};
    in one, two, three and four dimensions it reduces to e^{-mr}/(2m),
    K_0(mr)/(2 pi), e^{-mr}/(4 pi r) and (m/r) K_1(mr)/(2 pi)^2.
    """
    d = as_dimension(D)
    if r <= 0.0 or m <= 0.0:
        raise DomainError("separation and mass must be positive")
    if d.im == 0.0:
        nu = d.re / 2.0 - 1.0
        value = (2.0 * math.pi) ** (-d.re / 2.0) * (m / r) ** nu * float(sp.kv(nu, m * r))
        return EvalResult(value=value, meta={"order": nu})
    order = d.value / 2.0 - 1.0
    pref = complex(2.0 * math.pi) ** (-d.value / 2.0) * complex(m / r) ** order
    kval = complex(mpmath.besselk(order, m * r))
    return EvalResult(value=pref * kval, meta={"order": order})


def schwinger_fractional(query: PropagatorQuery) -> EvalResult:
    """Two-point function of an embedded continued dimension.

    Numerically this is the propagator of the continuation dimension alone;
    the topological dimension rides along as metadata recording the
    embedding, and the two routes coincide when the dimensions agree. At or
    below continuation dimension two the massless limit diverges
    (logarithmically at exactly two), so small masses carry a flag.
    """
    d_f = query.continuation_dimension
    res = schwinger(d_f, query.separation, query.mass)
    res.meta["topological_dimension"] = query.topological_dimension
    if d_f.re <= 2.0 and query.mass * query.separation < 1e-4:
        res.classification = "divergent-massless-limit"
        res.meta["massless_limit_divergent"] = True
    return res


def hankel_quadrature(D, r: float, m: float, segments: int = 80) -> EvalResult:
    """Oscillatory route to the massive two-point function.

    Evaluates (2 pi)^{-D/2} r^{1-D/2} times the radial integral of
    rho^{D/2} J_{D/2-1}(rho r) / (rho^2 + m^2) by integrating between
    consecutive oscillation nodes and accelerating the alternating partial
    sums with iterated averaging. Defined for real D in (0, 5), where the
    oscillatory tail decays; it resums to the closed Bessel form and serves
    as its independent cross-check.
    """
    d = as_dimension(D)
    if d.im != 0.0:
        raise DomainError("oscillatory route is defined for real dimension")
    dim = d.re
    if not 0.0 < dim < 5.0:
        raise DomainError("oscillatory route needs D in (0, 5)")
    if r <= 0.0 or m <= 0.0:
        raise DomainError("separation and mass must be positive")
    if segments < 16:
        raise DomainError("need at least 16 oscillation segments")
    nu = dim / 2.0 - 1.0

    def integrand(rho: float) -> float:
        return rho ** (dim / 2.0) * float(sp.jv(nu, rho * r)) / (rho * rho + m * m)

    # Segment boundaries from the large-argument phase of J_nu: the s-th
    # positive node sits near (s + nu/2 - 1/4) pi / r.
    nodes = [(s + nu / 2.0 - 0.25) * math.pi / r for s in range(1, segments + 1)]
    nodes = [x for x in nodes if x > 0.0]
    partial = []
    running = 0.0
    lo = 0.0
    for hi in nodes:
        piece, _ = integrate.quad(integrand, lo, hi, limit=100)
        running += piece
        partial.append(running)
        lo = hi
    rows = np.asarray(partial[len(partial) // 2 :], dtype=float)
    err = abs(float(rows[-1] - rows[-2]))
    while rows.size > 1:
        if rows.size == 2:
            err = 0.5 * abs(float(rows[1] - rows[0]))
        rows = 0.5 * (rows[:-1] + rows[1:])
    pref = (2.0 * math.pi) ** (-dim / 2.0) * r ** (1.0 - dim / 2.0)
    return EvalResult(
        value=pref * float(rows[0]),
        error=abs(pref) * err,
        meta={"segments": len(nodes), "order": nu},
    )


def multifractal_massless(D_t, alpha, r: float) -> float:
    """Massless radial Green function for a negative measure exponent.

    Power law -r^{2+D|alpha|} / (Omega_D (2 + D|alpha|)) with Omega_D the
    unit-sphere area. It is annihilated by the radial operator
    d^2/dr^2 + ((D alpha - 1)/r) d/dr and vanishes at the origin.
    """
    n = _require_topological(D_t)
    a = _alpha_value(alpha)
    if a >= 0.0:
        raise DomainError("measure exponent must be negative")
    if r <= 0.0:
        raise DomainError("separation must be positive")
    power = 2.0 + n * abs(a)
    return -(r**power) / (_sphere_area(n) * power)


def multifractal_massive(D_t, alpha, r: float, m: float) -> float:
    """Massive continuation of the multifractal radial Green function.

    Decaying Bessel-K solution C (2r/m)^nu K_nu(mr) of the radial operator
    d^2/dr^2 + ((D alpha - 1)/r) d/dr - m^2, with nu = (2 + D|alpha|)/2. The
    coefficient C = Gamma(D/2) / (2 pi^{D/2} Gamma(-D|alpha|/2)) is fixed by
    matching the r^{2 nu} branch of the small-mass expansion to the massless
    power law; the remaining branch survives the limit as a mass-divergent
    deformation of the constant zero mode. On the ladder D|alpha|/2 = 1, 2,
    ... the matching coefficient degenerates to zero and the exponent is
    rejected.
    """
    n = _require_topological(D_t)
    a = _alpha_value(alpha)
    if a >= 0.0:
        raise DomainError("measure exponent must be negative")
    if r <= 0.0 or m <= 0.0:
        raise DomainError("separation and mass must be positive")
    _check_not_excluded(n, a)
    half = n * abs(a) / 2.0
    nu = 1.0 + half
    coeff = math.gamma(n / 2.0) / (2.0 * math.pi ** (n / 2.0)) * float(sp.rgamma(-half))
    return coeff * (2.0 * r / m) ** nu * float(sp.kv(nu, m * r))


def _boundary_sum(a: float, c: float, tol: ToleranceConfig) -> tuple[float, float]:
    """Alternating boundary value of 2F1(a, 1; c; -1) by iterated averaging."""
    count = min(tol.max_terms, 400)
    terms = np.empty(count)
    terms[0] = 1.0
    t = 1.0
    for idx in range(1, count):
        t *= -(a + idx - 1.0) / (c + idx - 1.0)
        terms[idx] = t
    rows = np.cumsum(terms)[count // 2 :]
    err = abs(float(rows[-1] - rows[-2]))
    while rows.size > 1:
        if rows.size == 2:
            err = 0.5 * abs(float(rows[1] - rows[0]))
        rows = 0.5 * (rows[:-1] + rows[1:])
    return float(rows[0]), err


def momentum_propagator(
    D_t,
    alpha,
    k: float,
    m: float,
    tol: ToleranceConfig | None = None,
) -> EvalResult:
    """Momentum-space multifractal propagator with its convergence class.

    For positive mass the value is m^{-2} 2F1(D alpha/2, 1; D/2; -k^2/m^2).
    The attached classification is the unit-circle class of that series,
    decided by gamma = D alpha/2 - D/2 + 1: it diverges on the circle for
    gamma >= 1, converges absolutely for gamma < 0 and otherwise converges
    except at z = 1. On the circle itself (k = m) the alternating boundary
    sum is used when the class allows it. For zero mass the negative-branch
    power-law residue -(D-2) / (Omega_D (2 + D|alpha|)) k^{-2} is returned.
    """
    tol = tol or ToleranceConfig()
    n = _require_topological(D_t)
    a = _alpha_value(alpha)
    if k < 0.0 or m < 0.0:
        raise DomainError("momentum and mass must be nonnegative")
    gamma_param = n * a / 2.0 - n / 2.0 + 1.0
    label = hyp2f1_class(gamma_param)

    if m == 0.0:
        if k == 0.0:
            raise DomainError("momentum and mass cannot both vanish")
        if a >= 0.0:
            raise DomainError("massless form needs a negative measure exponent")
        power = 2.0 + n * abs(a)
        value = -(n - 2.0) / (_sphere_area(n) * power) / (k * k)
        return EvalResult(
            value=value,
            classification="massless-pole",
            meta={"gamma": gamma_param, "boundary_class": label},
        )

    _check_not_excluded(n, a)
    a_param = n * a / 2.0
    c_param = n / 2.0
    z = -((k / m) ** 2)
    if abs(z + 1.0) <= 1e-12:
        if gamma_param >= 1.0:
            raise DivergentSeries(
                f"boundary evaluation at k = m with gamma = {gamma_param} "
                "in the divergent class"
            )
        boundary, berr = _boundary_sum(a_param, c_param, tol)
        return EvalResult(
            value=boundary / (m * m),
            error=berr / (m * m),
            classification=label,
            meta={"gamma": gamma_param, "z": z},
        )
    if abs(z) > 1.0:
        raise OutsideDisk(
            f"momentum ratio k^2/m^2 = {(k / m) ** 2} lies outside the series disk"
        )
    series = gauss_2f1(a_param, 1.0, c_param, z, tol=tol, gamma_param=gamma_param)
    return EvalResult(
        value=complex(series.value).real / (m * m),
        error=series.error / (m * m),
        classification=series.classification,
        meta={"gamma": gamma_param, "z": z},
    )
