"""Loop integrals by multinomial expansion at negative propagator powers.

The engine expands one-loop integrands multinomially, matches powers
against the (negative-integer) propagator exponents, and solves the
resulting affine constraint systems exactly. Each consistent solution is
a prefactor times a hypergeometric-type double sum; solutions convergent
at the requested scale ratios are summed, and the result can be certified
against a Feynman-parameter quadrature oracle.

Values follow the loop normalization in which the Gaussian momentum
integral is one (d^D k / pi^{D/2}); the overall Minkowski phase and the
alternating mass markers are carried symbolically on the descriptors
while numeric values are Euclidean magnitudes with positive scale bases.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np
from scipy import integrate
from scipy import special as sp

from .core import (
    HARD_POLE_TOL,
    Dimension,
    DomainError,
    EvalResult,
    NoConvergentRegion,
    NotConverged,
    OracleMismatch,
    PoleAtArgument,
    PoleAtDimension,
    PreconditionViolated,
    ThetaMismatch,
    ToleranceConfig,
    as_dimension,
    near_nonpositive_integer,
)

__all__ = [
    "AffineForm",
    "LoopIntegralSpec",
    "ConstraintSystem",
    "Solution",
    "HyperSeriesDescriptor",
    "build_system",
    "enumerate_solutions",
    "to_descriptor",
    "evaluate_descriptor",
    "eval_massless_bubble",
    "eval_massive_bubble",
]

_DIM = "D"


@dataclass(frozen=True)
class AffineForm:
    """Exact affine combination c0 + sum(c_s * s) over named symbols.

    Coefficients are Fractions, so symbolic identities (such as the flip
    count equalling D/2) can be asserted exactly rather than numerically.
    """

    const: Fraction = Fraction(0)
    coeffs: tuple[tuple[str, Fraction], ...] = ()

    @staticmethod
    def number(value) -> "AffineForm":
        return AffineForm(const=Fraction(value))

    @staticmethod
    def symbol(name: str, scale=1) -> "AffineForm":
        return AffineForm(coeffs=((name, Fraction(scale)),))

    def _as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    @staticmethod
    def _from_dict(const: Fraction, d: Mapping[str, Fraction]) -> "AffineForm":
        items = tuple(sorted((k, v) for k, v in d.items() if v != 0))
        return AffineForm(const=const, coeffs=items)

    def __add__(self, other: "AffineForm") -> "AffineForm":
        d = self._as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, Fraction(0)) + v
        return self._from_dict(self.const + other.const, d)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return self + (-other)

    def __neg__(self) -> "AffineForm":
        return AffineForm(-self.const, tuple((k, -v) for k, v in self.coeffs))

    def scaled(self, factor) -> "AffineForm":
        f = Fraction(factor)
        return AffineForm(self.const * f, tuple((k, v * f) for k, v in self.coeffs))

    def coefficient(self, name: str) -> Fraction:
        for k, v in self.coeffs:
            if k == name:
                return v
        return Fraction(0)

    def split(self, names: Iterable[str]) -> tuple["AffineForm", dict[str, Fraction]]:
        """Separate the part over ``names`` from the remainder."""
        names = set(names)
        inner: dict[str, Fraction] = {}
        outer: dict[str, Fraction] = {}
        for k, v in self.coeffs:
            (inner if k in names else outer)[k] = v
        return self._from_dict(self.const, outer), inner

    def substitute(self, values: Mapping[str, float]) -> float:
        total = float(self.const)
        for k, v in self.coeffs:
            if k not in values:
                raise KeyError(f"no value bound for symbol {k!r}")
            total += float(v) * values[k]
        return total

    def __str__(self) -> str:
        parts = [] if self.const == 0 else [str(self.const)]
        for k, v in self.coeffs:
            if v == 1:
                parts.append(f"+ {k}")
            elif v == -1:
                parts.append(f"- {k}")
            elif v > 0:
                parts.append(f"+ {v}*{k}")
            else:
                parts.append(f"- {-v}*{k}")
        if not parts:
            return "0"
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    def to_json(self) -> dict:
        return {"const": str(self.const), "coeffs": {k: str(v) for k, v in self.coeffs}}


@dataclass(frozen=True)
class LoopIntegralSpec:
    """One-loop integral data: propagator powers, masses, external scales.

    masses2 is indexed by propagator; a zero entry means that propagator is
    massless and contributes no mass summation variable. At most one
    external scale is supported, and it enters every propagator.
    """

    powers: tuple[float, ...]
    masses2: tuple[float, ...]
    scales2: tuple[float, ...]
    dimension: Dimension

    def __post_init__(self) -> None:
        object.__setattr__(self, "powers", tuple(float(v) for v in self.powers))
        object.__setattr__(self, "masses2", tuple(float(v) for v in self.masses2))
        object.__setattr__(self, "scales2", tuple(float(v) for v in self.scales2))
        object.__setattr__(self, "dimension", as_dimension(self.dimension))
        n = len(self.powers)
        if not 1 <= n <= 3:
            raise PreconditionViolated("between 1 and 3 propagators supported")
        if len(self.masses2) != n:
            raise PreconditionViolated("masses2 must list one entry per propagator")
        if len(self.scales2) > 1:
            raise PreconditionViolated("at most one external scale supported")
        if any(m < 0 for m in self.masses2):
            raise PreconditionViolated("squared masses must be nonnegative")
        if any(s <= 0 for s in self.scales2):
            raise PreconditionViolated("squared scales must be positive")
        if self.n_masses > 2:
            raise PreconditionViolated("at most two massive propagators supported")

    @property
    def n_propagators(self) -> int:
        return len(self.powers)

    @property
    def n_masses(self) -> int:
        return sum(1 for m in self.masses2 if m > 0)

    @property
    def n_scales(self) -> int:
        return len(self.scales2)

    def to_json(self) -> dict:
        return {
            "powers": list(self.powers),
            "masses2": list(self.masses2),
            "scales2": list(self.scales2),
            "dimension": {"re": self.dimension.re, "im": self.dimension.im},
        }

    @classmethod
    def from_json(cls, doc: dict | str) -> "LoopIntegralSpec":
        if isinstance(doc, str):
            doc = json.loads(doc)
        dim = doc["dimension"]
        return cls(
            powers=tuple(doc["powers"]),
            masses2=tuple(doc["masses2"]),
            scales2=tuple(doc["scales2"]),
            dimension=Dimension(complex(dim["re"], dim.get("im", 0.0))),
        )


@dataclass(frozen=True)
class ConstraintSystem:
    """Affine power-matching equations over the summation variables."""

    variables: tuple[str, ...]
    lhs: tuple[tuple[int, ...], ...]
    rhs: tuple[AffineForm, ...]
    spec: LoopIntegralSpec

    @property
    def n_equations(self) -> int:
        return len(self.lhs)


@dataclass(frozen=True)
class Solution:
    """One consistent assignment: solved variables as affine forms."""

    index: int
    solved_for: tuple[str, ...]
    free: tuple[str, ...]
    assignment: tuple[tuple[str, AffineForm], ...]

    def as_dict(self) -> dict[str, AffineForm]:
        return dict(self.assignment)


@dataclass(frozen=True)
class HyperSeriesDescriptor:
    """PRE x SUM shape of one solution's contribution.

    gamma_num/gamma_den hold the full affine Gamma arguments (constant part
    plus integer multiples of the free summation indices); den_variables
    names the summation variable behind each denominator entry, so the
    factorials of the free indices (which stay on the sum side and are
    never flipped) can be told apart from solved-variable Gammas.
    scale_exponents give each external scale's power; alternating_parities
    record the symbolic (-1) markers attached to mass powers in the
    Minkowski form. theta is the flip count of the prefactor and equals
    D/2 identically.
    """

    solution_index: int
    free: tuple[str, ...]
    gamma_num: tuple[AffineForm, ...]
    gamma_den: tuple[AffineForm, ...]
    den_variables: tuple[str, ...]
    scale_exponents: tuple[tuple[str, AffineForm], ...]
    alternating_parities: tuple[tuple[str, AffineForm], ...]
    theta: AffineForm

    def to_json(self) -> dict:
        return {
            "solution_index": self.solution_index,
            "free_indices": list(self.free),
            "gamma_numerator": [g.to_json() for g in self.gamma_num],
            "gamma_denominator": [
                {"variable": v, **g.to_json()}
                for v, g in zip(self.den_variables, self.gamma_den)
            ],
            "scale_exponents": {k: e.to_json() for k, e in self.scale_exponents},
            "alternating_parities": {k: e.to_json() for k, e in self.alternating_parities},
            "theta": self.theta.to_json(),
            "sign_marker": f"(-1)^({self.theta})",
        }


def _variable_names(spec: LoopIntegralSpec) -> tuple[list[str], dict[str, int]]:
    """Summation variable names in canonical p, q, m order."""
    names = [f"p{i+1}" for i in range(spec.n_propagators)]
    names += [f"q{j+1}" for j in range(spec.n_scales)]
    mass_of: dict[str, int] = {}
    k = 0
    for i, m2 in enumerate(spec.masses2):
        if m2 > 0:
            k += 1
            names.append(f"m{k}")
            mass_of[f"m{k}"] = i
    return names, mass_of


def build_system(spec: LoopIntegralSpec) -> ConstraintSystem:
    """Power-matching rows plus the dimension row sum(p) + sum(q) = -D/2."""
    names, mass_of = _variable_names(spec)
    col = {name: i for i, name in enumerate(names)}
    prop_mass_var = {v: k for k, v in mass_of.items()}
    lhs: list[tuple[int, ...]] = []
    rhs: list[AffineForm] = []
    for i in range(spec.n_propagators):
        row = [0] * len(names)
        row[col[f"p{i+1}"]] = 1
        for j in range(spec.n_scales):
            row[col[f"q{j+1}"]] = 1
        if i in prop_mass_var:
            row[col[prop_mass_var[i]]] = 1
        lhs.append(tuple(row))
        rhs.append(AffineForm.symbol(f"v{i+1}", -1))
    dim_row = [0] * len(names)
    for i in range(spec.n_propagators):
        dim_row[col[f"p{i+1}"]] = 1
    for j in range(spec.n_scales):
        dim_row[col[f"q{j+1}"]] = 1
    lhs.append(tuple(dim_row))
    rhs.append(AffineForm.symbol(_DIM, Fraction(-1, 2)))
    return ConstraintSystem(variables=tuple(names), lhs=tuple(lhs), rhs=tuple(rhs), spec=spec)


def _solve_subset(
    system: ConstraintSystem, subset: tuple[str, ...]
) -> dict[str, AffineForm] | None:
    """Exact Gaussian elimination for the chosen variables; None if singular."""
    variables = list(subset)
    free = [v for v in system.variables if v not in subset]
    col = {name: i for i, name in enumerate(system.variables)}
    n = len(system.lhs)
    matrix = [[Fraction(system.lhs[r][col[v]]) for v in variables] for r in range(n)]
    vector: list[AffineForm] = []
    for r in range(n):
        rhs = system.rhs[r]
        for fv in free:
            c = system.lhs[r][col[fv]]
            if c:
                rhs = rhs + AffineForm.symbol(fv, -c)
        vector.append(rhs)

    m = len(variables)
    row = 0
    where = [-1] * m
    for c in range(m):
        pivot = next((r for r in range(row, n) if matrix[r][c] != 0), None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        vector[row], vector[pivot] = vector[pivot], vector[row]
        inv = 1 / matrix[row][c]
        matrix[row] = [x * inv for x in matrix[row]]
        vector[row] = vector[row].scaled(inv)
        for r in range(n):
            if r != row and matrix[r][c] != 0:
                factor = matrix[r][c]
                matrix[r] = [a - factor * b for a, b in zip(matrix[r], matrix[row])]
                vector[r] = vector[r] - vector[row].scaled(factor)
        where[c] = row
        row += 1
    if row < m:
        return None  # underdetermined subset: no unique assignment
    for r in range(row, n):
        if vector[r] != AffineForm():
            return None  # inconsistent residual row
    return {variables[c]: vector[where[c]] for c in range(m)}


def enumerate_solutions(system: ConstraintSystem) -> list[Solution]:
    """All subsets of variables (one per equation) the system solves for."""
    out: list[Solution] = []
    size = system.n_equations
    if size > len(system.variables):
        return out
    for subset in itertools.combinations(system.variables, size):
        solved = _solve_subset(system, subset)
        if solved is None:
            continue
        free = tuple(v for v in system.variables if v not in subset)
        assignment = tuple((v, solved[v]) for v in subset)
        out.append(
            Solution(
                index=len(out) + 1,
                solved_for=subset,
                free=free,
                assignment=assignment,
            )
        )
    return out


def to_descriptor(solution: Solution, spec: LoopIntegralSpec) -> HyperSeriesDescriptor:
    """Substitute a solution into the expansion template.

    The template carries Gamma(1 - v_i) per propagator and Gamma(1 + sum p)
    in the numerator, Gamma(1 + variable) per summation variable in the
    denominator, the scale raised to its q exponent, and (-M^2) raised to
    each mass exponent. The flip count theta of the prefactor must equal
    D/2 identically.
    """
    names, mass_of = _variable_names(spec)
    forms = solution.as_dict()
    for fv in solution.free:
        forms[fv] = AffineForm.symbol(fv)

    one = AffineForm.number(1)
    gamma_num = [one - AffineForm.symbol(f"v{i+1}") for i in range(spec.n_propagators)]
    sum_p = AffineForm()
    for i in range(spec.n_propagators):
        sum_p = sum_p + forms[f"p{i+1}"]
    gamma_num.append(one + sum_p)
    gamma_den = [one + forms[name] for name in names]

    scale_exponents: list[tuple[str, AffineForm]] = []
    parities: list[tuple[str, AffineForm]] = []
    for j in range(spec.n_scales):
        scale_exponents.append((f"Q{j+1}", forms[f"q{j+1}"]))
    for mname, prop in sorted(mass_of.items()):
        scale_exponents.append((f"M{prop+1}", forms[mname]))
        parities.append((f"M{prop+1}", forms[mname]))

    free_set = set(solution.free)
    theta = AffineForm()
    for name, g in zip(names, gamma_den):
        if name in free_set:
            continue  # factorial of a summation index, stays with the sum
        const_part, _ = g.split(free_set)
        theta = theta + const_part
    for g in gamma_num:
        const_part, _ = g.split(free_set)
        theta = theta - const_part
    expected = AffineForm.symbol(_DIM, Fraction(1, 2))
    if theta != expected:
        raise ThetaMismatch(f"flip count {theta} differs from D/2")
    return HyperSeriesDescriptor(
        solution_index=solution.index,
        free=solution.free,
        gamma_num=tuple(gamma_num),
        gamma_den=tuple(gamma_den),
        den_variables=tuple(names),
        scale_exponents=tuple(scale_exponents),
        alternating_parities=tuple(parities),
        theta=theta,
    )


def _gamma_ratio_table(base: float, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """log|Gamma(base+o)/Gamma(base)| and its sign for offsets lo..hi.

    Built by cumulative products of the recurrence factors, so exact zeros
    (a factor hitting 0) yield sign 0 and poles (descending through 0)
    yield +inf magnitude; both are detected by the caller.
    """
    offsets = np.arange(lo, hi + 1)
    logs = np.zeros(offsets.size)
    signs = np.ones(offsets.size)
    if hi > 0:
        f = base + np.arange(0, hi)  # Gamma(base+o) = Gamma(base) * prod(base+t)
        with np.errstate(divide="ignore"):
            steps = np.log(np.abs(f))
        asc = np.cumsum(steps)
        sg = np.cumprod(np.sign(f))
        sel = offsets > 0
        logs[sel] = asc[offsets[sel] - 1]
        signs[sel] = sg[offsets[sel] - 1]
    if lo < 0:
        f = base - np.arange(1, -lo + 1)  # Gamma(base-o) = Gamma(base) / prod(base-t)
        with np.errstate(divide="ignore"):
            steps = -np.log(np.abs(f))
        desc = np.cumsum(steps)
        sg = np.cumprod(np.sign(f))
        with np.errstate(invalid="ignore"):
            sg = np.where(sg == 0.0, 0.0, 1.0 / sg)
        sel = offsets < 0
        logs[sel] = desc[-offsets[sel] - 1]
        signs[sel] = sg[-offsets[sel] - 1]
    return logs, signs


def _series_sum(
    gamma_num: list[tuple[float, np.ndarray]],
    gamma_den: list[tuple[float, np.ndarray]],
    log_args: np.ndarray,
    n_free: int,
    tol: ToleranceConfig,
) -> tuple[float, float]:
    """Single or double series over nonnegative integer indices.

    Each Gamma enters through its ratio to the series origin, evaluated by
    cumulative-product tables, so the rational (Pochhammer) continuation
    applies even when the origin argument sits on a pole. A zero sign with
    log -inf is a vanishing term; log +inf marks a pole of the term and is
    rejected. The grid is doubled until the outermost rows are negligible.
    """
    size = 48
    while True:
        shape = (size,) * n_free
        grids = np.indices(shape)
        flat = [g.ravel() for g in grids]
        logterm = np.zeros(flat[0].size)
        signterm = np.ones(flat[0].size)
        for side, entries in ((1.0, gamma_num), (-1.0, gamma_den)):
            for base, vec in entries:
                offs = sum(int(vec[t]) * flat[t] for t in range(n_free))
                lo, hi = int(offs.min()), int(offs.max())
                logs, signs = _gamma_ratio_table(base, lo, hi)
                idx = offs - lo
                with np.errstate(invalid="ignore"):
                    logterm = logterm + side * logs[idx]
                signterm = signterm * signs[idx]
        for t in range(n_free):
            logterm += flat[t] * log_args[t]
        if np.any(np.isnan(logterm)) or np.any(np.isposinf(logterm)):
            raise PoleAtArgument("series term hit an uncancelled Gamma pole")
        with np.errstate(over="ignore", invalid="ignore"):
            terms = np.where(signterm == 0.0, 0.0, signterm * np.exp(logterm))
        if not np.all(np.isfinite(terms)):
            raise NotConverged("series terms overflow the floating range")
        total = float(terms.sum())
        edge_mask = flat[0] >= size - 1
        for t in range(1, n_free):
            edge_mask = edge_mask | (flat[t] >= size - 1)
        edge_mag = float(np.abs(terms[edge_mask]).sum())
        scale = max(abs(total), 1.0)
        if edge_mag <= tol.rel_tol * scale:
            return total, edge_mag
        if size >= tol.max_terms:
            raise NotConverged(
                f"series tail {edge_mag:.2e} not negligible at {size} diagonals"
            )
        size *= 2


def _flipped_prefactor(num: list[float], den: list[float]) -> float:
    """Evaluate prod Gamma(a)/prod Gamma(b) through the flipped form.

    The continued value is prod Gamma(1-b) / prod Gamma(1-a). Pole pairs
    between the flipped numerator and denominator cancel via the limit
    Gamma(-p+eps)/Gamma(-q+eps) -> (-1)^(p+q) q!/p!; an unmatched flipped
    denominator pole kills the value, an unmatched numerator pole raises.
    """
    flipped_num = [1.0 - b for b in den]
    flipped_den = [1.0 - a for a in num]

    def near_int(x: float) -> bool:
        return x <= 0.5 and abs(x - round(x)) < HARD_POLE_TOL

    num_poles = sorted((x for x in flipped_num if near_int(x)))
    den_poles = sorted((x for x in flipped_den if near_int(x)))
    value = 1.0
    paired = min(len(num_poles), len(den_poles))
    for a, b in zip(num_poles[:paired], den_poles[:paired]):
        p, q = -int(round(a)), -int(round(b))
        value *= (-1.0) ** (p + q) * math.factorial(q) / math.factorial(p)
    if len(num_poles) > paired:
        raise PoleAtDimension(
            f"prefactor pole at Gamma argument {num_poles[paired]:g}"
        )
    if len(den_poles) > paired:
        return 0.0
    pole_set_num = set(id_ for id_ in range(len(flipped_num)) if near_int(flipped_num[id_]))
    pole_set_den = set(id_ for id_ in range(len(flipped_den)) if near_int(flipped_den[id_]))
    for i, x in enumerate(flipped_num):
        if i not in pole_set_num:
            value *= float(sp.gamma(x))
    for i, x in enumerate(flipped_den):
        if i not in pole_set_den:
            value /= float(sp.gamma(x))
    return value


def _numeric_bindings(spec: LoopIntegralSpec) -> tuple[dict[str, float], dict[str, float]]:
    symbols = {_DIM: spec.dimension.re}
    for i, v in enumerate(spec.powers):
        symbols[f"v{i+1}"] = v
    bases: dict[str, float] = {}
    for j, q2 in enumerate(spec.scales2):
        bases[f"Q{j+1}"] = q2
    for i, m2 in enumerate(spec.masses2):
        if m2 > 0:
            bases[f"M{i+1}"] = m2
    return symbols, bases


def _series_arguments(
    desc: HyperSeriesDescriptor, bases: dict[str, float]
) -> list[float]:
    """Effective expansion ratio carried by each free index."""
    args = []
    for t, fv in enumerate(desc.free):
        ratio = 1.0
        for base_name, expo in desc.scale_exponents:
            c = expo.coefficient(fv)
            if c != 0:
                ratio *= bases[base_name] ** float(c)
        args.append(ratio)
    return args


def in_convergence_domain(args: list[float]) -> bool:
    """Domain rule for the double sums: sum of sqrt of ratios below one."""
    return sum(math.sqrt(abs(a)) for a in args) < 1.0


def evaluate_descriptor(
    desc: HyperSeriesDescriptor, spec: LoopIntegralSpec, tol: ToleranceConfig | None = None
) -> EvalResult:
    """Euclidean value of one solution: flipped prefactor times its sum.

    Exact duplicate Gamma arguments cancel symbolically first. Origin
    values of the remaining Gammas form the prefactor, evaluated in the
    flipped form; the factorials of the free summation indices stay on the
    sum side and are never flipped. Index-dependent Gammas contribute
    their ratio to the origin, so each term is the rational continuation
    of the raw coefficient.
    """
    tol = tol or ToleranceConfig()
    symbols, bases = _numeric_bindings(spec)
    free_set = set(desc.free)

    # symbolic cancellation of identical numerator/denominator arguments
    remaining: list[tuple[AffineForm, bool]] = [
        (g, v in free_set) for g, v in zip(desc.gamma_den, desc.den_variables)
    ]
    raw_num: list[AffineForm] = []
    for g in desc.gamma_num:
        for k, (h, _) in enumerate(remaining):
            if h == g:
                del remaining[k]
                break
        else:
            raw_num.append(g)

    pre_num: list[float] = []
    pre_den: list[float] = []
    sum_num: list[tuple[float, np.ndarray]] = []
    sum_den: list[tuple[float, np.ndarray]] = []
    for g in raw_num:
        const_part, idx = g.split(free_set)
        base = const_part.substitute(symbols)
        if idx:
            vec = np.array([float(idx.get(fv, 0)) for fv in desc.free])
            sum_num.append((base, vec))
        pre_num.append(base)
    for g, is_factorial in remaining:
        const_part, idx = g.split(free_set)
        base = const_part.substitute(symbols)
        if idx:
            vec = np.array([float(idx.get(fv, 0)) for fv in desc.free])
            sum_den.append((base, vec))
        if not is_factorial:
            pre_den.append(base)

    scale_const = 1.0
    for base_name, expo in desc.scale_exponents:
        const_part, _ = expo.split(free_set)
        scale_const *= bases[base_name] ** const_part.substitute(symbols)

    prefactor = _flipped_prefactor(pre_num, pre_den) * scale_const
    if prefactor == 0.0:
        return EvalResult(value=0.0, error=0.0, converged=True, meta={"empty": False})
    if not desc.free:
        return EvalResult(value=prefactor, error=0.0, converged=True, meta={"empty": True})

    args = _series_arguments(desc, bases)
    if not in_convergence_domain(args):
        raise NoConvergentRegion(
            f"series ratios {args} outside the convergence domain"
        )
    with np.errstate(divide="ignore"):
        log_args = np.log(np.array(args))
    total, tail = _series_sum(sum_num, sum_den, log_args, len(desc.free), tol)
    return EvalResult(
        value=prefactor * total,
        error=abs(prefactor) * tail,
        converged=True,
        meta={"arguments": args},
    )


def eval_massless_bubble(D, v1: float, v2: float, Q2: float) -> EvalResult:
    """Two-propagator massless integral continued in the dimension.

    Gamma(D/2-v1) Gamma(D/2-v2) Gamma(v1+v2-D/2) /
    (Gamma(v1) Gamma(v2) Gamma(D-v1-v2)) * Q2^(D/2-v1-v2).
    """
    d = as_dimension(D)
    if Q2 <= 0.0:
        raise DomainError("Q2 must be positive")
    dv = d.re
    num_args = (dv / 2.0 - v1, dv / 2.0 - v2, v1 + v2 - dv / 2.0)
    for a in num_args:
        if near_nonpositive_integer(a, HARD_POLE_TOL):
            raise PoleAtDimension(f"Gamma pole at argument {a:g}")
    value = 1.0
    for a in num_args:
        value *= float(sp.gamma(a))
    for b in (v1, v2, dv - v1 - v2):
        value *= float(sp.rgamma(b))
    value *= Q2 ** (dv / 2.0 - v1 - v2)
    return EvalResult(value=value, error=0.0, converged=True)


def _bubble_quadrature(D, v1, v2, Q2, M1_2, M2_2) -> float:
    """Feynman-parameter oracle in the same normalization.

    Gamma(v1+v2-D/2)/(Gamma(v1) Gamma(v2)) *
    int_0^1 x^{v1-1} (1-x)^{v2-1} Delta^{D/2-v1-v2} dx with
    Delta = Q2 x(1-x) + x M1^2 + (1-x) M2^2; convergent for positive
    masses at any D off the Gamma poles.
    """
    d = as_dimension(D)
    dv = d.re
    expo = dv / 2.0 - v1 - v2
    pref = float(sp.gamma(v1 + v2 - dv / 2.0) * sp.rgamma(v1) * sp.rgamma(v2))

    def integrand(x: float) -> float:
        delta = Q2 * x * (1.0 - x) + x * M1_2 + (1.0 - x) * M2_2
        return x ** (v1 - 1.0) * (1.0 - x) ** (v2 - 1.0) * delta**expo

    val, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
    return pref * val


def eval_massive_bubble(
    D,
    v1: float,
    v2: float,
    Q2: float,
    M1_2: float,
    M2_2: float,
    tol: ToleranceConfig | None = None,
    validate: bool = False,
) -> EvalResult:
    """Sum of all expansion solutions convergent at the given scale ratios.

    Builds the constraint system for the two-propagator integral, turns
    every consistent solution into a descriptor, evaluates those whose
    ratios lie in the convergence domain, and returns their sum. With
    validate=True the result is compared against the Feynman-parameter
    quadrature oracle and OracleMismatch raised beyond 10x the relative
    tolerance.
    """
    tol = tol or ToleranceConfig()
    d = as_dimension(D)
    if M1_2 < 0.0 or M2_2 < 0.0:
        raise DomainError("squared masses must be nonnegative")
    if M1_2 == 0.0 and M2_2 == 0.0:
        return eval_massless_bubble(d, v1, v2, Q2)
    spec = LoopIntegralSpec(
        powers=(v1, v2), masses2=(M1_2, M2_2), scales2=(Q2,), dimension=d
    )
    system = build_system(spec)
    solutions = enumerate_solutions(system)
    symbols, bases = _numeric_bindings(spec)
    total = 0.0
    err = 0.0
    used: list[int] = []
    converged_any = False
    for sol in solutions:
        desc = to_descriptor(sol, spec)
        args = _series_arguments(desc, bases)
        if desc.free and not in_convergence_domain(args):
            continue
        converged_any = True
        piece = evaluate_descriptor(desc, spec, tol)
        total += piece.value.real if isinstance(piece.value, complex) else piece.value
        err += piece.error
        used.append(sol.index)
    if not converged_any:
        raise NoConvergentRegion(
            "no expansion solution converges at the given scale ratios"
        )
    result = EvalResult(
        value=total, error=err, converged=True, meta={"solutions_used": used}
    )
    if validate:
        oracle = _bubble_quadrature(d, v1, v2, Q2, M1_2, M2_2)
        deviation = abs(total - oracle) / max(abs(oracle), 1e-300)
        result.meta["oracle"] = oracle
        result.meta["oracle_rel_deviation"] = deviation
        if deviation > 10.0 * tol.rel_tol:
            raise OracleMismatch(
                f"series sum {total:.12g} deviates from oracle {oracle:.12g} "
                f"(rel {deviation:.2e})"
            )
    return result
