"""Friedmann cosmology driven by a time-dependent measure weight.

The expansion history couples to a prescribed weight profile v(t) through
the continuity equation, whose friction bracket is (D_t - 1) H + v'/v.
Three Friedmann systems are supported: the standard one, where the energy
density enters the Hamiltonian constraint with a positive sign, a variant
where matter enters with a negative sign, and a flat negative-branch
system whose acceleration law is H' = kappa^2 (p + rho) / 2.  An explicit
fourth-order Runge-Kutta driver integrates trajectories while monitoring
the active constraint and the continuity residual.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, PreconditionViolated, StepRejected

VARIANTS = ("standard", "negative-fractal", "flat-neg")

_WEIGHT_VARIANTS = ("plus", "minus")


@dataclass(frozen=True)
class WeightSpec:
    """Prescribed measure-weight profile v(t).

    Variant ``plus`` gives v = 1 + amplitude * t**(-exponent); variant
    ``minus`` gives v = -1 + t**(-exponent).  A positive exponent makes
    the weight settle to +1 or -1 at late times; ``plus`` with zero
    amplitude is the constant unit weight.
    """

    variant: str = "plus"
    amplitude: float = 0.0
    exponent: float = 1.0

    def __post_init__(self) -> None:
        if self.variant not in _WEIGHT_VARIANTS:
            raise PreconditionViolated(
                f"weight variant must be one of {_WEIGHT_VARIANTS}, got {self.variant!r}"
            )
        if not (self.exponent > 0):
            raise PreconditionViolated("weight exponent must be positive")


@dataclass(frozen=True)
class CosmoParams:
    """Couplings and content of a weighted Friedmann system.

    ``kappa2`` is the gravitational coupling (8 pi G in geometric units),
    ``lam`` the cosmological constant, ``curvature`` the spatial curvature
    sign k in {-1, 0, +1}, and ``eos_w`` the barotropic index of the fluid
    (p = w rho).  ``omega`` weights the kinetic term of the measure field
    in the monitored gravitational constraint.  A nonzero
    ``derivative_coupling`` is carried but has no runtime evolution.
    """

    kappa2: float
    lam: float = 0.0
    curvature: int = 0
    topological_dimension: int = 4
    eos_w: float = 0.0
    weight: WeightSpec = WeightSpec()
    omega: float = 0.0
    derivative_coupling: float = 0.0

    def __post_init__(self) -> None:
        if not (self.kappa2 > 0):
            raise PreconditionViolated("kappa2 must be positive")
        if self.curvature not in (-1, 0, 1):
            raise PreconditionViolated("curvature sign must be -1, 0, or +1")
        n = self.topological_dimension
        if not isinstance(n, int) or isinstance(n, bool) or n < 3:
            raise PreconditionViolated(
                "topological_dimension must be an integer >= 3"
            )
        if not isinstance(self.weight, WeightSpec):
            raise PreconditionViolated("weight must be a WeightSpec")
        for name in ("lam", "eos_w", "omega", "derivative_coupling"):
            if not math.isfinite(getattr(self, name)):
                raise PreconditionViolated(f"{name} must be finite")


@dataclass(frozen=True)
class CosmoState:
    """Instantaneous state (t, a, H, rho, phi, phi_dot) of a trajectory."""

    t: float
    a: float
    H: float
    rho: float = 0.0
    phi: float = 0.0
    phi_dot: float = 0.0

    def __post_init__(self) -> None:
        values = (self.t, self.a, self.H, self.rho, self.phi, self.phi_dot)
        if not all(math.isfinite(v) for v in values):
            raise PreconditionViolated("state fields must be finite")
        if not (self.a > 0):
            raise PreconditionViolated("scale factor must be positive")
        if self.rho < 0:
            raise PreconditionViolated("energy density must be non-negative")


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative (a', H', rho', phi', phi'') of a state."""

    a_dot: float
    H_dot: float
    rho_dot: float
    phi_dot: float
    phi_ddot: float


@dataclass(frozen=True)
class TrajectoryDiagnostics:
    """Row-aligned monitors collected while integrating a trajectory."""

    variant: str
    steps: int
    max_constraint_drift: float
    max_continuity_residual: float
    constraint_drift: np.ndarray = field(repr=False)
    continuity_residual: np.ndarray = field(repr=False)
    weight_constraint: np.ndarray = field(repr=False)


def weight_v(t: float, params: CosmoParams) -> tuple[float, float]:
    """Measure weight v(t) and its time derivative at positive time."""
    if not (t > 0):
        raise DomainError("measure weight is defined for t > 0 only")
    beta = params.weight.exponent
    decay = t ** (-beta)
    if params.weight.variant == "plus":
        amp = params.weight.amplitude
        return 1.0 + amp * decay, -amp * beta * decay / t
    return -1.0 + decay, -beta * decay / t


def _weight_second(t: float, params: CosmoParams) -> float:
    """Second time derivative of the weight profile."""
    beta = params.weight.exponent
    amp = params.weight.amplitude if params.weight.variant == "plus" else 1.0
    return amp * beta * (beta + 1.0) * t ** (-beta - 2.0)


def _require_minimal(params: CosmoParams) -> None:
    if params.derivative_coupling != 0.0:
        raise NotImplementedError(
            "non-minimal derivative coupling is accepted in the parameter "
            "set but has no runtime evolution"
        )


def _friction(t: float, H: float, params: CosmoParams) -> tuple[float, float, float]:
    """Continuity friction bracket (D_t - 1) H + v'/v, plus (v, v')."""
    v, v_dot = weight_v(t, params)
    if v == 0.0:
        raise DomainError("measure weight vanishes; the ratio v'/v is undefined")
    bracket = (params.topological_dimension - 1) * H + v_dot / v
    return bracket, v, v_dot


def _hubble_rate_of_change(
    a: float,
    H: float,
    rho: float,
    params: CosmoParams,
    variant: str,
    v: float,
    v_dot: float,
) -> float:
    """Acceleration law H' for the chosen Friedmann system.

    The standard and negative branches differentiate their Hamiltonian
    constraint along the weighted continuity flow, so on-constraint
    initial data stays on-constraint up to integration error.  The
    flat negative branch uses its closed acceleration law directly.
    """
    pressure = params.eos_w * rho
    flux = params.kappa2 * (rho + pressure) / 6.0
    if variant == "flat-neg":
        if params.curvature != 0:
            raise DomainError(
                "the flat negative-branch system requires zero spatial curvature"
            )
        return 3.0 * flux
    sign = -1.0 if variant == "standard" else 1.0
    term = (params.topological_dimension - 1) * flux
    if v_dot != 0.0 and flux != 0.0:
        if H == 0.0:
            raise DomainError(
                "expansion rate vanishes while the measure weight varies; "
                "the constraint-preserving acceleration is undefined"
            )
        term += flux * (v_dot / v) / H
    return sign * term + params.curvature / (a * a)


def _rhs(
    t: float,
    a: float,
    H: float,
    rho: float,
    phi: float,
    phi_dot: float,
    params: CosmoParams,
    variant: str,
    potential_prime=None,
) -> tuple[float, float, float, float, float]:
    bracket, v, v_dot = _friction(t, H, params)
    pressure = params.eos_w * rho
    rho_dot = -bracket * (rho + pressure)
    H_dot = _hubble_rate_of_change(a, H, rho, params, variant, v, v_dot)
    slope = potential_prime(phi) if potential_prime is not None else 0.0
    phi_ddot = -bracket * phi_dot - slope
    return H * a, H_dot, rho_dot, phi_dot, phi_ddot


def friedmann_rhs(
    state: CosmoState,
    params: CosmoParams,
    variant: str,
    potential_prime=None,
) -> StateDerivative:
    """Time derivative of a state under the chosen Friedmann system.

    Returns (a', H', rho', phi', phi'') with H' from the acceleration law
    of the variant, rho' from the weighted continuity equation, and phi''
    from the damped field equation (a missing ``potential_prime`` means a
    free field).
    """
    if variant not in VARIANTS:
        raise DomainError(f"unknown Friedmann variant {variant!r}")
    _require_minimal(params)
    return StateDerivative(
        *_rhs(
            state.t,
            state.a,
            state.H,
            state.rho,
            state.phi,
            state.phi_dot,
            params,
            variant,
            potential_prime,
        )
    )


def friedmann_constraint(state: CosmoState, params: CosmoParams, variant: str) -> float:
    """Residual of the active Hamiltonian constraint (zero on-shell)."""
    if variant not in VARIANTS:
        raise DomainError(f"unknown Friedmann variant {variant!r}")
    sign = -1.0 if variant == "standard" else 1.0
    return (
        state.H * state.H
        + sign * params.kappa2 * state.rho / 3.0
        - params.lam / 3.0
        + params.curvature / (state.a * state.a)
    )


def _constraint_scale(state: CosmoState, params: CosmoParams) -> float:
    return max(
        state.H * state.H,
        params.kappa2 * state.rho / 3.0,
        abs(params.lam) / 3.0,
        abs(params.curvature) / (state.a * state.a),
    )


def continuity_residual(
    state: CosmoState,
    derivative: StateDerivative,
    params: CosmoParams,
    use_hubble_rate: bool = True,
) -> float:
    """Weighted continuity residual rho' + [(D_t - 1) H + v'/v] (rho + p).

    The default bracket multiplies the dilution term by the expansion
    rate H; ``use_hubble_rate=False`` substitutes H' instead, for
    comparing against the alternative bracket reading.  The residual
    vanishes along exact solutions of the default system.
    """
    v, v_dot = weight_v(state.t, params)
    if v == 0.0:
        raise DomainError("measure weight vanishes; the ratio v'/v is undefined")
    rate = state.H if use_hubble_rate else derivative.H_dot
    bracket = (params.topological_dimension - 1) * rate + v_dot / v
    pressure = params.eos_w * state.rho
    return derivative.rho_dot + bracket * (state.rho + pressure)


def weight_constraint_residual(
    state: CosmoState, derivative: StateDerivative, params: CosmoParams
) -> float:
    """Monitored gravitational constraint of the dynamical-weight sector.

    Combines H^2, the acceleration, curvature, and the d'Alembertian of
    the weight with the omega kinetic term.  It is reported as a residual
    only; trajectories do not enforce it.
    """
    v, v_dot = weight_v(state.t, params)
    if v == 0.0:
        raise DomainError("measure weight vanishes; the ratio v'/v is undefined")
    n = params.topological_dimension
    v_ddot = _weight_second(state.t, params)
    box_v = -(v_ddot + (n - 1) * state.H * v_dot)
    return (
        state.H * state.H
        + (n - 1) * derivative.H_dot
        + 2.0 * params.curvature / (state.a * state.a)
        + box_v / v
        + state.H * v_dot / v
        + params.omega * (v * box_v - v_dot * v_dot)
    )


def scalar_field_rhs(
    state: CosmoState,
    params: CosmoParams,
    potential,
    potential_prime,
) -> tuple[float, float, float, float]:
    """Field equation and fluid variables of a homogeneous scalar field.

    Returns (phi', phi'', rho_phi, p_phi) with phi'' = -[(D_t - 1) H +
    v'/v] phi' - V'(phi), rho_phi = phi'^2 / 2 + V, and p_phi =
    phi'^2 / 2 - V.  The supplied slope is spot-checked against a central
    difference of the potential.
    """
    _require_minimal(params)
    h = 1e-5 * max(1.0, abs(state.phi))
    fd = (potential(state.phi + h) - potential(state.phi - h)) / (2.0 * h)
    slope = potential_prime(state.phi)
    if abs(fd - slope) > 1e-4 * max(1.0, abs(fd), abs(slope)):
        raise PreconditionViolated(
            "potential slope disagrees with a finite-difference check "
            f"({slope:.6g} vs {fd:.6g})"
        )
    bracket, _, _ = _friction(state.t, state.H, params)
    phi_ddot = -bracket * state.phi_dot - slope
    kinetic = 0.5 * state.phi_dot * state.phi_dot
    value = potential(state.phi)
    return state.phi_dot, phi_ddot, kinetic + value, kinetic - value


def _fourth_order_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative of uniformly sampled values, fourth-order accurate."""
    y = np.asarray(values, dtype=float)
    if y.size < 5:
        raise PreconditionViolated("need at least five samples to differentiate")
    out = np.empty_like(y)
    out[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    out[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    out[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
    out[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3] + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    out[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    return out


def integrate(
    initial: CosmoState,
    params: CosmoParams,
    variant: str,
    t_end: float,
    dt: float,
    potential_prime=None,
) -> tuple[list[CosmoState], TrajectoryDiagnostics]:
    """Integrate a trajectory with classic fourth-order Runge-Kutta.

    The initial state must satisfy the active constraint to 1e-8
    relative, and dt must resolve the span with at least ten steps.
    Every accepted step is recorded.  Diagnostics carry per-row
    constraint drift (relative to the largest constraint term), the
    continuity residual reconstructed by differentiating the stored
    density, and the monitored weight-sector constraint.
    """
    if variant not in VARIANTS:
        raise DomainError(f"unknown Friedmann variant {variant!r}")
    _require_minimal(params)
    span = t_end - initial.t
    if not (span > 0):
        raise PreconditionViolated("t_end must exceed the initial time")
    if not (0 < dt < span / 10.0):
        raise PreconditionViolated("dt must be positive and below a tenth of the span")
    scale = _constraint_scale(initial, params)
    residual = friedmann_constraint(initial, params, variant)
    if abs(residual) > 1e-8 * max(scale, 1e-300):
        raise PreconditionViolated(
            f"initial state violates the {variant} constraint "
            f"(relative residual {abs(residual) / max(scale, 1e-300):.3g})"
        )

    n_steps = max(10, math.ceil(span / dt - 1e-12))
    h = span / n_steps
    barotropic = 1.0 + params.eos_w

    def rhs_vector(t: float, y: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(y)) or y[0] <= 0.0:
            raise StepRejected("integration stage left the admissible region")
        return np.array(
            _rhs(t, y[0], y[1], y[2], y[3], y[4], params, variant, potential_prime)
        )

    y = np.array(
        [initial.a, initial.H, initial.rho, initial.phi, initial.phi_dot]
    )
    states = [initial]
    t = initial.t
    for step in range(n_steps):
        k1 = rhs_vector(t, y)
        if variant == "flat-neg" and barotropic * y[2] > 1e-300 and k1[1] <= 0.0:
            raise StepRejected(
                "negative-branch acceleration lost its positive sign"
            )
        k2 = rhs_vector(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs_vector(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs_vector(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = initial.t + (step + 1) * h
        if not np.all(np.isfinite(y)):
            raise StepRejected(f"non-finite state at t = {t:.6g}")
        if y[0] <= 0.0:
            raise StepRejected(f"scale factor collapsed at t = {t:.6g}")
        if y[2] < 0.0:
            raise StepRejected(f"energy density turned negative at t = {t:.6g}")
        states.append(
            CosmoState(t=t, a=y[0], H=y[1], rho=y[2], phi=y[3], phi_dot=y[4])
        )

    drift = np.empty(len(states))
    weight_res = np.empty(len(states))
    derivatives = []
    for i, state in enumerate(states):
        deriv = friedmann_rhs(state, params, variant, potential_prime)
        derivatives.append(deriv)
        scale_i = max(_constraint_scale(state, params), 1e-300)
        drift[i] = abs(friedmann_constraint(state, params, variant)) / scale_i
        weight_res[i] = weight_constraint_residual(state, deriv, params)

    rho_values = np.array([s.rho for s in states])
    rho_slope = _fourth_order_derivative(rho_values, h)
    continuity = np.array(
        [
            continuity_residual(
                state,
                dataclasses.replace(derivatives[i], rho_dot=rho_slope[i]),
                params,
            )
            for i, state in enumerate(states)
        ]
    )
    diagnostics = TrajectoryDiagnostics(
        variant=variant,
        steps=n_steps,
        max_constraint_drift=float(np.max(drift)),
        max_continuity_residual=float(np.max(np.abs(continuity))),
        constraint_drift=drift,
        continuity_residual=continuity,
        weight_constraint=weight_res,
    )
    return states, diagnostics


TRAJECTORY_COLUMNS = (
    "t",
    "a",
    "H",
    "rho",
    "phi",
    "phi_dot",
    "constraint_drift",
    "continuity_residual",
)


def write_trajectory_csv(
    path,
    trajectory: list[CosmoState],
    diagnostics: TrajectoryDiagnostics,
) -> None:
    """Write a trajectory and its row-aligned monitors as CSV."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRAJECTORY_COLUMNS)
        for i, state in enumerate(trajectory):
            row = (
                state.t,
                state.a,
                state.H,
                state.rho,
                state.phi,
                state.phi_dot,
                diagnostics.constraint_drift[i],
                diagnostics.continuity_residual[i],
            )
            writer.writerow("%.17g" % value for value in row)


def params_to_json(params: CosmoParams) -> str:
    """Serialize parameters as JSON mirroring the dataclass layout."""
    return json.dumps(dataclasses.asdict(params), indent=2, sort_keys=True)


def params_from_json(text: str) -> CosmoParams:
    """Rebuild parameters from their JSON serialization."""
    data = json.loads(text)
    weight = WeightSpec(**data.pop("weight", {}))
    return CosmoParams(weight=weight, **data)
