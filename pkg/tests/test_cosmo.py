"""Weighted Friedmann systems: profiles, residuals, trajectories, serialization."""

import csv
import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dimkit.core import DomainError, PreconditionViolated, StepRejected
from dimkit.cosmo import (
    TRAJECTORY_COLUMNS,
    VARIANTS,
    CosmoParams,
    CosmoState,
    WeightSpec,
    continuity_residual,
    friedmann_constraint,
    friedmann_rhs,
    integrate,
    params_from_json,
    params_to_json,
    scalar_field_rhs,
    weight_constraint_residual,
    weight_v,
    write_trajectory_csv,
)


def log_slope(states, attr="a", against_log_time=True):
    """Least-squares slope of log(attr) against log t (or plain t)."""
    t = np.array([s.t for s in states])
    y = np.log([getattr(s, attr) for s in states])
    x = np.log(t) if against_log_time else t
    return np.polyfit(x, y, 1)[0]


class TestValidation:
    def test_weight_spec(self):
        with pytest.raises(PreconditionViolated):
            WeightSpec(variant="times")
        with pytest.raises(PreconditionViolated):
            WeightSpec(exponent=0.0)

    def test_params(self):
        with pytest.raises(PreconditionViolated):
            CosmoParams(kappa2=0.0)
        with pytest.raises(PreconditionViolated):
            CosmoParams(kappa2=1.0, curvature=2)
        with pytest.raises(PreconditionViolated):
            CosmoParams(kappa2=1.0, topological_dimension=2)
        with pytest.raises(PreconditionViolated):
            CosmoParams(kappa2=1.0, topological_dimension=True)
        with pytest.raises(PreconditionViolated):
            CosmoParams(kappa2=1.0, lam=math.inf)
        with pytest.raises(PreconditionViolated):
            CosmoParams(kappa2=1.0, weight="unit")

    def test_state(self):
        with pytest.raises(PreconditionViolated):
            CosmoState(t=1.0, a=0.0, H=1.0)
        with pytest.raises(PreconditionViolated):
            CosmoState(t=1.0, a=1.0, H=1.0, rho=-0.1)
        with pytest.raises(PreconditionViolated):
            CosmoState(t=1.0, a=1.0, H=math.nan)

    def test_variant_registry(self):
        assert VARIANTS == ("standard", "negative-fractal", "flat-neg")


class TestWeightProfile:
    def test_plus_and_minus_values(self):
        plus = CosmoParams(kappa2=1.0, weight=WeightSpec("plus", 0.5, 2.0))
        v, _ = weight_v(2.0, plus)
        assert_allclose(v, 1.0 + 0.5 / 4.0, rtol=1e-15)
        minus = CosmoParams(kappa2=1.0, weight=WeightSpec("minus", 0.0, 1.0))
        v, _ = weight_v(2.0, minus)
        assert_allclose(v, -0.5, rtol=1e-15)

    @pytest.mark.parametrize(
        "spec",
        [WeightSpec("plus", 0.7, 1.3), WeightSpec("minus", 0.0, 0.8)],
    )
    def test_derivative_matches_finite_difference(self, spec):
        params = CosmoParams(kappa2=1.0, weight=spec)
        t, h = 2.5, 1e-6
        _, v_dot = weight_v(t, params)
        fd = (weight_v(t + h, params)[0] - weight_v(t - h, params)[0]) / (2.0 * h)
        assert_allclose(v_dot, fd, rtol=1e-8)

    def test_minus_weight_settles_to_negative_unit(self):
        params = CosmoParams(kappa2=1.0, weight=WeightSpec("minus", 0.0, 1.0))
        v, v_dot = weight_v(1e3, params)
        assert v > -1.0
        assert abs(v + 1.0) < 1.0001e-3
        assert_allclose(v_dot, -1e-6, rtol=1e-12)

    def test_needs_positive_time(self):
        with pytest.raises(DomainError):
            weight_v(0.0, CosmoParams(kappa2=1.0))


class TestRightHandSide:
    def test_scale_factor_rate(self):
        state = CosmoState(t=1.0, a=2.0, H=0.7, rho=0.0)
        deriv = friedmann_rhs(state, CosmoParams(kappa2=1.0, lam=1.47), "standard")
        assert deriv.a_dot == 0.7 * 2.0

    def test_de_sitter_is_stationary(self):
        state = CosmoState(t=1.0, a=1.0, H=1.0)
        deriv = friedmann_rhs(state, CosmoParams(kappa2=1.0, lam=3.0), "standard")
        assert deriv.H_dot == 0.0
        assert deriv.rho_dot == 0.0

    def test_dust_deceleration(self):
        state = CosmoState(t=2.0, a=2.0 ** (2.0 / 3.0), H=1.0 / 3.0, rho=1.0 / 3.0)
        deriv = friedmann_rhs(state, CosmoParams(kappa2=1.0), "standard")
        assert_allclose(deriv.H_dot, -1.0 / 6.0, rtol=1e-15)
        assert_allclose(deriv.rho_dot, -1.0 / 3.0, rtol=1e-15)

    def test_unknown_variant(self):
        state = CosmoState(t=1.0, a=1.0, H=1.0)
        with pytest.raises(DomainError):
            friedmann_rhs(state, CosmoParams(kappa2=1.0), "euclidean")

    def test_flat_negative_branch_rejects_curvature(self):
        state = CosmoState(t=1.0, a=1.0, H=1.0)
        with pytest.raises(DomainError):
            friedmann_rhs(state, CosmoParams(kappa2=1.0, curvature=1), "flat-neg")

    def test_static_weighted_matter_is_undefined(self):
        params = CosmoParams(kappa2=1.0, weight=WeightSpec("plus", 1.0, 1.0))
        state = CosmoState(t=1.0, a=1.0, H=0.0, rho=1.0)
        with pytest.raises(DomainError):
            friedmann_rhs(state, params, "standard")

    def test_vanishing_weight_is_undefined(self):
        params = CosmoParams(kappa2=1.0, weight=WeightSpec("minus", 0.0, 1.0))
        state = CosmoState(t=1.0, a=1.0, H=1.0)
        with pytest.raises(DomainError):
            friedmann_rhs(state, params, "standard")

    def test_derivative_coupling_unsupported(self):
        params = CosmoParams(kappa2=1.0, derivative_coupling=0.5)
        state = CosmoState(t=1.0, a=1.0, H=1.0)
        with pytest.raises(NotImplementedError):
            friedmann_rhs(state, params, "standard")


class TestContinuityResidual:
    def test_exact_dust_solution_has_zero_residual(self):
        params = CosmoParams(kappa2=1.0)
        state = CosmoState(t=2.0, a=2.0 ** (2.0 / 3.0), H=1.0 / 3.0, rho=1.0 / 3.0)
        deriv = friedmann_rhs(state, params, "standard")
        assert continuity_residual(state, deriv, params) == 0.0

    def test_alternative_bracket_does_not_vanish(self):
        params = CosmoParams(kappa2=1.0)
        state = CosmoState(t=2.0, a=2.0 ** (2.0 / 3.0), H=1.0 / 3.0, rho=1.0 / 3.0)
        deriv = friedmann_rhs(state, params, "standard")
        off = continuity_residual(state, deriv, params, use_hubble_rate=False)
        assert abs(off) > 0.05

    def test_scalar_field_fluid_variables(self):
        params = CosmoParams(kappa2=1.0)
        state = CosmoState(t=1.0, a=1.0, H=0.5, phi=1.0, phi_dot=0.3)
        phi_dot, phi_ddot, rho_phi, p_phi = scalar_field_rhs(
            state, params, lambda f: 2.0 * f * f, lambda f: 4.0 * f
        )
        assert phi_dot == 0.3
        assert_allclose(phi_ddot, -1.5 * 0.3 - 4.0, rtol=1e-15)
        assert_allclose(rho_phi, 0.045 + 2.0, rtol=1e-15)
        assert_allclose(p_phi, 0.045 - 2.0, rtol=1e-15)

    def test_wrong_slope_is_rejected(self):
        params = CosmoParams(kappa2=1.0)
        state = CosmoState(t=1.0, a=1.0, H=0.5, phi=1.0, phi_dot=0.3)
        with pytest.raises(PreconditionViolated):
            scalar_field_rhs(state, params, lambda f: 2.0 * f * f, lambda f: 3.0 * f)


class TestMatterEras:
    def test_dust_expansion_law(self):
        params = CosmoParams(kappa2=1.0)
        initial = CosmoState(t=1.0, a=1.0, H=2.0 / 3.0, rho=4.0 / 3.0)
        states, diag = integrate(initial, params, "standard", 10.0, 1e-3)
        assert abs(log_slope(states) - 2.0 / 3.0) < 0.01 * (2.0 / 3.0)
        assert_allclose(states[-1].a, 10.0 ** (2.0 / 3.0), rtol=1e-6)
        assert diag.max_constraint_drift < 1e-6

    def test_radiation_expansion_law(self):
        params = CosmoParams(kappa2=1.0, eos_w=1.0 / 3.0)
        initial = CosmoState(t=1.0, a=1.0, H=0.5, rho=0.75)
        states, diag = integrate(initial, params, "standard", 10.0, 1e-3)
        assert abs(log_slope(states) - 0.5) < 0.01 * 0.5
        assert diag.max_constraint_drift < 1e-6

    def test_de_sitter_expansion(self):
        params = CosmoParams(kappa2=1.0, lam=3.0)
        initial = CosmoState(t=1.0, a=1.0, H=1.0)
        states, diag = integrate(initial, params, "standard", 4.0, 1e-3)
        assert abs(log_slope(states, against_log_time=False) - 1.0) < 1e-8
        assert diag.max_constraint_drift < 1e-12
        assert_allclose(diag.weight_constraint, 1.0, rtol=1e-10)

    def test_curved_dust_stays_on_constraint(self):
        params = CosmoParams(kappa2=1.0, lam=3.0, curvature=-1)
        rho0 = 0.3
        h0 = math.sqrt(rho0 / 3.0 + 1.0 + 1.0)
        initial = CosmoState(t=1.0, a=1.0, H=h0, rho=rho0)
        _, diag = integrate(initial, params, "standard", 5.0, 1e-3)
        assert diag.max_constraint_drift < 1e-6

    def test_collapse_is_rejected(self):
        params = CosmoParams(kappa2=1.0)
        initial = CosmoState(t=1.0, a=1.0, H=-10.0, rho=300.0)
        with pytest.raises(StepRejected):
            integrate(initial, params, "standard", 1.2, 0.01)


class TestWeightedEra:
    def test_density_tracks_weighted_dilution(self):
        params = CosmoParams(kappa2=1.0, weight=WeightSpec("plus", 1.0, 1.0))
        initial = CosmoState(t=1.0, a=1.0, H=1.0, rho=3.0)
        states, diag = integrate(initial, params, "standard", 10.0, 1e-3)
        assert diag.max_constraint_drift < 1e-6
        v0 = 2.0
        for state in states[:: len(states) // 40]:
            v, _ = weight_v(state.t, params)
            predicted = 3.0 / (state.a**3 * (v / v0))
            assert_allclose(state.rho, predicted, rtol=1e-6)

    def test_oscillator_frequency(self):
        params = CosmoParams(kappa2=1.0)
        initial = CosmoState(t=1.0, a=1.0, H=0.0, rho=0.0, phi=1.0, phi_dot=0.0)
        states, _ = integrate(
            initial,
            params,
            "standard",
            1.0 + 10.0 * math.pi,
            2e-3,
            potential_prime=lambda f: 4.0 * f,
        )
        t = np.array([s.t for s in states])
        phi = np.array([s.phi for s in states])
        flips = np.nonzero(phi[:-1] * phi[1:] < 0.0)[0]
        crossings = t[flips] - phi[flips] * (t[flips + 1] - t[flips]) / (
            phi[flips + 1] - phi[flips]
        )
        spacing = np.polyfit(np.arange(len(crossings)), crossings, 1)[0]
        assert abs(math.pi / spacing - 2.0) < 1e-3


class TestNegativeBranch:
    def test_flat_negative_branch_monitors(self):
        params = CosmoParams(kappa2=1.0, lam=3.0, weight=WeightSpec("minus", 0.0, 1.0))
        rho0 = 1e-3
        initial = CosmoState(t=1e3, a=1.0, H=math.sqrt((3.0 - rho0) / 3.0), rho=rho0)
        states, diag = integrate(initial, params, "flat-neg", 1020.0, 2e-3)
        assert diag.max_continuity_residual < 1e-9
        assert diag.max_constraint_drift < 1e-6
        rates = np.array([s.H for s in states])
        increments = np.diff(rates)
        # H climbs toward sqrt(lam / 3) = 1; once the density has diluted
        # the increments underflow to exactly zero, so only non-decrease
        # holds across the whole span.
        assert np.all(increments >= 0.0)
        assert np.all(increments[:1000] > 0.0)
        assert rates[-1] <= 1.0

    def test_negative_fractal_matches_flat_branch_at_unit_weight(self):
        params = CosmoParams(kappa2=1.0, lam=3.0)
        rho0 = 1e-3
        initial = CosmoState(t=1.0, a=1.0, H=math.sqrt((3.0 - rho0) / 3.0), rho=rho0)
        frac_states, frac_diag = integrate(initial, params, "negative-fractal", 3.0, 0.01)
        flat_states, flat_diag = integrate(initial, params, "flat-neg", 3.0, 0.01)
        assert frac_states == flat_states
        assert np.array_equal(frac_diag.constraint_drift, flat_diag.constraint_drift)


class TestIntegrationGuards:
    def test_off_constraint_initial_data(self):
        with pytest.raises(PreconditionViolated):
            integrate(
                CosmoState(t=1.0, a=1.0, H=1.0), CosmoParams(kappa2=1.0), "standard", 2.0, 0.01
            )

    def test_step_resolution(self):
        initial = CosmoState(t=1.0, a=1.0, H=2.0 / 3.0, rho=4.0 / 3.0)
        with pytest.raises(PreconditionViolated):
            integrate(initial, CosmoParams(kappa2=1.0), "standard", 2.0, 0.15)

    def test_empty_span(self):
        initial = CosmoState(t=1.0, a=1.0, H=2.0 / 3.0, rho=4.0 / 3.0)
        with pytest.raises(PreconditionViolated):
            integrate(initial, CosmoParams(kappa2=1.0), "standard", 1.0, 0.01)

    def test_unknown_variant(self):
        initial = CosmoState(t=1.0, a=1.0, H=2.0 / 3.0, rho=4.0 / 3.0)
        with pytest.raises(DomainError):
            integrate(initial, CosmoParams(kappa2=1.0), "euclidean", 2.0, 0.01)


class TestSerialization:
    def test_trajectory_csv(self, tmp_path):
        params = CosmoParams(kappa2=1.0, lam=3.0)
        initial = CosmoState(t=1.0, a=1.0, H=1.0)
        states, diag = integrate(initial, params, "standard", 2.0, 0.05)
        path = tmp_path / "trajectory.csv"
        write_trajectory_csv(path, states, diag)
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert tuple(rows[0]) == TRAJECTORY_COLUMNS
        assert len(rows) == len(states) + 1
        first = [float(cell) for cell in rows[1]]
        assert first[:6] == [1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
        scale_factors = [float(row[1]) for row in rows[1:]]
        assert all(b > a for a, b in zip(scale_factors, scale_factors[1:]))

    def test_params_json_roundtrip(self):
        params = CosmoParams(
            kappa2=2.0,
            lam=0.5,
            curvature=-1,
            eos_w=1.0 / 3.0,
            weight=WeightSpec("minus", 0.0, 2.0),
            omega=0.3,
        )
        rebuilt = params_from_json(params_to_json(params))
        assert rebuilt == params
        assert isinstance(rebuilt.weight, WeightSpec)

    def test_weight_constraint_reported_not_enforced(self):
        params = CosmoParams(kappa2=1.0, omega=0.2, weight=WeightSpec("plus", 0.5, 1.0))
        state = CosmoState(t=2.0, a=1.5, H=0.4, rho=0.0)
        deriv = friedmann_rhs(state, params, "standard")
        residual = weight_constraint_residual(state, deriv, params)
        assert math.isfinite(residual)
        assert residual != 0.0

    def test_diagnostics_metadata(self):
        params = CosmoParams(kappa2=1.0, lam=3.0)
        initial = CosmoState(t=1.0, a=1.0, H=1.0)
        states, diag = integrate(initial, params, "standard", 2.0, 0.05)
        assert diag.variant == "standard"
        assert diag.steps == len(states) - 1
        assert len(diag.continuity_residual) == len(states)
