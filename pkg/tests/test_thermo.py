import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import eos_oracle
from polycorr.components import parse_component_file
from polycorr.errors import (ComponentLookupError, ConfigError, ExponentError,
                             StateRangeError)
from polycorr.performance import efficiency_from_exponents
from polycorr.thermo import (EosModel, GasComposition, R_UNIVERSAL,
                             evaluate_state, exponent_calc,
                             mixture_molecular_weight,
                             polytropic_exponent_from_efficiency)

from conftest import NATURAL_GAS, P1_REF, T1_REF


class TestGasComposition:
    def test_rejects_empty(self):
        with pytest.raises(ConfigError):
            GasComposition((), ())

    def test_rejects_negative_fraction(self):
        with pytest.raises(ConfigError):
            GasComposition.from_dict({"methane": 1.2, "ethane": -0.2})

    def test_normalizes_when_off_unity(self):
        comp = GasComposition.from_dict({"methane": 0.5, "ethane": 0.3})
        assert math.isclose(sum(comp.fractions), 1.0, abs_tol=1e-12)
        assert math.isclose(comp.fractions[0], 0.625)

    def test_keeps_exact_fractions(self):
        comp = GasComposition.from_dict({"methane": 0.85, "ethane": 0.15})
        assert comp.fractions == (0.85, 0.15)


class TestMolecularWeight:
    def test_pure_methane_identity(self, methane):
        assert mixture_molecular_weight(methane) == 16.043

    def test_equimolar_methane_ethane(self):
        comp = GasComposition.from_dict({"methane": 0.5, "ethane": 0.5})
        assert math.isclose(mixture_molecular_weight(comp), 23.0565,
                            rel_tol=1e-12)

    def test_eight_component_weighted_sum(self, natural_gas, db):
        # independent spreadsheet-style accumulation
        table = {"methane": 16.043, "ethane": 30.070, "propane": 44.097,
                 "n-butane": 58.123, "n-pentane": 72.150, "n-hexane": 86.177,
                 "nitrogen": 28.014, "carbon_dioxide": 44.010}
        expected = sum(frac * table[name] for name, frac in NATURAL_GAS.items())
        assert math.isclose(mixture_molecular_weight(natural_gas, db),
                            expected, rel_tol=1e-12)

    def test_unknown_component(self):
        comp = GasComposition.from_dict({"helium-3": 1.0})
        with pytest.raises(ComponentLookupError):
            mixture_molecular_weight(comp)


class TestEvaluateState:
    def test_ideal_mode_limits(self, natural_gas):
        state = evaluate_state(50e5, 330.0, natural_gas, EosModel.IDEAL)
        assert state.z == 1.0
        assert state.X == 0.0
        assert state.Y == 1.0
        assert state.dz_dT == 0.0 and state.dz_dP == 0.0
        k_expected = state.cp / (state.cp - R_UNIVERSAL / state.mw)
        assert math.isclose(state.k, k_expected, rel_tol=1e-12)

    def test_methane_against_independent_oracle(self, methane, db):
        state = evaluate_state(P1_REF, T1_REF, methane)
        z, X, Y, k = eos_oracle.state_from_db(P1_REF, T1_REF, methane, db)
        assert math.isclose(state.z, z, rel_tol=1e-8)
        assert math.isclose(state.X, X, rel_tol=1e-8)
        assert math.isclose(state.Y, Y, rel_tol=1e-8)
        assert math.isclose(state.k, k, rel_tol=1e-8)

    def test_mixture_against_independent_oracle(self, natural_gas, db):
        state = evaluate_state(110e5, 350.0, natural_gas)
        z, X, Y, k = eos_oracle.state_from_db(110e5, 350.0, natural_gas, db)
        assert math.isclose(state.z, z, rel_tol=1e-8)
        assert math.isclose(state.X, X, rel_tol=1e-7)
        assert math.isclose(state.Y, Y, rel_tol=1e-8)
        assert math.isclose(state.k, k, rel_tol=1e-7)

    @pytest.mark.parametrize("pressure,temperature",
                             [(5e5, 250.0), (76.5e5, 299.5), (200e5, 450.0)])
    def test_volume_consistent_with_z(self, natural_gas, pressure, temperature):
        state = evaluate_state(pressure, temperature, natural_gas)
        v = state.z * R_UNIVERSAL * temperature / (state.mw * pressure)
        assert math.isclose(state.v, v, rel_tol=1e-9)

    def test_enthalpy_slope_matches_cp(self, natural_gas):
        # d h/dT along an isobar
        p, t = 90e5, 320.0
        h_t = 1e-5 * t
        state = evaluate_state(p, t, natural_gas)
        h_plus = evaluate_state(p, t + h_t, natural_gas).h
        h_minus = evaluate_state(p, t - h_t, natural_gas).h
        assert math.isclose((h_plus - h_minus) / (2 * h_t), state.cp,
                            rel_tol=1e-6)

    def test_entropy_slope_matches_cp_over_t(self, natural_gas):
        p, t = 90e5, 320.0
        h_t = 1e-5 * t
        state = evaluate_state(p, t, natural_gas)
        s_plus = evaluate_state(p, t + h_t, natural_gas).s
        s_minus = evaluate_state(p, t - h_t, natural_gas).s
        assert math.isclose((s_plus - s_minus) / (2 * h_t), state.cp / t,
                            rel_tol=1e-6)

    def test_derivatives_match_finite_differences(self, natural_gas):
        p, t = 76.5e5, 299.5
        state = evaluate_state(p, t, natural_gas)
        h_t, h_p = 1e-5 * t, 1e-5 * p
        up = evaluate_state(p, t + h_t, natural_gas)
        dn = evaluate_state(p, t - h_t, natural_gas)
        right = evaluate_state(p + h_p, t, natural_gas)
        left = evaluate_state(p - h_p, t, natural_gas)
        assert math.isclose((up.z - dn.z) / (2 * h_t), state.dz_dT, rel_tol=1e-6)
        assert math.isclose((right.z - left.z) / (2 * h_p), state.dz_dP, rel_tol=1e-6)
        assert math.isclose((up.v - dn.v) / (2 * h_t), state.dv_dT, rel_tol=1e-6)

    def test_determinism(self, natural_gas):
        a = evaluate_state(P1_REF, T1_REF, natural_gas)
        b = evaluate_state(P1_REF, T1_REF, natural_gas)
        assert a == b

    def test_physical_envelope_invariants(self, methane, natural_gas,
                                          shifted_gas):
        # z positive, Y positive, and k above 1 across the operating envelope
        import numpy as np
        for comp in (methane, natural_gas, shifted_gas):
            for p in np.linspace(5e5, 230e5, 6):
                for t in np.linspace(250.0, 500.0, 6):
                    state = evaluate_state(float(p), float(t), comp)
                    assert state.z > 0.0
                    assert state.Y > 0.0
                    assert state.k > 1.0

    def test_pressure_range_error(self, methane):
        with pytest.raises(StateRangeError):
            evaluate_state(-1.0, 300.0, methane)
        with pytest.raises(StateRangeError):
            evaluate_state(1e10, 300.0, methane)

    def test_temperature_range_error(self, methane):
        with pytest.raises(StateRangeError):
            evaluate_state(1e5, 100.0, methane)


class TestExponentCalc:
    def test_reduces_to_k_at_unit_efficiency(self):
        assert polytropic_exponent_from_efficiency(0.0, 1.0, 1.4, 1.0) == pytest.approx(1.4, rel=1e-14)

    def test_ideal_gas_inversion_by_hand(self):
        # eta = n (k-1) / (k (n-1)) solved for n at eta = 2/3, k = 1.4 gives 1.75
        n = polytropic_exponent_from_efficiency(0.0, 1.0, 1.4, 2.0 / 3.0)
        assert math.isclose(n, 1.75, rel_tol=1e-12)

    def test_signature_round_trip_real_state(self, natural_gas):
        state = evaluate_state(P1_REF, T1_REF, natural_gas)
        X, Y, k, n = exponent_calc(P1_REF, T1_REF, state.cp, state.z, 0.8,
                                   natural_gas)
        assert (X, Y, k) == (state.X, state.Y, state.k)
        assert math.isclose(efficiency_from_exponents(X, Y, k, n), 0.8,
                            rel_tol=1e-12)

    def test_rejects_out_of_band_efficiency(self, methane):
        with pytest.raises(ExponentError):
            exponent_calc(P1_REF, T1_REF, 2500.0, 0.9, 1.5, methane)
        with pytest.raises(ExponentError):
            exponent_calc(P1_REF, T1_REF, 2500.0, 0.9, 0.0, methane)

    def test_unphysical_denominator(self):
        # for k = 1.4, X = 0 the bracket flips sign below eta = 1/3.5
        with pytest.raises(ExponentError):
            polytropic_exponent_from_efficiency(0.0, 1.0, 1.4, 0.28)

    @given(X=st.floats(0.0, 0.3), Y=st.floats(0.7, 1.1),
           k=st.floats(1.1, 1.6), eta=st.floats(0.5, 1.0))
    @settings(max_examples=300, deadline=None)
    def test_inversion_property(self, X, Y, k, eta):
        n = polytropic_exponent_from_efficiency(X, Y, k, eta)
        assert abs(efficiency_from_exponents(X, Y, k, n) - eta) < 1e-10


class TestComponentFile:
    def test_parse_rejects_bad_field_count(self):
        with pytest.raises(ConfigError):
            parse_component_file("methane 16.0 45e5 190.0 0.01 1.0 0.0 0.0\n")

    def test_parse_bip_override(self):
        text = ("a 16.0 45e5 190.0 0.01 20e3 0.0 0.0 0.0\n"
                "b 30.0 48e5 305.0 0.10 20e3 0.0 0.0 0.0\n"
                "bip a b 0.02\n")
        db = parse_component_file(text)
        assert db.binary_interaction("a", "b") == 0.02
        assert db.binary_interaction("b", "a") == 0.02
        assert db.binary_interaction("a", "a") == 0.0

    def test_bip_changes_mixture_state(self, db):
        text = ("\n".join(
            f"{n} {db.get(n).molecular_weight} {db.get(n).critical_pressure} "
            f"{db.get(n).critical_temperature} {db.get(n).acentric_factor} "
            + " ".join(repr(c) for c in db.get(n).ideal_cp_coefficients)
            for n in ("methane", "ethane"))
            + "\nbip methane ethane 0.05\n")
        custom = parse_component_file(text)
        comp = GasComposition.from_dict({"methane": 0.6, "ethane": 0.4})
        z_default = evaluate_state(60e5, 310.0, comp, db=db).z
        z_custom = evaluate_state(60e5, 310.0, comp, db=custom).z
        assert z_custom != z_default

    def test_rejects_nonpositive_cp(self):
        with pytest.raises(ConfigError):
            parse_component_file("bad 16.0 45e5 190.0 0.01 -20e3 0.0 0.0 0.0\n")
