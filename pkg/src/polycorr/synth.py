"""Synthetic measurement campaigns with known ground truth.

A scenario defines a cubic head-vs-flow map at reference conditions and
one normalization speed. The simulated machine keeps its head
characteristic invariant in inlet volumetric flow per unit speed, so at
reference inlet conditions every point lies exactly on the map, and
perturbed inlet conditions shift the delivered head off the fan-law
collapse by an amount that grows with the perturbation. Points are
constructed so the polytropic analysis of the generated measurements
reproduces the scenario's efficiency and the machine-model head
essentially exactly (solver tolerances around 1e-10 relative), which
makes the generated campaign a usable oracle for the correction
pipeline.

Generation is fully deterministic for a given scenario (seeded PCG64
stream, fixed draw order).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .components import ComponentDatabase, default_database
from .config import SyntheticScenario
from .errors import ScenarioError
from .performance import (OperatingPoint, isentropic_discharge,
                          measured_polytropic_exponent, polytropic_head,
                          resolve_efficiency, schultz_factor,
                          schultz_isentropic_exponent)
from .refmap import FitStats, ReferenceMap, _ols_cubic, _polyval
from .thermo import EosModel, GasComposition, ThermoState, evaluate_state

_TIME_START = np.datetime64("2011-01-01T00:00:00")
_TIME_STEP_S = 600


@dataclass(frozen=True)
class SyntheticPoint:
    """One generated measurement plus its ground truth."""

    point: OperatingPoint
    composition_id: str
    map_flow: float      # flow at the map speed the point was drawn at, kg/s
    truth_head: float    # analyzed head the measurement encodes, J/kg
    truth_eta: float
    truth_n_path: float  # constant exponent of the generated P-v path


def _solve_temperature_for_volume(p2: float, v_target: float,
                                  t_lo: float, t_hi: float,
                                  comp: GasComposition, model: EosModel,
                                  db: ComponentDatabase) -> ThermoState:
    """State at (p2, T) with v(T) = v_target; v is monotone in T."""

    def vol(t: float) -> ThermoState:
        return evaluate_state(p2, t, comp, model, db)

    state_lo = vol(t_lo)
    f_lo = state_lo.v - v_target
    if f_lo >= 0.0:
        if abs(f_lo) <= 1e-12 * v_target:
            return state_lo
        raise ScenarioError(
            "volume target below the inlet-temperature volume; "
            "check speed_range/polytropic_efficiency")
    state_hi = vol(t_hi)
    f_hi = state_hi.v - v_target
    if f_hi <= 0.0:
        raise ScenarioError(
            "volume target not bracketed below 3x inlet temperature; "
            "check head_map_coeffs/speed_range")

    t_a, f_a = t_lo, f_lo
    t_b, f_b = t_hi, f_hi
    best = state_hi if abs(f_hi) < abs(f_lo) else state_lo
    f_best = min(abs(f_lo), abs(f_hi))
    for _ in range(80):
        if f_best <= 1e-12 * v_target:
            break
        if f_b != f_a:
            t_next = t_b - f_b * (t_b - t_a) / (f_b - f_a)
        else:
            t_next = 0.5 * (t_lo + t_hi)
        if not (t_lo < t_next < t_hi):
            t_next = 0.5 * (t_lo + t_hi)
        state = vol(t_next)
        f_next = state.v - v_target
        if f_next < 0.0:
            t_lo = t_next
        else:
            t_hi = t_next
        t_a, f_a = t_b, f_b
        t_b, f_b = t_next, f_next
        if abs(f_next) < f_best:
            best, f_best = state, abs(f_next)
    return best


class _PointSynthesizer:
    """Constructs a measured (p2, t2) pair hitting a target (eta, head)."""

    def __init__(self, scenario: SyntheticScenario, db: ComponentDatabase):
        self.scenario = scenario
        self.db = db
        self.model = scenario.eos_mode
        ref = scenario.reference
        self.ref_inlet = evaluate_state(ref.p1_ref, ref.t1_ref, ref.comp_ref,
                                        self.model, db)

    def _discharge_for_exponent(self, inlet: ThermoState, p2: float,
                                n_path: float, comp: GasComposition
                                ) -> ThermoState:
        v_target = inlet.v * (p2 / inlet.pressure) ** (-1.0 / n_path)
        return _solve_temperature_for_volume(
            p2, v_target, inlet.temperature, 3.0 * inlet.temperature,
            comp, self.model, self.db)

    def _eta_for_exponent(self, inlet: ThermoState, p2: float, n_path: float,
                          comp: GasComposition) -> tuple[float, ThermoState]:
        disch = self._discharge_for_exponent(inlet, p2, n_path, comp)
        n_meas = measured_polytropic_exponent(inlet, disch)
        eta, _, _, _, _ = resolve_efficiency(inlet, disch, n_meas)
        return eta, disch

    def _solve_exponent_for_eta(self, inlet: ThermoState, p2: float,
                                eta_target: float, comp: GasComposition,
                                n_seed: float) -> tuple[float, ThermoState]:
        """Path exponent whose analysis efficiency equals eta_target.

        Efficiency falls as the exponent grows, so evaluated points keep
        a sign bracket; secant steps inside it finish the job.
        """
        n_lo, n_hi = 1.01, 6.0
        n_a = min(max(n_seed, n_lo + 1e-3), n_hi - 1e-3)
        f_a, disch_a = self._eta_for_exponent(inlet, p2, n_a, comp)
        f_a -= eta_target
        if abs(f_a) <= 1e-12:
            return n_a, disch_a
        if f_a > 0.0:
            n_lo = n_a
        else:
            n_hi = n_a
        n_b = min(max(n_a * 1.02 if f_a > 0.0 else n_a / 1.02,
                      n_lo + 1e-6), n_hi - 1e-6)
        f_b, disch_b = self._eta_for_exponent(inlet, p2, n_b, comp)
        f_b -= eta_target
        if f_b > 0.0:
            n_lo = max(n_lo, n_b)
        else:
            n_hi = min(n_hi, n_b)
        if abs(f_a) < abs(f_b):
            best_n, best_f, best_d = n_a, f_a, disch_a
        else:
            best_n, best_f, best_d = n_b, f_b, disch_b
        for _ in range(80):
            if abs(best_f) <= 1e-12:
                break
            if f_b != f_a:
                n_next = n_b - f_b * (n_b - n_a) / (f_b - f_a)
            else:
                n_next = 0.5 * (n_lo + n_hi)
            if not (n_lo < n_next < n_hi):
                n_next = 0.5 * (n_lo + n_hi)
            f_next, disch = self._eta_for_exponent(inlet, p2, n_next, comp)
            f_next -= eta_target
            if f_next > 0.0:
                n_lo = n_next
            else:
                n_hi = n_next
            n_a, f_a = n_b, f_b
            n_b, f_b = n_next, f_next
            if abs(f_next) < abs(best_f):
                best_n, best_f, best_d = n_next, f_next, disch
        if abs(best_f) > 1e-9:
            raise ScenarioError(
                f"could not match polytropic_efficiency {eta_target:g} "
                f"(residual {best_f:.2e}); check polytropic_efficiency")
        return best_n, best_d

    def _analyzed_head(self, inlet: ThermoState, disch: ThermoState,
                       comp: GasComposition) -> float:
        n_meas = measured_polytropic_exponent(inlet, disch)
        _, _, _, n_avg, _ = resolve_efficiency(inlet, disch, n_meas)
        iso = isentropic_discharge(inlet, disch.pressure, comp, self.model, self.db)
        ks = schultz_isentropic_exponent(inlet.k, inlet.Y, iso.k, iso.Y)
        f = schultz_factor(ks, inlet.h, iso.h, inlet.z, inlet.temperature,
                           iso.z, iso.temperature, inlet.mw)
        return polytropic_head(f, n_avg, inlet.mw, inlet.z, inlet.temperature,
                               disch.z, disch.temperature)

    def solve_discharge(self, inlet: ThermoState, eta: float,
                        head_target: float, comp: GasComposition
                        ) -> tuple[ThermoState, float]:
        """(discharge state, path exponent) with the analyzed efficiency
        and head equal to the targets."""
        if head_target <= 0.0:
            raise ScenarioError(
                f"machine model produced non-positive head {head_target:g}; "
                "check head_map_coeffs/flow_range_kg_s")
        p1 = inlet.pressure
        r_lo, r_hi = 1.02, 4.5
        n_seed = 1.6
        tol = 1e-10 * head_target

        def head_at(ratio: float, seed: float
                    ) -> tuple[float, ThermoState, float]:
            n_path, disch = self._solve_exponent_for_eta(
                inlet, p1 * ratio, eta, comp, seed)
            return self._analyzed_head(inlet, disch, comp) - head_target, disch, n_path

        f_lo, _, n_at_lo = head_at(r_lo, n_seed)
        if f_lo > 0.0:
            raise ScenarioError(
                "head target below the reachable range at pressure ratio 1.02; "
                "check head_map_coeffs/speed_range_rpm")
        f_hi, _, n_at_hi = head_at(r_hi, n_at_lo)
        if f_hi < 0.0:
            raise ScenarioError(
                "head target above the reachable range at pressure ratio 4.5; "
                "check head_map_coeffs/speed_range_rpm")
        r_a, f_a, r_b, f_b = r_lo, f_lo, r_hi, f_hi
        n_seed = n_at_hi
        best = None
        for _ in range(80):
            if f_b != f_a:
                r_next = r_b - f_b * (r_b - r_a) / (f_b - f_a)
            else:
                r_next = 0.5 * (r_lo + r_hi)
            if not (r_lo < r_next < r_hi):
                r_next = 0.5 * (r_lo + r_hi)
            f_next, disch, n_seed = head_at(r_next, n_seed)
            if f_next < 0.0:
                r_lo = r_next
            else:
                r_hi = r_next
            r_a, f_a = r_b, f_b
            r_b, f_b = r_next, f_next
            if best is None or abs(f_next) < abs(best[0]):
                best = (f_next, disch, n_seed)
            if abs(f_next) <= tol:
                break
        if best is None or abs(best[0]) > 1e-7 * head_target:
            raise ScenarioError(
                f"could not match target head {head_target:g} J/kg; "
                "check head_map_coeffs")
        return best[1], best[2]


def generate_synthetic(scenario: SyntheticScenario,
                       db: ComponentDatabase | None = None
                       ) -> tuple[list[SyntheticPoint], ReferenceMap]:
    """Generate a seeded campaign plus its ground-truth reference map."""
    db = db or default_database()
    synth = _PointSynthesizer(scenario, db)
    rng = np.random.default_rng(scenario.seed)
    ref = scenario.reference
    n_ref = scenario.map_speed_rpm
    v1_ref = synth.ref_inlet.v
    comps = scenario.campaign_compositions

    points: list[SyntheticPoint] = []
    for i in range(scenario.n_points):
        m0 = float(rng.uniform(*scenario.flow_range))
        speed = float(rng.uniform(*scenario.speed_range))
        if scenario.perturbation_mode == "extremes":
            dp = scenario.pressure_perturbation * (1.0 if rng.integers(0, 2) else -1.0)
            dt = scenario.temperature_perturbation * (1.0 if rng.integers(0, 2) else -1.0)
        else:
            dp = float(rng.uniform(-scenario.pressure_perturbation,
                                   scenario.pressure_perturbation))
            dt = float(rng.uniform(-scenario.temperature_perturbation,
                                   scenario.temperature_perturbation))
        comp_id, comp = comps[int(rng.integers(0, len(comps)))]

        p1 = ref.p1_ref * (1.0 + dp)
        t1 = ref.t1_ref + dt
        inlet = evaluate_state(p1, t1, comp, scenario.eos_mode, db)

        mass_flow = m0 * speed / n_ref
        # machine characteristic: head/speed^2 invariant in inlet volume flow
        flow_equiv = m0 * inlet.v / v1_ref
        head_true = (speed / n_ref) ** 2 * _polyval(scenario.head_map_coeffs,
                                                    flow_equiv)
        disch, n_path = synth.solve_discharge(inlet, scenario.efficiency,
                                              head_true, comp)
        if not disch.temperature > t1:
            raise ScenarioError(
                "generated discharge temperature at or below inlet; "
                "check polytropic_efficiency")
        stamp = str(_TIME_START + np.timedelta64(i * _TIME_STEP_S, "s"))
        points.append(SyntheticPoint(
            point=OperatingPoint(
                timestamp=stamp, p1=p1, t1=t1, p2=disch.pressure,
                t2=disch.temperature, mass_flow=mass_flow, speed=speed,
                comp=comp),
            composition_id=comp_id,
            map_flow=m0, truth_head=head_true,
            truth_eta=scenario.efficiency, truth_n_path=n_path,
        ))

    truth_map = ground_truth_map(scenario)
    return points, truth_map


def ground_truth_map(scenario: SyntheticScenario) -> ReferenceMap:
    """Scenario map as a ReferenceMap; power is the least-squares cubic of
    flow * head / efficiency over the flow range (dense deterministic grid)."""
    flows = np.linspace(scenario.flow_range[0], scenario.flow_range[1], 201)
    heads = np.array([_polyval(scenario.head_map_coeffs, m) for m in flows])
    if np.any(heads <= 0.0):
        raise ScenarioError("head map non-positive inside flow_range_kg_s; "
                            "check head_map_coeffs")
    powers = flows * heads / scenario.efficiency
    power_coeffs = _ols_cubic(flows, powers)
    return ReferenceMap(
        ref=scenario.reference,
        n_ref_speed=scenario.map_speed_rpm,
        head_coeffs=scenario.head_map_coeffs,
        power_coeffs=power_coeffs,
        flow_range=scenario.flow_range,
        fit_stats=FitStats(point_count=0, head_rms=0.0, head_max_abs=0.0,
                           power_rms=0.0, power_max_abs=0.0),
    )
