"""Transform an analyzed operating point to reference inlet conditions.

Two constraints drive the transformation: the polytropic efficiency is
invariant, and the inlet/discharge volumetric-flow ratio is preserved.
The corrected discharge pressure and temperature follow from those
constraints once the corrected average polytropic exponent is known; the
exponent itself is resolved by iterating discharge-state property
updates until it is stationary. Speed and mass flow then scale by the
fan laws, and gas power from the corrected flow, head, and efficiency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .components import ComponentDatabase, default_database
from .errors import DataQualityError, ExponentError, PolycorrError
from .performance import (OperatingPoint, PerformanceSummary,
                          isentropic_discharge, polytropic_head,
                          schultz_factor, schultz_isentropic_exponent)
from .thermo import (EosModel, GasComposition, ThermoState, evaluate_state,
                     mixture_molecular_weight,
                     polytropic_exponent_from_efficiency)

# after the iteration cap, a last step larger than this flags the point
NONCONVERGED_DELTA = 1e-6


@dataclass(frozen=True)
class ReferenceConditions:
    """Inlet conditions every point is corrected to."""

    p1_ref: float  # Pa
    t1_ref: float  # K
    comp_ref: GasComposition

    def __post_init__(self):
        if not self.p1_ref > 0.0:
            raise DataQualityError("reference inlet pressure must be positive")
        if not self.t1_ref > 0.0:
            raise DataQualityError("reference inlet temperature must be positive")


@dataclass(frozen=True)
class CorrectionSettings:
    iteration_count: int = 100
    early_exit_tolerance: float = 1e-10
    max_pressure_ratio_drift: float = 0.10

    def __post_init__(self):
        if self.iteration_count < 1:
            raise DataQualityError("iteration_count must be >= 1")
        if not self.early_exit_tolerance > 0.0:
            raise DataQualityError("early_exit_tolerance must be positive")


@dataclass(frozen=True)
class CorrectedPoint:
    """An operating point expressed at the reference conditions."""

    source: OperatingPoint
    p2_c: float         # Pa
    t2_c: float         # K
    n_c: float
    n1_c: float
    n2_c: float
    eta_c: float
    f_c: float
    head_c: float       # J/kg
    speed_c: float      # rev/min
    mass_flow_c: float  # kg/s
    power_c: float      # W
    iterations_used: int
    converged: bool
    last_delta: float
    warnings: tuple[str, ...] = field(default_factory=tuple)


def average_properties(inlet: ThermoState, discharge: ThermoState,
                       n1: float, n2: float
                       ) -> tuple[float, float, float, float]:
    """Endpoint-averaged (n, k, X, Y)."""
    return (0.5 * (n1 + n2), 0.5 * (inlet.k + discharge.k),
            0.5 * (inlet.X + discharge.X), 0.5 * (inlet.Y + discharge.Y))


def initial_corrected_exponent(n: float, k: float, X: float, Y: float,
                               k1c: float, X1c: float, Y1c: float) -> float:
    """Seed for the corrected exponent, using corrected-inlet properties
    in place of the (unknown) corrected averages.

    Reduces exactly to n when (k1c, X1c, Y1c) equal the uncorrected
    averages (k, X, Y).
    """
    num = Y * n * (1.0 - k) * k1c * (1.0 + X1c)
    den = ((k * (1.0 + X) - Y * n * (k + X)) * Y1c * (1.0 - k1c)
           + Y * n * (1.0 - k) * Y1c * (k1c + X1c))
    if den == 0.0:
        raise ExponentError("corrected-exponent initialization: zero denominator")
    return num / den


def corrected_discharge_pressure(p1_c: float, p1: float, p2: float,
                                 n: float, n_c: float) -> float:
    """p2_c = p1_c * (p2/p1)^(n_c/n); preserves the volumetric-flow ratio."""
    return p1_c * (p2 / p1) ** (n_c / n)


def corrected_discharge_temperature(t1_c: float, t1: float, t2: float,
                                    n: float, n_c: float) -> float:
    """t2_c = t1_c * (t2/t1)^((n_c-1)/(n-1))."""
    if n == 1.0:
        raise ExponentError("corrected discharge temperature undefined at n = 1")
    return t1_c * (t2 / t1) ** ((n_c - 1.0) / (n - 1.0))


def corrected_discharge_exponent(X2c: float, Y2c: float, k2c: float,
                                 eta_c: float) -> float:
    """Corrected polytropic exponent at the discharge state."""
    return polytropic_exponent_from_efficiency(X2c, Y2c, k2c, eta_c)


def correct_point(summary: PerformanceSummary, ref: ReferenceConditions,
                  settings: CorrectionSettings = CorrectionSettings(),
                  model: EosModel = EosModel.REAL,
                  db: ComponentDatabase | None = None) -> CorrectedPoint:
    """Correct one analyzed point to the reference conditions."""
    db = db or default_database()
    pt = summary.point
    if summary.head <= 0.0:
        raise DataQualityError(
            f"cannot correct a point with non-positive head ({summary.head:g} J/kg)")

    eta_c = summary.eta  # efficiency is invariant under the correction
    mw_c = mixture_molecular_weight(ref.comp_ref, db)
    inlet_c = evaluate_state(ref.p1_ref, ref.t1_ref, ref.comp_ref, model, db)
    n1_c = polytropic_exponent_from_efficiency(inlet_c.X, inlet_c.Y,
                                               inlet_c.k, eta_c)

    n_c = initial_corrected_exponent(summary.n_avg, summary.k_avg,
                                     summary.X_avg, summary.Y_avg,
                                     inlet_c.k, inlet_c.X, inlet_c.Y)

    n_avg = summary.n_avg
    p_ratio = pt.p2 / pt.p1
    t_ratio = pt.t2 / pt.t1
    p2_c = t2_c = 0.0
    discharge_c = None
    n2_c = n_c
    delta = math.inf
    iterations = 0
    converged = False
    for iterations in range(1, settings.iteration_count + 1):
        p2_c = ref.p1_ref * p_ratio ** (n_c / n_avg)
        t2_c = ref.t1_ref * t_ratio ** ((n_c - 1.0) / (n_avg - 1.0))
        try:
            discharge_c = evaluate_state(p2_c, t2_c, ref.comp_ref, model, db)
            n2_c = corrected_discharge_exponent(discharge_c.X, discharge_c.Y,
                                                discharge_c.k, eta_c)
        except PolycorrError as exc:
            raise type(exc)(
                f"corrected-discharge update, iteration {iterations}: {exc}"
            ) from None
        n_next = 0.5 * (n1_c + n2_c)
        delta = abs(n_next - n_c)
        n_c = n_next
        if delta < settings.early_exit_tolerance:
            converged = True
            break
    if not converged:
        converged = delta <= NONCONVERGED_DELTA

    try:
        iso_c = isentropic_discharge(inlet_c, p2_c, ref.comp_ref, model, db)
    except PolycorrError as exc:
        raise type(exc)(f"corrected isentropic reference state: {exc}") from None
    ks_c = schultz_isentropic_exponent(inlet_c.k, inlet_c.Y, iso_c.k, iso_c.Y)
    f_c = schultz_factor(ks_c, inlet_c.h, iso_c.h, inlet_c.z, ref.t1_ref,
                         iso_c.z, iso_c.temperature, mw_c)
    head_c = polytropic_head(f_c, n_c, mw_c, inlet_c.z, ref.t1_ref,
                             discharge_c.z, t2_c)
    if head_c <= 0.0:
        raise DataQualityError(f"corrected head non-positive ({head_c:g} J/kg)")

    speed_ratio = math.sqrt(head_c / summary.head)
    speed_c = pt.speed * speed_ratio
    mass_flow_c = pt.mass_flow * speed_ratio
    power_c = mass_flow_c * head_c / eta_c

    warnings = []
    if not converged:
        warnings.append(
            f"exponent iteration not converged: |delta|={delta:.3e} "
            f"after {iterations} iterations")
    drift = settings.max_pressure_ratio_drift
    inlet_drift = abs(pt.p1 / ref.p1_ref - 1.0)
    if inlet_drift > drift:
        warnings.append(
            f"inlet pressure {inlet_drift * 100.0:.1f}% away from reference "
            f"(threshold {drift * 100.0:.0f}%)")
    discharge_drift = abs(p2_c / pt.p2 - 1.0)
    if discharge_drift > drift:
        warnings.append(
            f"corrected discharge pressure {discharge_drift * 100.0:.1f}% away "
            f"from measured (threshold {drift * 100.0:.0f}%)")

    return CorrectedPoint(
        source=pt, p2_c=p2_c, t2_c=t2_c, n_c=n_c, n1_c=n1_c, n2_c=n2_c,
        eta_c=eta_c, f_c=f_c, head_c=head_c, speed_c=speed_c,
        mass_flow_c=mass_flow_c, power_c=power_c,
        iterations_used=iterations, converged=converged, last_delta=delta,
        warnings=tuple(warnings),
    )
