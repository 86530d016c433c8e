"""Polytropic analysis of a measured operating point.

Turns raw inlet/discharge measurements into the averaged exponents,
efficiency, Schultz factor, polytropic head, and gas power that the
correction stage consumes. The efficiency is resolved self-consistently:
the measured exponent seeds it, then the per-endpoint exponents at that
efficiency are averaged and the efficiency re-derived until the value is
stationary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .components import ComponentDatabase, default_database
from .errors import (ConvergenceError, DataQualityError,
                     DegenerateCompressionError, EfficiencyUndefinedError,
                     HeadUndefinedError, IsentropicSolveError)
from .thermo import (EosModel, GasComposition, R_UNIVERSAL, ThermoState,
                     evaluate_state, polytropic_exponent_from_efficiency)

ETA_FIXED_POINT_TOL = 1e-10
ETA_MAX_SWEEPS = 100
ENTROPY_RESIDUAL_TOL = 1e-8  # J/(kg K)


@dataclass(frozen=True)
class OperatingPoint:
    """One measured compressor sample."""

    timestamp: str      # ISO-8601 instant, carried through verbatim
    p1: float           # Pa
    t1: float           # K
    p2: float           # Pa
    t2: float           # K
    mass_flow: float    # kg/s
    speed: float        # rev/min
    comp: GasComposition

    def __post_init__(self):
        if not (self.p2 > self.p1 > 0.0):
            raise DataQualityError(
                f"need p2 > p1 > 0, got p1={self.p1!r}, p2={self.p2!r}")
        if not (self.t2 > self.t1 > 0.0):
            raise DataQualityError(
                f"need t2 > t1 > 0 (compression heating), got t1={self.t1!r}, t2={self.t2!r}")
        if not self.mass_flow > 0.0:
            raise DataQualityError(f"mass flow must be positive, got {self.mass_flow!r}")
        if not self.speed > 0.0:
            raise DataQualityError(f"speed must be positive, got {self.speed!r}")


@dataclass(frozen=True)
class PerformanceSummary:
    """Uncorrected polytropic analysis results for one operating point."""

    point: OperatingPoint
    n_inlet: float
    n_discharge: float
    n_avg: float
    k_avg: float
    X_avg: float
    Y_avg: float
    eta: float
    schultz_f: float
    head: float   # J/kg
    power: float  # W
    inlet_state: ThermoState
    discharge_state: ThermoState
    n_measured: float
    eta_sweeps: int


def measured_polytropic_exponent(inlet: ThermoState,
                                 discharge: ThermoState) -> float:
    """Exponent of the P*v^n path through two measured states."""
    if inlet.v == discharge.v:
        raise DegenerateCompressionError("inlet and discharge volumes coincide")
    log_vr = math.log(inlet.v / discharge.v)
    if log_vr == 0.0:
        raise DegenerateCompressionError("inlet and discharge volumes coincide")
    return math.log(discharge.pressure / inlet.pressure) / log_vr


def efficiency_from_exponents(X: float, Y: float, k: float, n: float) -> float:
    """Polytropic efficiency from averaged properties and exponent.

    eta = Y*n*(1-k) / (k*(1+X) - Y*n*(k+X)); exact inverse of the
    exponent-from-efficiency relation.
    """
    denom = k * (1.0 + X) - Y * n * (k + X)
    if denom == 0.0:
        raise EfficiencyUndefinedError(
            f"efficiency undefined: zero denominator (X={X:g}, Y={Y:g}, k={k:g}, n={n:g})")
    return Y * n * (1.0 - k) / denom


def isentropic_discharge(inlet: ThermoState, p2: float, comp: GasComposition,
                         model: EosModel = EosModel.REAL,
                         db: ComponentDatabase | None = None) -> ThermoState:
    """State at p2 on the isentrope through `inlet`.

    Bracketed search on T in [T1, 3*T1]: bisection to a narrow bracket,
    then secant refinement until the entropy residual is below
    ENTROPY_RESIDUAL_TOL (1e-8 J/(kg K)).
    """
    if p2 < inlet.pressure:
        raise IsentropicSolveError("isentropic discharge needs p2 >= inlet pressure")
    db = db or default_database()
    if p2 == inlet.pressure:
        return evaluate_state(p2, inlet.temperature, comp, model, db)
    s_target = inlet.s

    def residual(t: float) -> float:
        return evaluate_state(p2, t, comp, model, db).s - s_target

    t_lo = inlet.temperature
    t_hi = 3.0 * inlet.temperature
    f_lo = residual(t_lo)
    if f_lo > 0.0:
        raise IsentropicSolveError(
            "entropy already above target at inlet temperature (non-physical state pair)")
    f_hi = residual(t_hi)
    if f_hi < 0.0:
        raise IsentropicSolveError(
            f"failed to bracket the isentrope below {t_hi:g} K")

    while t_hi - t_lo > 0.25:
        t_mid = 0.5 * (t_lo + t_hi)
        f_mid = residual(t_mid)
        if f_mid < 0.0:
            t_lo, f_lo = t_mid, f_mid
        else:
            t_hi, f_hi = t_mid, f_mid

    t_a, f_a = t_lo, f_lo
    t_b, f_b = t_hi, f_hi
    t_best, f_best = (t_a, f_a) if abs(f_a) < abs(f_b) else (t_b, f_b)
    for _ in range(60):
        if abs(f_best) <= ENTROPY_RESIDUAL_TOL:
            break
        if f_b != f_a:
            t_next = t_b - f_b * (t_b - t_a) / (f_b - f_a)
        else:
            t_next = 0.5 * (t_lo + t_hi)
        if not (t_lo <= t_next <= t_hi):
            t_next = 0.5 * (t_lo + t_hi)
        f_next = residual(t_next)
        if f_next < 0.0:
            t_lo = t_next
        else:
            t_hi = t_next
        t_a, f_a = t_b, f_b
        t_b, f_b = t_next, f_next
        if abs(f_next) < abs(f_best):
            t_best, f_best = t_next, f_next
    if abs(f_best) > ENTROPY_RESIDUAL_TOL:
        raise IsentropicSolveError(
            f"entropy residual {f_best:g} J/(kg K) above tolerance after refinement")
    return evaluate_state(p2, t_best, comp, model, db)


def schultz_isentropic_exponent(k1: float, Y1: float, k2s: float,
                                Y2s: float) -> float:
    """Averaged isentropic exponent ks = (k1/Y1 + k2s/Y2s) / 2."""
    if Y1 <= 0.0 or Y2s <= 0.0:
        raise HeadUndefinedError("Y values must be positive")
    return 0.5 * (k1 / Y1 + k2s / Y2s)


def schultz_factor(ks: float, h1: float, h2s: float, z1: float, t1: float,
                   z2s: float, t2s: float, mw: float) -> float:
    """Head-correction factor from the isentropic reference path.

    f = (ks-1)*(h2s-h1) / (ks*(z2s*R*T2s/MW - z1*R*T1/MW))
    """
    denom = ks * (z2s * R_UNIVERSAL * t2s / mw - z1 * R_UNIVERSAL * t1 / mw)
    if denom == 0.0:
        raise HeadUndefinedError("Schultz factor undefined: zero denominator")
    return (ks - 1.0) * (h2s - h1) / denom


def polytropic_head(f: float, n: float, mw: float, z1: float, t1: float,
                    z2: float, t2: float) -> float:
    """Polytropic head Hp = f * n/(n-1) * (z2*R*T2 - z1*R*T1)/MW, J/kg."""
    if n == 1.0:
        raise HeadUndefinedError("polytropic head undefined at n = 1")
    return f * (n / (n - 1.0)) * (z2 * R_UNIVERSAL * t2 - z1 * R_UNIVERSAL * t1) / mw


def _exponent_and_slope(state: ThermoState, eta: float) -> tuple[float, float]:
    """Polytropic exponent at a state and its derivative w.r.t. eta."""
    denom = state.Y * ((1.0 / state.k) * (1.0 / eta + state.X)
                       - (1.0 / eta - 1.0))
    if denom <= 0.0:
        raise EfficiencyUndefinedError(
            f"exponent undefined at eta={eta:g} for this state")
    n = (1.0 + state.X) / denom
    dn = -(1.0 + state.X) / (denom * denom) * state.Y \
        * (1.0 - 1.0 / state.k) / (eta * eta)
    return n, dn


def resolve_efficiency(inlet: ThermoState, discharge: ThermoState,
                       n_measured: float,
                       tol: float = ETA_FIXED_POINT_TOL,
                       max_sweeps: int = ETA_MAX_SWEEPS
                       ) -> tuple[float, float, float, float, int]:
    """Self-consistent (eta, n_inlet, n_discharge, n_avg, sweeps).

    eta is the efficiency at which the average of the two endpoint
    polytropic exponents reproduces the measured path exponent; that
    keeps the averaged exponent anchored to the measured P-v data while
    the per-endpoint exponents stay consistent with eta. Seeded from the
    averaged-property efficiency at the measured exponent and refined by
    Newton steps (the endpoint-average closure is smooth and strictly
    monotone in eta, so this settles in a handful of sweeps).
    """
    x_avg = 0.5 * (inlet.X + discharge.X)
    y_avg = 0.5 * (inlet.Y + discharge.Y)
    k_avg = 0.5 * (inlet.k + discharge.k)
    eta = efficiency_from_exponents(x_avg, y_avg, k_avg, n_measured)
    if not (0.0 < eta):
        raise EfficiencyUndefinedError(
            f"seed efficiency {eta:g} non-positive; state pair is not a compression path")
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        n1, dn1 = _exponent_and_slope(inlet, eta)
        n2, dn2 = _exponent_and_slope(discharge, eta)
        mismatch = 0.5 * (n1 + n2) - n_measured
        slope = 0.5 * (dn1 + dn2)
        step = -mismatch / slope
        eta_next = eta + step
        if eta_next <= 0.0:
            eta_next = 0.5 * eta
        elif eta_next > 1.5:
            eta_next = 0.5 * (eta + 1.5)
        delta = abs(eta_next - eta)
        eta = eta_next
        if delta < tol:
            break
    else:
        raise ConvergenceError(
            f"efficiency resolution did not settle in {max_sweeps} sweeps")
    n1 = polytropic_exponent_from_efficiency(inlet.X, inlet.Y, inlet.k, eta)
    n2 = polytropic_exponent_from_efficiency(discharge.X, discharge.Y,
                                             discharge.k, eta)
    return eta, n1, n2, 0.5 * (n1 + n2), sweeps


def analyze_point(pt: OperatingPoint, model: EosModel = EosModel.REAL,
                  db: ComponentDatabase | None = None) -> PerformanceSummary:
    """Full uncorrected polytropic analysis of one operating point."""
    db = db or default_database()
    inlet = evaluate_state(pt.p1, pt.t1, pt.comp, model, db)
    discharge = evaluate_state(pt.p2, pt.t2, pt.comp, model, db)
    n_meas = measured_polytropic_exponent(inlet, discharge)
    eta, n1, n2, n_avg, sweeps = resolve_efficiency(inlet, discharge, n_meas)
    if not (0.0 < eta < 1.2):
        raise DataQualityError(
            f"resolved efficiency {eta:g} outside (0, 1.2); "
            "measurements are inconsistent with a compression path")

    iso = isentropic_discharge(inlet, pt.p2, pt.comp, model, db)
    ks = schultz_isentropic_exponent(inlet.k, inlet.Y, iso.k, iso.Y)
    f = schultz_factor(ks, inlet.h, iso.h, inlet.z, pt.t1, iso.z,
                       iso.temperature, inlet.mw)
    head = polytropic_head(f, n_avg, inlet.mw, inlet.z, pt.t1, discharge.z,
                           pt.t2)
    if head <= 0.0:
        raise DataQualityError(f"non-positive polytropic head {head:g} J/kg")
    power = pt.mass_flow * head / eta

    return PerformanceSummary(
        point=pt,
        n_inlet=n1, n_discharge=n2, n_avg=n_avg,
        k_avg=0.5 * (inlet.k + discharge.k),
        X_avg=0.5 * (inlet.X + discharge.X),
        Y_avg=0.5 * (inlet.Y + discharge.Y),
        eta=eta, schultz_f=f, head=head, power=power,
        inlet_state=inlet, discharge_state=discharge,
        n_measured=n_meas, eta_sweeps=sweeps,
    )
