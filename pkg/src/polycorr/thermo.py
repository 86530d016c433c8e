"""Real-gas property engine and polytropic-exponent machinery.

Evaluates full thermodynamic states for hydrocarbon mixtures (vapor
phase, Peng-Robinson or ideal gas) and the compressibility supplement
functions X, Y plus the specific-heat ratio k needed by polytropic
analysis. All quantities are SI: Pa, K, J/kg, J/(kg K), m3/kg.

Everything here is a pure function of its arguments plus an immutable
component database, so concurrent use needs no locking.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ._kernels import eval_state_ideal, eval_state_real
from .components import (P_MAX, T_MAX, T_MIN, ComponentDatabase,
                         default_database)
from .errors import ConfigError, EosStateError, ExponentError, StateRangeError

R_UNIVERSAL = 8314.3  # J/(kmol K)

_NORMALIZE_TOL = 1e-6


class EosModel(enum.Enum):
    REAL = "real"
    IDEAL = "ideal"


@dataclass(frozen=True)
class GasComposition:
    """Named components with mole fractions; normalized on construction."""

    names: tuple[str, ...]
    fractions: tuple[float, ...]

    def __post_init__(self):
        if not self.names:
            raise ConfigError("composition needs at least one component")
        if len(self.names) != len(self.fractions):
            raise ConfigError("composition names/fractions length mismatch")
        if any(f < 0.0 or not math.isfinite(f) for f in self.fractions):
            raise ConfigError("mole fractions must be finite and non-negative")
        total = math.fsum(self.fractions)
        if total <= 0.0:
            raise ConfigError("mole fractions sum to zero")
        if abs(total - 1.0) > _NORMALIZE_TOL:
            object.__setattr__(self, "fractions",
                               tuple(f / total for f in self.fractions))

    @classmethod
    def from_dict(cls, entries: dict[str, float]) -> "GasComposition":
        return cls(tuple(entries.keys()), tuple(float(v) for v in entries.values()))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.fractions))


@dataclass(frozen=True)
class ThermoState:
    """Full thermodynamic evaluation at one (P, T, composition).

    dz_dT and dv_dT are at constant P, dz_dP at constant T, dP_dT at
    constant specific volume. X, Y are the compressibility supplement
    functions; k is the real-gas specific-heat ratio cp/cv.
    """

    pressure: float     # Pa
    temperature: float  # K
    z: float
    cp: float           # J/(kg K)
    h: float            # J/kg
    s: float            # J/(kg K)
    v: float            # m3/kg
    dz_dT: float        # 1/K
    dz_dP: float        # 1/Pa
    dP_dT: float        # Pa/K
    dv_dT: float        # m3/(kg K)
    X: float
    Y: float
    k: float
    mw: float           # kg/kmol


def mixture_molecular_weight(comp: GasComposition,
                             db: ComponentDatabase | None = None) -> float:
    """Mole-fraction-weighted molecular weight, kg/kmol."""
    db = db or default_database()
    total = 0.0
    for name, frac in zip(comp.names, comp.fractions):
        total += frac * db.get(name).molecular_weight
    return total


def evaluate_state(pressure: float, temperature: float, comp: GasComposition,
                   model: EosModel = EosModel.REAL,
                   db: ComponentDatabase | None = None) -> ThermoState:
    """Evaluate a vapor-phase state at (P, T) for the given mixture."""
    db = db or default_database()
    if not (pressure > 0.0 and math.isfinite(pressure)) or pressure > P_MAX:
        raise StateRangeError(f"pressure {pressure!r} Pa outside (0, {P_MAX:g}]")
    if not (T_MIN <= temperature <= T_MAX):
        raise StateRangeError(
            f"temperature {temperature!r} K outside [{T_MIN:g}, {T_MAX:g}]")
    packed = db.pack(comp.names, comp.fractions)
    try:
        if model is EosModel.IDEAL:
            out = eval_state_ideal(pressure, temperature, packed.x, packed.mw,
                                   packed.cpc)
        else:
            out = eval_state_real(pressure, temperature, packed.x, packed.mw,
                                  packed.tc, packed.pc, packed.omega,
                                  packed.kij, packed.cpc)
    except ValueError as exc:
        raise EosStateError(
            f"state evaluation failed at P={pressure:g} Pa, "
            f"T={temperature:g} K: {exc}") from None
    return ThermoState(pressure, temperature, *out)


def polytropic_exponent_from_efficiency(X: float, Y: float, k: float,
                                        eta: float) -> float:
    """Real-gas polytropic exponent for a state (X, Y, k) at efficiency eta.

    n = (1 + X) / (Y * [(1/k) * (1/eta + X) - (1/eta - 1)])
    """
    if eta <= 0.0:
        raise ExponentError("efficiency must be positive")
    denom = Y * ((1.0 / k) * (1.0 / eta + X) - (1.0 / eta - 1.0))
    if denom <= 0.0:
        raise ExponentError(
            f"unphysical exponent denominator {denom:g} "
            f"(X={X:g}, Y={Y:g}, k={k:g}, eta={eta:g})")
    return (1.0 + X) / denom


def exponent_calc(pressure: float, temperature: float, cp: float, z: float,
                  eta: float, comp: GasComposition,
                  model: EosModel = EosModel.REAL,
                  db: ComponentDatabase | None = None
                  ) -> tuple[float, float, float, float]:
    """(X, Y, k, n) at a state, for a given polytropic efficiency.

    cp (J/(kg K)) and z are accepted as inputs, mirroring how they are
    normally computed beforehand; the partial derivatives are evaluated
    internally from the EOS at (P, T, composition). Passing the cp and z
    of `evaluate_state` at the same conditions reproduces that state's
    own X, Y, k exactly.
    """
    if not (0.0 < eta <= 1.2):
        raise ExponentError(f"efficiency {eta!r} outside the (0, 1.2] sanity band")
    state = evaluate_state(pressure, temperature, comp, model, db)
    X = (temperature / z) * state.dz_dT
    Y = 1.0 - (pressure / z) * state.dz_dP
    cv = cp - temperature * state.dP_dT * state.dv_dT
    if cv <= 0.0 or cp <= 0.0:
        raise ExponentError("non-positive heat capacity in k evaluation")
    k = cp / cv
    n = polytropic_exponent_from_efficiency(X, Y, k, eta)
    return (X, Y, k, n)


def state_exponents(state: ThermoState, eta: float
                    ) -> tuple[float, float, float, float]:
    """(X, Y, k, n) of an already-evaluated state at efficiency eta."""
    return (state.X, state.Y, state.k,
            polytropic_exponent_from_efficiency(state.X, state.Y, state.k, eta))
