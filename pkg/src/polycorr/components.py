"""Component database: pure-component constants and ideal-gas cp polynomials.

The database is loaded once from a line-oriented text file (see
data/components.txt for the field order) and is immutable afterwards, so
it can be shared freely across threads. A bundled file covering N2, CO2
and the C1-C6 normal alkanes is used unless a path is given explicitly
or through the POLYCORR_COMPONENT_DB environment variable.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ComponentLookupError, ConfigError

# validity window for state evaluations, K and Pa
T_MIN = 150.0
T_MAX = 1500.0
P_MAX = 1.5e8

_ENV_DB_PATH = "POLYCORR_COMPONENT_DB"


@dataclass(frozen=True)
class ComponentData:
    """One pure component: constants for the EOS and the ideal-gas cp fit."""

    name: str
    molecular_weight: float      # kg/kmol
    critical_pressure: float     # Pa
    critical_temperature: float  # K
    acentric_factor: float
    ideal_cp_coefficients: tuple[float, float, float, float]  # J/(kmol K)

    def __post_init__(self):
        if self.molecular_weight <= 0.0:
            raise ConfigError(f"{self.name}: molecular weight must be positive")
        if self.critical_pressure <= 0.0 or self.critical_temperature <= 0.0:
            raise ConfigError(f"{self.name}: critical constants must be positive")
        c0, c1, c2, c3 = self.ideal_cp_coefficients
        for t in (200.0, 300.0, 400.0, 500.0, 600.0):
            if c0 + c1 * t + c2 * t * t + c3 * t ** 3 <= 0.0:
                raise ConfigError(f"{self.name}: ideal cp non-positive at {t} K")


class ComponentDatabase:
    """Immutable set of components plus optional binary-interaction overrides."""

    def __init__(self, components: list[ComponentData],
                 binary_interactions: dict[tuple[str, str], float] | None = None):
        if not components:
            raise ConfigError("component database is empty")
        self._components = {c.name: c for c in components}
        if len(self._components) != len(components):
            raise ConfigError("duplicate component name in database")
        self._bips = {}
        for (a, b), v in (binary_interactions or {}).items():
            if a not in self._components or b not in self._components:
                raise ConfigError(f"binary interaction references unknown component: {a}/{b}")
            self._bips[(a, b)] = v
            self._bips[(b, a)] = v
        self._pack_cache: dict[tuple, _PackedMixture] = {}

    def __contains__(self, name: str) -> bool:
        return name in self._components

    def names(self) -> tuple[str, ...]:
        return tuple(self._components)

    def get(self, name: str) -> ComponentData:
        try:
            return self._components[name]
        except KeyError:
            raise ComponentLookupError(f"unknown component {name!r}") from None

    def binary_interaction(self, a: str, b: str) -> float:
        return self._bips.get((a, b), 0.0)

    def pack(self, names: tuple[str, ...], fractions: tuple[float, ...]) -> "_PackedMixture":
        """Kernel-ready arrays for a composition; cached per composition."""
        key = (names, fractions)
        packed = self._pack_cache.get(key)
        if packed is None:
            comps = [self.get(n) for n in names]
            n = len(comps)
            kij = np.zeros(n * n)
            for i in range(n):
                for j in range(n):
                    kij[i * n + j] = self.binary_interaction(names[i], names[j])
            cpc = np.empty(n * 4)
            for i, c in enumerate(comps):
                cpc[i * 4: i * 4 + 4] = c.ideal_cp_coefficients
            packed = _PackedMixture(
                x=np.asarray(fractions, dtype=float),
                mw=np.array([c.molecular_weight for c in comps]),
                tc=np.array([c.critical_temperature for c in comps]),
                pc=np.array([c.critical_pressure for c in comps]),
                omega=np.array([c.acentric_factor for c in comps]),
                kij=kij,
                cpc=cpc,
            )
            self._pack_cache[key] = packed
        return packed


@dataclass(frozen=True)
class _PackedMixture:
    x: np.ndarray
    mw: np.ndarray
    tc: np.ndarray
    pc: np.ndarray
    omega: np.ndarray
    kij: np.ndarray   # flattened n*n, row-major
    cpc: np.ndarray   # flattened n*4


def parse_component_file(text: str, source: str = "<string>") -> ComponentDatabase:
    components = []
    bips = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "bip":
            if len(fields) != 4:
                raise ConfigError(f"{source}:{lineno}: bip line needs 'bip name_a name_b value'")
            try:
                bips[(fields[1], fields[2])] = float(fields[3])
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: bad bip value {fields[3]!r}") from None
            continue
        if len(fields) != 9:
            raise ConfigError(
                f"{source}:{lineno}: expected 9 fields "
                "(name mw pc tc omega c0 c1 c2 c3), got " + str(len(fields)))
        try:
            numbers = [float(f) for f in fields[1:]]
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in numbers):
            raise ConfigError(f"{source}:{lineno}: non-finite field")
        components.append(ComponentData(
            name=fields[0],
            molecular_weight=numbers[0],
            critical_pressure=numbers[1],
            critical_temperature=numbers[2],
            acentric_factor=numbers[3],
            ideal_cp_coefficients=tuple(numbers[4:8]),
        ))
    return ComponentDatabase(components, bips)


def load_component_database(path: str | os.PathLike | None = None) -> ComponentDatabase:
    """Load a database from `path`, $POLYCORR_COMPONENT_DB, or the bundled file."""
    if path is None:
        path = os.environ.get(_ENV_DB_PATH) or None
    if path is None:
        text = resources.files(__package__).joinpath("data/components.txt").read_text()
        return parse_component_file(text, source="bundled components.txt")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_component_file(fh.read(), source=str(path))


_default_db: ComponentDatabase | None = None


def default_database() -> ComponentDatabase:
    """Bundled (or $POLYCORR_COMPONENT_DB) database, loaded once."""
    global _default_db
    if _default_db is None:
        _default_db = load_component_database()
    return _default_db
