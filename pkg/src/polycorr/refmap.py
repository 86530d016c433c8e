"""Reference maps: cubic head/power characteristics and deviation reports.

Corrected points at assorted speeds are collapsed onto a single
normalization speed with the fan laws (flow scales with speed, head with
speed squared, power with speed cubed), then head and power are each fit
with an ordinary-least-squares cubic in normalized flow. Queries reverse
the normalization, flagging flows outside the fitted range instead of
refusing them.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from .correction import CorrectedPoint, ReferenceConditions
from .errors import (ConfigError, DeviationUndefinedError, FitError,
                     InsufficientDataError)
from .thermo import GasComposition

MIN_FIT_POINTS = 8

MAP_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FitStats:
    point_count: int
    head_rms: float      # J/kg
    head_max_abs: float  # J/kg
    power_rms: float     # W
    power_max_abs: float  # W


@dataclass(frozen=True)
class ReferenceMap:
    """Cubic head/power vs flow characteristic at one reference speed."""

    ref: ReferenceConditions
    n_ref_speed: float               # rev/min
    head_coeffs: tuple[float, float, float, float]   # J/kg vs kg/s
    power_coeffs: tuple[float, float, float, float]  # W vs kg/s
    flow_range: tuple[float, float]  # kg/s at n_ref_speed
    fit_stats: FitStats

    def __post_init__(self):
        if not self.flow_range[0] < self.flow_range[1]:
            raise FitError("flow range must have m_min < m_max")
        for c in (*self.head_coeffs, *self.power_coeffs):
            if not math.isfinite(c):
                raise FitError("non-finite map coefficient")
        m_min, m_max = self.flow_range
        for i in range(17):
            m = m_min + (m_max - m_min) * i / 16.0
            if _polyval(self.head_coeffs, m) <= 0.0:
                raise FitError(
                    f"head characteristic non-positive at {m:g} kg/s, "
                    "inside the declared flow range")


@dataclass(frozen=True)
class DeviationReport:
    """Per-point corrected-vs-expected deviations and their averages.

    Averages cover in-range, converged points only; everything else is
    counted in excluded_count with a reason.
    """

    per_point: tuple[tuple[int, float, float, bool], ...]
    avg_delta_head: float | None   # percent
    avg_delta_power: float | None  # percent
    excluded_count: int
    exclusion_reasons: tuple[tuple[int, str], ...]


def _polyval(coeffs, x: float) -> float:
    return coeffs[0] + coeffs[1] * x + coeffs[2] * x * x + coeffs[3] * x ** 3


def _ols_cubic(flows: np.ndarray, values: np.ndarray) -> tuple[float, ...]:
    """Least-squares cubic via column-scaled normal equations.

    Two iterative-refinement passes recover the digits the normal
    equations lose to Vandermonde conditioning (residual correction on
    the same factorization).
    """
    design = np.column_stack([np.ones_like(flows), flows, flows ** 2, flows ** 3])
    scale = np.max(np.abs(design), axis=0)
    if np.any(scale == 0.0):
        scale[scale == 0.0] = 1.0
    scaled = design / scale
    gram = scaled.T @ scaled
    try:
        coeffs_scaled = np.linalg.solve(gram, scaled.T @ values)
        for _ in range(2):
            residual = values - scaled @ coeffs_scaled
            coeffs_scaled += np.linalg.solve(gram, scaled.T @ residual)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"degenerate design matrix: {exc}") from None
    coeffs = coeffs_scaled / scale
    if not np.all(np.isfinite(coeffs)):
        raise FitError("fit produced non-finite coefficients")
    return tuple(float(c) for c in coeffs)


def fit_reference_map(points: list[CorrectedPoint], ref: ReferenceConditions,
                      n_ref_speed: float | None = None) -> ReferenceMap:
    """Fit cubic head and power characteristics to corrected points.

    Points are fan-law-normalized from their corrected speed to
    n_ref_speed (median corrected speed when not given). Requires at
    least MIN_FIT_POINTS converged points spanning a usable flow range.
    """
    usable = [p for p in points if p.converged]
    if len(usable) < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"need at least {MIN_FIT_POINTS} converged points, got {len(usable)}")
    if n_ref_speed is None:
        n_ref_speed = statistics.median(p.speed_c for p in usable)
    if not n_ref_speed > 0.0:
        raise FitError("normalization speed must be positive")

    flows = np.empty(len(usable))
    heads = np.empty(len(usable))
    powers = np.empty(len(usable))
    for i, p in enumerate(usable):
        ratio = n_ref_speed / p.speed_c
        flows[i] = p.mass_flow_c * ratio
        heads[i] = p.head_c * ratio * ratio
        powers[i] = p.power_c * ratio * ratio * ratio

    m_min = float(np.min(flows))
    m_max = float(np.max(flows))
    if not (m_max - m_min) > 1e-9 * max(abs(m_max), 1.0):
        raise FitError("normalized flows do not span a usable range")

    head_coeffs = _ols_cubic(flows, heads)
    power_coeffs = _ols_cubic(flows, powers)

    head_res = heads - np.array([_polyval(head_coeffs, m) for m in flows])
    power_res = powers - np.array([_polyval(power_coeffs, m) for m in flows])
    stats = FitStats(
        point_count=len(usable),
        head_rms=float(np.sqrt(np.mean(head_res ** 2))),
        head_max_abs=float(np.max(np.abs(head_res))),
        power_rms=float(np.sqrt(np.mean(power_res ** 2))),
        power_max_abs=float(np.max(np.abs(power_res))),
    )
    return ReferenceMap(ref=ref, n_ref_speed=float(n_ref_speed),
                        head_coeffs=head_coeffs, power_coeffs=power_coeffs,
                        flow_range=(m_min, m_max), fit_stats=stats)


def expected_performance(refmap: ReferenceMap, flow_c: float, speed_c: float
                         ) -> tuple[float, float, bool]:
    """(head_e, power_e, in_range) for a corrected (flow, speed) query.

    The query is fan-law-normalized to the map speed, both cubics are
    evaluated, and the results de-normalized (head by the speed ratio
    squared, power cubed). Out-of-range flows are extrapolated and
    flagged, not refused.
    """
    if not speed_c > 0.0:
        raise DeviationUndefinedError("query speed must be positive")
    s = speed_c / refmap.n_ref_speed
    flow_n = flow_c / s
    head_e = _polyval(refmap.head_coeffs, flow_n) * s * s
    power_e = _polyval(refmap.power_coeffs, flow_n) * s * s * s
    in_range = refmap.flow_range[0] <= flow_n <= refmap.flow_range[1]
    return head_e, power_e, in_range


def deviation(corrected: float, expected: float) -> float:
    """Percent deviation |corrected - expected| / |corrected| * 100."""
    if corrected == 0.0:
        raise DeviationUndefinedError("deviation undefined for zero corrected value")
    return abs((corrected - expected) / corrected) * 100.0


def campaign_report(points: list[CorrectedPoint],
                    refmap: ReferenceMap) -> DeviationReport:
    """Deviation of every corrected point from the map's expectation."""
    per_point = []
    reasons = []
    head_sum = 0.0
    power_sum = 0.0
    eligible = 0
    for idx, p in enumerate(points):
        if not p.converged:
            reasons.append((idx, "not converged"))
            continue
        head_e, power_e, in_range = expected_performance(
            refmap, p.mass_flow_c, p.speed_c)
        d_head = deviation(p.head_c, head_e)
        d_power = deviation(p.power_c, power_e)
        per_point.append((idx, d_head, d_power, in_range))
        if in_range:
            head_sum += d_head
            power_sum += d_power
            eligible += 1
        else:
            reasons.append((idx, "outside map flow range"))
    if eligible:
        avg_head = head_sum / eligible
        avg_power = power_sum / eligible
    else:
        avg_head = None
        avg_power = None
    return DeviationReport(
        per_point=tuple(per_point),
        avg_delta_head=avg_head,
        avg_delta_power=avg_power,
        excluded_count=len(reasons),
        exclusion_reasons=tuple(reasons),
    )


# -- map file round trip -------------------------------------------------------

def save_reference_map(refmap: ReferenceMap, path) -> None:
    """Write a map file; floats use repr so load() round-trips bit-exactly."""
    comp = refmap.ref.comp_ref
    comp_text = ",".join(f"{n}:{f!r}" for n, f in zip(comp.names, comp.fractions))
    lines = [
        "# polycorr reference map",
        f"map_format_version: {MAP_FORMAT_VERSION}",
        f"p1_ref_pa: {refmap.ref.p1_ref!r}",
        f"t1_ref_k: {refmap.ref.t1_ref!r}",
        f"composition: {comp_text}",
        f"n_ref_speed_rpm: {refmap.n_ref_speed!r}",
        "head_coeffs: " + " ".join(repr(c) for c in refmap.head_coeffs),
        "power_coeffs: " + " ".join(repr(c) for c in refmap.power_coeffs),
        f"flow_min_kg_s: {refmap.flow_range[0]!r}",
        f"flow_max_kg_s: {refmap.flow_range[1]!r}",
        f"point_count: {refmap.fit_stats.point_count}",
        f"head_rms_j_kg: {refmap.fit_stats.head_rms!r}",
        f"head_max_abs_j_kg: {refmap.fit_stats.head_max_abs!r}",
        f"power_rms_w: {refmap.fit_stats.power_rms!r}",
        f"power_max_abs_w: {refmap.fit_stats.power_max_abs!r}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


_MAP_KEYS = {
    "map_format_version", "p1_ref_pa", "t1_ref_k", "composition",
    "n_ref_speed_rpm", "head_coeffs", "power_coeffs", "flow_min_kg_s",
    "flow_max_kg_s", "point_count", "head_rms_j_kg", "head_max_abs_j_kg",
    "power_rms_w", "power_max_abs_w",
}


def load_reference_map(path) -> ReferenceMap:
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key: value'")
            key, value = line.split(":", 1)
            key = key.strip()
            if key not in _MAP_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown map key {key!r}")
            if key in entries:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            entries[key] = value.strip()
    missing = _MAP_KEYS - entries.keys()
    if missing:
        raise ConfigError(f"{path}: missing map keys: {sorted(missing)}")
    if entries["map_format_version"] != str(MAP_FORMAT_VERSION):
        raise ConfigError(
            f"{path}: unsupported map format version {entries['map_format_version']!r}")
    try:
        names = []
        fracs = []
        for item in entries["composition"].split(","):
            name, frac = item.split(":")
            names.append(name.strip())
            fracs.append(float(frac))
        comp = GasComposition(tuple(names), tuple(fracs))
        ref = ReferenceConditions(float(entries["p1_ref_pa"]),
                                  float(entries["t1_ref_k"]), comp)
        head_coeffs = tuple(float(c) for c in entries["head_coeffs"].split())
        power_coeffs = tuple(float(c) for c in entries["power_coeffs"].split())
        if len(head_coeffs) != 4 or len(power_coeffs) != 4:
            raise ConfigError(f"{path}: coefficient vectors must have 4 entries")
        stats = FitStats(
            point_count=int(entries["point_count"]),
            head_rms=float(entries["head_rms_j_kg"]),
            head_max_abs=float(entries["head_max_abs_j_kg"]),
            power_rms=float(entries["power_rms_w"]),
            power_max_abs=float(entries["power_max_abs_w"]),
        )
        return ReferenceMap(
            ref=ref, n_ref_speed=float(entries["n_ref_speed_rpm"]),
            head_coeffs=head_coeffs, power_coeffs=power_coeffs,
            flow_range=(float(entries["flow_min_kg_s"]),
                        float(entries["flow_max_kg_s"])),
            fit_stats=stats)
    except (ValueError, ConfigError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: malformed map file: {exc}") from None
