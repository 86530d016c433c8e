"""Run and scenario configuration: strict JSON parsing and digests.

Configs are plain JSON with every key validated (unknown keys are
rejected so typos fail loudly before any computation). The digest of a
resolved config, together with the component-database content it names,
identifies a run for exact reproduction.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field

from .components import ComponentDatabase, load_component_database
from .correction import CorrectionSettings, ReferenceConditions
from .errors import ConfigError
from .thermo import EosModel, GasComposition

COMPOSITION_SUM_TOL = 1e-3


@dataclass(frozen=True)
class RunConfig:
    reference: ReferenceConditions
    eos_mode: EosModel
    correction: CorrectionSettings
    component_db_path: str | None
    compositions: dict[str, GasComposition]
    invalid_compositions: dict[str, str]
    warnings: tuple[str, ...]
    digest: str
    db: ComponentDatabase = field(repr=False, compare=False, default=None)


def _require_keys(obj: dict, allowed: set[str], required: set[str],
                  where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def _number(obj: dict, key: str, where: str) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: {key} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where}: {key} must be finite")
    return value


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _parse_compositions(raw: dict, where: str
                        ) -> tuple[dict[str, GasComposition], dict[str, str], list[str]]:
    """Validate raw id -> {component: fraction} maps.

    Fractions must sum to 1 within COMPOSITION_SUM_TOL; a smaller
    imbalance is renormalized with a warning, a larger one marks the
    composition invalid (rows referencing it fail individually).
    """
    compositions: dict[str, GasComposition] = {}
    invalid: dict[str, str] = {}
    warnings: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: compositions must be an object")
    for comp_id, entries in raw.items():
        if not isinstance(entries, dict) or not entries:
            raise ConfigError(f"{where}: composition {comp_id!r} must be a "
                              "non-empty object of component: fraction")
        names = []
        fracs = []
        for name, frac in entries.items():
            if isinstance(frac, bool) or not isinstance(frac, (int, float)):
                raise ConfigError(
                    f"{where}: composition {comp_id!r}: fraction of {name!r} "
                    "must be a number")
            names.append(name)
            fracs.append(float(frac))
        if any(f < 0.0 or not math.isfinite(f) for f in fracs):
            invalid[comp_id] = "negative or non-finite mole fraction"
            continue
        total = math.fsum(fracs)
        if abs(total - 1.0) > COMPOSITION_SUM_TOL:
            invalid[comp_id] = (
                f"mole fractions sum to {total!r}, more than "
                f"{COMPOSITION_SUM_TOL:g} away from 1")
            continue
        if total != 1.0:
            warnings.append(
                f"composition {comp_id!r}: fractions sum to {total!r}; renormalized")
        compositions[comp_id] = GasComposition(
            tuple(names), tuple(f / total for f in fracs))
    return compositions, invalid, warnings


_RUN_KEYS = {"reference", "eos_mode", "correction", "component_db_path",
             "compositions", "compositions_file"}
_REF_KEYS = {"p1_bar", "t1_k", "composition_id"}
_CORR_KEYS = {"iteration_count", "early_exit_tolerance",
              "max_pressure_ratio_drift"}


def _parse_eos_mode(value, where: str) -> EosModel:
    if value not in ("real", "ideal"):
        raise ConfigError(f"{where}: eos_mode must be 'real' or 'ideal'")
    return EosModel(value)


def load_run_config(path, eos_override: str | None = None) -> RunConfig:
    """Parse and fully validate a run configuration file."""
    data = _load_json(path)
    _require_keys(data, _RUN_KEYS, {"reference", "eos_mode"}, str(path))

    raw_comps = dict(data.get("compositions", {}))
    comp_file = data.get("compositions_file")
    if comp_file is not None:
        if not isinstance(comp_file, str):
            raise ConfigError(f"{path}: compositions_file must be a path string")
        comp_path = comp_file
        if not os.path.isabs(comp_path):
            comp_path = os.path.join(os.path.dirname(os.fspath(path)), comp_path)
        extra = _load_json(comp_path)
        for comp_id, entries in extra.items():
            if comp_id in raw_comps:
                raise ConfigError(
                    f"{path}: composition {comp_id!r} defined both inline and in "
                    f"{comp_file}")
            raw_comps[comp_id] = entries
    compositions, invalid, warnings = _parse_compositions(raw_comps, str(path))

    ref_obj = data["reference"]
    if not isinstance(ref_obj, dict):
        raise ConfigError(f"{path}: reference must be an object")
    _require_keys(ref_obj, _REF_KEYS, _REF_KEYS, f"{path}: reference")
    ref_comp_id = ref_obj["composition_id"]
    if ref_comp_id not in compositions:
        reason = invalid.get(ref_comp_id, "not defined")
        raise ConfigError(
            f"{path}: reference composition {ref_comp_id!r} unusable: {reason}")
    reference = ReferenceConditions(
        p1_ref=_number(ref_obj, "p1_bar", f"{path}: reference") * 1e5,
        t1_ref=_number(ref_obj, "t1_k", f"{path}: reference"),
        comp_ref=compositions[ref_comp_id],
    )

    mode = _parse_eos_mode(eos_override or data["eos_mode"], str(path))

    corr_obj = data.get("correction", {})
    if not isinstance(corr_obj, dict):
        raise ConfigError(f"{path}: correction must be an object")
    _require_keys(corr_obj, _CORR_KEYS, set(), f"{path}: correction")
    defaults = CorrectionSettings()
    if "iteration_count" in corr_obj:
        count = corr_obj["iteration_count"]
        if isinstance(count, bool) or not isinstance(count, int):
            raise ConfigError(f"{path}: correction.iteration_count must be an integer")
    else:
        count = defaults.iteration_count
    correction = CorrectionSettings(
        iteration_count=count,
        early_exit_tolerance=(_number(corr_obj, "early_exit_tolerance", str(path))
                              if "early_exit_tolerance" in corr_obj
                              else defaults.early_exit_tolerance),
        max_pressure_ratio_drift=(_number(corr_obj, "max_pressure_ratio_drift", str(path))
                                  if "max_pressure_ratio_drift" in corr_obj
                                  else defaults.max_pressure_ratio_drift),
    )

    db_path = data.get("component_db_path")
    if db_path is not None and not isinstance(db_path, str):
        raise ConfigError(f"{path}: component_db_path must be a path string or null")
    db = load_component_database(db_path)

    digest = _config_digest(
        reference=reference, eos_mode=mode, correction=correction,
        compositions=compositions, db_path=db_path)

    return RunConfig(reference=reference, eos_mode=mode, correction=correction,
                     component_db_path=db_path, compositions=compositions,
                     invalid_compositions=invalid, warnings=tuple(warnings),
                     digest=digest, db=db)


def _config_digest(reference: ReferenceConditions, eos_mode: EosModel,
                   correction: CorrectionSettings,
                   compositions: dict[str, GasComposition],
                   db_path: str | None) -> str:
    """sha256 over the resolved configuration plus the component data."""
    if db_path is None:
        db_path = os.environ.get("POLYCORR_COMPONENT_DB") or None
    if db_path is None:
        from importlib import resources
        db_text = resources.files("polycorr").joinpath(
            "data/components.txt").read_text()
    else:
        with open(db_path, "r", encoding="utf-8") as fh:
            db_text = fh.read()
    canonical = {
        "reference": {
            "p1_ref_pa": repr(reference.p1_ref),
            "t1_ref_k": repr(reference.t1_ref),
            "composition": [
                [n, repr(f)] for n, f in zip(reference.comp_ref.names,
                                             reference.comp_ref.fractions)],
        },
        "eos_mode": eos_mode.value,
        "correction": {
            "iteration_count": correction.iteration_count,
            "early_exit_tolerance": repr(correction.early_exit_tolerance),
            "max_pressure_ratio_drift": repr(correction.max_pressure_ratio_drift),
        },
        "compositions": {
            cid: [[n, repr(f)] for n, f in zip(c.names, c.fractions)]
            for cid, c in sorted(compositions.items())
        },
        "component_db_sha256": hashlib.sha256(db_text.encode()).hexdigest(),
    }
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# -- synthetic scenario --------------------------------------------------------

_SCENARIO_KEYS = {
    "name", "seed", "n_points", "reference", "eos_mode", "map_speed_rpm",
    "head_map_coeffs", "flow_range_kg_s", "speed_range_rpm",
    "inlet_pressure_perturbation", "inlet_temperature_perturbation_k",
    "perturbation_mode", "polytropic_efficiency", "campaign_composition_ids",
    "compositions",
}


@dataclass(frozen=True)
class SyntheticScenario:
    """Everything needed to synthesize a measurement campaign."""

    name: str
    seed: int
    n_points: int
    reference: ReferenceConditions
    eos_mode: EosModel
    map_speed_rpm: float
    head_map_coeffs: tuple[float, float, float, float]
    flow_range: tuple[float, float]       # kg/s at map speed
    speed_range: tuple[float, float]      # rev/min
    pressure_perturbation: float          # +/- fraction of reference p1
    temperature_perturbation: float       # +/- K around reference t1
    perturbation_mode: str                # "uniform" | "extremes"
    efficiency: float
    campaign_compositions: tuple[tuple[str, GasComposition], ...]
    digest: str


def load_scenario(path, seed_override: int | None = None,
                  eos_override: str | None = None) -> SyntheticScenario:
    data = _load_json(path)
    required = _SCENARIO_KEYS - {"perturbation_mode", "campaign_composition_ids"}
    _require_keys(data, _SCENARIO_KEYS, required, str(path))

    compositions, invalid, _ = _parse_compositions(data["compositions"], str(path))
    if invalid:
        raise ConfigError(f"{path}: invalid scenario compositions: {invalid}")

    ref_obj = data["reference"]
    _require_keys(ref_obj, _REF_KEYS, _REF_KEYS, f"{path}: reference")
    ref_comp_id = ref_obj["composition_id"]
    if ref_comp_id not in compositions:
        raise ConfigError(f"{path}: reference composition {ref_comp_id!r} not defined")
    reference = ReferenceConditions(
        p1_ref=_number(ref_obj, "p1_bar", str(path)) * 1e5,
        t1_ref=_number(ref_obj, "t1_k", str(path)),
        comp_ref=compositions[ref_comp_id],
    )

    name = data["name"]
    if not isinstance(name, str) or not name:
        raise ConfigError(f"{path}: name must be a non-empty string")
    seed = data["seed"] if seed_override is None else seed_override
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"{path}: seed must be a non-negative integer")
    n_points = data["n_points"]
    if isinstance(n_points, bool) or not isinstance(n_points, int) or n_points < 1:
        raise ConfigError(f"{path}: n_points must be a positive integer")

    coeffs = data["head_map_coeffs"]
    if (not isinstance(coeffs, list) or len(coeffs) != 4
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in coeffs)):
        raise ConfigError(f"{path}: head_map_coeffs must be 4 numbers [a0, a1, a2, a3]")
    coeffs = tuple(float(c) for c in coeffs)

    def _range(key):
        pair = data[key]
        if (not isinstance(pair, list) or len(pair) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair)):
            raise ConfigError(f"{path}: {key} must be [low, high]")
        lo, hi = float(pair[0]), float(pair[1])
        if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 < lo < hi):
            raise ConfigError(f"{path}: {key} must satisfy 0 < low < high")
        return (lo, hi)

    flow_range = _range("flow_range_kg_s")
    speed_range = _range("speed_range_rpm")

    mode = data.get("perturbation_mode", "uniform")
    if mode not in ("uniform", "extremes"):
        raise ConfigError(f"{path}: perturbation_mode must be 'uniform' or 'extremes'")

    dp = _number(data, "inlet_pressure_perturbation", str(path))
    dt = _number(data, "inlet_temperature_perturbation_k", str(path))
    if dp < 0.0 or dp >= 0.5 or dt < 0.0:
        raise ConfigError(f"{path}: perturbation widths out of range")

    eta = _number(data, "polytropic_efficiency", str(path))
    if not (0.0 < eta <= 1.0):
        raise ConfigError(f"{path}: polytropic_efficiency must be in (0, 1]")

    ids = data.get("campaign_composition_ids", [ref_comp_id])
    if (not isinstance(ids, list) or not ids
            or any(not isinstance(i, str) for i in ids)):
        raise ConfigError(f"{path}: campaign_composition_ids must be a list of ids")
    for cid in ids:
        if cid not in compositions:
            raise ConfigError(f"{path}: campaign composition {cid!r} not defined")
    campaign = tuple((cid, compositions[cid]) for cid in ids)

    eos_mode = _parse_eos_mode(eos_override or data["eos_mode"], str(path))

    blob = json.dumps({
        "name": name, "seed": seed, "n_points": n_points,
        "reference": [repr(reference.p1_ref), repr(reference.t1_ref),
                      [[n, repr(f)] for n, f in zip(reference.comp_ref.names,
                                                    reference.comp_ref.fractions)]],
        "eos_mode": eos_mode.value,
        "map_speed_rpm": repr(float(data["map_speed_rpm"])),
        "head_map_coeffs": [repr(c) for c in coeffs],
        "flow_range": [repr(v) for v in flow_range],
        "speed_range": [repr(v) for v in speed_range],
        "dp": repr(dp), "dt": repr(dt), "mode": mode, "eta": repr(eta),
        "campaign": [[cid, [[n, repr(f)] for n, f in zip(c.names, c.fractions)]]
                     for cid, c in campaign],
    }, sort_keys=True, separators=(",", ":"))

    return SyntheticScenario(
        name=name, seed=seed, n_points=n_points, reference=reference,
        eos_mode=eos_mode,
        map_speed_rpm=_number(data, "map_speed_rpm", str(path)),
        head_map_coeffs=coeffs, flow_range=flow_range, speed_range=speed_range,
        pressure_perturbation=dp, temperature_perturbation=dt,
        perturbation_mode=mode, efficiency=eta,
        campaign_compositions=campaign,
        digest=hashlib.sha256(blob.encode()).hexdigest(),
    )
