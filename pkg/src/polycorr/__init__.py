"""polycorr: centrifugal-compressor performance correction.

Corrects measured polytropic performance (head, gas power, efficiency)
from actual operating conditions to equivalent performance at specified
reference conditions, builds cubic reference maps from corrected points,
and quantifies corrected-vs-expected deviations.
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .components import (ComponentData, ComponentDatabase,
                         default_database, load_component_database)
from .correction import (CorrectedPoint, CorrectionSettings,
                         ReferenceConditions, average_properties,
                         correct_point, corrected_discharge_exponent,
                         corrected_discharge_pressure,
                         corrected_discharge_temperature,
                         initial_corrected_exponent)
from .errors import PolycorrError
from .performance import (OperatingPoint, PerformanceSummary, analyze_point,
                          efficiency_from_exponents, isentropic_discharge,
                          measured_polytropic_exponent, polytropic_head,
                          schultz_factor, schultz_isentropic_exponent)
from .refmap import (DeviationReport, ReferenceMap, campaign_report,
                     deviation, expected_performance, fit_reference_map,
                     load_reference_map, save_reference_map)
from .thermo import (EosModel, GasComposition, R_UNIVERSAL, ThermoState,
                     evaluate_state, exponent_calc, mixture_molecular_weight,
                     polytropic_exponent_from_efficiency, state_exponents)

__version__ = "0.1.0"


def __getattr__(name):
    # pipeline-layer entry points, imported lazily to keep the core import
    # light (config/synth pull in json/hashlib machinery)
    if name in ("RunConfig", "SyntheticScenario", "load_run_config",
                "load_scenario"):
        from . import config
        return getattr(config, name)
    if name in ("SyntheticPoint", "generate_synthetic", "ground_truth_map"):
        from . import synth
        return getattr(synth, name)
    if name in ("CampaignRecord", "ingest_csv"):
        from . import ingest
        return getattr(ingest, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "KERNEL_BACKEND", "ComponentData", "ComponentDatabase",
    "default_database", "load_component_database",
    "CorrectedPoint", "CorrectionSettings", "ReferenceConditions",
    "average_properties", "correct_point", "corrected_discharge_exponent",
    "corrected_discharge_pressure", "corrected_discharge_temperature",
    "initial_corrected_exponent", "PolycorrError",
    "OperatingPoint", "PerformanceSummary", "analyze_point",
    "efficiency_from_exponents", "isentropic_discharge",
    "measured_polytropic_exponent", "polytropic_head", "schultz_factor",
    "schultz_isentropic_exponent",
    "DeviationReport", "ReferenceMap", "campaign_report", "deviation",
    "expected_performance", "fit_reference_map", "load_reference_map",
    "save_reference_map",
    "EosModel", "GasComposition", "R_UNIVERSAL", "ThermoState",
    "evaluate_state", "exponent_calc", "mixture_molecular_weight",
    "polytropic_exponent_from_efficiency", "state_exponents",
    "__version__",
]
