import json

import pytest

from polycorr.components import default_database, parse_component_file
from polycorr.correction import ReferenceConditions
from polycorr.thermo import GasComposition

# bundled components plus two synthetic test gases:
#  - constcp: temperature-independent ideal cp, so ideal-gas isentropes and
#    the k ratio are exact closed forms
#  - offset pair for binary-interaction parsing
EXTRA_COMPONENTS = """
constcp 20.0 40.0e5 200.0 0.05 35.0e3 0.0 0.0 0.0
"""

NATURAL_GAS = {
    "methane": 0.85,
    "ethane": 0.07,
    "propane": 0.03,
    "n-butane": 0.012,
    "n-pentane": 0.005,
    "n-hexane": 0.003,
    "nitrogen": 0.02,
    "carbon_dioxide": 0.01,
}

SHIFTED_GAS = {
    "methane": 0.83,
    "ethane": 0.08,
    "propane": 0.035,
    "n-butane": 0.014,
    "n-pentane": 0.006,
    "n-hexane": 0.004,
    "nitrogen": 0.021,
    "carbon_dioxide": 0.01,
}

P1_REF = 76.5e5   # Pa
T1_REF = 299.5    # K


@pytest.fixture(scope="session")
def db():
    return default_database()


@pytest.fixture(scope="session")
def test_db():
    """Bundled data plus the constant-cp test gas."""
    from importlib import resources
    text = resources.files("polycorr").joinpath("data/components.txt").read_text()
    return parse_component_file(text + EXTRA_COMPONENTS, source="test db")


@pytest.fixture(scope="session")
def methane():
    return GasComposition.from_dict({"methane": 1.0})


@pytest.fixture(scope="session")
def natural_gas():
    return GasComposition.from_dict(NATURAL_GAS)


@pytest.fixture(scope="session")
def shifted_gas():
    return GasComposition.from_dict(SHIFTED_GAS)


@pytest.fixture(scope="session")
def constcp_gas():
    return GasComposition.from_dict({"constcp": 1.0})


@pytest.fixture(scope="session")
def reference(natural_gas):
    return ReferenceConditions(P1_REF, T1_REF, natural_gas)


BASE_SCENARIO = {
    "name": "test",
    "seed": 20230101,
    "n_points": 12,
    "reference": {"p1_bar": 76.5, "t1_k": 299.5, "composition_id": "ref_gas"},
    "eos_mode": "real",
    "map_speed_rpm": 8000.0,
    "head_map_coeffs": [64000.0, -60.0, -0.65, -0.0025],
    "flow_range_kg_s": [40.0, 80.0],
    "speed_range_rpm": [7200.0, 8800.0],
    "inlet_pressure_perturbation": 0.05,
    "inlet_temperature_perturbation_k": 5.0,
    "polytropic_efficiency": 0.78,
    "compositions": {"ref_gas": NATURAL_GAS},
}


def write_scenario(path, **overrides):
    scn = dict(BASE_SCENARIO)
    scn.update(overrides)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scn, fh)
    return path


@pytest.fixture(scope="session")
def small_campaign(tmp_path_factory):
    """12 perturbed-inlet synthetic points plus scenario and truth map."""
    from polycorr.config import load_scenario
    from polycorr.synth import generate_synthetic
    path = write_scenario(tmp_path_factory.mktemp("scn") / "scenario.json")
    scenario = load_scenario(path)
    points, truth_map = generate_synthetic(scenario)
    return scenario, points, truth_map
