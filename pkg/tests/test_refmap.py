import dataclasses
import filecmp
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from polycorr.correction import CorrectedPoint
from polycorr.errors import (ConfigError, DeviationUndefinedError, FitError,
                             InsufficientDataError)
from polycorr.performance import OperatingPoint
from polycorr.refmap import (campaign_report, deviation, expected_performance,
                             fit_reference_map, load_reference_map,
                             save_reference_map)


TRUE_COEFFS = (64000.0, -60.0, -0.65, -0.0025)


def cubic(coeffs, m):
    return coeffs[0] + coeffs[1] * m + coeffs[2] * m * m + coeffs[3] * m ** 3


def synthetic_corrected(flow, speed, head, eta=0.78, mass_scale=1.0,
                        natural_gas=None, converged=True):
    """CorrectedPoint carrying just the fields the map stage consumes."""
    point = OperatingPoint("t", 70e5, 300.0, 120e5, 350.0,
                           max(flow * mass_scale, 1e-6), speed,
                           natural_gas)
    return CorrectedPoint(
        source=point, p2_c=120e5, t2_c=350.0, n_c=1.5, n1_c=1.5, n2_c=1.5,
        eta_c=eta, f_c=1.0, head_c=head, speed_c=speed, mass_flow_c=flow,
        power_c=flow * head / eta, iterations_used=5, converged=converged,
        last_delta=1e-12, warnings=())


def points_on_cubic(natural_gas, n_ref=8000.0, speeds=None, n_points=16):
    flows = np.linspace(40.0, 80.0, n_points)
    if speeds is None:
        speeds = [n_ref] * n_points
    pts = []
    for m0, speed in zip(flows, speeds):
        s = speed / n_ref
        head_at_ref = cubic(TRUE_COEFFS, m0)
        pts.append(synthetic_corrected(
            flow=m0 * s, speed=speed, head=head_at_ref * s * s,
            natural_gas=natural_gas))
    return pts


class TestFit:
    def test_exact_cubic_recovery(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas)
        refmap = fit_reference_map(pts, reference, 8000.0)
        for got, want in zip(refmap.head_coeffs, TRUE_COEFFS):
            assert math.isclose(got, want, rel_tol=1e-9)
        assert refmap.fit_stats.head_rms < 1e-9 * 60000.0

    def test_perturbed_speeds_recover_after_normalization(self, natural_gas,
                                                          reference):
        rng = np.random.default_rng(3)
        speeds = 8000.0 * (1.0 + rng.uniform(-0.1, 0.1, size=16))
        pts = points_on_cubic(natural_gas, speeds=speeds)
        refmap = fit_reference_map(pts, reference, 8000.0)
        for got, want in zip(refmap.head_coeffs, TRUE_COEFFS):
            assert math.isclose(got, want, rel_tol=1e-9)

    def test_constant_head_degenerates_cleanly(self, natural_gas, reference):
        pts = [synthetic_corrected(flow=m, speed=8000.0, head=50000.0,
                                   natural_gas=natural_gas)
               for m in np.linspace(40.0, 80.0, 12)]
        refmap = fit_reference_map(pts, reference, 8000.0)
        assert math.isclose(refmap.head_coeffs[0], 50000.0, rel_tol=1e-9)
        for c in refmap.head_coeffs[1:]:
            assert abs(c) < 1e-9 * 50000.0

    def test_median_speed_default(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas, speeds=[7000.0] * 8 + [9000.0] * 8)
        refmap = fit_reference_map(pts, reference)
        assert refmap.n_ref_speed == 8000.0

    def test_insufficient_points(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas)[:5]
        with pytest.raises(InsufficientDataError):
            fit_reference_map(pts, reference, 8000.0)

    def test_nonconverged_points_ignored(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas)
        pts += [dataclasses.replace(
            synthetic_corrected(flow=60.0, speed=8000.0, head=1.0,
                                natural_gas=natural_gas), converged=False)]
        refmap = fit_reference_map(pts, reference, 8000.0)
        assert refmap.fit_stats.point_count == len(pts) - 1
        for got, want in zip(refmap.head_coeffs, TRUE_COEFFS):
            assert math.isclose(got, want, rel_tol=1e-9)

    def test_degenerate_flow_range(self, natural_gas, reference):
        pts = [synthetic_corrected(flow=60.0, speed=8000.0, head=55000.0,
                                   natural_gas=natural_gas) for _ in range(10)]
        with pytest.raises(FitError):
            fit_reference_map(pts, reference, 8000.0)

    def test_negative_head_inside_range_rejected(self, natural_gas, reference):
        # head sign flips across the flow range: not a usable characteristic
        pts = [synthetic_corrected(flow=m, speed=8000.0,
                                   head=30000.0 - 700.0 * m,
                                   natural_gas=natural_gas)
               for m in np.linspace(30.0, 50.0, 12)]
        with pytest.raises(FitError):
            fit_reference_map(pts, reference, 8000.0)


class TestExpectedPerformance:
    @pytest.fixture()
    def refmap(self, natural_gas, reference):
        return fit_reference_map(points_on_cubic(natural_gas), reference,
                                 8000.0)

    def test_query_at_fit_point(self, refmap):
        head_e, power_e, in_range = expected_performance(refmap, 60.0, 8000.0)
        assert in_range
        assert math.isclose(head_e, cubic(TRUE_COEFFS, 60.0), rel_tol=1e-9)
        # power over a cubic head map is quartic in flow; the cubic power
        # fit reproduces it only to its structural residual
        assert math.isclose(power_e, 60.0 * cubic(TRUE_COEFFS, 60.0) / 0.78,
                            rel_tol=2e-3)

    def test_fan_law_square_at_double_speed(self, refmap):
        base, _, _ = expected_performance(refmap, 60.0, 8000.0)
        head_e, _, in_range = expected_performance(refmap, 120.0, 16000.0)
        assert in_range
        assert math.isclose(head_e, 4.0 * base, rel_tol=1e-12)

    def test_power_cubes_with_speed(self, refmap):
        _, base, _ = expected_performance(refmap, 60.0, 8000.0)
        _, power_e, _ = expected_performance(refmap, 120.0, 16000.0)
        assert math.isclose(power_e, 8.0 * base, rel_tol=1e-12)

    def test_out_of_range_flagged_not_fatal(self, refmap):
        head_e, _, in_range = expected_performance(refmap, 95.0, 8000.0)
        assert not in_range
        assert math.isclose(head_e, cubic(refmap.head_coeffs, 95.0),
                            rel_tol=1e-12)

    @given(scale_exp=st.integers(-3, 3))
    @settings(max_examples=20, deadline=None,
              suppress_health_check=[HealthCheck.function_scoped_fixture])
    def test_exact_covariance_for_binary_scales(self, refmap, scale_exp):
        c = 2.0 ** scale_exp
        h0, p0, _ = expected_performance(refmap, 55.0, 8000.0)
        h1, p1, _ = expected_performance(refmap, 55.0 * c, 8000.0 * c)
        assert h1 == h0 * c * c
        assert p1 == p0 * c * c * c


class TestDeviation:
    def test_identity_zero(self):
        assert deviation(51234.5, 51234.5) == 0.0

    def test_two_percent(self):
        assert math.isclose(deviation(50000.0, 49000.0), 2.0, rel_tol=1e-14)

    def test_asymmetric_denominator(self):
        assert math.isclose(deviation(49000.0, 50000.0), 100.0 / 49.0,
                            rel_tol=1e-12)

    def test_zero_corrected_rejected(self):
        with pytest.raises(DeviationUndefinedError):
            deviation(0.0, 1.0)

    @given(a=st.floats(1e-3, 1e9), b=st.floats(1e-3, 1e9),
           c=st.floats(1e-6, 1e6))
    @settings(max_examples=200, deadline=None)
    def test_scale_invariance(self, a, b, c):
        assert math.isclose(deviation(c * a, c * b), deviation(a, b),
                            rel_tol=1e-9, abs_tol=1e-9)


class TestCampaignReport:
    def test_self_fit_residual_level(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas)
        refmap = fit_reference_map(pts, reference, 8000.0)
        report = campaign_report(pts, refmap)
        assert report.avg_delta_head < 1e-6
        assert report.excluded_count == 0
        assert len(report.per_point) == len(pts)

    def test_permutation_invariant_averages(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas)
        refmap = fit_reference_map(pts, reference, 8000.0)
        a = campaign_report(pts, refmap)
        b = campaign_report(list(reversed(pts)), refmap)
        assert math.isclose(a.avg_delta_head, b.avg_delta_head, rel_tol=1e-12)
        assert math.isclose(a.avg_delta_power, b.avg_delta_power, rel_tol=1e-12)

    def test_exclusions_counted_with_reasons(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas)
        refmap = fit_reference_map(pts, reference, 8000.0)
        outlier = synthetic_corrected(flow=120.0, speed=8000.0, head=30000.0,
                                      natural_gas=natural_gas)
        bad = dataclasses.replace(outlier, converged=False)
        report = campaign_report(pts + [outlier, bad], refmap)
        assert report.excluded_count == 2
        reasons = dict(report.exclusion_reasons)
        assert reasons[len(pts)] == "outside map flow range"
        assert reasons[len(pts) + 1] == "not converged"

    def test_empty_eligible_set(self, natural_gas, reference):
        pts = points_on_cubic(natural_gas)
        refmap = fit_reference_map(pts, reference, 8000.0)
        lonely = [synthetic_corrected(flow=150.0, speed=8000.0, head=30000.0,
                                      natural_gas=natural_gas)]
        report = campaign_report(lonely, refmap)
        assert report.avg_delta_head is None
        assert report.avg_delta_power is None
        assert report.excluded_count == 1


class TestMapFile:
    def test_round_trip_bit_exact(self, natural_gas, reference, tmp_path):
        refmap = fit_reference_map(points_on_cubic(natural_gas), reference,
                                   8000.0)
        p1 = tmp_path / "map1.txt"
        p2 = tmp_path / "map2.txt"
        save_reference_map(refmap, p1)
        loaded = load_reference_map(p1)
        assert loaded == refmap
        save_reference_map(loaded, p2)
        assert filecmp.cmp(p1, p2, shallow=False)

    def test_unknown_key_rejected(self, natural_gas, reference, tmp_path):
        refmap = fit_reference_map(points_on_cubic(natural_gas), reference,
                                   8000.0)
        path = tmp_path / "map.txt"
        save_reference_map(refmap, path)
        text = path.read_text() + "surge_margin: 1.0\n"
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_reference_map(path)

    def test_missing_key_rejected(self, natural_gas, reference, tmp_path):
        refmap = fit_reference_map(points_on_cubic(natural_gas), reference,
                                   8000.0)
        path = tmp_path / "map.txt"
        save_reference_map(refmap, path)
        lines = [l for l in path.read_text().splitlines()
                 if not l.startswith("power_coeffs")]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ConfigError):
            load_reference_map(path)
