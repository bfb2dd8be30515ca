import numpy as np
import pytest

from cloudband_game import (
    ATTACKER,
    DEFENDER,
    AllocationStrategy,
    CloudBandSpec,
    InvalidSpecError,
    SweepRequest,
    defender_utility,
    emit_sweep,
    read_sweep_file,
    run_probability_curves,
    run_sweep,
    run_threshold_table,
    run_utility_surface,
    scenario_request,
    scenario_thresholds,
)
from cloudband_game.runner import (
    KIND_CURVE,
    KIND_SURFACE,
    KIND_THRESHOLD,
    SCENARIO_NAMES,
    baseline_game_spec,
    request_from_dict,
)


def band(min_functional=20, capacity=100, **econ):
    return CloudBandSpec(
        band_id=1, capacity=capacity, min_functional=min_functional,
        attack_success_prob=0.1, **econ,
    )


def curve_request(alpha=30, min_functional=20, deltas=range(20, 43),
                  p_values=(0.1, 0.15, 0.2, 0.25)):
    return SweepRequest(
        kind=KIND_CURVE,
        band=band(min_functional),
        alpha_values=(alpha,),
        delta_values=tuple(deltas),
        p_values=tuple(p_values),
    )


class TestScenarioRegistry:
    def test_six_names(self):
        assert SCENARIO_NAMES == ("scenario-i", "scenario-ii", "scenario-iii",
                                  "scenario-iv", "scenario-v", "scenario-vi")

    def test_unknown_name_rejected_with_listing(self):
        with pytest.raises(InvalidSpecError, match="scenario-i, scenario-ii"):
            scenario_request("scenario-vii")

    def test_scenario_i_thresholds(self):
        assert scenario_thresholds("scenario-i") == {0.1: 24, 0.15: 26, 0.2: 28, 0.25: 30}

    def test_scenario_iii_thresholds(self):
        assert scenario_thresholds("scenario-iii") == {0.1: 34, 0.15: 36, 0.2: 38, 0.25: 40}


class TestProbabilityCurves:
    def test_scenario_i_curves_cross_target_at_expected_defenses(self):
        result = run_probability_curves(scenario_request("scenario-i"))
        deltas = result.request.delta_values
        expected = {0.1: 24, 0.15: 26, 0.2: 28, 0.25: 30}
        for series in result.series:
            crossing = next(d for d, v in zip(deltas, series.values) if v >= 0.9)
            assert crossing == expected[series.p]

    def test_zero_success_rate_steps_at_the_floor(self):
        req = curve_request(alpha=30, min_functional=20, deltas=range(15, 26),
                            p_values=(0.0,))
        series = run_probability_curves(req).series[0]
        for delta, value in zip(req.delta_values, series.values):
            assert value == (1.0 if delta >= 20 else 0.0)

    def test_curves_monotone_in_defenses(self):
        result = run_probability_curves(curve_request())
        for series in result.series:
            assert (np.diff(series.values) >= -1e-12).all()

    def test_higher_p_is_pointwise_lower_or_equal(self):
        result = run_probability_curves(curve_request())
        ordered = sorted(result.series, key=lambda s: s.p)
        for lo, hi in zip(ordered, ordered[1:]):
            assert (hi.values <= lo.values + 1e-12).all()

    def test_requires_single_attack_count(self):
        req = SweepRequest(KIND_CURVE, band(), (30, 40), (20, 21), (0.1,))
        with pytest.raises(InvalidSpecError, match="single attack count"):
            run_probability_curves(req)

    def test_kind_mismatch_rejected(self):
        req = SweepRequest(KIND_SURFACE, band(), (30,), (20, 21), (0.1,))
        with pytest.raises(InvalidSpecError, match="probability_curve"):
            run_probability_curves(req)


class TestUtilitySurface:
    def surface_request(self, p_values=(0.1,), **kwargs):
        return SweepRequest(
            kind=KIND_SURFACE,
            band=band(**kwargs),
            alpha_values=tuple(range(10, 51, 10)),
            delta_values=tuple(range(20, 71, 10)),
            p_values=tuple(p_values),
        )

    def test_cells_match_defender_utility_calls(self):
        req = self.surface_request()
        result = run_utility_surface(req)
        series = result.series[0]
        spec = baseline_game_spec(p=series.p, min_functional=req.band.min_functional)
        for i, alpha in enumerate(req.alpha_values):
            for j, delta in enumerate(req.delta_values):
                expected = defender_utility(
                    spec,
                    AllocationStrategy(DEFENDER, (delta,)),
                    AllocationStrategy(ATTACKER, (alpha,)),
                )
                assert series.values[i, j] == expected

    def test_free_defenses_make_surface_monotone_in_defenses(self):
        req = self.surface_request(defense_unit_cost=0.0)
        series = run_utility_surface(req).series[0]
        assert (np.diff(series.values, axis=1) >= -1e-12).all()

    def test_below_floor_column_is_pure_cost_for_every_attack_count(self):
        req = SweepRequest(
            kind=KIND_SURFACE,
            band=band(min_functional=20),
            alpha_values=(10, 30, 50),
            delta_values=(5, 10, 19),
            p_values=(0.25,),
        )
        series = run_utility_surface(req).series[0]
        for j, delta in enumerate(req.delta_values):
            assert (series.values[:, j] == -0.5 * delta).all()

    def test_multi_band_request_refused(self):
        with pytest.raises(InvalidSpecError, match="exactly one band"):
            request_from_dict({
                "kind": KIND_SURFACE,
                "band": [{"capacity": 10, "min_functional": 2},
                         {"capacity": 10, "min_functional": 2}],
                "alpha_range": [1, 2],
                "delta_range": [2, 3],
                "p_values": [0.1],
            })


class TestThresholdTable:
    def threshold_request(self, alphas, min_functional, p_values, target=0.9):
        return SweepRequest(
            kind=KIND_THRESHOLD,
            band=band(min_functional),
            alpha_values=tuple(alphas),
            delta_values=(min_functional,),
            p_values=tuple(p_values),
            target=target,
        )

    def test_scenario_v_row(self):
        req = self.threshold_request([50], 25, (0.1, 0.15, 0.2, 0.25))
        result = run_threshold_table(req)
        got = [int(s.values[0]) for s in result.series]
        reference = [33, 35, 37, 40]
        assert all(abs(g - r) <= 1 for g, r in zip(got, reference))

    def test_scenario_vi_low_rates(self):
        req = self.threshold_request([50], 30, (0.1, 0.15))
        got = [int(s.values[0]) for s in run_threshold_table(req).series]
        assert abs(got[0] - 36) <= 1
        assert abs(got[1] - 40) <= 1

    def test_target_one_hits_the_full_sum_seam(self):
        # The binomial sum already covers the whole support one defense
        # before the certain region, so certainty arrives at attacks+min-1.
        req = self.threshold_request([30], 20, (0.35,), target=1.0)
        assert int(run_threshold_table(req).series[0].values[0]) == 30 + 20 - 1

    def test_monotone_in_p(self):
        req = self.threshold_request([40], 20, (0.05, 0.1, 0.2, 0.4, 0.8))
        values = [int(s.values[0]) for s in run_threshold_table(req).series]
        assert values == sorted(values)

    def test_monotone_in_min_functional(self):
        rows = []
        for mn in (10, 20, 30):
            req = self.threshold_request([40], mn, (0.2,))
            rows.append(int(run_threshold_table(req).series[0].values[0]))
        assert rows == sorted(rows)


class TestEmission:
    def test_curve_filenames_and_header(self, tmp_path):
        result = run_sweep(scenario_request("scenario-i"))
        paths = emit_sweep(result, tmp_path)
        names = [p.name for p in paths]
        assert names == [
            "Pk-a30-min20-pk-0.1.txt", "Pk-a30-min20-pk-0.15.txt",
            "Pk-a30-min20-pk-0.2.txt", "Pk-a30-min20-pk-0.25.txt",
        ]
        header, data = read_sweep_file(paths[0])
        assert header == ["x", "y"]
        assert data.shape == (23, 2)
        assert data[0, 0] == 20 and data[-1, 0] == 42

    def test_surface_filename_and_round_trip(self, tmp_path):
        req = SweepRequest(
            kind=KIND_SURFACE,
            band=band(),
            alpha_values=tuple(range(10, 51)),
            delta_values=tuple(range(20, 71)),
            p_values=(0.1,),
        )
        result = run_utility_surface(req)
        paths = emit_sweep(result, tmp_path)
        assert paths[0].name == "Uk-10-50-pk-0.1.txt"
        header, data = read_sweep_file(paths[0])
        assert header == ["x", "y", "z"]
        assert data.shape == (41 * 51, 3)
        parsed = data[:, 2].reshape(41, 51)
        assert np.allclose(parsed, result.series[0].values, rtol=1e-5, atol=1e-9)
        # axis columns ascend lexicographically
        pairs = list(zip(data[:, 0], data[:, 1]))
        assert pairs == sorted(pairs)

    def test_threshold_file(self, tmp_path):
        req = SweepRequest(
            kind=KIND_THRESHOLD,
            band=band(min_functional=25),
            alpha_values=(30, 50),
            delta_values=(25,),
            p_values=(0.1, 0.2),
        )
        paths = emit_sweep(run_threshold_table(req), tmp_path)
        assert paths[0].name == "thresholds-min25-target-0.9.txt"
        header, data = read_sweep_file(paths[0])
        assert header == ["x", "y", "z"]
        assert data.shape == (4, 3)

    def test_emission_is_byte_identical(self, tmp_path):
        result = run_sweep(scenario_request("scenario-ii"))
        first = emit_sweep(result, tmp_path / "a")
        second = emit_sweep(result, tmp_path / "b")
        for p1, p2 in zip(first, second):
            assert p1.read_bytes() == p2.read_bytes()

    def test_round_trip_matches_within_print_precision(self, tmp_path):
        result = run_sweep(scenario_request("scenario-i"))
        paths = emit_sweep(result, tmp_path)
        for path, series in zip(paths, result.series):
            _, data = read_sweep_file(path)
            assert np.allclose(data[:, 1], series.values, rtol=1e-5, atol=1e-9)

    def test_unwritable_path_raises_os_error(self, tmp_path):
        blocker = tmp_path / "not-a-dir"
        blocker.write_text("file, not a directory")
        result = run_sweep(scenario_request("scenario-i"))
        with pytest.raises(OSError):
            emit_sweep(result, blocker)


class TestRequestLoading:
    def test_range_and_list_forms(self):
        req = request_from_dict({
            "kind": KIND_CURVE,
            "band": {"capacity": 100, "min_functional": 20},
            "alpha_range": [30],
            "delta_range": {"start": 20, "stop": 42, "step": 2},
            "p_values": [0.1, 0.25],
        })
        assert req.alpha_values == (30,)
        assert req.delta_values == tuple(range(20, 43, 2))
        assert req.target == 0.9

    def test_p_value_out_of_range_rejected(self):
        with pytest.raises(InvalidSpecError, match="outside"):
            request_from_dict({
                "kind": KIND_CURVE,
                "band": {"capacity": 100, "min_functional": 20},
                "alpha_range": [30],
                "delta_range": [20, 21],
                "p_values": [1.4],
            })

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidSpecError, match="kind"):
            request_from_dict({
                "kind": "heatmap",
                "band": {"capacity": 100, "min_functional": 20},
                "alpha_range": [30],
                "delta_range": [20, 21],
                "p_values": [0.1],
            })

    def test_empty_axis_rejected(self):
        with pytest.raises(InvalidSpecError, match="non-empty"):
            request_from_dict({
                "kind": KIND_CURVE,
                "band": {"capacity": 100, "min_functional": 20},
                "alpha_range": [30],
                "delta_range": [],
                "p_values": [0.1],
            })
