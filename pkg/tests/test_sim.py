"""Closed-loop simulator: exact plant integration, logs, scenario loading."""

import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corridor_mpcc.mpcc import StepResult
from corridor_mpcc.sim import (
    LOG_COLUMNS,
    Disturbance,
    PlantState,
    ScenarioLog,
    SimResult,
    apply_overrides,
    disturbance_accel,
    plant_step,
    run_baseline,
    run_scenario,
    scenario_from_dict,
    load_scenario,
    summarize,
)


def box_faces(xlo, xhi, ylo, yhi, zlo, zhi) -> list[dict]:
    return [
        {"normal": [1.0, 0.0, 0.0], "offset": xhi},
        {"normal": [-1.0, 0.0, 0.0], "offset": -xlo},
        {"normal": [0.0, 1.0, 0.0], "offset": yhi},
        {"normal": [0.0, -1.0, 0.0], "offset": -ylo},
        {"normal": [0.0, 0.0, 1.0], "offset": zhi},
        {"normal": [0.0, 0.0, -1.0], "offset": -zlo},
    ]


def mini_docs(**overrides) -> dict:
    """A 2 m rest-to-rest course over 8 s inside one tight box.

    x(t) = 0.09375 t^2 - 0.0078125 t^3 is the cubic smoothstep scaled to
    reach x(8) = 6 - 4 = 2 with x'(0) = x'(8) = 0 and peak speed
    x'(4) = 0.375. The slow tail opens the goal ball (0.1 m, 0.1 m/s) well
    before the reference ends, like the bundled demo courses.
    """
    doc = {
        "name": "mini",
        "trajectory": {
            "t0": 0.0,
            "segments": [
                {
                    "duration": 8.0,
                    "corridor_index": 0,
                    "coeffs": {
                        "x": [0.0, 0.0, 0.09375, -0.0078125],
                        "y": [0.0, 0.0, 0.0, 0.0],
                        "z": [1.0, 0.0, 0.0, 0.0],
                    },
                }
            ],
        },
        "corridor": {
            "polyhedra": [{"faces": box_faces(-0.5, 2.5, -0.25, 0.25, 0.75, 1.25)}]
        },
        "mpcc": {"N": 10, "limits": {"v_t_max": 1.0}},
        "start": {"position": [0.0, 0.0, 1.0], "velocity": [0.0, 0.0, 0.0]},
        "disturbances": [],
        "duration_s": 10.0,
    }
    doc.update(overrides)
    return doc


@pytest.fixture(scope="module")
def mini_run():
    scenario = scenario_from_dict(mini_docs())
    return scenario, run_scenario(scenario)


class TestPlantStep:
    def test_constant_jerk_hand_values(self):
        # a' = a + j dt; v' = v + a dt + j dt^2/2; p' = p + v dt + a dt^2/2
        # + j dt^3/6, evaluated by hand at dt = 0.5
        state = PlantState(
            position=np.zeros(3),
            velocity=np.array([1.0, 0.0, 0.0]),
            accel=np.array([0.0, 1.0, 0.0]),
        )
        out = plant_step(state, [0.0, 0.0, 6.0], 0.5)
        np.testing.assert_allclose(out.accel, [0.0, 1.0, 3.0], atol=1e-15)
        np.testing.assert_allclose(out.velocity, [1.0, 0.5, 0.75], atol=1e-15)
        np.testing.assert_allclose(out.position, [0.5, 0.125, 0.125], atol=1e-15)

    def test_disturbance_shifts_velocity_and_position_only(self):
        state = PlantState(
            position=np.zeros(3),
            velocity=np.array([1.0, 0.0, 0.0]),
            accel=np.array([0.0, 1.0, 0.0]),
        )
        out = plant_step(state, [0.0, 0.0, 6.0], 0.5, disturbance=[2.0, 0.0, 0.0])
        # velocity gains d*dt, position d*dt^2/2, stored accel is untouched:
        # the push models an external force, not a commanded motion change
        np.testing.assert_allclose(out.accel, [0.0, 1.0, 3.0], atol=1e-15)
        np.testing.assert_allclose(out.velocity, [2.0, 0.5, 0.75], atol=1e-15)
        np.testing.assert_allclose(out.position, [0.75, 0.125, 0.125], atol=1e-15)

    def test_zero_jerk_is_ballistic(self):
        state = PlantState(
            position=np.array([1.0, 2.0, 3.0]),
            velocity=np.array([1.0, -1.0, 0.5]),
            accel=np.zeros(3),
        )
        out = plant_step(state, np.zeros(3), 0.2)
        np.testing.assert_allclose(out.position, [1.2, 1.8, 3.1], atol=1e-15)
        np.testing.assert_allclose(out.velocity, state.velocity, atol=1e-15)

    @given(
        vals=st.lists(
            st.floats(-5.0, 5.0), min_size=12, max_size=12
        ),
        h=st.floats(0.01, 0.4),
    )
    @settings(max_examples=25, deadline=None)
    def test_two_half_steps_equal_one_full_step(self, vals, h):
        # exact integration of a cubic-in-time state forms a semigroup
        v = np.array(vals)
        state = PlantState(position=v[:3], velocity=v[3:6], accel=v[6:9])
        jerk = v[9:12]
        dist = np.array([0.3, -0.2, 0.1])
        twice = plant_step(plant_step(state, jerk, h, dist), jerk, h, dist)
        once = plant_step(state, jerk, 2.0 * h, dist)
        np.testing.assert_allclose(twice.position, once.position, atol=1e-10)
        np.testing.assert_allclose(twice.velocity, once.velocity, atol=1e-10)
        np.testing.assert_allclose(twice.accel, once.accel, atol=1e-10)


class TestDisturbance:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown disturbance kind"):
            Disturbance(kind="gust", start=0.0, duration=1.0, accel=[1, 0, 0])

    def test_nonpositive_duration_rejected(self):
        with pytest.raises(ValueError, match="duration"):
            Disturbance(kind="wind", start=0.0, duration=0.0, accel=[1, 0, 0])

    def test_accel_must_be_three_vector(self):
        with pytest.raises(ValueError, match="3-vector"):
            Disturbance(kind="wind", start=0.0, duration=1.0, accel=[1, 0])

    def test_active_window_is_half_open(self):
        d = Disturbance(kind="impulse", start=1.0, duration=0.5, accel=[0, 1, 0])
        assert not d.active(0.999)
        assert d.active(1.0)
        assert d.active(1.499)
        assert not d.active(1.5)

    def test_overlapping_disturbances_sum(self):
        ds = (
            Disturbance(kind="wind", start=0.0, duration=2.0, accel=[1.0, 0, 0]),
            Disturbance(kind="impulse", start=1.0, duration=0.5, accel=[0, 2.0, 0]),
        )
        np.testing.assert_allclose(disturbance_accel(ds, 1.2), [1.0, 2.0, 0.0])
        np.testing.assert_allclose(disturbance_accel(ds, 0.5), [1.0, 0.0, 0.0])
        np.testing.assert_allclose(disturbance_accel(ds, 3.0), [0.0, 0.0, 0.0])


class TestScenarioLog:
    def _record(self, **overrides):
        record = {name: 0.0 for name in LOG_COLUMNS}
        record.update(overrides)
        return record

    def test_append_enforces_schema(self):
        log = ScenarioLog()
        log.append(**self._record())
        incomplete = self._record()
        del incomplete["solve_time"]
        with pytest.raises(ValueError, match="solve_time"):
            log.append(**incomplete)
        with pytest.raises(ValueError, match="bogus"):
            log.append(**self._record(), bogus=1.0)

    def test_csv_round_trip_keeps_column_order(self, tmp_path):
        log = ScenarioLog()
        log.append(**self._record(wall_step=0, tracking_error=0.25))
        log.append(**self._record(wall_step=1, tracking_error=0.5))
        path = tmp_path / "log.csv"
        log.to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == LOG_COLUMNS
        assert len(rows) == 3
        err_col = rows[0].index("tracking_error")
        assert [float(r[err_col]) for r in rows[1:]] == [0.25, 0.5]

    def test_column_extraction(self):
        log = ScenarioLog()
        log.append(**self._record(safety_margin=0.1))
        log.append(**self._record(safety_margin=-0.2))
        np.testing.assert_allclose(log.column("safety_margin"), [0.1, -0.2])


class TestRunScenario:
    def test_reaches_goal_on_the_mini_course(self, mini_run):
        scenario, result = mini_run
        assert result.outcome == "goal"
        assert result.goal_time is not None and result.goal_time < 8.0
        np.testing.assert_allclose(
            result.final_state.position, [2.0, 0.0, 1.0], atol=0.1
        )
        assert np.linalg.norm(result.final_state.velocity) < 0.1
        assert result.ticks == len(result.log.rows)

    def test_log_matches_independent_plant_rollout(self, mini_run):
        # replay the logged jerk commands through plant_step: every logged
        # state must be the plant state, and the logged accelerations the
        # felt (plant + disturbance) values
        scenario, result = mini_run
        dt = scenario.config.dt
        state = PlantState(
            position=scenario.start_position.copy(),
            velocity=scenario.start_velocity.copy(),
            accel=np.zeros(3),
        )
        for k, row in enumerate(result.log.rows):
            assert row["wall_step"] == k
            assert row["sim_time"] == pytest.approx(k * dt)
            push = disturbance_accel(scenario.disturbances, row["sim_time"])
            np.testing.assert_allclose(
                [row["px"], row["py"], row["pz"]], state.position, atol=1e-12
            )
            np.testing.assert_allclose(
                [row["vx"], row["vy"], row["vz"]], state.velocity, atol=1e-12
            )
            np.testing.assert_allclose(
                [row["ax"], row["ay"], row["az"]], state.accel + push, atol=1e-12
            )
            state = plant_step(
                state, [row["jx"], row["jy"], row["jz"]], dt, disturbance=push
            )

    def test_rerun_is_reproducible(self):
        # bit-identical everywhere except the wall-clock solve_time column
        scenario = scenario_from_dict(mini_docs(duration_s=1.5))
        a, b = run_scenario(scenario), run_scenario(scenario)
        assert len(a.log.rows) == len(b.log.rows)
        for name in LOG_COLUMNS:
            if name == "solve_time":
                continue
            assert np.array_equal(a.log.column(name), b.log.column(name)), name

    def test_short_budget_reports_incomplete(self):
        scenario = scenario_from_dict(mini_docs(duration_s=0.5))
        result = run_scenario(scenario)
        assert result.outcome == "incomplete"
        assert result.ticks == 10

    def test_unrecoverable_push_aborts(self):
        doc = mini_docs(
            duration_s=4.0,
            mpcc={"N": 10, "max_recovery_ticks": 3, "limits": {"v_t_max": 1.2}},
            disturbances=[
                {"kind": "wind", "start": 0.5, "duration": 5.0,
                 "accel": [0.0, 40.0, 0.0]}
            ],
        )
        result = run_scenario(scenario_from_dict(doc))
        assert result.outcome == "abort"
        assert result.ticks < 80
        assert result.log.column("recovery").sum() >= 1

    def test_controller_is_fed_measured_acceleration(self):
        # a wind active from t = 0 must show up in the controller's accel
        # argument immediately, while the plant's stored accel stays zero
        # under zero jerk
        recorded = []

        class Stub:
            def step(self, position, velocity, accel):
                recorded.append(np.asarray(accel).copy())
                return StepResult(
                    jerk=np.zeros(3), jerk_t=0.0, status="solved",
                    recovery=False, warned=False, aborted=False,
                    iterations=1, solve_time=0.0, objective=0.0,
                    virtual=np.zeros(3), plan=None, solution=None,
                )

        doc = mini_docs(
            duration_s=0.25,
            disturbances=[
                {"kind": "wind", "start": 0.0, "duration": 1.0,
                 "accel": [0.0, 1.5, 0.0]}
            ],
        )
        scenario = scenario_from_dict(doc)
        result = run_scenario(scenario, controller=Stub())
        assert len(recorded) == 5
        for felt in recorded:
            np.testing.assert_allclose(felt, [0.0, 1.5, 0.0], atol=1e-12)
        # the push accumulates into velocity, not into the stored accel
        np.testing.assert_allclose(
            result.log.column("vy"), 1.5 * 0.05 * np.arange(5), atol=1e-12
        )
        np.testing.assert_allclose(result.log.column("ay"), np.full(5, 1.5))


class TestBaseline:
    def test_tracks_the_calm_mini_course(self):
        result = run_baseline(scenario_from_dict(mini_docs()))
        assert result.outcome == "goal"
        assert result.log.column("tracking_error").max() < 0.2
        assert result.log.column("safety_margin").min() > 0.0

    def test_sustained_wind_blows_the_baseline_out_of_the_corridor(self):
        # kp = 4 against a lateral 1.5 m/s^2 wind leaves a steady-state
        # offset of ~0.375 m, past the 0.25 m half-width
        doc = mini_docs(
            disturbances=[
                {"kind": "wind", "start": 1.0, "duration": 3.0,
                 "accel": [0.0, 1.5, 0.0]}
            ],
        )
        result = run_baseline(scenario_from_dict(doc))
        assert result.log.column("safety_margin").min() < -1e-3


class TestSummarize:
    def _result(self, log, outcome="goal", goal_time=1.0):
        final = PlantState.at_rest([0.0, 0.0, 0.0])
        return SimResult(
            outcome=outcome, log=log, final_state=final,
            ticks=len(log.rows), goal_time=goal_time,
        )

    def test_headline_numbers_and_format(self):
        log = ScenarioLog()
        base = {name: 0.0 for name in LOG_COLUMNS}
        log.append(**{**base, "tracking_error": 0.02, "safety_margin": 0.20,
                      "solve_time": 0.010, "recovery": 0})
        log.append(**{**base, "tracking_error": 0.05, "safety_margin": 0.15,
                      "solve_time": 0.030, "recovery": 1})
        scenario = scenario_from_dict(mini_docs())
        summary = summarize(self._result(log), scenario)
        assert summary.scenario == "mini"
        assert summary.goal_reached
        assert summary.max_tracking_error == pytest.approx(0.05)
        assert summary.min_corridor_margin == pytest.approx(0.15)
        assert summary.mean_solve_time == pytest.approx(0.020)
        assert summary.max_solve_time == pytest.approx(0.030)
        assert summary.recovery_ticks == 1
        line = summary.format_line()
        assert "mini: goal" in line
        assert "goal=1.00s" in line
        assert "max_err=0.0500m" in line
        assert "solve=20.00/30.00ms" in line
        assert "recovery=1" in line

    def test_empty_log_summary(self):
        scenario = scenario_from_dict(mini_docs())
        summary = summarize(
            self._result(ScenarioLog(), outcome="abort", goal_time=None), scenario
        )
        assert not summary.goal_reached
        assert summary.max_tracking_error == 0.0
        assert summary.mean_solve_time == 0.0
        assert "goal=-" in summary.format_line()


class TestScenarioLoading:
    def test_inline_documents_are_resolved(self):
        scenario = scenario_from_dict(mini_docs())
        assert scenario.name == "mini"
        assert scenario.seed == 0
        assert scenario.duration_s == 8.0
        assert scenario.config.N == 10
        assert scenario.config.limits.v_t_max == 1.2
        np.testing.assert_allclose(scenario.start_position, [0.0, 0.0, 1.0])
        np.testing.assert_allclose(
            scenario.trajectory.eval(4.0, 0), [2.0, 0.0, 1.0], atol=1e-12
        )
        assert scenario.corridor.membership_margin([1.0, 0.0, 1.0]) > 0.0

    def test_file_references_resolve_against_base_dir(self, tmp_path):
        import json

        doc = mini_docs()
        (tmp_path / "course.json").write_text(json.dumps(doc["trajectory"]))
        (tmp_path / "tube.json").write_text(json.dumps(doc["corridor"]))
        doc["trajectory"] = "course.json"
        doc["corridor"] = "tube.json"
        (tmp_path / "mini_file.json").write_text(json.dumps(doc))
        scenario = load_scenario(tmp_path / "mini_file.json")
        # the explicit name wins over the file stem; without it the stem is
        # used
        assert scenario.name == "mini"
        del doc["name"]
        (tmp_path / "mini_file.json").write_text(json.dumps(doc))
        assert load_scenario(tmp_path / "mini_file.json").name == "mini_file"
        np.testing.assert_allclose(
            scenario.trajectory.eval(4.0, 0), [2.0, 0.0, 1.0], atol=1e-12
        )

    def test_missing_required_fields_are_named(self):
        doc = mini_docs()
        del doc["trajectory"]
        with pytest.raises(ValueError, match="trajectory"):
            scenario_from_dict(doc)
        doc = mini_docs()
        del doc["duration_s"]
        with pytest.raises(ValueError, match="duration_s"):
            scenario_from_dict(doc)

    def test_unknown_config_fields_are_named(self):
        with pytest.raises(ValueError, match="horizon"):
            scenario_from_dict(mini_docs(mpcc={"horizon": 5}))
        with pytest.raises(ValueError, match="vmax"):
            scenario_from_dict(mini_docs(mpcc={"limits": {"vmax": 1.0}}))

    def test_bad_disturbance_kind_rejected(self):
        doc = mini_docs(
            disturbances=[
                {"kind": "gust", "start": 0.0, "duration": 1.0,
                 "accel": [1.0, 0.0, 0.0]}
            ]
        )
        with pytest.raises(ValueError, match="gust"):
            scenario_from_dict(doc)

    def test_overrides_return_a_modified_copy(self):
        scenario = scenario_from_dict(mini_docs())
        out = apply_overrides(scenario, rho=2.5, no_recovery=True, seed=7)
        assert out.config.rho == 2.5
        assert out.config.recovery is False
        assert out.seed == 7
        assert scenario.config.rho == 1.0
        assert scenario.config.recovery is True
        assert scenario.seed == 0
        untouched = apply_overrides(scenario)
        assert untouched.config.rho == 1.0
        assert untouched.config.recovery is True
