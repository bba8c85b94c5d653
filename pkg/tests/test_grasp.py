import json
import os

import pytest

from jamcord.errors import InputError
from jamcord.gripper import (
    DATA_DIR,
    build_gripper,
    gripper_config_from_file,
)
from jamcord.grasp import (
    ComparisonReport,
    ObjectShape,
    Protocol,
    compare_to_baseline,
    jam_and_lift,
    max_holding_force,
    press,
    run_protocol,
)
from jamcord.trace import GraspTrace, TraceSample, read_trace_csv


@pytest.fixture(scope="module")
def small_config():
    return gripper_config_from_file(os.path.join(DATA_DIR, "gripper_small.json"))


def small_protocol(**overrides):
    params = dict(press_depth=12.0, lift_distance=10.0, pressure_A=50.0,
                  pressure_B=200.0, sample_step=2.0)
    params.update(overrides)
    return Protocol(**params)


CYLINDER = ObjectShape(kind="cylinder", diameter=30.0, material="polyacetal")
TRIANGLE = ObjectShape(kind="triangular_prism", apex_angle=30.0,
                       material="acrylic")
FLAT = ObjectShape(kind="half_plane", material="polyacetal")


class TestObjectShape:
    def test_friction_defaults_by_material(self):
        assert CYLINDER.friction == 0.20
        assert TRIANGLE.friction == 0.25
        assert ObjectShape(kind="half_plane", material="mystery").friction == 0.20
        assert ObjectShape(kind="half_plane", friction=0.4).friction == 0.4

    def test_kind_validation(self):
        with pytest.raises(InputError):
            ObjectShape(kind="sphere")
        with pytest.raises(InputError):
            ObjectShape(kind="cylinder", diameter=0.0)
        with pytest.raises(InputError):
            ObjectShape(kind="triangular_prism", apex_angle=180.0)

    def test_json_round_trip(self):
        again = ObjectShape.from_json(json.loads(json.dumps(TRIANGLE.to_json())))
        assert again == TRIANGLE
        with pytest.raises(InputError, match="unknown"):
            ObjectShape.from_json({"kind": "cylinder", "diameter": 3, "mass": 1})


class TestProtocol:
    def test_defaults_and_validation(self):
        p = small_protocol()
        assert p.trials == 1 and p.speed == 100.0
        with pytest.raises(InputError):
            small_protocol(press_depth=0.0)
        with pytest.raises(InputError):
            small_protocol(trials=0)

    def test_json_round_trip(self):
        p = small_protocol(trials=10)
        assert Protocol.from_json(json.loads(json.dumps(p.to_json()))) == p


class TestPress:
    def test_requires_released_gripper(self, small_config):
        state = build_gripper(small_config)
        pressed, _ = press(small_config, state, CYLINDER, small_protocol())
        with pytest.raises(InputError, match="released"):
            press(small_config, pressed, CYLINDER, small_protocol())

    def test_flat_surface_zero_force_at_zero_depth(self, small_config):
        state = build_gripper(small_config)
        _, trace = press(small_config, state, FLAT, small_protocol())
        assert trace.samples[0].phase == "press"
        assert trace.samples[0].displacement_mm == 0.0
        assert trace.samples[0].force_N == 0.0

    def test_force_nondecreasing_with_depth(self, small_config):
        state = build_gripper(small_config)
        _, trace = press(small_config, state, CYLINDER, small_protocol())
        forces = trace.forces("press")
        assert all(b >= a for a, b in zip(forces, forces[1:]))

    def test_pressure_a_ordering_and_onset_shift(self, small_config):
        traces = {}
        onsets = {}
        for pA in (10.0, 20.0, 50.0):
            state = build_gripper(small_config)
            _, tr = press(small_config, state, CYLINDER,
                          small_protocol(pressure_A=pA, press_depth=16.0))
            traces[pA] = tr.forces("press")
            found = [o for o in tr.metadata["contact_onsets_mm"] if o is not None]
            onsets[pA] = min(found)
        for i in range(len(traces[50.0])):
            assert traces[10.0][i] <= traces[20.0][i] <= traces[50.0][i]
        assert onsets[10.0] >= onsets[20.0] >= onsets[50.0]

    def test_rerun_identical(self, small_config):
        t1 = press(small_config, build_gripper(small_config), CYLINDER,
                   small_protocol())[1]
        t2 = press(small_config, build_gripper(small_config), CYLINDER,
                   small_protocol())[1]
        assert t1.to_csv_text() == t2.to_csv_text()

    def test_shape_conformity(self, small_config):
        _, trace = press(small_config, build_gripper(small_config), CYLINDER,
                         small_protocol())
        n = small_config.n_chains
        assert trace.metadata["chains_in_contact"] >= -(-n // 2)


class TestJamAndLift:
    def test_pressure_b_monotone_max_force(self, small_config):
        maxima = {}
        for pB in (100.0, 200.0):
            proto = small_protocol(pressure_B=pB)
            state, _ = press(small_config, build_gripper(small_config),
                             CYLINDER, proto)
            trace = jam_and_lift(small_config, state, CYLINDER, proto)
            maxima[pB] = max_holding_force(trace)
        assert maxima[200.0] >= maxima[100.0]
        assert maxima[200.0] > 0.0

    def test_zero_tension_near_zero_force(self, small_config):
        proto = small_protocol(pressure_B=0.0)
        state, _ = press(small_config, build_gripper(small_config),
                         CYLINDER, proto)
        trace = jam_and_lift(small_config, state, CYLINDER, proto)
        assert trace.metadata["tension_N"] == 0.0
        assert abs(max_holding_force(trace)) < 1e-9

    def test_phases_and_determinism(self, small_config):
        proto = small_protocol()
        runs = []
        for _ in range(2):
            state, ptrace = press(small_config, build_gripper(small_config),
                                  CYLINDER, proto)
            ltrace = jam_and_lift(small_config, state, CYLINDER, proto)
            runs.append(ptrace.to_csv_text() + ltrace.to_csv_text())
        assert runs[0] == runs[1]

    def test_escape_gives_zero_tail_and_flag(self, small_config):
        proto = small_protocol(lift_distance=30.0)
        state, _ = press(small_config, build_gripper(small_config),
                         CYLINDER, proto)
        trace = jam_and_lift(small_config, state, CYLINDER, proto)
        assert trace.metadata["escaped"] is True
        lift = trace.phase_samples("lift")
        assert lift[-1].force_N == 0.0


class TestMaxHoldingForce:
    def test_monotone_decreasing_gives_first(self):
        trace = GraspTrace(samples=tuple(
            TraceSample(float(i), 10.0 - i, "lift") for i in range(5)))
        assert max_holding_force(trace) == 10.0

    def test_all_zero(self):
        trace = GraspTrace(samples=tuple(
            TraceSample(float(i), 0.0, "lift") for i in range(5)))
        assert max_holding_force(trace) == 0.0

    def test_synthetic_peak(self):
        samples = [TraceSample(float(d), 12.5 if d == 30 else 1.0, "lift")
                   for d in range(0, 61, 10)]
        assert max_holding_force(GraspTrace(samples=tuple(samples))) == 12.5

    def test_no_lift_phase_is_error(self):
        trace = GraspTrace(samples=(TraceSample(0.0, 1.0, "press"),))
        with pytest.raises(InputError, match="lift"):
            max_holding_force(trace)


class TestCompareToBaseline:
    def test_bundled_grasp_ratio(self):
        trace = read_trace_csv(os.path.join(DATA_DIR, "torus_grasp_fixture.csv"))
        base = read_trace_csv(os.path.join(DATA_DIR, "baseline_membrane_grasp.csv"))
        report = compare_to_baseline(trace, base)
        assert isinstance(report, ComparisonReport)
        assert report.max_force_ratio == pytest.approx(1.4, abs=1e-12)
        assert report.crossover_mm is None

    def test_bundled_press_crossover(self):
        trace = read_trace_csv(os.path.join(DATA_DIR, "torus_press_fixture.csv"))
        base = read_trace_csv(os.path.join(DATA_DIR, "baseline_membrane_press.csv"))
        report = compare_to_baseline(trace, base)
        assert report.crossover_mm == 25.0

    def test_identical_traces(self):
        base = read_trace_csv(os.path.join(DATA_DIR, "baseline_membrane_press.csv"))
        report = compare_to_baseline(base, base)
        assert report.max_force_ratio == 1.0
        assert report.crossover_mm is None

    def test_disjoint_ranges_error(self):
        a = GraspTrace(samples=(TraceSample(0.0, 1.0, "press"),
                                TraceSample(5.0, 1.0, "press")))
        b = GraspTrace(samples=(TraceSample(10.0, 1.0, "press"),
                                TraceSample(15.0, 1.0, "press")))
        with pytest.raises(InputError, match="disjoint"):
            compare_to_baseline(a, b)


class TestRunProtocol:
    def test_summary_fields(self, small_config):
        trace, summary = run_protocol(small_config, CYLINDER, small_protocol())
        assert {"scenario_hash", "tension_N", "max_holding_force_N",
                "escaped", "phases"} <= set(summary)
        phases = [s.phase for s in trace.samples]
        assert phases.index("jam") > phases.index("press")
        assert phases.index("lift") > phases.index("jam")

    def test_trials_collapse_without_seed(self, small_config):
        _, s1 = run_protocol(small_config, CYLINDER, small_protocol(trials=10))
        _, s2 = run_protocol(small_config, CYLINDER, small_protocol(trials=10))
        assert "trials" not in s1
        assert s1 == s2

    def test_noise_hook_with_seed(self, small_config):
        trace_base, _ = run_protocol(small_config, CYLINDER,
                                     small_protocol(trials=5))
        trace, summary = run_protocol(small_config, CYLINDER,
                                      small_protocol(trials=5), seed=42)
        assert summary["trials"]["count"] == 5
        assert len(summary["trials"]["max_forces_N"]) == 5
        assert summary["trials"]["std_max_N"] > 0
        # the published trace stays the deterministic base run
        assert trace.to_csv_text() == trace_base.to_csv_text()
        _, summary2 = run_protocol(small_config, CYLINDER,
                                   small_protocol(trials=5), seed=42)
        assert summary == summary2
