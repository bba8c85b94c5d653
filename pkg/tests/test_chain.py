import json
import math

import numpy as np
import pytest

from jamcord.beads import Variant
from jamcord.chain import (
    ChainSpec,
    ChainState,
    JointStatus,
    chain_positions,
    forward_kinematics,
    friction_capacity,
    joint_response,
    restoring_moment,
    straight_state,
    validate_state,
)
from jamcord.beads import wire_path_length
from jamcord.errors import InputError, JointLimitError

from conftest import make_bead


def make_chain(n_units=30, variant=Variant.CUP_SHAPED, effective_angle=15.0,
               rigid_root_units=0, planar=True, mu=0.3, pitch=None, **bead_kw):
    bead = make_bead(variant=variant, effective_angle=effective_angle, **bead_kw)
    return ChainSpec(bead=bead, n_units=n_units, unit_pitch=pitch,
                     rigid_root_units=rigid_root_units, planar=planar, mu=mu)


class TestForwardKinematics:
    def test_straight_chain_span(self):
        spec = make_chain(n_units=30, pitch=6.0)
        frames = forward_kinematics(spec, [0.0] * 29)
        assert len(frames) == 30
        tip = np.array(frames[-1].position)
        assert tip == pytest.approx([174.0, 0.0])

    def test_right_angle_geometry(self):
        # geometry core; the contract-level op enforces bead joint limits
        spec = make_chain(n_units=3, pitch=10.0, D1=10.0)
        pos, _ = chain_positions(spec, [90.0, 0.0])
        assert pos[-1] == pytest.approx([10.0, 10.0])

    def test_discretized_arc_matches_polyline_sum(self):
        # independent closed form: tip = sum of unit steps rotated by k*theta
        theta = 12.0
        spec = make_chain(n_units=4, pitch=1.0, effective_angle=15.0)
        frames = forward_kinematics(spec, [theta, theta, theta])
        tip = np.array(frames[-1].position)
        expected = sum(
            np.array([math.cos(math.radians(k * theta)),
                      math.sin(math.radians(k * theta))])
            for k in range(3))
        assert tip == pytest.approx(expected, abs=1e-12)

    def test_consecutive_spacing_is_pitch(self, rng):
        spec = make_chain(n_units=8, pitch=6.0)
        angles = rng.uniform(0.0, 15.0, size=7)
        frames = forward_kinematics(spec, angles)
        pos = np.array([f.position for f in frames])
        gaps = np.linalg.norm(np.diff(pos, axis=0), axis=1)
        assert gaps == pytest.approx(np.full(7, 6.0))

    def test_total_length_invariant(self, rng):
        spec = make_chain(n_units=12, pitch=6.0)
        for _ in range(10):
            angles = rng.uniform(0.0, 15.0, size=11)
            pos, _ = chain_positions(spec, angles)
            total = float(np.sum(np.linalg.norm(np.diff(pos, axis=0), axis=1)))
            assert total == pytest.approx(11 * 6.0)

    def test_out_of_limit_rejected(self):
        spec = make_chain(n_units=3, effective_angle=15.0)
        with pytest.raises(JointLimitError):
            forward_kinematics(spec, [16.0, 0.0])

    def test_planar_range_is_one_sided(self):
        spec = make_chain(n_units=3, planar=True)
        with pytest.raises(JointLimitError):
            forward_kinematics(spec, [-1.0, 0.0])
        spec2 = make_chain(n_units=3, planar=False)
        frames = forward_kinematics(spec2, [-10.0, 5.0])
        assert frames[-1].position[1] < 0

    def test_heading_is_unit(self, rng):
        spec = make_chain(n_units=6)
        angles = rng.uniform(0.0, 15.0, size=5)
        for f in forward_kinematics(spec, angles):
            assert math.hypot(*f.heading) == pytest.approx(1.0, abs=1e-12)


class TestRestoringMoment:
    def test_cup_is_zero_at_any_posture(self):
        spec = make_chain(variant=Variant.CUP_SHAPED, effective_angle=30.0)
        for theta in (0.0, 10.0, 30.0):
            assert restoring_moment(spec, theta, 41.0) == 0.0

    def test_sphere_zero_at_zero(self):
        spec = make_chain(variant=Variant.SIMPLE_SPHERE)
        assert restoring_moment(spec, 0.0, 37.0) == 0.0

    def test_sphere_value_at_30deg(self):
        # frozen: 41 * 3 * tan(15 deg) * sec(15 deg) = 34.1204 N*mm
        spec = make_chain(variant=Variant.SIMPLE_SPHERE, effective_angle=30.0)
        m = restoring_moment(spec, 30.0, 41.0)
        assert m < 0  # opposes positive deflection
        assert abs(m) == pytest.approx(34.1204, abs=1e-3)

    def test_matches_finite_difference_of_path_length(self):
        spec = make_chain(variant=Variant.SIMPLE_SPHERE, effective_angle=40.0)
        T = 41.0
        for theta in (5.0, 15.0, 30.0, 39.0):
            h = 1e-4
            fd = ((wire_path_length(spec.bead, theta + h)
                   - wire_path_length(spec.bead, theta - h))
                  / math.radians(2 * h))
            assert restoring_moment(spec, theta, T) == pytest.approx(
                -T * fd, rel=1e-6)

    def test_straightening_force_bound(self):
        # cup chain, T = 41 N, one joint at 30 deg: tip force must stay
        # below the 0.9 N experimental bound (the model gives exactly 0)
        spec = make_chain(n_units=30, variant=Variant.CUP_SHAPED,
                          effective_angle=30.0, pitch=6.0)
        moment = abs(restoring_moment(spec, 30.0, 41.0))
        lever = (spec.n_units - 2) * spec.unit_pitch  # pivot at bead 1
        force = moment / lever
        assert force <= 0.9
        assert force == 0.0


class TestFrictionCapacity:
    def test_zero_tension(self):
        assert friction_capacity(make_chain(), 0.0) == 0.0

    def test_reference_value(self):
        # 0.3 * 37 * 3 * sin(45 deg) = 23.5467 N*mm
        spec = make_chain(mu=0.3)
        assert friction_capacity(spec, 37.0) == pytest.approx(23.5467, abs=1e-3)

    def test_linearity_exact(self):
        spec = make_chain(mu=0.42)
        for T in np.linspace(0.5, 80.0, 10):
            assert friction_capacity(spec, 2 * T) == 2 * friction_capacity(spec, T)


class TestJointResponse:
    def test_below_capacity_sticks(self):
        assert joint_response(10.0, 23.55, 0.0) is JointStatus.STUCK

    def test_above_capacity_slips(self):
        assert joint_response(30.0, 23.55, 0.0) is JointStatus.SLIPPING

    def test_boundary_counts_as_stuck(self):
        assert joint_response(23.55, 23.55, 0.0) is JointStatus.STUCK
        assert joint_response(0.0, 0.0, 0.0) is JointStatus.STUCK

    def test_balance_shifts_threshold(self):
        assert joint_response(30.0, 5.0, 28.0) is JointStatus.STUCK
        assert joint_response(30.0, 5.0, 20.0) is JointStatus.SLIPPING


class TestStateAndSpec:
    def test_rigid_root_angles_must_be_zero(self):
        spec = make_chain(n_units=6, rigid_root_units=2)
        with pytest.raises(InputError):
            validate_state(spec, ChainState(angles=(1.0, 0, 0, 0, 0), tension=0))
        validate_state(spec, ChainState(angles=(0, 0, 3.0, 0, 0), tension=0))

    def test_negative_tension_rejected(self):
        with pytest.raises(InputError):
            ChainState(angles=(0.0,), tension=-1.0)

    def test_pitch_warning_when_beads_separate(self):
        with pytest.warns(UserWarning, match="would not touch"):
            make_chain(n_units=4, pitch=7.0)

    def test_default_pitch_is_bead_diameter(self):
        spec = make_chain(n_units=4)
        assert spec.unit_pitch == spec.bead.D1

    def test_bad_counts_rejected(self):
        with pytest.raises(InputError):
            make_chain(n_units=1)
        with pytest.raises(InputError):
            make_chain(n_units=4, rigid_root_units=4)
        with pytest.raises(InputError):
            make_chain(mu=0.0)

    def test_json_round_trip_degrees(self):
        spec = make_chain(n_units=5, rigid_root_units=1)
        spec2 = ChainSpec.from_json(json.loads(json.dumps(spec.to_json())))
        assert spec2 == spec
        state = ChainState(angles=(0.0, 2.5, 7.0, 1.0), tension=37.0)
        state2 = ChainState.from_json(json.loads(json.dumps(state.to_json())))
        assert state2 == state
        assert state.to_json()["angles"] == [0.0, 2.5, 7.0, 1.0]  # degrees

    def test_unknown_field_rejected(self):
        data = make_chain().to_json()
        data["bogus"] = 1
        with pytest.raises(InputError, match="unknown"):
            ChainSpec.from_json(data)

    def test_straight_state(self):
        spec = make_chain(n_units=5)
        st = straight_state(spec, 12.0)
        assert st.angles == (0.0,) * 4
        assert st.tension == 12.0
        assert all(s is JointStatus.STUCK for s in st.joint_status)
