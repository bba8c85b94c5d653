import json
import math

import numpy as np
import pytest

from jamcord.beads import (
    BeadSpec,
    Variant,
    joint_angle_range,
    joint_limit,
    validate_bead_spec,
    wire_path_length,
    wire_path_length_slope,
)
from jamcord.errors import InputError, JointLimitError

from conftest import make_bead, random_valid_bead


def detour_length_numeric(R1: float, angle_deg: float, n_seg: int = 20000) -> float:
    """Independent oracle: integrate the kinked wire path between bead
    centers held one diameter apart, the wire breaking by the joint angle
    at the interface apex.  Returns the extra length over the straight run.
    """
    theta = math.radians(angle_deg)
    a = np.array([0.0, 0.0])
    b = np.array([2.0 * R1, 0.0])
    apex = np.array([R1, R1 * math.tan(theta / 2.0)])
    t = np.linspace(0.0, 1.0, n_seg)[:, None]
    leg1 = a + (apex - a) * t
    leg2 = apex + (b - apex) * t
    path = np.vstack([leg1, leg2])
    length = float(np.sum(np.linalg.norm(np.diff(path, axis=0), axis=1)))
    return length - 2.0 * R1


class TestValidation:
    def test_reference_spec_is_valid(self):
        spec = BeadSpec(D1=6, R1=3, R2=3, R3=3, r1=2.0, r2=1.5,
                        SD1=1.2, SD2=0.8, e=0.2, effective_angle=15.0,
                        variant=Variant.CUP_SHAPED)
        with pytest.warns(UserWarning):  # clearance angle below effective angle
            report = validate_bead_spec(spec)
        assert report.valid
        assert report.violations == ()

    def test_eq1_violation(self):
        spec = make_bead(R2=2.5)
        report = validate_bead_spec(spec)
        assert not report.valid
        assert report.ids() == ["EQ1"]

    def test_eq3_boundary_is_violation(self):
        # SD1 = SD2 + e exactly: 1.0 is not > 1.0
        spec = make_bead(SD1=1.0, SD2=0.8, e=0.2)
        report = validate_bead_spec(spec)
        assert report.ids() == ["EQ3"]

    @pytest.mark.parametrize("overrides,expected", [
        ({"R2": 2.5}, "EQ1"),
        ({"R3": 3.5}, "EQ1"),
        ({"r1": 1.4}, "EQ2"),
        ({"SD1": 1.4}, "EQ3"),  # equals SD2 + e
        ({"e": -0.1}, "POSITIVITY"),
        ({"effective_angle": 95.0}, "ANGLE_RANGE"),
    ])
    def test_single_constraint_perturbations(self, overrides, expected):
        report = validate_bead_spec(make_bead(**overrides))
        assert report.ids() == [expected]

    def test_zero_angle_rejected(self):
        report = validate_bead_spec(make_bead(effective_angle=0.0))
        assert report.ids() == ["ANGLE_RANGE"]

    def test_non_finite_field_rejected(self):
        with pytest.raises(InputError):
            make_bead(D1=float("nan"))
        with pytest.raises(InputError):
            make_bead(r1=float("inf"))

    def test_validation_idempotent(self):
        spec = make_bead(R2=2.5)
        first = validate_bead_spec(spec)
        second = validate_bead_spec(spec)
        assert first == second

    def test_clearance_warning(self):
        # 2*atan((SD1-SD2)/D1) = 7.63 deg < effective angle 15 deg
        spec = make_bead(SD1=1.2, SD2=0.8, e=0.2)
        with pytest.warns(UserWarning, match="clearance-implied"):
            validate_bead_spec(spec)


class TestWirePathLength:
    def test_cup_is_posture_independent(self):
        spec = make_bead(variant=Variant.CUP_SHAPED, effective_angle=30.0)
        assert wire_path_length(spec, 30.0) - wire_path_length(spec, 0.0) == 0.0

    def test_sphere_zero_deflection_baseline(self):
        spec = make_bead(variant=Variant.SIMPLE_SPHERE)
        assert wire_path_length(spec, 0.0) == spec.D1

    def test_sphere_detour_matches_numeric_oracle(self):
        # frozen from detour_length_numeric(3.0, 30.0): 0.21165708...
        spec = make_bead(variant=Variant.SIMPLE_SPHERE, effective_angle=30.0)
        delta = wire_path_length(spec, 30.0) - wire_path_length(spec, 0.0)
        assert delta == pytest.approx(0.2116570825, abs=1e-9)
        assert delta == pytest.approx(detour_length_numeric(3.0, 30.0), rel=1e-6)

    def test_sphere_even_and_increasing(self, rng):
        for _ in range(20):
            spec = random_valid_bead(rng, variant=Variant.SIMPLE_SPHERE)
            lim = spec.effective_angle
            angles = np.linspace(0.0, lim, 25)
            lengths = [wire_path_length(spec, a) for a in angles]
            assert all(b > a for a, b in zip(lengths, lengths[1:]))
            for a in angles:
                assert wire_path_length(spec, -a) == wire_path_length(spec, a)

    def test_cup_invariance_random(self, rng):
        for _ in range(25):
            spec = random_valid_bead(rng, variant=Variant.CUP_SHAPED)
            lim = spec.effective_angle
            thetas = rng.uniform(-lim, lim, size=10)
            base = wire_path_length(spec, 0.0)
            for t in thetas:
                assert abs(wire_path_length(spec, float(t)) - base) < 1e-9

    def test_joint_limit_error(self):
        spec = make_bead(effective_angle=15.0)
        with pytest.raises(JointLimitError):
            wire_path_length(spec, 15.5)

    def test_slope_matches_finite_difference(self):
        spec = make_bead(variant=Variant.SIMPLE_SPHERE, effective_angle=40.0)
        for theta in (-30.0, -5.0, 10.0, 35.0):
            h = 1e-5  # deg
            fd = ((wire_path_length(spec, theta + h)
                   - wire_path_length(spec, theta - h))
                  / math.radians(2 * h))
            assert wire_path_length_slope(spec, theta) == pytest.approx(fd, rel=1e-6)


class TestJointLimit:
    def test_returns_effective_angle(self):
        assert joint_limit(make_bead(effective_angle=15.0)) == 15.0

    def test_ranges(self):
        spec = make_bead(effective_angle=15.0)
        assert joint_angle_range(spec, one_plane_constrained=False) == (-15.0, 15.0)
        assert joint_angle_range(spec, one_plane_constrained=True) == (0.0, 15.0)

    def test_invalid_spec_never_reaches_op(self):
        with pytest.raises(InputError):
            joint_limit(make_bead(effective_angle=0.0))


class TestJson:
    def test_round_trip(self):
        spec = make_bead(variant=Variant.SIMPLE_SPHERE)
        again = BeadSpec.from_json(json.loads(json.dumps(spec.to_json())))
        assert again == spec

    def test_unknown_field_rejected(self):
        data = make_bead().to_json()
        data["paint_color"] = "red"
        with pytest.raises(InputError, match="unknown"):
            BeadSpec.from_json(data)

    def test_missing_field_rejected(self):
        data = make_bead().to_json()
        del data["SD1"]
        with pytest.raises(InputError, match="missing"):
            BeadSpec.from_json(data)
