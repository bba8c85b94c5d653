"""Parametric cup-shaped bead: constraint validation and wire path length.

A bead chain is stiffened by pulling the wire threaded through the bead
bores.  Whether pulling also generates a straightening moment depends on
the mating geometry: a plain sphere-on-sphere interface consumes extra
wire when the joint bends, while the cup-shaped (concave-convex) interface
keeps the wire path length constant at any posture.  All lengths are in
millimeters, interface angles in degrees (radians internally).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, fields
from enum import Enum

from .errors import InputError, JointLimitError


class Variant(str, Enum):
    """Bead-to-bead contact geometry."""

    SIMPLE_SPHERE = "SimpleSphere"
    CUP_SHAPED = "CupShaped"


@dataclass(frozen=True)
class BeadSpec:
    """Five-parameter bead geometry plus wire and clearance dimensions.

    D1/R1: bead outer diameter/radius; R2: front convex radius; R3: rear
    concave (cup) radius; r1: bore inner-surface curvature radius; r2:
    minimum allowed wire bending radius; SD1: rear hole diameter; SD2:
    wire diameter; e: clearance margin for smooth motion.
    """

    D1: float
    R1: float
    R2: float
    R3: float
    r1: float
    r2: float
    SD1: float
    SD2: float
    e: float
    effective_angle: float  # max joint deflection magnitude per interface, deg
    variant: Variant = Variant.CUP_SHAPED

    def __post_init__(self):
        for f in fields(self):
            if f.name == "variant":
                object.__setattr__(self, "variant", Variant(self.variant))
                continue
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InputError(f"BeadSpec.{f.name} must be finite, got {v!r}")
            object.__setattr__(self, f.name, float(v))

    def to_json(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["variant"] = self.variant.value
        return d

    @classmethod
    def from_json(cls, data: dict) -> "BeadSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown BeadSpec fields: {sorted(unknown)}")
        missing = known - set(data)
        if missing - {"variant"}:
            raise InputError(f"missing BeadSpec fields: {sorted(missing)}")
        return cls(**data)


@dataclass(frozen=True)
class Violation:
    constraint_id: str
    message: str
    measured: float
    required: float


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]

    def ids(self) -> list[str]:
        return [v.constraint_id for v in self.violations]


_LENGTH_FIELDS = ("D1", "R1", "R2", "R3", "r1", "r2", "SD1", "SD2", "e")

# Below this angle the rear-hole clearance cannot geometrically supply the
# declared deflection; informational only, since the effective angle is an
# independent design input.
def _clearance_angle_deg(spec: BeadSpec) -> float:
    return math.degrees(2.0 * math.atan2(spec.SD1 - spec.SD2, spec.D1))


def validate_bead_spec(spec: BeadSpec) -> ValidationReport:
    """Check the geometric constraints; returns every violated constraint.

    Constraint ids: POSITIVITY (all lengths > 0), ANGLE_RANGE (effective
    angle in (0, 90) deg), EQ1 (R2 = R3 = R1 = D1/2), EQ2 (r1 > r2),
    EQ3 (SD1 > SD2 + e).  Total on finite inputs and idempotent.
    """
    violations: list[Violation] = []
    for name in _LENGTH_FIELDS:
        v = getattr(spec, name)
        if v <= 0.0:
            violations.append(Violation(
                "POSITIVITY", f"{name} must be > 0", v, 0.0))
    if not (0.0 < spec.effective_angle < 90.0):
        violations.append(Violation(
            "ANGLE_RANGE", "effective_angle must lie in (0, 90) deg",
            spec.effective_angle, 90.0))

    half = spec.D1 / 2.0
    tol = 1e-9 * max(1.0, abs(spec.D1))
    for name, v in (("R1", spec.R1), ("R2", spec.R2), ("R3", spec.R3)):
        if abs(v - half) > tol:
            violations.append(Violation(
                "EQ1", f"{name} must equal D1/2 = {half}", v, half))
    if not spec.r1 > spec.r2:
        violations.append(Violation(
            "EQ2", "bore curvature radius r1 must exceed wire bend radius r2",
            spec.r1, spec.r2))
    if not spec.SD1 > spec.SD2 + spec.e:
        violations.append(Violation(
            "EQ3", "rear hole SD1 must exceed wire SD2 plus clearance e",
            spec.SD1, spec.SD2 + spec.e))

    if not violations and _clearance_angle_deg(spec) < spec.effective_angle:
        warnings.warn(
            f"effective_angle {spec.effective_angle} deg exceeds the "
            f"clearance-implied angle {_clearance_angle_deg(spec):.2f} deg",
            stacklevel=2)
    return ValidationReport(valid=not violations, violations=tuple(violations))


def require_valid(spec: BeadSpec) -> None:
    report = validate_bead_spec(spec)
    if not report.valid:
        raise InputError("invalid bead spec: " + ", ".join(report.ids()))


def joint_limit(spec: BeadSpec) -> float:
    """Maximum joint deflection magnitude per interface, degrees."""
    require_valid(spec)
    return spec.effective_angle


def joint_angle_range(spec: BeadSpec, one_plane_constrained: bool) -> tuple[float, float]:
    """Admissible joint angle interval in degrees.

    One-plane constrained chains bend in a single direction, [0, limit];
    unconstrained chains bend both ways, [-limit, +limit].
    """
    lim = joint_limit(spec)
    return (0.0, lim) if one_plane_constrained else (-lim, lim)


def wire_path_length(spec: BeadSpec, joint_angle_deg: float) -> float:
    """Wire length consumed across one bead-to-bead interface, mm.

    The zero-deflection reference is one bead diameter (center to center,
    beads touching).  CupShaped interfaces keep the wire centered, so the
    length is independent of posture.  SimpleSphere interfaces force a
    chord detour: the wire kinks by the joint angle midway between centers
    held one diameter apart, giving L(0) + 2*R1*(sec(theta/2) - 1).
    """
    require_valid(spec)
    if abs(joint_angle_deg) > spec.effective_angle + 1e-12:
        raise JointLimitError(
            f"joint angle {joint_angle_deg} deg exceeds limit "
            f"{spec.effective_angle} deg")
    base = spec.D1
    if spec.variant is Variant.CUP_SHAPED:
        return base
    half = 0.5 * math.radians(joint_angle_deg)
    return base + 2.0 * spec.R1 * (1.0 / math.cos(half) - 1.0)


def wire_path_length_slope(spec: BeadSpec, joint_angle_deg: float) -> float:
    """d(path length)/d(angle) in mm per radian, signed with the angle."""
    require_valid(spec)
    if spec.variant is Variant.CUP_SHAPED:
        return 0.0
    half = 0.5 * math.radians(joint_angle_deg)
    return spec.R1 * math.tan(half) / math.cos(half)


def bead_spec_from_file(path) -> BeadSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read bead spec {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"bead spec {path} must be a JSON object")
    return BeadSpec.from_json(data)
