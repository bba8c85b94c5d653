"""Single bead chain: kinematics, tension moments, friction jamming capacity.

A chain of n beads has n-1 joints.  Joint j changes the heading between
segment j (bead j -> bead j+1) and segment j+1, so its pivot sits at the
center of bead j+1 and rotating it swings beads j+2..n-1 rigidly about
that point.  The first `rigid_root_units` joints are fused straight.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from .beads import (
    BeadSpec,
    joint_angle_range,
    require_valid,
    wire_path_length_slope,
)
from .errors import InputError, JointLimitError

_ANGLE_EPS = 1e-9  # deg slack on joint range checks


@dataclass(frozen=True)
class ChainSpec:
    """Geometry and friction parameters of one bead chain.

    mu is the bead-interface Coulomb friction coefficient and
    contact_half_angle (deg) the half-angle of the annular contact band;
    together they set the jamming capacity per unit tension.  Neither is
    a measured quantity, so both are plain inputs.
    """

    bead: BeadSpec
    n_units: int
    unit_pitch: float | None = None  # mm center-to-center; default D1 (touching)
    rigid_root_units: int = 0
    planar: bool = True  # one-plane constrained: angles in [0, limit]
    mu: float = 0.3
    contact_half_angle: float = 45.0

    def __post_init__(self):
        if isinstance(self.bead, dict):
            object.__setattr__(self, "bead", BeadSpec.from_json(self.bead))
        require_valid(self.bead)
        if self.n_units < 2:
            raise InputError(f"n_units must be >= 2, got {self.n_units}")
        pitch = self.bead.D1 if self.unit_pitch is None else float(self.unit_pitch)
        object.__setattr__(self, "unit_pitch", pitch)
        if pitch <= 0 or not math.isfinite(pitch):
            raise InputError(f"unit_pitch must be positive, got {pitch}")
        if pitch > self.bead.D1:
            warnings.warn(
                f"unit_pitch {pitch} mm exceeds bead diameter {self.bead.D1} mm; "
                f"beads would not touch", stacklevel=2)
        if not 0 <= self.rigid_root_units < self.n_units:
            raise InputError(
                f"rigid_root_units must lie in [0, n_units), got "
                f"{self.rigid_root_units}")
        if not self.mu > 0:
            raise InputError(f"mu must be > 0, got {self.mu}")
        if not 0 < self.contact_half_angle <= 90:
            raise InputError(
                f"contact_half_angle must lie in (0, 90], got "
                f"{self.contact_half_angle}")

    @property
    def n_joints(self) -> int:
        return self.n_units - 1

    def free_joints(self) -> range:
        return range(self.rigid_root_units, self.n_joints)

    def angle_range(self) -> tuple[float, float]:
        return joint_angle_range(self.bead, self.planar)

    def to_json(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["bead"] = self.bead.to_json()
        return d

    @classmethod
    def from_json(cls, data: dict) -> "ChainSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown ChainSpec fields: {sorted(unknown)}")
        if "bead" not in data or "n_units" not in data:
            raise InputError("ChainSpec requires 'bead' and 'n_units'")
        return cls(**data)


class JointStatus(str, Enum):
    STUCK = "Stuck"
    SLIPPING = "Slipping"
    AT_LIMIT = "AtLimit"


@dataclass(frozen=True)
class ChainState:
    """Joint angles (deg), wire tension (N) and per-joint stick/slip status."""

    angles: tuple[float, ...]
    tension: float
    joint_status: tuple[JointStatus, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if not self.joint_status:
            object.__setattr__(
                self, "joint_status",
                tuple(JointStatus.STUCK for _ in self.angles))
        else:
            object.__setattr__(
                self, "joint_status",
                tuple(JointStatus(s) for s in self.joint_status))
        if len(self.joint_status) != len(self.angles):
            raise InputError("joint_status length must match angles length")
        if not (math.isfinite(self.tension) and self.tension >= 0):
            raise InputError(f"tension must be >= 0, got {self.tension}")

    def to_json(self) -> dict:
        return {
            "angles": list(self.angles),
            "tension": self.tension,
            "joint_status": [s.value for s in self.joint_status],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ChainState":
        known = {"angles", "tension", "joint_status"}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown ChainState fields: {sorted(unknown)}")
        return cls(
            angles=tuple(data["angles"]),
            tension=float(data["tension"]),
            joint_status=tuple(data.get("joint_status", ())),
        )


def straight_state(spec: ChainSpec, tension: float = 0.0) -> ChainState:
    return ChainState(angles=(0.0,) * spec.n_joints, tension=tension)


def validate_state(spec: ChainSpec, state: ChainState) -> None:
    """Raise unless the state satisfies the chain invariants."""
    if len(state.angles) != spec.n_joints:
        raise InputError(
            f"expected {spec.n_joints} joint angles, got {len(state.angles)}")
    lo, hi = spec.angle_range()
    for j, a in enumerate(state.angles):
        if j < spec.rigid_root_units and a != 0.0:
            raise InputError(f"joint {j} is fused in the rigid root, angle must be 0")
        if not (lo - _ANGLE_EPS <= a <= hi + _ANGLE_EPS):
            raise JointLimitError(
                f"joint {j} angle {a} deg outside [{lo}, {hi}] deg")


@dataclass(frozen=True)
class Frame:
    """Bead center position (mm) and outgoing unit heading."""

    position: tuple[float, float]
    heading: tuple[float, float]

    def __post_init__(self):
        nrm = math.hypot(*self.heading)
        if abs(nrm - 1.0) > 1e-12:
            raise InputError(f"heading must be unit length, |h| = {nrm}")


def chain_positions(
    spec: ChainSpec,
    angles,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Bead centers (n,2) and per-bead outgoing headings (n,2).

    Positions only: no joint-range checking here (solver internals probe
    candidate angles).
    """
    angles = np.asarray(angles, dtype=float)
    n = spec.n_units
    theta0 = math.atan2(base_heading[1], base_heading[0])
    # heading of segment i (bead i -> bead i+1) accumulates joints 0..i-1
    cum = np.concatenate(([0.0], np.cumsum(np.radians(angles))))
    head_angles = theta0 + cum  # length n: entry n-1 is the tip orientation
    headings = np.stack([np.cos(head_angles), np.sin(head_angles)], axis=1)
    steps = spec.unit_pitch * headings[:-1]
    positions = np.empty((n, 2))
    positions[0] = base_position
    positions[1:] = np.asarray(base_position) + np.cumsum(steps, axis=0)
    return positions, headings


def forward_kinematics(
    spec: ChainSpec,
    angles,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
) -> list[Frame]:
    """One frame per bead; consecutive centers one pitch apart."""
    state = ChainState(angles=tuple(angles), tension=0.0)
    validate_state(spec, state)
    pos, head = chain_positions(spec, angles, base_position, base_heading)
    # renormalize against accumulated rounding so Frame's unit check holds
    head = head / np.linalg.norm(head, axis=1, keepdims=True)
    return [
        Frame(position=(float(p[0]), float(p[1])),
              heading=(float(h[0]), float(h[1])))
        for p, h in zip(pos, head)
    ]


def restoring_moment(spec: ChainSpec, joint_angle_deg: float, tension: float) -> float:
    """Moment (N*mm) the tensioned wire exerts on a deflected joint.

    Sign opposes the deflection.  Cup-shaped beads give exactly zero at
    any posture; sphere beads give -T * dL/dtheta from the chord-detour
    path length.
    """
    if tension < 0:
        raise InputError(f"tension must be >= 0, got {tension}")
    lim = spec.bead.effective_angle
    if abs(joint_angle_deg) > lim + _ANGLE_EPS:
        raise JointLimitError(
            f"joint angle {joint_angle_deg} deg exceeds limit {lim} deg")
    return -tension * wire_path_length_slope(spec.bead, joint_angle_deg)


def friction_capacity(spec: ChainSpec, tension: float) -> float:
    """Per-joint holding moment (N*mm): mu * T * R1 * sin(contact half-angle).

    Coulomb friction over the annular contact band pressed by the wire;
    linear in tension, zero at zero tension.
    """
    if tension < 0:
        raise InputError(f"tension must be >= 0, got {tension}")
    r_c = spec.bead.R1 * math.sin(math.radians(spec.contact_half_angle))
    return spec.mu * tension * r_c


def joint_response(load_moment: float, capacity: float, restoring: float) -> JointStatus:
    """Stick/slip classification of one joint.

    `restoring` is the balance moment supplied by the wire at the current
    angle (the load it can cancel); the joint holds while the applied
    moment stays within +-capacity of it.  The boundary counts as stuck,
    so a zero-tension zero-load chain is well-defined.
    """
    if capacity < 0:
        raise InputError(f"capacity must be >= 0, got {capacity}")
    return (JointStatus.STUCK
            if abs(load_moment - restoring) <= capacity
            else JointStatus.SLIPPING)


def chain_spec_from_file(path) -> ChainSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read chain spec {path}: {exc}") from exc
    return ChainSpec.from_json(data)
