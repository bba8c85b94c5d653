"""Torus gripper assembly: radial chains, hinge springs, pneumatic equalizer.

The equalizer is a dual-port piston: port B pulls the common rod to
tension every chain wire equally and swing the hinges closed; port A
holds a constant extension force that keeps the gripper in its released
shape.  Net piston force is pressure_B*area_B - pressure_A*area_A in
kPa*mm^2 = mN; tension only transmits when the net force pulls.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, fields

from .chain import ChainSpec, ChainState, straight_state
from .errors import ConfigurationError, InputError

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@dataclass(frozen=True)
class HingeSpring:
    stiffness: float  # N*mm per deg, restoring toward the free angle
    free_angle: float  # deg, rest angle with no pneumatic or contact moment

    def to_json(self) -> dict:
        return {"stiffness": self.stiffness, "free_angle": self.free_angle}


@dataclass(frozen=True)
class PneumaticState:
    """Gauge pressures in kPa; port B may be vacuum (negative)."""

    pressure_A: float = 0.0
    pressure_B: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.pressure_A) and self.pressure_A >= 0):
            raise InputError(f"pressure_A must be >= 0 kPa, got {self.pressure_A}")
        if not (math.isfinite(self.pressure_B) and self.pressure_B >= -101.0):
            raise InputError(
                f"pressure_B cannot be below full vacuum (-101 kPa), got "
                f"{self.pressure_B}")


@dataclass(frozen=True)
class GripperConfig:
    n_chains: int
    chain: ChainSpec
    torus_diameter: float  # mm
    overall_length: float  # mm, hinge pivot to chain tip when straight
    stroke: float  # mm, equalizer travel
    hinge_spring: HingeSpring
    piston_area_A: float  # mm^2
    piston_area_B: float  # mm^2
    wire_tension_limit: float = 200.0  # N per chain
    hinge_max_angle: float = 45.0  # deg, closed mechanical stop
    hinge_min_angle: float = 0.0  # deg, open stop
    hinge_lever: float = 20.0  # mm, piston force -> hinge closing moment arm
    press_stiffness: float = 0.5  # N/mm per chain, pre-plateau contact ramp
    extension_slack: float = 12.0  # mm of tip reach lost with port A vented
    extension_full_pressure: float = 50.0  # kPa on port A for full reach

    def __post_init__(self):
        if isinstance(self.chain, dict):
            object.__setattr__(self, "chain", ChainSpec.from_json(self.chain))
        if isinstance(self.hinge_spring, dict):
            object.__setattr__(self, "hinge_spring", HingeSpring(**self.hinge_spring))
        if self.n_chains < 3:
            raise ConfigurationError("n_chains", f"must be >= 3, got {self.n_chains}")
        if not self.torus_diameter > self.chain.bead.D1:
            raise ConfigurationError(
                "torus_diameter",
                f"must exceed the bead diameter {self.chain.bead.D1} mm")
        if not 0 < self.stroke < self.overall_length:
            raise ConfigurationError(
                "stroke", f"must lie in (0, overall_length), got {self.stroke}")
        if not self.hinge_spring.stiffness > 0:
            raise ConfigurationError("hinge_spring.stiffness", "must be > 0")
        if not self.piston_area_A > 0:
            raise ConfigurationError("piston_area_A", "must be > 0")
        if not self.piston_area_B > 0:
            raise ConfigurationError("piston_area_B", "must be > 0")
        if not self.wire_tension_limit > 0:
            raise ConfigurationError("wire_tension_limit", "must be > 0")
        if self.root_offset < 0:
            raise ConfigurationError(
                "overall_length",
                f"shorter than the chain span {self.chain_span} mm")
        if not (self.hinge_min_angle <= self.hinge_spring.free_angle
                <= self.hinge_max_angle):
            raise ConfigurationError(
                "hinge_spring.free_angle",
                f"must lie within the hinge stops "
                f"[{self.hinge_min_angle}, {self.hinge_max_angle}]")
        if not self.hinge_lever > 0:
            raise ConfigurationError("hinge_lever", "must be > 0")
        if not self.press_stiffness > 0:
            raise ConfigurationError("press_stiffness", "must be > 0")
        if self.extension_slack < 0:
            raise ConfigurationError("extension_slack", "must be >= 0")
        if not self.extension_full_pressure > 0:
            raise ConfigurationError("extension_full_pressure", "must be > 0")

    @property
    def chain_span(self) -> float:
        return (self.chain.n_units - 1) * self.chain.unit_pitch

    @property
    def root_offset(self) -> float:
        """Rigid mount length from the hinge pivot to the first bead center."""
        return self.overall_length - self.chain_span

    def to_json(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["chain"] = self.chain.to_json()
        d["hinge_spring"] = self.hinge_spring.to_json()
        return d

    @classmethod
    def from_json(cls, data: dict) -> "GripperConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown GripperConfig fields: {sorted(unknown)}")
        required = {"n_chains", "chain", "torus_diameter", "overall_length",
                    "stroke", "hinge_spring", "piston_area_A", "piston_area_B"}
        missing = required - set(data)
        if missing:
            raise InputError(f"missing GripperConfig fields: {sorted(missing)}")
        return cls(**data)


@dataclass(frozen=True)
class GripperState:
    """Per-chain states, hinge angles (deg) and equalizer position (mm)."""

    chains: tuple[ChainState, ...]
    hinge_angles: tuple[float, ...]
    equalizer_position: float  # mm along the stroke; stroke = fully extended

    def __post_init__(self):
        tensions = {c.tension for c in self.chains}
        if len(tensions) > 1:
            raise InputError(
                f"equalizer property violated: unequal chain tensions {tensions}")

    @property
    def tension(self) -> float:
        return self.chains[0].tension if self.chains else 0.0


def chain_azimuths(config: GripperConfig) -> list[float]:
    """Angular positions of the chains around the torus axis, degrees."""
    return [360.0 * i / config.n_chains for i in range(config.n_chains)]


def build_gripper(config: GripperConfig) -> GripperState:
    """Released gripper: straight untensioned chains at the free hinge angle,
    equalizer fully extended."""
    chains = tuple(straight_state(config.chain, 0.0)
                   for _ in range(config.n_chains))
    hinges = tuple(config.hinge_spring.free_angle
                   for _ in range(config.n_chains))
    return GripperState(chains=chains, hinge_angles=hinges,
                        equalizer_position=config.stroke)


def net_piston_force(config: GripperConfig, pneumatics: PneumaticState) -> float:
    """Signed piston force in N; positive pulls the wires/closes hinges."""
    f_mN = (pneumatics.pressure_B * config.piston_area_B
            - pneumatics.pressure_A * config.piston_area_A)
    return f_mN / 1000.0


def equalizer_tension(config: GripperConfig, pneumatics: PneumaticState) -> float:
    """Wire tension per chain, N; identical for every chain by construction."""
    T = max(0.0, net_piston_force(config, pneumatics)) / config.n_chains
    return min(T, config.wire_tension_limit)


def hinge_closing_moment(config: GripperConfig, pneumatics: PneumaticState) -> float:
    """Closing moment per hinge from the pulled wire, N*mm; zero when the
    net piston force pushes outward (the wire cannot push)."""
    return (config.hinge_lever
            * max(0.0, net_piston_force(config, pneumatics))
            / config.n_chains)


def hinge_state(
    config: GripperConfig,
    pneumatics: PneumaticState,
    external_hinge_moments=None,
) -> tuple[float, ...]:
    """Equilibrium hinge angles (deg) between spring, piston and externals.

    With port B vented the wire is slack and every hinge rests exactly at
    the free angle regardless of port A.
    """
    n = config.n_chains
    if external_hinge_moments is None:
        external_hinge_moments = [0.0] * n
    if len(external_hinge_moments) != n:
        raise InputError(
            f"expected {n} external hinge moments, got "
            f"{len(external_hinge_moments)}")
    m_close = hinge_closing_moment(config, pneumatics)
    k = config.hinge_spring.stiffness
    out = []
    for m_ext in external_hinge_moments:
        angle = config.hinge_spring.free_angle + (m_close + m_ext) / k
        out.append(min(max(angle, config.hinge_min_angle),
                       config.hinge_max_angle))
    return tuple(out)


def extension_deficit(config: GripperConfig, pressure_A: float) -> float:
    """Reach lost to incomplete tip extension at low port-A pressure, mm.

    At and above `extension_full_pressure` the constant-load piston fully
    re-extends the chain tips; below it the hinge-spring preload wins
    proportionally and the gripper is effectively shorter.
    """
    if pressure_A < 0:
        raise InputError("pressure_A must be >= 0")
    frac = min(1.0, pressure_A / config.extension_full_pressure)
    return config.extension_slack * (1.0 - frac)


def release(config: GripperConfig, state: GripperState) -> GripperState:
    """Vent port B: tensions drop, hinges reopen, chains re-straighten."""
    del state  # reset semantics: the released pose is config-determined
    return build_gripper(config)


def equalizer_position(config: GripperConfig, hinge_angles) -> float:
    """Rod position bookkeeping: full stroke when open, retracting in
    proportion to hinge closing."""
    span = config.hinge_max_angle - config.hinge_spring.free_angle
    if span <= 0:
        return config.stroke
    mean_close = sum(
        (a - config.hinge_spring.free_angle) / span for a in hinge_angles
    ) / len(hinge_angles)
    return config.stroke * (1.0 - min(max(mean_close, 0.0), 1.0))


def gripper_config_from_file(path) -> GripperConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read gripper config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"gripper config {path} must be a JSON object")
    return GripperConfig.from_json(data)


def reference_config() -> GripperConfig:
    """The bundled desk-scale prototype configuration (table1.json)."""
    return gripper_config_from_file(os.path.join(DATA_DIR, "table1.json"))
