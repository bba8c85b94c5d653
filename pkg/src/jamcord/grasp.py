"""Press / jam / lift protocols of the torus gripper over a fixed object.

Each chain is resolved in the vertical plane containing it and the torus
axis; the object enters as its local cross-section profile in that plane
(a circle, a wedge, or a flat surface), inflated by one bead radius so
constraints act on bead centers.  Axes per chain: x is radial distance
from the torus axis (axis at x = 0, chain root outward at positive x),
y is height above the table.  Positive joint angles flare the chain
outward, which is the constrained bending direction of the prototype.

Pressing is displacement-driven: the flexible (untensioned) chains
conform to the object by feasibility projection, and the recorded
pressing force follows the constant-load port-A piston (a linear ramp
saturating at pressure_A * area_A).  Lifting is energy-driven: the
recorded pull-out force is the energy the tester must supply per unit
rise: joint friction work of the jammed chains, bead-on-object sliding
friction, and hinge spring/closing potential changes (which can push the
object out and turn the tail of the trace negative).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields

import numpy as np

from .chain import ChainState, chain_positions, friction_capacity
from .errors import InfeasibleError, InputError, SolveError
from .gripper import (
    GripperConfig,
    GripperState,
    PneumaticState,
    build_gripper,
    equalizer_tension,
    extension_deficit,
    hinge_closing_moment,
    hinge_state,
)
from .solver import (
    CircleObstacle,
    ContactConstraint,
    HalfPlaneObstacle,
    WedgeObstacle,
    _interface_lengths,
    min_signed_distance,
    project_to_feasibility,
    relax_to_straight,
)
from .trace import GraspTrace, TraceSample

CONTACT_TOL = 1e-6  # mm: bead counts as touching within this clearance
GRIP_WINDOW = 2.0  # mm: hinge squeeze still presses the object within this gap

FRICTION_BY_MATERIAL = {"polyacetal": 0.20, "acrylic": 0.25}
DEFAULT_OBJECT_FRICTION = 0.20

OBJECT_KINDS = ("cylinder", "triangular_prism", "half_plane")


@dataclass(frozen=True)
class ObjectShape:
    """Grasp target: cylinder, apex-up triangular prism, or flat surface."""

    kind: str
    diameter: float = 0.0  # cylinder, mm
    apex_angle: float = 0.0  # prism, deg
    height: float = 0.0  # prism ridge height / flat surface height, mm
    material: str = ""
    friction: float | None = None

    def __post_init__(self):
        if self.kind not in OBJECT_KINDS:
            raise InputError(f"unknown object kind {self.kind!r}")
        if self.kind == "cylinder":
            if not self.diameter > 0:
                raise InputError("cylinder diameter must be > 0")
        elif self.kind == "triangular_prism":
            if not 0.0 < self.apex_angle < 180.0:
                raise InputError("prism apex angle must lie in (0, 180) deg")
            if self.height == 0.0:
                object.__setattr__(self, "height", 40.0)
            if not self.height > 0:
                raise InputError("prism height must be > 0")
        else:
            if self.height == 0.0:
                object.__setattr__(self, "height", 20.0)
            if not self.height > 0:
                raise InputError("surface height must be > 0")
        if self.friction is None:
            object.__setattr__(
                self, "friction",
                FRICTION_BY_MATERIAL.get(self.material, DEFAULT_OBJECT_FRICTION))

    @property
    def top_height(self) -> float:
        if self.kind == "cylinder":
            return self.diameter
        return self.height

    def obstacles(self, bead_radius: float) -> tuple[ContactConstraint, ...]:
        """Local cross-section profile, inflated for bead centers."""
        r = bead_radius
        if self.kind == "cylinder":
            rad = self.diameter / 2.0
            shape = CircleObstacle(center=(0.0, rad), radius=rad + r)
        elif self.kind == "triangular_prism":
            shape = WedgeObstacle(
                apex=(0.0, self.height), axis=(0.0, -1.0),
                half_angle_deg=self.apex_angle / 2.0, inflation=r)
        else:
            shape = HalfPlaneObstacle(normal=(0.0, 1.0), offset=self.height + r)
        return (ContactConstraint(None, shape),)

    def to_json(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        return d

    @classmethod
    def from_json(cls, data: dict) -> "ObjectShape":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown ObjectShape fields: {sorted(unknown)}")
        if "kind" not in data:
            raise InputError("ObjectShape requires 'kind'")
        return cls(**data)


@dataclass(frozen=True)
class Protocol:
    """Press and lift schedule plus pneumatic set points.

    `speed` is metadata only (the model is quasi-static); `origin_offset`
    records the displacement-origin convention of external comparisons
    and does not affect the simulation.
    """

    press_depth: float
    lift_distance: float
    speed: float = 100.0  # mm/min
    pressure_A: float = 50.0  # kPa
    pressure_B: float = 200.0  # kPa
    trials: int = 1
    sample_step: float = 1.0  # mm
    origin_offset: float = 0.0  # mm

    def __post_init__(self):
        for name in ("press_depth", "lift_distance", "speed", "sample_step"):
            if not getattr(self, name) > 0:
                raise InputError(f"Protocol.{name} must be positive")
        if self.trials < 1:
            raise InputError("Protocol.trials must be >= 1")
        if self.pressure_A < 0:
            raise InputError("Protocol.pressure_A must be >= 0 kPa")

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json(cls, data: dict) -> "Protocol":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown Protocol fields: {sorted(unknown)}")
        return cls(**data)


# -------------------------
# Scene geometry
# -------------------------

def scene_obstacles(config: GripperConfig, obj: ObjectShape):
    """Object profile plus the table and the torus-axis mirror wall."""
    r = config.chain.bead.R1
    table = ContactConstraint(None, HalfPlaneObstacle((0.0, 1.0), r))
    axis_wall = ContactConstraint(None, HalfPlaneObstacle((1.0, 0.0), 0.0))
    return obj.obstacles(r) + (table, axis_wall)


def gripper_reach(config: GripperConfig) -> float:
    """Vertical drop from hinge pivot to tip bead bottom, released pose."""
    length = config.root_offset + config.chain_span
    psi = math.radians(config.hinge_spring.free_angle)
    return length * math.cos(psi) + config.chain.bead.R1


def start_height(config: GripperConfig, obj: ObjectShape) -> float:
    """Hinge pivot height at displacement zero: tip grazing the object top
    at full extension (maximum gripper length defines the origin)."""
    return obj.top_height + gripper_reach(config)


def _root_pose(config: GripperConfig, hinge_angle_deg: float, y_base: float):
    psi = math.radians(hinge_angle_deg)
    d = (-math.sin(psi), -math.cos(psi))
    x0 = config.torus_diameter / 2.0
    root = (x0 + config.root_offset * d[0], y_base + config.root_offset * d[1])
    return root, d


def _try_project(config, angles, obstacles, psi, y_base):
    root, heading = _root_pose(config, psi, y_base)
    try:
        out, rot = project_to_feasibility(
            config.chain, angles, obstacles, root, heading)
        return out, rot
    except InfeasibleError:
        return None, None


def _chain_clearance(config, angles, obstacles, psi, y_base) -> float:
    root, heading = _root_pose(config, psi, y_base)
    pos, _ = chain_positions(config.chain, angles, root, heading)
    return min_signed_distance(pos, obstacles)


def _displacement_grid(total: float, step: float, include_zero: bool):
    n = int(math.floor(total / step + 1e-9))
    vals = [k * step for k in range(0 if include_zero else 1, n + 1)]
    if not vals or vals[-1] < total - 1e-9 * max(1.0, total):
        vals.append(total)
    return vals


# -------------------------
# Press
# -------------------------

def press(
    config: GripperConfig,
    state: GripperState,
    obj: ObjectShape,
    protocol: Protocol,
) -> tuple[GripperState, GraspTrace]:
    """Lower the released gripper onto the object, conforming the chains.

    Returns the pressed state and the press trace.  The recorded force
    ramps with contact engagement at `press_stiffness` per chain and
    saturates at the port-A piston force (constant-load spring), so it is
    non-decreasing in pressure_A at any displacement, and the contact
    onset shifts later as pressure_A drops (incomplete tip extension).
    """
    if state != build_gripper(config):
        raise InputError("press requires a released gripper (flexible mode)")
    obstacles = scene_obstacles(config, obj)
    deficit = extension_deficit(config, protocol.pressure_A)
    y0 = start_height(config, obj) + deficit
    psi = config.hinge_spring.free_angle
    plateau = (protocol.pressure_A * config.piston_area_A / 1000.0
               / config.n_chains)

    chain_angles = [np.array(c.angles, dtype=float) for c in state.chains]
    onsets: list[float | None] = [None] * config.n_chains
    descents = [0.0] * config.n_chains  # root travel the chains actually absorb
    samples = []
    for d in _displacement_grid(protocol.press_depth, protocol.sample_step, True):
        force = 0.0
        for i in range(config.n_chains):
            d_geo, out = _advance_chain(
                config, chain_angles[i], obstacles, psi, y0,
                descents[i], d)
            descents[i] = d_geo
            # flexible mode: the port-A extension re-straightens every
            # joint the object does not force
            root, heading = _root_pose(config, psi, y0 - d_geo)
            out = relax_to_straight(
                config.chain, out, obstacles, root, heading)
            chain_angles[i] = out
            touching = _chain_clearance(
                config, out, obstacles[:1], psi, y0 - d_geo) <= CONTACT_TOL
            if touching and onsets[i] is None:
                onsets[i] = d
            if onsets[i] is not None:
                engagement = d - onsets[i]
                force += min(config.press_stiffness * engagement, plateau)
        samples.append(TraceSample(d, force, "press"))

    # depth the chains could not absorb went into the constant-load piston
    slide = max(0.0, protocol.press_depth - min(descents))
    chains = tuple(
        ChainState(angles=tuple(float(a) for a in ca), tension=0.0)
        for ca in chain_angles)
    hinges = tuple(psi for _ in range(config.n_chains))
    new_state = GripperState(
        chains=chains, hinge_angles=hinges,
        equalizer_position=max(0.0, config.stroke - slide))
    trace = GraspTrace(
        samples=tuple(samples),
        metadata={
            "phase": "press",
            "pressure_A_kPa": protocol.pressure_A,
            "extension_deficit_mm": deficit,
            "piston_slide_mm": slide,
            "contact_onsets_mm": [o for o in onsets],
            "chains_in_contact": sum(o is not None for o in onsets),
        })
    return new_state, trace


def _advance_chain(config, angles, obstacles, psi, y0, d_prev, d_target):
    """Lower one chain root as far toward d_target as conforming allows.

    When the chain cannot fold any further (joint stops reached), the
    remaining travel is absorbed by the equalizer piston sliding, so the
    root simply stops descending.  Returns (descent, angles).
    """
    def attempt(depth):
        root, heading = _root_pose(config, psi, y0 - depth)
        try:
            out, _ = project_to_feasibility(
                config.chain, angles, obstacles, root, heading)
            return out
        except InfeasibleError:
            return None

    out = attempt(d_target)
    if out is not None:
        return d_target, out
    lo, hi = d_prev, d_target
    best = angles
    for _ in range(25):
        mid = 0.5 * (lo + hi)
        got = attempt(mid)
        if got is not None:
            lo, best = mid, got
        else:
            hi = mid
    return lo, best


# -------------------------
# Jam and lift
# -------------------------

def _spring_potential(config: GripperConfig, psi_deg: float) -> float:
    dpsi = math.radians(psi_deg - config.hinge_spring.free_angle)
    k_rad = config.hinge_spring.stiffness * 180.0 / math.pi  # N*mm per rad
    return 0.5 * k_rad * dpsi * dpsi


def _closing_potential(m_close: float, psi_deg: float) -> float:
    return -m_close * math.radians(psi_deg)


def jam_and_lift(
    config: GripperConfig,
    state: GripperState,
    obj: ObjectShape,
    protocol: Protocol,
) -> GraspTrace:
    """Tension the wires, close the hinges onto the object, then lift.

    The object stays fixed; the trace records pull-out resistance per
    lift step.  When every chain loses contact the remaining samples are
    a flagged zero-force tail.
    """
    if len(state.chains) != config.n_chains:
        raise InputError("gripper state does not match the configuration")
    pneu = PneumaticState(protocol.pressure_A, protocol.pressure_B)
    tension = equalizer_tension(config, pneu)
    cap = friction_capacity(config.chain, tension)
    m_close = hinge_closing_moment(config, pneu)
    psi_target = hinge_state(config, pneu)[0]
    obstacles = scene_obstacles(config, obj)
    mu_obj = obj.friction
    hinge_pivot_x = config.torus_diameter / 2.0

    deficit = extension_deficit(config, protocol.pressure_A)
    # travel the piston absorbed during the press never reached the chains
    slide = max(0.0, config.stroke - state.equalizer_position)
    y = start_height(config, obj) + deficit - protocol.press_depth + slide

    chain_angles = [np.array(c.angles, dtype=float) for c in state.chains]
    psis = [float(p) for p in state.hinge_angles]

    # jam: swing hinges closed as far as the scene and the energy gate allow
    for i in range(config.n_chains):
        psis[i], chain_angles[i], _ = _close_hinge(
            config, chain_angles[i], obstacles, psis[i], psi_target, y,
            cap, m_close)

    samples = [TraceSample(0.0, 0.0, "jam")]
    escaped = False
    for u in _displacement_grid(protocol.lift_distance, protocol.sample_step, False):
        y_u = y + u
        step = protocol.sample_step
        total = 0.0
        any_contact = False
        for i in range(config.n_chains):
            psi0 = psis[i]  # hinge angle at step start, for potential deltas
            wire_before = _wire_energy(config, chain_angles[i], tension)
            rot_sum = 0.0

            out, rot = _try_project(config, chain_angles[i], obstacles,
                                    psis[i], y_u)
            if out is None:
                psis[i], out, rot = _open_hinge_until_feasible(
                    config, chain_angles[i], obstacles, psis[i], y_u)
                if out is None:
                    raise SolveError(
                        f"lift infeasible at rise {u:.6g} mm (chain {i})")
            chain_angles[i] = out
            rot_sum += float(np.sum(rot))

            psis[i], chain_angles[i], rot2 = _close_hinge(
                config, chain_angles[i], obstacles, psis[i], psi_target, y_u,
                cap, m_close)
            rot_sum += rot2

            energy = cap * math.radians(rot_sum)
            energy += (_spring_potential(config, psis[i])
                       - _spring_potential(config, psi0))
            energy += (_closing_potential(m_close, psis[i])
                       - _closing_potential(m_close, psi0))
            energy += _wire_energy(config, chain_angles[i], tension) - wire_before

            clearance = _chain_clearance(
                config, chain_angles[i], obstacles[:1], psis[i], y_u)
            if clearance <= GRIP_WINDOW:
                # the blocked closing moment keeps squeezing the object;
                # sliding past it dissipates against the contact friction
                any_contact = True
                root, heading = _root_pose(config, psis[i], y_u)
                pos, _ = chain_positions(config.chain, chain_angles[i],
                                         root, heading)
                sd = obstacles[0].obstacle.signed_distance(pos)
                k = int(np.argmin(sd))
                dist = max(float(np.linalg.norm(
                    pos[k] - np.array([hinge_pivot_x, y_u]))), 1.0)
                energy += mu_obj * (m_close / dist) * step
                total += energy
            # a chain that ends the step out of the grip window slams to
            # its free pose against the stops; none of that energy passes
            # through the load path, so it does not register as force
        samples.append(TraceSample(u, total / step, "lift"))
        if not any_contact:
            escaped = True

    trace = GraspTrace(
        samples=tuple(samples),
        metadata={
            "phase": "lift",
            "tension_N": tension,
            "pressure_B_kPa": protocol.pressure_B,
            "escaped": escaped,
        })
    return trace


def _wire_energy(config: GripperConfig, angles, tension: float) -> float:
    if tension == 0.0:
        return 0.0
    return tension * float(np.sum(_interface_lengths(config.chain, angles)))


def _close_hinge(config, angles, obstacles, psi, psi_target, y_base,
                 cap, m_close, increment: float = 1.0):
    """Close toward psi_target in increments, energy- and contact-gated.

    An increment is accepted only when (a) the closing moment's work
    exceeds the friction cost of the chain yielding it would force plus
    the spring energy stored, and (b) it does not shove the chain off an
    object it is pressing: the contact is the fulcrum the closing pivots
    the chain about, so motions that lose it are not downhill paths.
    Returns (psi, angles, total joint rotation deg).
    """
    rot_total = 0.0
    clear_before = _chain_clearance(config, angles, obstacles[:1], psi, y_base)
    while psi < psi_target - 1e-9:
        cand = min(psi_target, psi + increment)
        out, rot = _try_project(config, angles, obstacles, cand, y_base)
        if out is None:
            break
        clear_after = _chain_clearance(config, out, obstacles[:1], cand, y_base)
        if clear_before <= GRIP_WINDOW and clear_after > clear_before + 0.25:
            break
        rot_deg = float(np.sum(rot))
        gain = m_close * math.radians(cand - psi)
        cost = (cap * math.radians(rot_deg)
                + _spring_potential(config, cand) - _spring_potential(config, psi))
        if gain - cost <= 0.0:
            break
        psi, angles = cand, out
        rot_total += rot_deg
        clear_before = clear_after
    return psi, angles, rot_total


def _open_hinge_until_feasible(config, angles, obstacles, psi, y_base):
    """Open the hinge by the smallest amount that lets the chains clear;
    the chain joints yield first, so this only runs when they cannot."""
    lo = config.hinge_min_angle
    out_lo, rot_lo = _try_project(config, angles, obstacles, lo, y_base)
    if out_lo is None:
        return psi, None, None
    hi = psi
    best = (lo, out_lo, rot_lo)
    for _ in range(25):
        mid = 0.5 * (lo + hi)
        out_m, rot_m = _try_project(config, angles, obstacles, mid, y_base)
        if out_m is not None:
            lo = mid
            best = (mid, out_m, rot_m)
        else:
            hi = mid
    return best


# -------------------------
# Trace post-processing
# -------------------------

def max_holding_force(trace: GraspTrace) -> float:
    """Peak force over the lift phase."""
    forces = trace.forces("lift")
    if not forces:
        raise InputError("trace has no lift-phase samples")
    return max(forces)


@dataclass(frozen=True)
class ComparisonReport:
    max_force_ratio: float
    crossover_mm: float | None
    trace_max: float
    baseline_max: float


def compare_to_baseline(trace: GraspTrace, baseline: GraspTrace) -> ComparisonReport:
    """Max-force ratio and, for pressing curves, the crossover displacement.

    The crossover is the smallest sampled displacement after which the
    trace stays at or below the baseline pointwise, provided it exceeded
    the baseline somewhere before; identical curves have none.
    """
    both_lift = bool(trace.forces("lift")) and bool(baseline.forces("lift"))

    def peak(t: GraspTrace) -> float:
        pool = t.forces("lift") if both_lift else t.forces()
        if not pool:
            raise InputError("empty trace")
        return max(pool)

    t_max, b_max = peak(trace), peak(baseline)
    if b_max <= 0:
        raise InputError("baseline peak force must be positive")
    ratio = t_max / b_max

    crossover = None
    t_press = trace.phase_samples("press")
    b_press = baseline.phase_samples("press")
    if t_press and b_press:
        td = np.array([s.displacement_mm for s in t_press])
        tf = np.array([s.force_N for s in t_press])
        bd = np.array([s.displacement_mm for s in b_press])
        bf = np.array([s.force_N for s in b_press])
        lo = max(td.min(), bd.min())
        hi = min(td.max(), bd.max())
        if lo > hi:
            raise InputError("press displacement ranges are disjoint")
        mask = (td >= lo) & (td <= hi)
        ds, fs = td[mask], tf[mask]
        bs = np.interp(ds, bd, bf)
        above = fs > bs + 1e-12
        if above.any():
            last_above = int(np.max(np.nonzero(above)[0]))
            if last_above + 1 < len(ds):
                crossover = float(ds[last_above + 1])
    return ComparisonReport(
        max_force_ratio=ratio, crossover_mm=crossover,
        trace_max=t_max, baseline_max=b_max)


# -------------------------
# Full protocol run
# -------------------------

def scenario_hash(config: GripperConfig, obj: ObjectShape, protocol: Protocol) -> str:
    blob = json.dumps(
        {"gripper": config.to_json(), "object": obj.to_json(),
         "protocol": protocol.to_json()},
        sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def run_protocol(
    config: GripperConfig,
    obj: ObjectShape,
    protocol: Protocol,
    seed: int | None = None,
) -> tuple[GraspTrace, dict]:
    """Full press -> jam -> lift run; returns the combined trace and summary.

    Repeated trials of identical inputs collapse to one deterministic
    run; with a seed given and trials > 1, a noise hook perturbs per-trial
    peak forces to exercise statistics reporting (the trace itself stays
    the deterministic base run).
    """
    released = build_gripper(config)
    pressed, press_trace = press(config, released, obj, protocol)
    lift_trace = jam_and_lift(config, pressed, obj, protocol)
    meta = {
        "scenario_hash": scenario_hash(config, obj, protocol),
        "object": obj.to_json(),
        "protocol": protocol.to_json(),
    }
    meta.update({k: v for k, v in press_trace.metadata.items() if k != "phase"})
    meta.update({k: v for k, v in lift_trace.metadata.items() if k != "phase"})
    combined = GraspTrace(
        samples=press_trace.samples + lift_trace.samples, metadata=meta)

    peak = max_holding_force(combined)
    summary = {
        "scenario_hash": meta["scenario_hash"],
        "tension_N": meta["tension_N"],
        "max_holding_force_N": peak,
        "escaped": meta["escaped"],
        "chains_in_contact": meta["chains_in_contact"],
        "contact_onsets_mm": meta["contact_onsets_mm"],
        "phases": {
            "press": {"samples": len(press_trace.samples),
                      "end_mm": protocol.press_depth},
            "jam": {"samples": 1},
            "lift": {"samples": len(lift_trace.samples) - 1,
                     "end_mm": protocol.lift_distance},
        },
        "object": obj.to_json(),
        "protocol": protocol.to_json(),
    }
    if seed is not None and protocol.trials > 1:
        rng = np.random.default_rng(seed)
        trial_peaks = [float(peak * f) for f in rng.normal(1.0, 0.02,
                                                           protocol.trials)]
        summary["trials"] = {
            "count": protocol.trials,
            "seed": seed,
            "max_forces_N": trial_peaks,
            "mean_max_N": float(np.mean(trial_peaks)),
            "std_max_N": float(np.std(trial_peaks)),
        }
    return combined, summary
