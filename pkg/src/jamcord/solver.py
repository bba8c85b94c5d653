"""Quasi-static stick-slip equilibrium of a loaded bead chain.

Scheme: external loads ramp from zero to full over a fixed number of load
steps; within each step the free joints are relaxed in base-to-tip order.
A joint whose applied moment exceeds the friction capacity (about its
tension balance point) rotates toward balance, at most `angle_step_limit`
per sweep, clamped by the joint range and by hard contact feasibility of
every downstream bead.  The rotation target is found by bisection on the
closed-form moment curve, so identical inputs give bit-identical results.

A brute-force oracle for chains with at most three free joints evaluates
the full admissible angle grid and returns the lowest-energy configuration
reachable from the start by friction-gated descent; it shares no code
path with the incremental solver and exists for verification.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields

import numpy as np

from .beads import Variant
from .chain import (
    ChainSpec,
    ChainState,
    JointStatus,
    chain_positions,
    friction_capacity,
    validate_state,
    wire_path_length_slope,
)
from .errors import InfeasibleError, InputError, SolveError
from .trace import GraspTrace, TraceSample

_PEN_TOL = 1e-9  # mm of penetration treated as touching during solves
_BISECT_ITERS = 60


# -------------------------
# Contact obstacle shapes
# -------------------------

@dataclass(frozen=True)
class HalfPlaneObstacle:
    """Forbidden half-space n.p < offset; feasible side is n.p >= offset."""

    normal: tuple[float, float]
    offset: float

    def __post_init__(self):
        n = math.hypot(*self.normal)
        if abs(n - 1.0) > 1e-9:
            raise InputError(f"half-plane normal must be unit length, |n| = {n}")

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return p @ np.asarray(self.normal) - self.offset


@dataclass(frozen=True)
class CircleObstacle:
    """Forbidden disc; feasible outside the radius."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise InputError(f"circle radius must be > 0, got {self.radius}")

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return np.linalg.norm(p - np.asarray(self.center), axis=-1) - self.radius


@dataclass(frozen=True)
class WedgeObstacle:
    """Forbidden infinite wedge: apex plus two faces opening along +axis.

    `axis` is the unit direction from the apex into the wedge interior
    (downward for an apex-up prism) and `half_angle_deg` the face
    half-angle.  `inflation` grows the forbidden region by a margin, used
    to keep bead centers one bead radius off the surface.  The distance
    is exact outside (face or apex, whichever is closer); inside it is
    the depth below the nearest face.
    """

    apex: tuple[float, float]
    axis: tuple[float, float]
    half_angle_deg: float
    inflation: float = 0.0

    def __post_init__(self):
        n = math.hypot(*self.axis)
        if abs(n - 1.0) > 1e-9:
            raise InputError(f"wedge axis must be unit length, |a| = {n}")
        if not 0 < self.half_angle_deg < 90:
            raise InputError(
                f"wedge half angle must lie in (0, 90), got {self.half_angle_deg}")
        if self.inflation < 0:
            raise InputError("wedge inflation must be >= 0")

    def _frames(self):
        ax, ay = self.axis
        half = math.radians(self.half_angle_deg)
        faces = []
        for sgn in (1.0, -1.0):
            c, s = math.cos(sgn * half), math.sin(sgn * half)
            d = np.array([ax * c - ay * s, ax * s + ay * c])  # face direction
            n = sgn * np.array([-d[1], d[0]])  # outward normal
            faces.append((d, n))
        return faces

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(self.apex)
        faces = self._frames()
        n_dists = np.stack([p @ n for _, n in faces], axis=0)
        inside = np.all(n_dists <= 0.0, axis=0)
        sd_in = np.max(n_dists, axis=0)
        ray_d = []
        for d, _ in faces:
            t = np.clip(p @ d, 0.0, None)
            ray_d.append(np.linalg.norm(p - t[:, None] * d, axis=-1))
        sd_out = np.minimum(ray_d[0], ray_d[1])
        sd = np.where(inside, sd_in, sd_out) - self.inflation
        return sd if np.asarray(points).ndim > 1 else sd[0:1]


Obstacle = HalfPlaneObstacle | CircleObstacle | WedgeObstacle


@dataclass(frozen=True)
class ContactConstraint:
    """Obstacle applied to one bead (index) or, with index None, to all."""

    bead_index: int | None
    obstacle: Obstacle


@dataclass(frozen=True)
class LoadCase:
    """Point loads (N) on bead centers, contact constraints, optional gravity."""

    point_loads: tuple[tuple[int, tuple[float, float]], ...] = ()
    contacts: tuple[ContactConstraint, ...] = ()
    gravity: tuple[float, float] | None = None  # N per bead

    def bead_forces(self, n_units: int, scale: float = 1.0) -> np.ndarray:
        F = np.zeros((n_units, 2))
        for idx, f in self.point_loads:
            if not 0 <= idx < n_units:
                raise InputError(f"point load bead index {idx} out of range")
            F[idx] += f
        if self.gravity is not None:
            F += np.asarray(self.gravity)
        return F * scale


@dataclass(frozen=True)
class SolveSettings:
    load_steps: int = 50
    max_iterations: int = 200
    moment_tolerance: float = 1e-3  # N*mm
    angle_step_limit: float = 1.0  # deg per sweep

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise InputError(f"SolveSettings.{f.name} must be positive")

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json(cls, data: dict) -> "SolveSettings":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown SolveSettings fields: {sorted(unknown)}")
        return cls(**data)


# -------------------------
# Feasibility helpers
# -------------------------

def min_signed_distance(
    positions: np.ndarray, contacts: tuple[ContactConstraint, ...]
) -> float:
    """Worst clearance over all constraints; negative means penetration."""
    worst = math.inf
    for c in contacts:
        pts = positions if c.bead_index is None else positions[c.bead_index:c.bead_index + 1]
        sd = c.obstacle.signed_distance(pts)
        worst = min(worst, float(np.min(sd)))
    return worst


def _downstream_feasible(
    pivot: np.ndarray,
    rel: np.ndarray,
    first_idx: int,
    contacts: tuple[ContactConstraint, ...],
    dtheta_deg: float,
) -> bool:
    """Would beads first_idx.. stay clear after rotating by dtheta about pivot?"""
    a = math.radians(dtheta_deg)
    c, s = math.cos(a), math.sin(a)
    rot = rel @ np.array([[c, s], [-s, c]])  # row-vector rotation by +a
    pts = pivot + rot
    for cc in contacts:
        if cc.bead_index is None:
            sub = pts
        elif cc.bead_index >= first_idx:
            sub = pts[cc.bead_index - first_idx:cc.bead_index - first_idx + 1]
        else:
            continue
        if sub.size and float(np.min(cc.obstacle.signed_distance(sub))) < -_PEN_TOL:
            return False
    return True


def _max_feasible_rotation(
    pivot, rel, first_idx, contacts, target_deg: float
) -> float:
    """Largest rotation toward target_deg keeping downstream beads clear.

    Assumes the current pose (rotation 0) is feasible; the feasible set is
    treated as an interval, which holds for the small per-sweep windows.
    """
    if not contacts or rel.size == 0:
        return target_deg
    if _downstream_feasible(pivot, rel, first_idx, contacts, target_deg):
        return target_deg
    lo, hi = 0.0, target_deg
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if _downstream_feasible(pivot, rel, first_idx, contacts, mid):
            lo = mid
        else:
            hi = mid
    return lo


# -------------------------
# Incremental stick-slip solver
# -------------------------

def _joint_moment_coeffs(positions, forces, j):
    """(A, B) such that the moment about joint j's pivot after rotating the
    downstream block by t is A*cos(t) - B*sin(t)."""
    pivot = positions[j + 1]
    rel = positions[j + 2:] - pivot
    Fd = forces[j + 2:]
    A = float(np.sum(rel[:, 0] * Fd[:, 1] - rel[:, 1] * Fd[:, 0]))
    B = float(np.sum(rel * Fd))
    return A, B


def _balance_moment(spec: ChainSpec, angle_deg: float, tension: float) -> float:
    """Moment the wire can cancel at this angle (same sign as the load)."""
    return tension * wire_path_length_slope(spec.bead, angle_deg)


def solve_equilibrium(
    spec: ChainSpec,
    state0: ChainState,
    loads: LoadCase,
    settings: SolveSettings | None = None,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
    diagnostic_path=None,
) -> ChainState:
    """Relax a chain under fixed tension to a stick-slip equilibrium.

    The returned state keeps every free joint within friction capacity of
    its balance moment (up to the moment tolerance), with contacts
    non-penetrating; joints that moved are Slipping, saturated ones
    AtLimit.  Deterministic for identical inputs.  With diagnostic_path
    set, every joint update is appended to a CSV log
    (step, joint, angle, residual).
    """
    settings = settings or SolveSettings()
    validate_state(spec, state0)
    tension = state0.tension
    cap = friction_capacity(spec, tension)
    lo, hi = spec.angle_range()
    angles = np.array(state0.angles, dtype=float)
    free = list(spec.free_joints())
    moved = np.zeros(spec.n_joints, dtype=bool)
    diag_rows = [] if diagnostic_path is not None else None

    angles = _project_angles(
        spec, angles, loads.contacts, base_position, base_heading)

    n = spec.n_units
    for step in range(1, settings.load_steps + 1):
        scale = step / settings.load_steps
        forces = loads.bead_forces(n, scale)
        converged = False
        for _ in range(settings.max_iterations):
            worst = 0.0
            any_move = False
            positions, _ = chain_positions(spec, angles, base_position, base_heading)
            for j in free:
                A, B = _joint_moment_coeffs(positions, forces, j)
                g0 = A - _balance_moment(spec, angles[j], tension)
                excess = abs(g0) - cap
                if excess <= settings.moment_tolerance:
                    continue
                s = 1.0 if g0 > 0 else -1.0
                room = (hi - angles[j]) if s > 0 else (angles[j] - lo)
                window = min(settings.angle_step_limit, room)
                if window <= 1e-12:
                    continue  # pushed into the joint limit: absorbed there
                pivot = positions[j + 1]
                rel = positions[j + 2:] - pivot
                window = _max_feasible_rotation(
                    pivot, rel, j + 2, loads.contacts, s * window) * s
                if window <= 1e-12:
                    continue  # contact-blocked in the slip direction
                def h(w):
                    t = math.radians(s * w)
                    g = (A * math.cos(t) - B * math.sin(t)
                         - _balance_moment(spec, angles[j] + s * w, tension))
                    return s * g - cap
                if h(window) >= 0.0:
                    w_star = window
                    worst = max(worst, excess)
                else:
                    a, b = 0.0, window
                    for _ in range(_BISECT_ITERS):
                        m = 0.5 * (a + b)
                        if h(m) >= 0.0:
                            a = m
                        else:
                            b = m
                    w_star = 0.5 * (a + b)
                if w_star > 1e-15:
                    angles[j] = min(max(angles[j] + s * w_star, lo), hi)
                    moved[j] = True
                    any_move = True
                    positions, _ = chain_positions(
                        spec, angles, base_position, base_heading)
                    if diag_rows is not None:
                        diag_rows.append(
                            f"{step},{j},{angles[j]:.6g},{max(h(w_star), 0.0):.6g}")
            if not any_move and worst <= settings.moment_tolerance:
                converged = True
                break
        if not converged:
            res = equilibrium_residuals(
                spec, angles, loads, tension, base_position, base_heading,
                scale=scale)
            raise SolveError(
                f"no convergence at load scale {scale:.3f}; worst residual "
                f"{float(np.max(res)):.6g} N*mm", float(np.max(res)))

    if diag_rows is not None:
        with open(diagnostic_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("step,joint,angle_deg,residual_Nmm\n")
            fh.write("\n".join(diag_rows) + ("\n" if diag_rows else ""))

    statuses = []
    for j in range(spec.n_joints):
        if moved[j]:
            at_lo = abs(angles[j] - lo) <= 1e-9
            at_hi = abs(angles[j] - hi) <= 1e-9
            statuses.append(JointStatus.AT_LIMIT if (at_lo or at_hi)
                            else JointStatus.SLIPPING)
        else:
            statuses.append(JointStatus.STUCK)
    return ChainState(angles=tuple(float(a) for a in angles),
                      tension=tension, joint_status=tuple(statuses))


def equilibrium_residuals(
    spec: ChainSpec,
    angles,
    loads: LoadCase,
    tension: float,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
    scale: float = 1.0,
) -> np.ndarray:
    """Per-joint excess moment beyond friction capacity, N*mm.

    Excess pushed into a joint limit or a blocking contact is absorbed by
    that one-sided constraint and reported as zero.
    """
    cap = friction_capacity(spec, tension)
    lo, hi = spec.angle_range()
    angles = np.asarray(angles, dtype=float)
    forces = loads.bead_forces(spec.n_units, scale)
    positions, _ = chain_positions(spec, angles, base_position, base_heading)
    res = np.zeros(spec.n_joints)
    for j in spec.free_joints():
        A, _ = _joint_moment_coeffs(positions, forces, j)
        g0 = A - _balance_moment(spec, angles[j], tension)
        excess = abs(g0) - cap
        if excess <= 0:
            continue
        s = 1.0 if g0 > 0 else -1.0
        room = (hi - angles[j]) if s > 0 else (angles[j] - lo)
        if room <= 1e-9:
            continue
        pivot = positions[j + 1]
        rel = positions[j + 2:] - pivot
        if _max_feasible_rotation(pivot, rel, j + 2, loads.contacts,
                                  s * min(room, 1e-4)) * s <= 1e-9:
            continue
        res[j] = excess
    return res


# -------------------------
# Feasibility projection (displacement-driven contact)
# -------------------------

def _project_angles(
    spec: ChainSpec,
    angles: np.ndarray,
    contacts,
    base_position,
    base_heading,
    max_passes: int = 60,
    rotation_log: np.ndarray | None = None,
) -> np.ndarray:
    """Rotate free joints, tip to base, until no bead penetrates.

    Each sweep clears penetrations with the smallest rotation of the
    joint nearest the offending bead: a zero-stiffness chain buckles
    locally at the contact, which is what makes the chains drape and
    wrap around an object instead of pivoting away rigidly at the root.
    Raises InfeasibleError if max_passes is exhausted.
    """
    if not contacts:
        return angles
    angles = angles.copy()
    lo, hi = spec.angle_range()
    free = list(reversed(list(spec.free_joints())))
    for _ in range(max_passes):
        positions, _ = chain_positions(spec, angles, base_position, base_heading)
        worst = min_signed_distance(positions, contacts)
        if worst >= -_PEN_TOL:
            return angles
        progressed = False
        for j in free:
            positions, _ = chain_positions(
                spec, angles, base_position, base_heading)
            pivot = positions[j + 1]
            rel = positions[j + 2:] - pivot
            if rel.size == 0:
                continue
            if _downstream_feasible(pivot, rel, j + 2, contacts, 0.0):
                continue
            w = _smallest_clearing_rotation(
                pivot, rel, j + 2, contacts,
                neg_room=angles[j] - lo, pos_room=hi - angles[j])
            if w is None:
                # no single rotation clears: move toward least penetration
                # and let later joints (and passes) absorb the rest
                w = _best_relief_rotation(
                    pivot, rel, j + 2, contacts,
                    neg_room=angles[j] - lo, pos_room=hi - angles[j])
            if w is None:
                continue
            angles[j] += w
            if rotation_log is not None:
                rotation_log[j] += abs(w)
            progressed = True
        if not progressed:
            # single-joint moves stall, e.g. a near-axial chain pressed
            # onto flat ground must buckle with every joint at once
            curled = _coordinated_curl(
                spec, angles, contacts, base_position, base_heading)
            if curled is None:
                break
            if rotation_log is not None:
                rotation_log += np.abs(curled - angles)
            angles = curled
    positions, _ = chain_positions(spec, angles, base_position, base_heading)
    worst = min_signed_distance(positions, contacts)
    if worst >= -_PEN_TOL:
        return angles
    raise InfeasibleError(
        f"contact constraints cannot be satisfied; residual penetration "
        f"{-worst:.6g} mm", -worst)


def _smallest_clearing_rotation(
    pivot, rel, first_idx, contacts, neg_room: float, pos_room: float
) -> float | None:
    """Signed rotation of smallest magnitude that clears downstream beads."""
    best = None
    for sign, room in ((1.0, pos_room), (-1.0, neg_room)):
        if room <= 1e-12:
            continue
        ws = np.linspace(0.0, room, 65)[1:]
        found = None
        prev = 0.0
        for w in ws:
            if _downstream_feasible(pivot, rel, first_idx, contacts, sign * w):
                a, b = prev, w  # refine toward the smallest clearing angle
                for _ in range(40):
                    m = 0.5 * (a + b)
                    if _downstream_feasible(pivot, rel, first_idx, contacts,
                                            sign * m):
                        b = m
                    else:
                        a = m
                found = sign * b
                break
            prev = w
        if found is not None and (best is None or abs(found) < abs(best)):
            best = found
    return best


def _coordinated_curl(
    spec: ChainSpec, angles, contacts, base_position, base_heading
) -> np.ndarray | None:
    """Smallest proportional all-joint curl that restores feasibility.

    Every free joint moves the same fraction of its remaining range
    toward one stop, which is the buckling mode single-joint updates
    cannot reach.  Returns the curled angles or None.
    """
    lo, hi = spec.angle_range()
    free = list(spec.free_joints())
    if not free:
        return None

    def trial_at(target: float, t: float) -> np.ndarray:
        trial = np.asarray(angles, dtype=float).copy()
        for j in free:
            trial[j] = angles[j] + t * (target - angles[j])
        return trial

    def feasible(trial: np.ndarray) -> bool:
        pos, _ = chain_positions(spec, trial, base_position, base_heading)
        return min_signed_distance(pos, contacts) >= -_PEN_TOL

    for target in (hi, lo):
        prev = 0.0
        for t in np.linspace(0.0, 1.0, 101)[1:]:
            if feasible(trial_at(target, t)):
                a, b = prev, t  # refine toward the smallest feasible curl
                for _ in range(30):
                    m = 0.5 * (a + b)
                    if feasible(trial_at(target, m)):
                        b = m
                    else:
                        a = m
                return trial_at(target, b)
            prev = t
    return None


def _worst_downstream_penetration(pivot, rel, first_idx, contacts, dtheta_deg):
    a = math.radians(dtheta_deg)
    c, s = math.cos(a), math.sin(a)
    pts = pivot + rel @ np.array([[c, s], [-s, c]])
    worst = 0.0
    for cc in contacts:
        if cc.bead_index is None:
            sub = pts
        elif cc.bead_index >= first_idx:
            sub = pts[cc.bead_index - first_idx:cc.bead_index - first_idx + 1]
        else:
            continue
        if sub.size:
            worst = max(worst, -float(np.min(cc.obstacle.signed_distance(sub))))
    return worst


def _best_relief_rotation(
    pivot, rel, first_idx, contacts, neg_room: float, pos_room: float
) -> float | None:
    """Rotation minimizing the deepest downstream penetration; ties favor
    the smallest magnitude.  None when nothing improves on staying put."""
    cands = [0.0]
    for sign, room in ((1.0, pos_room), (-1.0, neg_room)):
        if room > 1e-12:
            cands.extend(sign * np.linspace(0.0, room, 65)[1:])
    pens = np.array([
        _worst_downstream_penetration(pivot, rel, first_idx, contacts, w)
        for w in cands])
    order = np.lexsort((np.abs(cands), pens))
    best = float(np.array(cands)[order[0]])
    if pens[order[0]] >= pens[0] - 1e-12 or abs(best) < 1e-12:
        return None
    return best


def project_to_feasibility(
    spec: ChainSpec,
    angles,
    contacts,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Public projection: returns (angles, per-joint absolute rotation deg)."""
    log = np.zeros(spec.n_joints)
    out = _project_angles(
        spec, np.asarray(angles, dtype=float), tuple(contacts),
        base_position, base_heading, rotation_log=log)
    return out, log


def relax_to_straight(
    spec: ChainSpec,
    angles,
    contacts,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
    max_passes: int = 60,
) -> np.ndarray:
    """Return every free joint toward zero as far as contacts allow.

    Models the constant extension force that re-straightens an
    untensioned chain (flexible mode): kinks survive only where an
    obstacle enforces them, so a pressed chain hugs the object with the
    fewest bends.  The input pose must already be feasible.
    """
    angles = np.asarray(angles, dtype=float).copy()
    contacts = tuple(contacts)
    free = list(spec.free_joints())
    for _ in range(max_passes):
        changed = False
        positions, _ = chain_positions(spec, angles, base_position, base_heading)
        for j in free:
            if abs(angles[j]) <= 1e-12:
                continue
            positions, _ = chain_positions(
                spec, angles, base_position, base_heading)
            pivot = positions[j + 1]
            rel = positions[j + 2:] - pivot
            w = _max_feasible_rotation(pivot, rel, j + 2, contacts, -angles[j])
            if abs(w) > 1e-12:
                angles[j] += w
                changed = True
        if not changed:
            return angles
    return angles


# -------------------------
# Energy bookkeeping and brute-force oracle
# -------------------------

def _interface_lengths(spec: ChainSpec, angles) -> np.ndarray:
    """Wire consumed per interface, vectorized over joint angles (deg)."""
    angles = np.asarray(angles, dtype=float)
    base = spec.bead.D1
    if spec.bead.variant is Variant.CUP_SHAPED:
        return np.full(angles.shape, base)
    half = 0.5 * np.radians(angles)
    return base + 2.0 * spec.bead.R1 * (1.0 / np.cos(half) - 1.0)


def total_potential(
    spec: ChainSpec,
    angles,
    loads: LoadCase,
    tension: float,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
) -> float:
    """Potential energy in N*mm: wire pull-in minus external work."""
    angles = np.asarray(angles, dtype=float)
    positions, _ = chain_positions(spec, angles, base_position, base_heading)
    U = tension * float(np.sum(_interface_lengths(spec, angles)))
    forces = loads.bead_forces(spec.n_units, 1.0)
    U -= float(np.sum(forces * positions))
    return U


def brute_force_equilibrium(
    spec: ChainSpec,
    loads: LoadCase,
    tension: float,
    grid_step: float,
    state0: ChainState | None = None,
    base_position=(0.0, 0.0),
    base_heading=(1.0, 0.0),
) -> ChainState:
    """Exhaustive-grid oracle for chains with at most 3 free joints.

    Enumerates the admissible angle grid around the start state, floods
    the set reachable by friction-gated descent (a single-joint grid move
    happens only when the energy it releases exceeds the friction work
    capacity * step), and returns the reachable feasible configuration of
    minimum total potential.  Verification use only.
    """
    free = list(spec.free_joints())
    if len(free) > 3:
        raise InputError(f"oracle supports at most 3 free joints, got {len(free)}")
    if grid_step <= 0:
        raise InputError("grid_step must be positive")
    if state0 is None:
        state0 = ChainState(angles=(0.0,) * spec.n_joints, tension=tension)
    validate_state(spec, state0)
    lo, hi = spec.angle_range()
    cap = friction_capacity(spec, tension)
    step_rad = math.radians(grid_step)

    axes = []
    for j in free:
        a0 = state0.angles[j]
        m_lo = math.ceil((lo - a0) / grid_step - 1e-9)
        m_hi = math.floor((hi - a0) / grid_step + 1e-9)
        axes.append(a0 + grid_step * np.arange(m_lo, m_hi + 1))
    shape = tuple(len(ax) for ax in axes)
    n_cells = int(np.prod(shape))
    if n_cells > 2_000_000:
        raise SolveError(f"oracle grid too fine: {n_cells} cells")
    start_idx = tuple(int(np.argmin(np.abs(ax - state0.angles[j])))
                      for ax, j in zip(axes, free))

    # bead positions over the whole grid; segment i heading accumulates
    # joints 0..i-1
    grids = np.meshgrid(*axes, indexing="ij")
    full = [np.full(shape, state0.angles[j]) for j in range(spec.n_joints)]
    for ax_grid, j in zip(grids, free):
        full[j] = ax_grid
    theta0 = math.atan2(base_heading[1], base_heading[0])
    pos = np.zeros(shape + (spec.n_units, 2))
    pos[..., 0, 0] = base_position[0]
    pos[..., 0, 1] = base_position[1]
    cur = np.broadcast_to(np.asarray(base_position, float), shape + (2,)).copy()
    csum = np.zeros(shape)
    for i in range(spec.n_units - 1):
        seg = theta0 + csum
        cur = cur + spec.unit_pitch * np.stack(
            [np.cos(seg), np.sin(seg)], axis=-1)
        pos[..., i + 1, 0] = cur[..., 0]
        pos[..., i + 1, 1] = cur[..., 1]
        if i < spec.n_joints:
            csum = csum + np.radians(full[i])

    forces = loads.bead_forces(spec.n_units, 1.0)
    U = -np.einsum("...kc,kc->...", pos, forces)
    U = U + tension * sum(
        (np.full(shape, spec.bead.D1)
         if spec.bead.variant is Variant.CUP_SHAPED else
         spec.bead.D1 + 2.0 * spec.bead.R1 *
         (1.0 / np.cos(0.5 * np.radians(full[j])) - 1.0))
        for j in range(spec.n_joints))

    feasible = np.ones(shape, dtype=bool)
    for c in loads.contacts:
        idxs = range(spec.n_units) if c.bead_index is None else [c.bead_index]
        for k in idxs:
            sd = c.obstacle.signed_distance(pos[..., k, :])
            feasible &= sd >= -_PEN_TOL
    if not feasible[start_idx]:
        raise SolveError("oracle start configuration is infeasible")

    # friction-gated descent flood from the start cell
    reachable = np.zeros(shape, dtype=bool)
    reachable[start_idx] = True
    gate = cap * step_rad
    for _ in range(sum(shape) + 1):
        prev = reachable
        nxt = reachable.copy()
        for ax in range(len(shape)):
            sl_from = [slice(None)] * len(shape)
            sl_to = [slice(None)] * len(shape)
            sl_from[ax] = slice(None, -1)
            sl_to[ax] = slice(1, None)
            drop = U[tuple(sl_from)] - U[tuple(sl_to)]
            ok_up = (drop > gate) & feasible[tuple(sl_to)]
            nxt[tuple(sl_to)] |= reachable[tuple(sl_from)] & ok_up
            drop_dn = U[tuple(sl_to)] - U[tuple(sl_from)]
            ok_dn = (drop_dn > gate) & feasible[tuple(sl_from)]
            nxt[tuple(sl_from)] |= reachable[tuple(sl_to)] & ok_dn
        reachable = nxt
        if np.array_equal(reachable, prev):
            break

    U_masked = np.where(reachable & feasible, U, np.inf)
    best_flat = int(np.argmin(U_masked))
    best_idx = np.unravel_index(best_flat, shape)
    angles = list(state0.angles)
    for ax, j, bi in zip(axes, free, best_idx):
        angles[j] = float(ax[bi])

    statuses = []
    for j in range(spec.n_joints):
        if abs(angles[j] - state0.angles[j]) > 0.5 * grid_step:
            at_edge = (abs(angles[j] - lo) < grid_step or
                       abs(angles[j] - hi) < grid_step)
            statuses.append(JointStatus.AT_LIMIT if at_edge
                            else JointStatus.SLIPPING)
        else:
            statuses.append(JointStatus.STUCK)
    return ChainState(angles=tuple(angles), tension=tension,
                      joint_status=tuple(statuses))


# -------------------------
# Cantilever stiffness probe
# -------------------------

def cantilever_stiffness(
    spec: ChainSpec,
    tension: float,
    tip_force_range,
    settings: SolveSettings | None = None,
) -> GraspTrace:
    """Sweep a transverse tip force and record tip deflection.

    Each force level is solved from the straight state, force applied in
    the chain's allowed bending direction.  Samples carry deflection as
    the displacement column and the applied force as the force column.
    """
    if tension < 0:
        raise InputError("tension must be >= 0")
    samples = []
    straight = ChainState(angles=(0.0,) * spec.n_joints, tension=tension)
    pos0, _ = chain_positions(spec, straight.angles)
    tip0 = pos0[-1]
    for f in tip_force_range:
        if f < 0:
            raise InputError("tip forces must be >= 0")
        loads = LoadCase(point_loads=((spec.n_units - 1, (0.0, float(f))),))
        state = solve_equilibrium(spec, straight, loads, settings)
        pos, _ = chain_positions(spec, state.angles)
        deflection = float(np.linalg.norm(pos[-1] - tip0))
        samples.append(TraceSample(deflection, float(f), "press"))
    return GraspTrace(samples=tuple(samples),
                      metadata={"kind": "cantilever", "tension_N": tension})


def settings_from_file(path) -> SolveSettings:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read settings {path}: {exc}") from exc
    return SolveSettings.from_json(data)
