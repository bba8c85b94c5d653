"""Bead-chain jamming simulator and torus-gripper experiment harness.

A chain of beads threaded on a wire switches between flexible and rigid
when the wire is tensioned: the beads press together and friction locks
the joints.  This package models the bead geometry and its constraints,
the quasi-static stick-slip mechanics of one chain, the torus gripper
assembled from eight such chains with a pneumatic equalizer, the press
and lift protocols used to characterize grasping, and a static
fire-exposure screen for the bill of materials.
"""

from .beads import (
    BeadSpec,
    ValidationReport,
    Variant,
    joint_angle_range,
    joint_limit,
    validate_bead_spec,
    wire_path_length,
)
from .chain import (
    ChainSpec,
    ChainState,
    Frame,
    JointStatus,
    forward_kinematics,
    friction_capacity,
    joint_response,
    restoring_moment,
)
from .errors import (
    ConfigurationError,
    InfeasibleError,
    InputError,
    JointLimitError,
    SchemaError,
    SolveError,
)
from .gripper import (
    GripperConfig,
    GripperState,
    HingeSpring,
    PneumaticState,
    build_gripper,
    equalizer_tension,
    hinge_state,
    reference_config,
    release,
)
from .grasp import (
    ComparisonReport,
    ObjectShape,
    Protocol,
    compare_to_baseline,
    jam_and_lift,
    max_holding_force,
    press,
    run_protocol,
)
from .solver import (
    CircleObstacle,
    ContactConstraint,
    HalfPlaneObstacle,
    LoadCase,
    SolveSettings,
    WedgeObstacle,
    brute_force_equilibrium,
    cantilever_stiffness,
    solve_equilibrium,
)
from .thermal import (
    BillOfMaterials,
    BomComponent,
    MaterialSpec,
    check_fire_exposure,
    load_bom,
    load_catalog,
)
from .trace import GraspTrace, TraceSample, read_trace_csv

__version__ = "0.1.0"

__all__ = [
    "BeadSpec", "ValidationReport", "Variant", "joint_angle_range",
    "joint_limit", "validate_bead_spec", "wire_path_length",
    "ChainSpec", "ChainState", "Frame", "JointStatus", "forward_kinematics",
    "friction_capacity", "joint_response", "restoring_moment",
    "ConfigurationError", "InfeasibleError", "InputError", "JointLimitError",
    "SchemaError", "SolveError",
    "GripperConfig", "GripperState", "HingeSpring", "PneumaticState",
    "build_gripper", "equalizer_tension", "hinge_state", "reference_config",
    "release",
    "ComparisonReport", "ObjectShape", "Protocol", "compare_to_baseline",
    "jam_and_lift", "max_holding_force", "press", "run_protocol",
    "CircleObstacle", "ContactConstraint", "HalfPlaneObstacle", "LoadCase",
    "SolveSettings", "WedgeObstacle", "brute_force_equilibrium",
    "cantilever_stiffness", "solve_equilibrium",
    "BillOfMaterials", "BomComponent", "MaterialSpec", "check_fire_exposure",
    "load_bom", "load_catalog",
    "GraspTrace", "TraceSample", "read_trace_csv",
    "__version__",
]
