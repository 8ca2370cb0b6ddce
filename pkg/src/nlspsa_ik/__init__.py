"""Gradient-free inverse kinematics for planar serial manipulators.

The solver minimizes a joint-motion cost subject to reaching a desired
end-effector pose, formulated as a penalty-combined scalar loss and
minimized with simultaneous perturbation stochastic approximation using a
norm-limited update vector (NLSPSA). A global-best PSO baseline is included
for budget-matched comparisons, plus eleven built-in validation scenarios
and a CLI that runs, sweeps, compares, and plots them.
"""

from .baseline import PsoParams, pso_solve
from .errors import (
    ArtifactError,
    ScenarioError,
    ScenarioFormatError,
    ScenarioLookupError,
    SolverFault,
)
from .kinematics import (
    ChainModel,
    Pose,
    forward_kinematics,
    joint_positions,
    mod_floor,
    pose_error,
)
from .objective import (
    LossEvaluator,
    ObjectiveSpec,
    combined_loss,
    default_r_ee,
    end_effector_cost,
    joint_motion_cost,
)
from .optimizer import (
    RunRecord,
    SolverParams,
    clamp_to_limits,
    perturbation_gain,
    sample_perturbation,
    saturate,
    solve,
    solve_many,
    spsa_gradient,
    step_gain,
    take_step,
)
from .scenarios import Scenario, builtin, builtin_ids, load_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "ArtifactError",
    "ChainModel",
    "LossEvaluator",
    "ObjectiveSpec",
    "Pose",
    "PsoParams",
    "RunRecord",
    "Scenario",
    "ScenarioError",
    "ScenarioFormatError",
    "ScenarioLookupError",
    "SolverFault",
    "SolverParams",
    "builtin",
    "builtin_ids",
    "clamp_to_limits",
    "combined_loss",
    "default_r_ee",
    "end_effector_cost",
    "forward_kinematics",
    "joint_motion_cost",
    "joint_positions",
    "load_scenario",
    "mod_floor",
    "perturbation_gain",
    "pose_error",
    "pso_solve",
    "sample_perturbation",
    "saturate",
    "save_scenario",
    "solve",
    "solve_many",
    "spsa_gradient",
    "step_gain",
    "take_step",
]
