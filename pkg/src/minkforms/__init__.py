"""Numerical exterior calculus on Minkowski spacetime and moving-media electrodynamics."""

from .exterior import (
    KVector,
    MetricAtPoint,
    ChartFieldSampler,
    wedge,
    contract_left,
    contract_right,
    inner,
    hodge,
    hodge_inverse,
    reversion,
    grade_involution,
    exterior_derivative,
)
from .media import (
    MediumParams,
    FrameVelocity,
    split_fields,
    assemble_field,
    constitutive_minkowski,
    rotating_kinematics,
)
from .boundary import MovingBoundary, jump_residual_F, jump_residual_G
from .wwe import WWEConfig, InteriorSolution, solve, potential, angular_momentum, residual_report

__version__ = "0.1.0"
