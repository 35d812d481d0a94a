from .counting import (
    RealizabilityPlan,
    WeightVector,
    fixed_point_count,
    moment_value,
    realize_hypersurface,
    realize_reeb,
    threshold,
)
from .lift import BaseHamiltonian, LiftedField, TorusActionCheck, build_lift, verify_torus_action

__all__ = [
    "BaseHamiltonian",
    "LiftedField",
    "RealizabilityPlan",
    "TorusActionCheck",
    "WeightVector",
    "build_lift",
    "fixed_point_count",
    "moment_value",
    "realize_hypersurface",
    "realize_reeb",
    "threshold",
    "verify_torus_action",
]
