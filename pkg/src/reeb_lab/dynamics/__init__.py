from .flows import contact_flow, deformed_flow_closed, reeb_flow_closed
from .hamiltonian import HamiltonianSpec, SymplecticFormSpec, hamiltonian_field
from .integrate import Trajectory, integrate
from .orbits import (
    OrbitCensus,
    correspondence_check,
    periodic_census_ellipsoid,
    return_map_scan,
)

__all__ = [
    "HamiltonianSpec",
    "OrbitCensus",
    "SymplecticFormSpec",
    "Trajectory",
    "contact_flow",
    "correspondence_check",
    "deformed_flow_closed",
    "hamiltonian_field",
    "integrate",
    "periodic_census_ellipsoid",
    "reeb_flow_closed",
    "return_map_scan",
]
