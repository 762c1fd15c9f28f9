"""Finite-volume schemes for scalar conservation laws on single-junction networks."""

from .analysis import ErrorTable, eoc, l1_error, mass_balance_audit
from .coupling import CouplingData, NodeInput, node_fluxes_central, node_fluxes_flowmax, solve_coupling
from .flux import BuckleyLeverett, DomainError, QuadraticLWR
from .network import Coupling, CouplingMode, Edge, LeftBoundary, NetworkState, NetworkTopology, Orientation
from .relaxation import init_auxiliary, relaxation_step
from .scheme import RunConfig, StepReport, Trajectory, compute_dt, run, step_network

__version__ = "0.1.0"
