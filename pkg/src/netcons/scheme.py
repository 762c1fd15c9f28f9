"""Central scheme for conservation laws on a single-junction network.

Every edge is updated in conservative form

    u_j^{n+1} = u_j^n - dt/dx (F_{j+1/2} - F_{j-1/2})

with the relaxation-type numerical flux

    F_{j-1/2} = (f(u_j) + f(u_{j-1}))/2 - lam/2 (u_j - u_{j-1}) - S_{j-1/2}

where S is zero for the first-order scheme and a limited slope correction in
the characteristic variables w = f + lam*u and z = f - lam*u for the
second-order scheme. The second-order scheme advances in time with Heun's
method (SSP-RK2); its step is written as one conservative update with the
stage-averaged fluxes so that mass balance telescopes exactly.

Fluxes through the node come from :mod:`netcons.coupling`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .coupling import NodeInput, node_fluxes_central, node_fluxes_flowmax, solve_coupling
from .flux import validate_subcharacteristic
from .network import CouplingMode, Edge, LeftBoundary, NetworkState, NetworkTopology, Orientation

log = logging.getLogger(__name__)

# flow-maximisation demand/supply tolerate round-off excursions of this size
FLOWMAX_STATE_TOL = 1e-10


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    order: int = 1
    cfl: float = 0.9
    t_final: float = 1.0
    epsilon: Optional[float] = None
    snapshot_times: tuple[float, ...] = ()
    left_boundary: LeftBoundary = LeftBoundary.NOFLUX
    # relaxation mode beyond 1-to-1 networks is untested
    experimental: bool = False

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        object.__setattr__(self, "left_boundary", LeftBoundary(self.left_boundary))
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_final >= 0.0:
            raise ValueError(f"t_final must be non-negative, got {self.t_final}")
        if self.epsilon is not None:
            if not self.epsilon > 0.0:
                raise ValueError(f"epsilon must be positive, got {self.epsilon}")
            if self.order != 1:
                raise ValueError("the relaxation scheme is first order only")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_final:
                raise ValueError(f"snapshot time {t} outside [0, {self.t_final}]")

    @property
    def relaxation(self) -> bool:
        return self.epsilon is not None


@dataclass(frozen=True)
class StepReport:
    """Audit record of one time step.

    ``boundary_influx`` is the flux entering at x = -1 on each incoming
    edge (zero for a no-flux boundary), ``boundary_outflux`` the flux
    leaving at x = 1 on each outgoing edge.
    """

    t: float
    dt: float
    node_flux: tuple[float, ...]
    boundary_influx: tuple[float, ...]
    boundary_outflux: tuple[float, ...]
    mass_before: float
    mass_after: float

    @property
    def mass_defect(self) -> float:
        expected = self.mass_before + self.dt * (sum(self.boundary_influx) - sum(self.boundary_outflux))
        return abs(self.mass_after - expected)

    @property
    def node_defect(self) -> float:
        n_in = len(self.boundary_influx)
        return abs(sum(self.node_flux[:n_in]) - sum(self.node_flux[n_in:]))


@dataclass
class Trajectory:
    snapshots: list[NetworkState] = field(default_factory=list)
    reports: list[StepReport] = field(default_factory=list)

    @property
    def final(self) -> NetworkState:
        return self.snapshots[-1]

    def at(self, t: float) -> NetworkState:
        for s in self.snapshots:
            if s.t == t:
                return s
        raise KeyError(f"no snapshot at t={t}")


def compute_dt(topology: NetworkTopology, cfl: float) -> float:
    return cfl * topology.dx / float(np.max(topology.lams))


def interior_flux(edge: Edge, u_left: float, u_right: float, correction: float = 0.0) -> float:
    f = edge.flux
    return 0.5 * (f(u_right) + f(u_left)) - 0.5 * edge.lam * (u_right - u_left) - correction


def minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def characteristic_correction(w: Sequence[float], z: Sequence[float], nu: float = 0.0) -> float:
    """S = (1 - nu)/4 * (dz_j - dw_{j-1}) from four-cell stencils of w and z.

    The interface lies between entries 1 and 2; dw_{j-1} is the limited
    slope of w in cell 1 and dz_j that of z in cell 2.
    """
    dw_left = minmod(w[2] - w[1], w[1] - w[0])
    dz_right = minmod(z[3] - z[2], z[2] - z[1])
    return float(0.25 * (1.0 - nu) * (dz_right - dw_left))


def second_order_correction(edge: Edge, stencil: Sequence[float], nu: float = 0.0) -> float:
    """Slope correction S at the interface between ``stencil[1]`` and ``stencil[2]``.

    ``nu = lam*dt/dx`` switches on a Hancock-type time centering factor
    (1 - nu); the network scheme uses ``nu = 0`` and gets its temporal
    accuracy from the two-stage time integrator instead.
    """
    u = np.asarray(stencil, dtype=float)
    if u.shape != (4,):
        raise ValueError("stencil must hold exactly four cell values")
    fu = edge.flux(u)
    return characteristic_correction(fu + edge.lam * u, fu - edge.lam * u, nu)


def _slope_corrections(u: np.ndarray, v: np.ndarray, lam: float) -> np.ndarray:
    """S on every interface with two cells on each side (interfaces 2..m-2)."""
    w = v + lam * u
    z = v - lam * u
    dw = minmod(w[2:] - w[1:-1], w[1:-1] - w[:-2])
    dz = minmod(z[2:] - z[1:-1], z[1:-1] - z[:-2])
    return 0.25 * (dz[1:] - dw[:-1])


def left_boundary_flux(edge: Edge, mode: LeftBoundary = LeftBoundary.NOFLUX, v_first: float = 0.0) -> float:
    """Flux through x = -1 of an incoming edge.

    ``v_first`` is f(u) (or the auxiliary average) of the first cell; it is
    only used by the transmissive boundary, whose ghost cell copies that cell.
    """
    if edge.orientation is not Orientation.INCOMING:
        raise ValueError(f"edge {edge.id} is not incoming; left boundary applies to incoming edges")
    if LeftBoundary(mode) is LeftBoundary.NOFLUX:
        return 0.0
    return float(v_first)


def right_boundary_flux(edge: Edge, u_last: float, v_last: Optional[float] = None) -> float:
    """Flux through x = 1 of an outgoing edge with a zero-gradient ghost cell."""
    if edge.orientation is not Orientation.OUTGOING:
        raise ValueError(f"edge {edge.id} is not outgoing; right boundary applies to outgoing edges")
    if v_last is None:
        v_last = edge.flux(u_last)
    # ghost copy: the viscous term vanishes and the average collapses
    return float(v_last)


def node_input(topology: NetworkTopology, u: Sequence[np.ndarray], v: Sequence[np.ndarray]) -> NodeInput:
    n_in = len(topology.incoming)
    idx = [-1] * n_in + [0] * len(topology.outgoing)
    return NodeInput(
        u=tuple(float(a[i]) for a, i in zip(u, idx)),
        v=tuple(float(a[i]) for a, i in zip(v, idx)),
    )


@dataclass
class FluxField:
    """Interface fluxes of all edges plus what was needed at the node."""

    F: list[np.ndarray]
    node_flux: np.ndarray
    node: NodeInput
    coupling: Optional[object] = None


def network_fluxes(
    topology: NetworkTopology,
    u: Sequence[np.ndarray],
    v: Sequence[np.ndarray],
    order: int,
    left: LeftBoundary,
) -> FluxField:
    """Assemble the m+1 interface fluxes of every edge.

    ``v`` is f_k(u) in the limit scheme and the auxiliary variable in the
    relaxation scheme; the flux formulas are otherwise identical.
    """
    edges = topology.edges
    n_in = len(topology.incoming)
    inp = node_input(topology, u, v)
    lams = topology.lams
    data = None
    if topology.coupling.mode is CouplingMode.FLOWMAX:
        node_flux = node_fluxes_flowmax(
            inp.u, [e.flux for e in edges], topology.coupling.alpha,
            edge_ids=[e.id for e in edges], tol=FLOWMAX_STATE_TOL,
        )
    else:
        data = solve_coupling(inp, lams, topology.coupling.alpha)
        node_flux = node_fluxes_central(data, inp, lams)

    F = []
    for k, (e, uk, vk) in enumerate(zip(edges, u, v)):
        Fk = np.empty(e.m + 1)
        Fk[1:-1] = 0.5 * (vk[1:] + vk[:-1]) - 0.5 * e.lam * (uk[1:] - uk[:-1])
        if order == 2:
            Fk[2:-2] -= _slope_corrections(uk, vk, e.lam)
        if k < n_in:
            Fk[0] = left_boundary_flux(e, left, vk[0])
            Fk[-1] = node_flux[k]
        else:
            Fk[0] = node_flux[k]
            Fk[-1] = right_boundary_flux(e, uk[-1], vk[-1])
        F.append(Fk)
    return FluxField(F=F, node_flux=node_flux, node=inp, coupling=data)


def _conservative_update(u: Sequence[np.ndarray], F: Sequence[np.ndarray], ratio: float) -> list[np.ndarray]:
    return [uk - ratio * (Fk[1:] - Fk[:-1]) for uk, Fk in zip(u, F)]


def _report(topology, state, new_u, F, dt) -> StepReport:
    n_in = len(topology.incoming)
    dx = topology.dx
    node = tuple(float(Fk[-1]) for Fk in F[:n_in]) + tuple(float(Fk[0]) for Fk in F[n_in:])
    return StepReport(
        t=state.t,
        dt=dt,
        node_flux=node,
        boundary_influx=tuple(float(Fk[0]) for Fk in F[:n_in]),
        boundary_outflux=tuple(float(Fk[-1]) for Fk in F[n_in:]),
        mass_before=state.mass(dx),
        mass_after=dx * float(sum(a.sum() for a in new_u)),
    )


def step_network(
    state: NetworkState,
    topology: NetworkTopology,
    config: RunConfig,
    dt: Optional[float] = None,
) -> tuple[NetworkState, StepReport]:
    """Advance the whole network by one step of common size ``dt``.

    Without ``dt`` the CFL step is used. Relaxation configurations are
    delegated to :func:`netcons.relaxation.relaxation_step`.
    """
    if config.relaxation:
        from .relaxation import relaxation_step

        return relaxation_step(state, topology, config, dt)
    if dt is None:
        dt = compute_dt(topology, config.cfl)
    ratio = dt / topology.dx
    edges = topology.edges

    def fluxes(u):
        v = [e.flux(uk) for e, uk in zip(edges, u)]
        return network_fluxes(topology, u, v, config.order, config.left_boundary).F

    F = fluxes(state.u)
    if config.order == 2:
        stage = _conservative_update(state.u, F, ratio)
        F2 = fluxes(stage)
        F = [0.5 * (a + b) for a, b in zip(F, F2)]
    new_u = _conservative_update(state.u, F, ratio)
    report = _report(topology, state, new_u, F, dt)
    return NetworkState(u=new_u, t=state.t + dt), report


def _check_finite(state: NetworkState, topology: NetworkTopology) -> None:
    fields = [("u", state.u)] + ([("v", state.v)] if state.v is not None else [])
    for name, arrays in fields:
        for e, a in zip(topology.edges, arrays):
            bad = np.flatnonzero(~np.isfinite(a))
            if bad.size:
                raise SimulationError(
                    f"non-finite {name} at t={state.t:.6g} on edge {e.id}, cell {int(bad[0])}"
                )


def warn_subcharacteristic(topology: NetworkTopology) -> None:
    for e in topology.edges:
        rep = validate_subcharacteristic(e, *e.flux.state_interval)
        if not rep.ok:
            log.warning(
                "edge %d: subcharacteristic condition violated, max |f'| = %.4g > lambda = %.4g",
                e.id, rep.max_speed, rep.lam,
            )


Observer = Callable[[NetworkState], None]


def run(
    state: NetworkState,
    topology: NetworkTopology,
    config: RunConfig,
    observers: Iterable[Observer] = (),
) -> Trajectory:
    """Integrate from ``state.t`` to ``config.t_final``.

    Steps are clipped so that every snapshot time and the final time are
    hit exactly. The final state is always the last snapshot.
    """
    state.check_matches(topology)
    if config.relaxation and state.v is None:
        raise ValueError("relaxation runs need the auxiliary variable; see init_auxiliary")
    if config.relaxation and topology.shape != (1, 1) and not config.experimental:
        raise ValueError("the relaxation scheme is validated on 1-to-1 networks only; set experimental to override")
    if config.relaxation and topology.coupling.mode is not CouplingMode.CENTRAL:
        raise ValueError("the relaxation scheme supports central coupling only")
    warn_subcharacteristic(topology)

    observers = list(observers)
    snap_times = sorted(set(config.snapshot_times) | {config.t_final})
    traj = Trajectory()

    def record(s: NetworkState) -> None:
        traj.snapshots.append(s.copy())
        for obs in observers:
            obs(s)

    if state.t in snap_times:
        record(state)
    dt_cfl = compute_dt(topology, config.cfl)
    for target in (t for t in snap_times if t > state.t):
        while state.t < target:
            remaining = target - state.t
            clipped = dt_cfl >= remaining
            dt = remaining if clipped else dt_cfl
            state, report = step_network(state, topology, config, dt)
            if clipped:
                state.t = target
            traj.reports.append(report)
            _check_finite(state, topology)
        record(state)
    return traj


def evolve_periodic(
    u0: np.ndarray,
    edge: Edge,
    cfl: float,
    t_final: float,
    order: int = 1,
) -> np.ndarray:
    """Evolve cell averages on a single periodic edge with the same interface fluxes.

    No node is involved; this isolates the interior scheme for accuracy checks.
    """
    u = np.asarray(u0, dtype=float).copy()
    dx = 1.0 / u.size
    lam = edge.lam
    f = edge.flux

    def fluxes(u):
        # two ghost cells per side give every interface a full stencil
        ext = np.concatenate([u[-2:], u, u[:2]])
        v = f(ext)
        F = 0.5 * (v[1:] + v[:-1]) - 0.5 * lam * (ext[1:] - ext[:-1])
        if order == 2:
            F[1:-1] -= _slope_corrections(ext, v, lam)
        # interfaces between ext cells 1..m+2 map to cell faces 0..m
        return F[1:-1]

    t = 0.0
    dt_cfl = cfl * dx / lam
    while t < t_final:
        dt = min(dt_cfl, t_final - t)
        r = dt / dx
        F = fluxes(u)
        if order == 2:
            F = 0.5 * (F + fluxes(u - r * np.diff(F)))
        u = u - r * np.diff(F)
        t = t_final if dt == t_final - t else t + dt
    return u
