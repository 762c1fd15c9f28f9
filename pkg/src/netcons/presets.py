"""Named experiment presets and the file-producing simulation driver."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import ErrorTable, MassAudit, l1_error, mass_balance_audit
from .config import ExperimentConfig, serialize_config
from .network import NetworkState
from .output import emit_plot_script, snapshot_name, write_snapshot
from .relaxation import init_auxiliary
from .scheme import Trajectory, network_fluxes, run

log = logging.getLogger(__name__)

PRESETS = ("lwr-1to1", "relaxation-sweep", "bl-1to2", "lwr-1to2-central", "lwr-1to2-flowmax")

LWR11_SNAPSHOTS = [0.375, 0.75, 1.125, 1.5]
BL12_SNAPSHOTS = [0.25, 0.5]
SWEEP_EPSILONS = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
BL12_ALPHAS = [0.2, 0.5, 0.8]
LWR12_ALPHAS = [0.2, 0.4, 0.8]


def _lwr(c, u_max):
    return {"family": "quadratic_lwr", "params": {"c": c, "u_max": u_max}}


def _bl(a):
    return {"family": "buckley_leverett", "params": {"a": a}}


def _edge(direction, flux, lam, cells, initial):
    return {"direction": direction, "flux": flux, "lambda": lam, "cells": cells, "initial": initial}


def lwr_1to1_config(cells: int = 2000, epsilon: Optional[float] = None, snapshots=None, directory="out") -> ExperimentConfig:
    snaps = LWR11_SNAPSHOTS if snapshots is None else snapshots
    return ExperimentConfig.model_validate({
        "edges": [
            _edge("incoming", _lwr(2.0, 0.5), 2.0, cells, 0.25),
            _edge("outgoing", _lwr(1.0, 1.0), 2.0, cells, 0.5),
        ],
        "coupling": {"mode": "central"},
        "scheme": {"order": 1, "cfl": 0.9, "epsilon": epsilon, "left_boundary": "transmissive"},
        "time": {"t_final": 1.5, "snapshots": snaps},
        "output": {"directory": directory, "emit_plots": True},
    })


def bl_1to2_config(alpha: float, cells: int = 400, directory="out") -> ExperimentConfig:
    return ExperimentConfig.model_validate({
        "edges": [
            _edge("incoming", _bl(0.5), 2.5, cells, 1.0),
            _edge("outgoing", _bl(0.1), 2.5, cells, 0.0),
            _edge("outgoing", _bl(0.9), 2.5, cells, 0.0),
        ],
        "coupling": {"mode": "central", "alpha": alpha},
        "scheme": {"order": 2, "cfl": 0.24, "left_boundary": "transmissive"},
        "time": {"t_final": BL12_SNAPSHOTS[-1], "snapshots": BL12_SNAPSHOTS},
        "output": {"directory": directory, "emit_plots": True},
    })


def lwr_1to2_config(alpha: float, mode: str = "central", cells: int = 200, directory="out") -> ExperimentConfig:
    return ExperimentConfig.model_validate({
        "edges": [
            _edge("incoming", _lwr(1.0, 1.2), 1.0, cells, 0.6),
            _edge("outgoing", _lwr(1.0, 1.0), 1.0, cells, 0.9),
            _edge("outgoing", _lwr(1.0, 1.0), 1.0, cells, 0.4),
        ],
        "coupling": {"mode": mode, "alpha": alpha},
        "scheme": {"order": 2, "cfl": 0.24, "left_boundary": "transmissive"},
        "time": {"t_final": 0.75, "snapshots": [0.75]},
        "output": {"directory": directory, "emit_plots": True},
    })


def preset_members(
    name: str,
    alpha: Optional[float] = None,
    epsilon: Optional[float] = None,
    cells: Optional[int] = None,
) -> dict[str, ExperimentConfig]:
    """Member configurations of a preset, keyed by output subdirectory."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    kw = {} if cells is None else {"cells": cells}
    if name == "lwr-1to1":
        return {"": lwr_1to1_config(epsilon=epsilon, **kw)}
    if name == "relaxation-sweep":
        eps_list = SWEEP_EPSILONS if epsilon is None else [epsilon]
        members = {"limit": lwr_1to1_config(snapshots=[1.5], **kw)}
        for eps in eps_list:
            members[f"eps_{eps:.0e}"] = lwr_1to1_config(epsilon=eps, snapshots=[1.5], **kw)
        return members
    if name == "bl-1to2":
        alphas = BL12_ALPHAS if alpha is None else [alpha]
        return {f"alpha_{a:g}": bl_1to2_config(a, **kw) for a in alphas}
    mode = "flowmax" if name.endswith("flowmax") else "central"
    alphas = LWR12_ALPHAS if alpha is None else [alpha]
    return {f"alpha_{a:g}": lwr_1to2_config(a, mode, **kw) for a in alphas}


@dataclass
class SimulationResult:
    config: ExperimentConfig
    trajectory: Trajectory
    audit: MassAudit
    initial_node_flux: tuple[float, ...]
    files: list[Path] = field(default_factory=list)

    def summary(self) -> dict:
        final = self.trajectory.final
        return {
            "t_final": final.t,
            "steps": self.audit.steps,
            "mass_defect": self.audit.max_defect,
            "node_defect": self.audit.max_node_defect,
            "mass_ok": self.audit.ok,
            "initial_node_flux": list(self.initial_node_flux),
            "snapshots": [str(p) for p in self.files if p.suffix == ".csv"],
        }


def initial_state(config: ExperimentConfig) -> NetworkState:
    topology = config.topology()
    state = NetworkState.from_topology(topology)
    if config.scheme.epsilon is not None:
        state.v = init_auxiliary(state.u, [e.flux for e in topology.edges])
    return state


def simulate(config: ExperimentConfig, out_dir=None, label: str = "") -> SimulationResult:
    """Run one configuration; with ``out_dir`` write config, snapshots and plot script."""
    topology = config.topology()
    rc = config.run_config()
    state = initial_state(config)
    v0 = state.v if state.v is not None else [e.flux(uk) for e, uk in zip(topology.edges, state.u)]
    first = network_fluxes(topology, state.u, v0, rc.order, rc.left_boundary).node_flux
    files: list[Path] = []
    observers = []
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        cfg_path = out_dir / "config.json"
        cfg_path.write_text(serialize_config(config) + "\n")
        files.append(cfg_path)

        def write(s: NetworkState) -> None:
            files.append(write_snapshot(s, topology, out_dir / snapshot_name(s.t)))

        observers.append(write)
    traj = run(state, topology, rc, observers)
    audit = mass_balance_audit(traj.reports)
    if not audit.ok:
        log.error("mass balance defect %.3e exceeds %.3e", audit.max_defect, audit.tolerance)
    if out_dir is not None and config.output.emit_plots:
        snaps = [(label or "u", s.t, out_dir / snapshot_name(s.t)) for s in traj.snapshots]
        files.append(emit_plot_script(snaps, out_dir / "plot.py", style="panels"))
    return SimulationResult(config, traj, audit, tuple(float(x) for x in first), files)


def _simulate_member(args):
    label, config, out_dir = args
    return label, simulate(config, out_dir, label)


@dataclass
class PresetResult:
    name: str
    members: dict[str, SimulationResult]
    error_table: Optional[ErrorTable] = None
    aux_error_table: Optional[ErrorTable] = None
    files: list[Path] = field(default_factory=list)


def run_preset(
    name: str,
    out_dir,
    alpha: Optional[float] = None,
    epsilon: Optional[float] = None,
    cells: Optional[int] = None,
    jobs: int = 1,
) -> PresetResult:
    """Run every member of a preset, each into its own subdirectory of ``out_dir``."""
    members = preset_members(name, alpha, epsilon, cells)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(label, cfg, out_dir / label if label else out_dir) for label, cfg in members.items()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_simulate_member, tasks))
    else:
        results = dict(map(_simulate_member, tasks))
    result = PresetResult(name, {label: results[label] for label in members})

    summary = {"preset": name, "members": {k or name: r.summary() for k, r in result.members.items()}}
    if name == "relaxation-sweep":
        limit = result.members["limit"].trajectory.final
        topology = result.members["limit"].config.topology()
        limit_aux = NetworkState(
            u=limit.u, t=limit.t, v=[e.flux(uk) for e, uk in zip(topology.edges, limit.u)]
        )
        labels = [k for k in members if k != "limit"]
        eps = [members[k].scheme.epsilon for k in labels]
        finals = [result.members[k].trajectory.final for k in labels]
        result.error_table = ErrorTable.from_errors(eps, [l1_error(s, limit) for s in finals])
        result.aux_error_table = ErrorTable.from_errors(eps, [l1_error(s, limit_aux, field="v") for s in finals])
        result.files.append(result.error_table.write_csv(out_dir / "error_table.csv"))
        result.files.append(result.aux_error_table.write_csv(out_dir / "error_table_v.csv"))
        summary["error_table"] = [
            {"epsilon": r.parameter, "l1_error": r.l1_error, "eoc": None if np.isnan(r.eoc) else r.eoc}
            for r in result.error_table.rows
        ]
    elif len(members) > 1:
        snaps = [
            (label, s.t, out_dir / label / snapshot_name(s.t))
            for label, r in result.members.items()
            for s in r.trajectory.snapshots
        ]
        result.files.append(emit_plot_script(snaps, out_dir / "plot.py", style="overlay", title=name))

    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, default=str) + "\n")
    result.files.append(summary_path)
    return result
