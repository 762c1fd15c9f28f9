"""Experiment configuration: a strict JSON schema and conversion to solver objects.

Example::

    {
      "edges": [
        {"direction": "incoming", "flux": {"family": "quadratic_lwr", "params": {"c": 2.0, "u_max": 0.5}},
         "lambda": 2.0, "cells": 2000, "initial": 0.25},
        {"direction": "outgoing", "flux": {"family": "quadratic_lwr", "params": {"c": 1.0, "u_max": 1.0}},
         "lambda": 2.0, "cells": 2000, "initial": 0.5}
      ],
      "coupling": {"mode": "central"},
      "scheme": {"order": 1, "cfl": 0.9, "left_boundary": "transmissive"},
      "time": {"t_final": 1.5, "snapshots": [0.375, 0.75, 1.125, 1.5]},
      "output": {"directory": "out/lwr-1to1", "emit_plots": true}
    }

Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .flux import BuckleyLeverett, QuadraticLWR
from .network import Coupling, CouplingMode, Edge, LeftBoundary, NetworkTopology, Orientation
from .scheme import RunConfig


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field when known."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, strict=True)


class LWRParams(_Strict):
    c: float = Field(gt=0)
    u_max: float = Field(gt=0)


class BLParams(_Strict):
    a: float = Field(gt=0, lt=1)


class LWRFlux(_Strict):
    family: Literal["quadratic_lwr"]
    params: LWRParams

    def build(self):
        return QuadraticLWR(c=self.params.c, u_max=self.params.u_max)


class BLFlux(_Strict):
    family: Literal["buckley_leverett"]
    params: BLParams

    def build(self):
        return BuckleyLeverett(a=self.params.a)


FluxSpec = Annotated[Union[LWRFlux, BLFlux], Field(discriminator="family")]


class EdgeSpec(_Strict):
    direction: Literal["incoming", "outgoing"]
    flux: FluxSpec
    lam: float = Field(alias="lambda", gt=0)
    cells: int = Field(ge=2)
    initial: float

    model_config = ConfigDict(extra="forbid", frozen=True, strict=True, populate_by_name=True)


class CouplingSpec(_Strict):
    mode: Literal["central", "flowmax"] = "central"
    alpha: Optional[float] = Field(default=None, ge=0, le=1)


class SchemeSpec(_Strict):
    order: Literal[1, 2] = 1
    cfl: float = Field(default=0.9, gt=0, le=1)
    epsilon: Optional[float] = Field(default=None, gt=0)
    left_boundary: Literal["noflux", "transmissive"] = "noflux"


class TimeSpec(_Strict):
    t_final: float = Field(gt=0)
    snapshots: List[float] = Field(default_factory=list)


class OutputSpec(_Strict):
    directory: str = "out"
    emit_plots: bool = True


class ExperimentConfig(_Strict):
    edges: List[EdgeSpec]
    coupling: CouplingSpec = CouplingSpec()
    scheme: SchemeSpec = SchemeSpec()
    time: TimeSpec
    output: OutputSpec = OutputSpec()

    @model_validator(mode="after")
    def _check_semantics(self):
        n_in = sum(e.direction == "incoming" for e in self.edges)
        n_out = len(self.edges) - n_in
        if (n_in, n_out) not in {(1, 1), (1, 2)}:
            raise ValueError(f"edges: unsupported topology {n_in}-to-{n_out}; exactly one incoming and one or two outgoing edges are supported")
        if any(e.direction == "outgoing" for e in self.edges[:n_in]):
            raise ValueError("edges: list the incoming edge before the outgoing edges")
        if len({e.cells for e in self.edges}) != 1:
            raise ValueError("edges: all edges must use the same number of cells")
        if n_out == 2 and self.coupling.alpha is None:
            raise ValueError("coupling.alpha: required for two outgoing edges")
        if n_out == 1 and self.coupling.alpha is not None:
            raise ValueError("coupling.alpha: only allowed with two outgoing edges")
        if self.coupling.mode == "flowmax" and n_out != 2:
            raise ValueError("coupling.mode: flowmax requires two outgoing edges")
        if self.scheme.epsilon is not None:
            if self.scheme.order != 1:
                raise ValueError("scheme.order: the relaxation scheme (epsilon set) is first order only")
            if self.coupling.mode != "central" or n_out != 1:
                raise ValueError("scheme.epsilon: the relaxation scheme is supported on 1-to-1 central networks only")
        for t in self.time.snapshots:
            if not 0 <= t <= self.time.t_final:
                raise ValueError(f"time.snapshots: {t} outside [0, t_final={self.time.t_final}]")
        return self

    def topology(self) -> NetworkTopology:
        edges = [
            Edge(
                id=i + 1,
                orientation=Orientation(e.direction),
                flux=e.flux.build(),
                lam=e.lam,
                m=e.cells,
                u0=e.initial,
            )
            for i, e in enumerate(self.edges)
        ]
        n_in = sum(e.orientation is Orientation.INCOMING for e in edges)
        return NetworkTopology(
            incoming=tuple(edges[:n_in]),
            outgoing=tuple(edges[n_in:]),
            coupling=Coupling(CouplingMode(self.coupling.mode), self.coupling.alpha),
        )

    def run_config(self) -> RunConfig:
        return RunConfig(
            order=self.scheme.order,
            cfl=self.scheme.cfl,
            t_final=self.time.t_final,
            epsilon=self.scheme.epsilon,
            snapshot_times=tuple(self.time.snapshots),
            left_boundary=LeftBoundary(self.scheme.left_boundary),
        )


def _format_loc(loc) -> str:
    parts = []
    for p in loc:
        if p in ("quadratic_lwr", "buckley_leverett"):
            continue  # discriminator tag inserted by pydantic
        parts.append(str(p))
    return ".".join(parts)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object")
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        err = exc.errors()[0]
        path = _format_loc(err["loc"])
        msg = err["msg"]
        if msg.startswith("Value error, "):
            msg = msg[len("Value error, "):]
            path, _, rest = msg.partition(": ")
            if rest:
                raise ConfigError(rest, path) from None
            raise ConfigError(msg) from None
        raise ConfigError(msg, path) from None


def serialize_config(config: ExperimentConfig) -> str:
    return config.model_dump_json(by_alias=True, indent=2)
