"""Single-junction network topology, edges and the evolving state."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .flux import FluxModel


class Orientation(str, enum.Enum):
    INCOMING = "incoming"  # domain (-1, 0), node at the right end
    OUTGOING = "outgoing"  # domain (0, 1), node at the left end


class CouplingMode(str, enum.Enum):
    CENTRAL = "central"
    FLOWMAX = "flowmax"


class LeftBoundary(str, enum.Enum):
    """Treatment of the outer end x = -1 of incoming edges."""

    NOFLUX = "noflux"
    TRANSMISSIVE = "transmissive"


SUPPORTED_SHAPES = {(1, 1), (1, 2)}


@dataclass(frozen=True)
class Edge:
    id: int
    orientation: Orientation
    flux: FluxModel
    lam: float
    m: int
    u0: float = 0.0

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"edge {self.id}: need at least 2 cells, got m={self.m}")
        if not self.lam > 0:
            raise ValueError(f"edge {self.id}: relaxation speed must be positive, got {self.lam}")

    @property
    def dx(self) -> float:
        return 1.0 / self.m

    def cell_centers(self) -> np.ndarray:
        offset = -1.0 if self.orientation is Orientation.INCOMING else 0.0
        return offset + (np.arange(self.m) + 0.5) * self.dx


@dataclass(frozen=True)
class Coupling:
    mode: CouplingMode = CouplingMode.CENTRAL
    alpha: Optional[float] = None


@dataclass(frozen=True)
class NetworkTopology:
    incoming: tuple[Edge, ...]
    outgoing: tuple[Edge, ...]
    coupling: Coupling = Coupling()

    def __post_init__(self):
        object.__setattr__(self, "incoming", tuple(self.incoming))
        object.__setattr__(self, "outgoing", tuple(self.outgoing))
        shape = (len(self.incoming), len(self.outgoing))
        if shape not in SUPPORTED_SHAPES:
            raise ValueError(f"unsupported network shape {shape[0]}-to-{shape[1]}; supported: 1-to-1, 1-to-2")
        for e in self.incoming:
            if e.orientation is not Orientation.INCOMING:
                raise ValueError(f"edge {e.id} listed as incoming but oriented {e.orientation.value}")
        for e in self.outgoing:
            if e.orientation is not Orientation.OUTGOING:
                raise ValueError(f"edge {e.id} listed as outgoing but oriented {e.orientation.value}")
        if len({e.m for e in self.edges}) != 1:
            raise ValueError("all edges must share the same cell count (identical dx)")
        alpha = self.coupling.alpha
        if shape == (1, 2):
            if alpha is None or not 0.0 <= alpha <= 1.0:
                raise ValueError(f"1-to-2 networks need a distribution rate alpha in [0, 1], got {alpha}")
        elif alpha is not None:
            raise ValueError("alpha is only meaningful with two outgoing edges")
        if self.coupling.mode is CouplingMode.FLOWMAX and shape != (1, 2):
            raise ValueError("flow maximization coupling is implemented for 1-to-2 networks only")

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.incoming + self.outgoing

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.incoming), len(self.outgoing)

    @property
    def dx(self) -> float:
        return self.edges[0].dx

    @property
    def lams(self) -> np.ndarray:
        return np.array([e.lam for e in self.edges])


@dataclass
class NetworkState:
    """Cell averages per edge, ordered as ``topology.edges``.

    ``v`` holds the auxiliary variable and is only present in relaxation mode.
    """

    u: list[np.ndarray]
    t: float = 0.0
    v: Optional[list[np.ndarray]] = None

    @classmethod
    def from_topology(cls, topology: NetworkTopology) -> "NetworkState":
        return cls(u=[np.full(e.m, float(e.u0)) for e in topology.edges])

    def copy(self) -> "NetworkState":
        return NetworkState(
            u=[a.copy() for a in self.u],
            t=self.t,
            v=None if self.v is None else [a.copy() for a in self.v],
        )

    def mass(self, dx: float) -> float:
        return dx * float(sum(a.sum() for a in self.u))

    def check_matches(self, topology: NetworkTopology) -> None:
        if len(self.u) != len(topology.edges):
            raise ValueError(f"state has {len(self.u)} edges, topology has {len(topology.edges)}")
        for arr, e in zip(self.u, topology.edges):
            if arr.shape != (e.m,):
                raise ValueError(f"edge {e.id}: state length {arr.shape} does not match m={e.m}")
        if self.v is not None:
            for arr, e in zip(self.v, topology.edges):
                if arr.shape != (e.m,):
                    raise ValueError(f"edge {e.id}: auxiliary length {arr.shape} does not match m={e.m}")
