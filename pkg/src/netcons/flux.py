"""Flux families for scalar conservation laws on network edges.

Two families are supported:

* ``QuadraticLWR``: f(u) = c * u * (1 - u / u_max), the Greenshields-type
  traffic flux with jam density ``u_max``.
* ``BuckleyLeverett``: f(u) = u^2 / (u^2 + a (1 - u)^2), the non-convex
  fractional-flow function of two-phase flow.

All evaluation helpers accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

SUBCHARACTERISTIC_SAMPLES = 10_000
GOLDEN_TOL = 1e-12


class DomainError(ValueError):
    """A state value lies outside the admissible interval of a flux model."""


@dataclass(frozen=True)
class QuadraticLWR:
    c: float = 1.0
    u_max: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.u_max > 0):
            raise ValueError(f"QuadraticLWR needs c > 0 and u_max > 0, got c={self.c}, u_max={self.u_max}")

    def __call__(self, u):
        return self.c * u * (1.0 - u / self.u_max)

    def derivative(self, u):
        return self.c * (1.0 - 2.0 * u / self.u_max)

    @property
    def state_interval(self) -> tuple[float, float]:
        return 0.0, self.u_max


@dataclass(frozen=True)
class BuckleyLeverett:
    a: float = 0.5

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ValueError(f"BuckleyLeverett needs 0 < a < 1, got a={self.a}")

    def __call__(self, u):
        return u * u / (u * u + self.a * (1.0 - u) ** 2)

    def derivative(self, u):
        denom = u * u + self.a * (1.0 - u) ** 2
        return 2.0 * self.a * u * (1.0 - u) / (denom * denom)

    @property
    def state_interval(self) -> tuple[float, float]:
        return 0.0, 1.0


FluxModel = Union[QuadraticLWR, BuckleyLeverett]


def eval_flux(model: FluxModel, u):
    return model(u)


def flux_derivative(model: FluxModel, u):
    return model.derivative(u)


def _golden_section_max(fun, lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    # coarse scan first so that a non-unimodal flux does not trap the search
    grid = np.linspace(lo, hi, 257)
    k = int(np.argmax(fun(grid)))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    best = 0.5 * (a + b)
    # endpoints win ties against an interior plateau
    candidates = [lo, best, hi]
    return float(max(candidates, key=lambda x: float(fun(x))))


def critical_density(model: FluxModel, u_lo: float, u_hi: float) -> float:
    """Return the maximiser of ``model`` on ``[u_lo, u_hi]``.

    Closed forms are used for the two named families where they apply; any
    other interval falls back to a golden-section search.
    """
    if not u_lo < u_hi:
        raise ValueError(f"need u_lo < u_hi, got [{u_lo}, {u_hi}]")
    if isinstance(model, QuadraticLWR):
        return float(min(max(model.u_max / 2.0, u_lo), u_hi))
    if isinstance(model, BuckleyLeverett) and 0.0 <= u_lo and u_hi <= 1.0:
        return float(u_hi)
    return _golden_section_max(model, u_lo, u_hi)


def _check_in_interval(model: FluxModel, u: float, edge, tol: float) -> float:
    lo, hi = model.state_interval
    if not (lo - tol <= u <= hi + tol) or not math.isfinite(u):
        where = f"edge {edge}" if edge is not None else "edge ?"
        raise DomainError(f"{where}: state {u!r} outside admissible interval [{lo}, {hi}]")
    return min(max(u, lo), hi)


def demand(model: FluxModel, u: float, edge=None, tol: float = 0.0) -> float:
    """Maximal flux a cell with state ``u`` can send downstream."""
    u = _check_in_interval(model, float(u), edge, tol)
    sigma = critical_density(model, *model.state_interval)
    return float(model(u) if u <= sigma else model(sigma))


def supply(model: FluxModel, u: float, edge=None, tol: float = 0.0) -> float:
    """Maximal flux a cell with state ``u`` can receive from upstream."""
    u = _check_in_interval(model, float(u), edge, tol)
    sigma = critical_density(model, *model.state_interval)
    return float(model(sigma) if u <= sigma else model(u))


@dataclass(frozen=True)
class SubcharacteristicReport:
    max_speed: float
    lam: float
    ok: bool


def validate_subcharacteristic(edge, u_lo: float, u_hi: float) -> SubcharacteristicReport:
    """Sample |f'| over ``[u_lo, u_hi]`` and compare against the edge's relaxation speed.

    A violation is reported, not raised; the caller decides whether to warn.
    """
    if not u_lo < u_hi:
        raise ValueError(f"need u_lo < u_hi, got [{u_lo}, {u_hi}]")
    grid = np.linspace(u_lo, u_hi, SUBCHARACTERISTIC_SAMPLES)
    speed = float(np.max(np.abs(edge.flux.derivative(grid))))
    return SubcharacteristicReport(max_speed=speed, lam=edge.lam, ok=speed <= edge.lam)
