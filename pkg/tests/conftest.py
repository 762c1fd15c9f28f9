import numpy as np
import pytest

from netcons.flux import BuckleyLeverett, QuadraticLWR
from netcons.network import Coupling, CouplingMode, Edge, NetworkState, NetworkTopology, Orientation

IN, OUT = Orientation.INCOMING, Orientation.OUTGOING

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def lwr11(m=40, lam=2.0, u0=(0.25, 0.5)):
    """The 1-to-1 LWR network with f1 = 2u(1-2u), f2 = u(1-u)."""
    return NetworkTopology(
        (Edge(1, IN, QuadraticLWR(2.0, 0.5), lam, m, u0[0]),),
        (Edge(2, OUT, QuadraticLWR(1.0, 1.0), lam, m, u0[1]),),
    )


def lwr12(alpha, m=40, mode=CouplingMode.CENTRAL, u0=(0.6, 0.9, 0.4)):
    return NetworkTopology(
        (Edge(1, IN, QuadraticLWR(1.0, 1.2), 1.0, m, u0[0]),),
        (Edge(2, OUT, QuadraticLWR(1.0, 1.0), 1.0, m, u0[1]), Edge(3, OUT, QuadraticLWR(1.0, 1.0), 1.0, m, u0[2])),
        Coupling(mode, alpha),
    )


def bl12(alpha, m=40):
    return NetworkTopology(
        (Edge(1, IN, BuckleyLeverett(0.5), 2.5, m, 1.0),),
        (Edge(2, OUT, BuckleyLeverett(0.1), 2.5, m, 0.0), Edge(3, OUT, BuckleyLeverett(0.9), 2.5, m, 0.0)),
        Coupling(CouplingMode.CENTRAL, alpha),
    )


def exact_lwr11_averages(topology, t):
    """Cell averages of the exact solution 1/4 | 1/3 | 1/2 with shocks at -t/3 and t/6."""
    pieces = [(-np.inf, -t / 3.0, 0.25), (-t / 3.0, t / 6.0, 1.0 / 3.0), (t / 6.0, np.inf, 0.5)]
    u = []
    for e in topology.edges:
        lo = e.cell_centers() - 0.5 * e.dx
        hi = lo + e.dx
        acc = np.zeros(e.m)
        for a, b, val in pieces:
            acc += val * np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)
        u.append(acc / e.dx)
    return NetworkState(u=u, t=t)


def oracle_traces(u, v, lams, alpha=None):
    """Dense solve of the node conditions in the unknowns (u traces, v traces).

    Rows: characteristic invariants (w = v + lam u into the node on the
    incoming edge, z = v - lam u on outgoing edges), flux-trace balance,
    lam^2 u-trace balance and, on 1-to-2 nodes, the distribution rule.
    """
    n = len(u)
    A = np.zeros((2 * n, 2 * n))
    b = np.zeros(2 * n)
    A[0, 0], A[0, n] = lams[0], 1.0
    b[0] = v[0] + lams[0] * u[0]
    for k in range(1, n):
        A[k, k], A[k, n + k] = -lams[k], 1.0
        b[k] = v[k] - lams[k] * u[k]
    A[n, n] = 1.0
    A[n, n + 1:] = -1.0
    A[n + 1, 0] = lams[0] ** 2
    A[n + 1, 1:n] = -np.asarray(lams[1:]) ** 2
    if n == 3:
        A[n + 2, n] = -alpha
        A[n + 2, n + 1] = 1.0
    x = np.linalg.solve(A, b)
    return x[:n], x[n:]


@pytest.fixture
def small_lwr11():
    return lwr11()
