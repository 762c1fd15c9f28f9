import numpy as np
import pytest

from netcons.analysis import l1_error, mass_balance_audit
from netcons.flux import QuadraticLWR
from netcons.network import Edge, LeftBoundary, NetworkState, Orientation
from netcons.relaxation import g_flux, init_auxiliary, relaxation_step
from netcons.scheme import RunConfig, run, step_network

from conftest import bl12, lwr11

TRANSMISSIVE = LeftBoundary.TRANSMISSIVE
EDGE = Edge(1, Orientation.OUTGOING, QuadraticLWR(), 2.0, 10)


def relaxed_state(top):
    s = NetworkState.from_topology(top)
    s.v = init_auxiliary(s.u, [e.flux for e in top.edges])
    return s


class TestGFlux:
    def test_constant_state(self):
        assert g_flux(EDGE, (0.3, 0.7), (0.3, 0.7)) == pytest.approx(4 * 0.3)

    def test_state_jump(self):
        assert g_flux(EDGE, (0.0, 0.0), (1.0, 0.0)) == 2.0

    def test_auxiliary_jump(self):
        e = Edge(1, Orientation.OUTGOING, QuadraticLWR(), 1.0, 10)
        assert g_flux(e, (1.0, 0.0), (1.0, 2.0)) == 0.0


class TestInitAuxiliary:
    def test_lwr_1to1_initial_data(self):
        v = init_auxiliary([np.full(3, 0.25), np.full(3, 0.5)], [QuadraticLWR(2.0, 0.5), QuadraticLWR()])
        np.testing.assert_allclose(v[0], 0.25, atol=1e-16)
        np.testing.assert_allclose(v[1], 0.25, atol=1e-16)

    def test_zero(self):
        assert np.all(init_auxiliary([np.zeros(4)], [QuadraticLWR()])[0] == 0.0)


class TestRelaxationStep:
    def test_equilibrium_fixed_point(self):
        top = lwr11(m=20, u0=(1 / 3, 1 / 3))
        s = relaxed_state(top)
        cfg = RunConfig(t_final=1.0, epsilon=1e-3, left_boundary=TRANSMISSIVE)
        new, _ = relaxation_step(s, top, cfg)
        for a, b in zip(new.u + new.v, s.u + s.v):
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)

    def test_implicit_source_solves_its_equation(self):
        top = lwr11(m=40)
        s = relaxed_state(top)
        s.v = [v + 0.01 * np.sin(np.arange(v.size)) for v in s.v]
        eps, dt = 1e-2, 1e-3
        cfg = RunConfig(t_final=1.0, epsilon=eps, left_boundary=TRANSMISSIVE)
        new, _ = relaxation_step(s, top, cfg, dt)
        # v_new must satisfy v_new = v_explicit + dt/eps (f(u_new) - v_new); with
        # eps -> infinity the same step yields v_explicit
        free, _ = relaxation_step(s, top, RunConfig(t_final=1.0, epsilon=1e300, left_boundary=TRANSMISSIVE), dt)
        for e, vn, vx, un in zip(top.edges, new.v, free.v, new.u):
            np.testing.assert_allclose(vn, vx + dt / eps * (e.flux(un) - vn), atol=1e-13)

    def test_stiff_limit_projects_onto_equilibrium(self):
        top = lwr11(m=40)
        s = relaxed_state(top)
        dt = 1e-4
        cfg = RunConfig(t_final=1.0, epsilon=dt * 1e-6, left_boundary=TRANSMISSIVE)
        new, _ = relaxation_step(s, top, cfg, dt)
        for e, u, v in zip(top.edges, new.u, new.v):
            np.testing.assert_allclose(v, e.flux(u), rtol=1e-6, atol=1e-9)

    def test_tiny_epsilon_reproduces_limit_step(self):
        top = lwr11(m=100)
        s = relaxed_state(top)
        limit_cfg = RunConfig(t_final=1.0, left_boundary=TRANSMISSIVE)
        relax_cfg = RunConfig(t_final=1.0, epsilon=1e-14, left_boundary=TRANSMISSIVE)
        a = run(NetworkState.from_topology(top), top, RunConfig(t_final=0.1, left_boundary=TRANSMISSIVE)).final
        b = run(s, top, RunConfig(t_final=0.1, epsilon=1e-14, left_boundary=TRANSMISSIVE)).final
        assert l1_error(a, b) < 1e-10
        assert limit_cfg.relaxation is False and relax_cfg.relaxation is True

    def test_step_network_delegates(self):
        top = lwr11(m=20)
        s = relaxed_state(top)
        cfg = RunConfig(t_final=1.0, epsilon=0.1, left_boundary=TRANSMISSIVE)
        a, _ = step_network(s, top, cfg)
        b, _ = relaxation_step(s, top, cfg)
        assert all(np.array_equal(x, y) for x, y in zip(a.v, b.v))

    @pytest.mark.parametrize("left", list(LeftBoundary))
    def test_mass_conservation(self, left):
        top = lwr11(m=200)
        traj = run(relaxed_state(top), top, RunConfig(t_final=0.5, epsilon=1e-2, left_boundary=left))
        audit = mass_balance_audit(traj.reports)
        assert audit.max_defect <= 1e-12 and audit.max_node_defect <= 1e-12

    def test_stable_under_stiffness(self):
        top = lwr11(m=200)
        final = run(relaxed_state(top), top, RunConfig(t_final=1.5, epsilon=1e-10, left_boundary=TRANSMISSIVE)).final
        for u in final.u:
            assert np.all(np.isfinite(u)) and u.min() >= 0.25 - 1e-9 and u.max() <= 0.5 + 1e-9

    def test_requires_auxiliary(self):
        top = lwr11(m=10)
        with pytest.raises(ValueError):
            run(NetworkState.from_topology(top), top, RunConfig(t_final=0.1, epsilon=0.1))

    def test_config_errors(self):
        with pytest.raises(ValueError):
            RunConfig(epsilon=0.0)
        with pytest.raises(ValueError):
            RunConfig(epsilon=0.1, order=2)

    def test_one_to_two_gated(self):
        top = bl12(0.5, m=20)
        with pytest.raises(ValueError, match="experimental"):
            run(relaxed_state(top), top, RunConfig(t_final=0.1, epsilon=0.1))
        traj = run(relaxed_state(top), top, RunConfig(t_final=0.1, epsilon=0.1, experimental=True, left_boundary=TRANSMISSIVE))
        assert mass_balance_audit(traj.reports).ok


def test_asymptotic_consistency_on_coarse_grid():
    top = lwr11(m=200)
    cfg = RunConfig(t_final=1.5, left_boundary=TRANSMISSIVE)
    limit = run(NetworkState.from_topology(top), top, cfg).final
    errors = []
    for k in range(1, 7):
        rc = RunConfig(t_final=1.5, epsilon=10.0 ** -k, left_boundary=TRANSMISSIVE)
        errors.append(l1_error(run(relaxed_state(top), top, rc).final, limit))
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert np.log10(errors[-2] / errors[-1]) == pytest.approx(1.0, abs=0.05)
