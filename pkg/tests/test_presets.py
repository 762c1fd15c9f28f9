import json

import numpy as np
import pytest

from netcons.network import CouplingMode
from netcons.presets import PRESETS, preset_members, run_preset, simulate


class TestMembers:
    def test_unknown(self):
        with pytest.raises(KeyError):
            preset_members("lwr-2to1")

    def test_sweep(self):
        m = preset_members("relaxation-sweep")
        assert list(m) == ["limit", "eps_1e-01", "eps_1e-02", "eps_1e-03", "eps_1e-04", "eps_1e-05", "eps_1e-06"]
        assert m["limit"].scheme.epsilon is None
        assert m["eps_1e-04"].scheme.epsilon == 1e-4

    def test_single_epsilon(self):
        assert list(preset_members("relaxation-sweep", epsilon=1e-3)) == ["limit", "eps_1e-03"]

    def test_alphas(self):
        assert list(preset_members("bl-1to2")) == ["alpha_0.2", "alpha_0.5", "alpha_0.8"]
        assert list(preset_members("lwr-1to2-flowmax")) == ["alpha_0.2", "alpha_0.4", "alpha_0.8"]
        assert list(preset_members("lwr-1to2-central", alpha=0.3)) == ["alpha_0.3"]

    def test_modes(self):
        top = preset_members("lwr-1to2-flowmax", alpha=0.8)["alpha_0.8"].topology()
        assert top.coupling.mode is CouplingMode.FLOWMAX
        top = preset_members("lwr-1to2-central", alpha=0.8)["alpha_0.8"].topology()
        assert top.coupling.mode is CouplingMode.CENTRAL

    @pytest.mark.parametrize("name", PRESETS)
    def test_cells_override(self, name):
        for cfg in preset_members(name, cells=16).values():
            assert all(e.cells == 16 for e in cfg.edges)


class TestSimulate:
    def test_writes_files(self, tmp_path):
        cfg = preset_members("lwr-1to1", cells=20)[""]
        res = simulate(cfg, tmp_path)
        names = sorted(p.name for p in res.files)
        assert names == sorted(["config.json", "plot.py"] + [f"snapshot_t{t:.6f}.csv" for t in (0.375, 0.75, 1.125, 1.5)])
        assert res.audit.ok
        assert res.trajectory.final.t == 1.5

    def test_flowmax_initial_node_flux(self):
        cfg = preset_members("lwr-1to2-flowmax", alpha=0.8, cells=20)["alpha_0.8"]
        res = simulate(cfg)
        np.testing.assert_allclose(res.initial_node_flux, [0.1125, 0.09, 0.0225], rtol=0, atol=2e-16)
        assert res.files == []


class TestRunPreset:
    def test_sweep(self, tmp_path):
        res = run_preset("relaxation-sweep", tmp_path, cells=50)
        assert (tmp_path / "error_table.csv").exists() and (tmp_path / "error_table_v.csv").exists()
        errs = res.error_table.errors
        assert len(errs) == 6 and all(b < a for a, b in zip(errs, errs[1:]))
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["error_table"][0]["eoc"] is None
        assert set(summary["members"]) == {"limit"} | {f"eps_{e:.0e}" for e in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]}

    def test_multi_member_overlay(self, tmp_path):
        res = run_preset("bl-1to2", tmp_path, cells=20)
        assert (tmp_path / "plot.py").exists()
        for label in ("alpha_0.2", "alpha_0.5", "alpha_0.8"):
            assert (tmp_path / label / "snapshot_t0.500000.csv").exists()
            assert res.members[label].audit.ok

    def test_parallel_matches_serial(self, tmp_path):
        a = run_preset("lwr-1to2-central", tmp_path / "a", cells=20, jobs=1)
        b = run_preset("lwr-1to2-central", tmp_path / "b", cells=20, jobs=2)
        for label in a.members:
            for x, y in zip(a.members[label].trajectory.final.u, b.members[label].trajectory.final.u):
                assert np.array_equal(x, y)
