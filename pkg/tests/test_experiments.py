"""Config parsing, deterministic persistence, scenario orchestration, CLI."""

import json
import os

import numpy as np
import pytest

from tdgl_bcsbec.cli import main as cli_main
from tdgl_bcsbec.config import ConfigError, ExperimentConfig, InitialSpec, parse_config
from tdgl_bcsbec.diagnostics import CSV_COLUMNS
from tdgl_bcsbec.experiments import (
    build_forcing,
    galerkin_refinement,
    run_scenario,
    seeded_initial_data,
    temporal_order_study,
)
from tdgl_bcsbec.spectral import BoxDomain, norms

SMALL = """
[domain]
modes = 16
grid = 64
[integrator]
dt = 1e-3
T = {T}
sample_stride = {stride}
[run]
name = {name}
scenario = {scenario}
seed = 11
"""


def small_cfg(scenario="single-run", T=5.0, stride=50, name="t", extra=""):
    return parse_config(SMALL.format(scenario=scenario, T=T, stride=stride, name=name) + extra)


class TestConfig:
    def test_defaults_match_benchmark(self):
        cfg = ExperimentConfig()
        p = cfg.params
        assert (p.U, p.a, p.b, p.c, p.m, p.g) == (1.0, 0.0, 1.0, 1.0, 0.25, 1.0)
        assert (p.nu, p.mu, p.gamma, p.d_r, p.d_i) == (0.5, 0.25, 0.5, 0.3, 1.0)
        assert cfg.domain.modes == (64,) and cfg.domain.grid == (256,)
        assert cfg.domain.lengths == (np.pi,)
        assert cfg.integrator.dt == 1e-3 and cfg.integrator.T == 20.0
        assert not build_forcing(cfg).f.coeffs.any()

    def test_complex_and_mode_list_parsing(self):
        cfg = parse_config(
            "[params]\nd = -0.25+2i\ngamma = 0.75\n[forcing]\nf = 1:0.5+0i, 3:0.1-0.2i\nh = zero\n"
        )
        assert cfg.params.d_r == -0.25 and cfg.params.d_i == 2.0 and cfg.params.gamma == 0.75
        assert cfg.f_modes == {1: 0.5 + 0j, 3: 0.1 - 0.2j}
        assert cfg.h_modes == {}

    def test_named_field_errors(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("[params]\nbogus = 1\n")
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[nonsense]\nx = 1\n")
        with pytest.raises(ConfigError, match="scenario"):
            parse_config("[run]\nscenario = dance\n")
        with pytest.raises(ConfigError, match="dt"):
            parse_config("[integrator]\ndt = -1\n")
        with pytest.raises(ConfigError, match="complex"):
            parse_config("[params]\nd = banana\n")
        with pytest.raises(ConfigError, match="mode"):
            parse_config("[forcing]\nf = 99:1+0i\n")
        with pytest.raises(ConfigError, match="key = value"):
            parse_config("[params]\nU\n")

    def test_comments_and_echo(self):
        cfg = parse_config("# heading\n[params]\nU = 2.0  # inline\n; semicolon comment\n")
        assert cfg.params.U == 2.0
        echo = cfg.echo()
        assert echo["params"]["U"] == 2.0 and "integrator" in echo


class TestSeededData:
    def test_radius_zero_and_reproducibility(self):
        dom = BoxDomain(dim=1, lengths=np.pi, modes=16, grid=64)
        spec = InitialSpec("seeded-random", 0.0, 1.5)
        v, phi = seeded_initial_data(spec, dom, 1)
        assert not v.coeffs.any() and not phi.coeffs.any()
        spec = InitialSpec("seeded-random", 2.0, 1.5)
        v1, p1 = seeded_initial_data(spec, dom, 42)
        v2, p2 = seeded_initial_data(spec, dom, 42)
        assert np.array_equal(v1.coeffs, v2.coeffs) and np.array_equal(p1.coeffs, p2.coeffs)
        v3, _ = seeded_initial_data(spec, dom, 43)
        assert not np.array_equal(v1.coeffs, v3.coeffs)

    def test_pair_h1_radius(self):
        dom = BoxDomain(dim=1, lengths=np.pi, modes=16, grid=64)
        v, phi = seeded_initial_data(InitialSpec("seeded-random", 3.0, 1.5), dom, 5)
        pair = np.sqrt(norms(v).h1 ** 2 + norms(phi).h1 ** 2)
        assert abs(pair - 3.0) < 1e-12
        with pytest.raises(ValueError):
            seeded_initial_data(InitialSpec("seeded-random", -1.0, 1.5), dom, 5)

    def test_mode_list_truncation(self):
        dom = BoxDomain(dim=1, lengths=np.pi, modes=4, grid=16)
        spec = InitialSpec("mode-list", 1.0, 1.5, {1: 1 + 0j, 9: 5.0 + 0j}, {2: 1j})
        v, phi = seeded_initial_data(spec, dom, 0)
        assert v.coeffs[0] == 1.0 and phi.coeffs[1] == 1j
        assert np.sum(np.abs(v.coeffs)) == 1.0  # index 9 dropped at this level


class TestScenarios:
    def test_single_run_outputs_and_determinism(self, tmp_path):
        cfg = small_cfg(name="det")
        b1 = run_scenario(cfg, out=str(tmp_path / "a"))
        b2 = run_scenario(cfg, out=str(tmp_path / "b"))
        assert b1.passed and b2.passed
        s1 = (tmp_path / "a" / "det.series.csv").read_bytes()
        s2 = (tmp_path / "b" / "det.series.csv").read_bytes()
        assert s1 == s2  # bit-identical series on rerun
        header = s1.decode().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)
        first_row = s1.decode().splitlines()[1].split(",")
        assert len(first_row) == len(CSV_COLUMNS)
        # 17 significant digits round-trip
        for cell in first_row:
            assert float(cell) == float(f"{float(cell):.17g}")
        summary = json.loads((tmp_path / "a" / "det.summary.json").read_text())
        assert summary["passed"] and summary["w_t_stand_in"] is True
        assert summary["config"]["run"]["seed"] == 11

    def test_decomposition_decay_file(self, tmp_path):
        cfg = small_cfg(scenario="decomposition", name="dec")
        bundle = run_scenario(cfg, out=str(tmp_path))
        assert bundle.passed
        lines = (tmp_path / "dec.decay.csv").read_text().splitlines()
        assert lines[0] == "t,h1_phid,h1_phid_expected,h1_phid_stepped,h1_phic,h2_phic"
        t0 = [float(x) for x in lines[1].split(",")]
        assert t0[0] == 0.0 and abs(t0[1] - t0[2]) < 1e-12

    def test_galerkin_refinement_band_limited_trivial(self):
        # datum fully resolved at the coarsest level: linear levels are nested
        # exactly; the cubic cascade only adds a tiny tail
        extra = "[initial]\ntype = mode-list\nv = 1:0.5+0i, 2:0.25+0i\nphi = 1:0.3+0i\n"
        cfg_lin = small_cfg(scenario="convergence", extra=extra + "[params]\nb = 0\n")
        cert_lin = galerkin_refinement(cfg_lin, (8, 16, 32))
        assert cert_lin.passed
        assert all(d < 1e-12 for d in cert_lin.constants["diffs"])
        cert = galerkin_refinement(small_cfg(scenario="convergence", extra=extra), (8, 16, 32))
        assert cert.passed
        assert all(d < 1e-7 for d in cert.constants["diffs"])

    def test_galerkin_refinement_analytic_contracts(self):
        cert = galerkin_refinement(small_cfg(scenario="convergence"), (8, 16, 32))
        assert cert.passed
        assert all(r < 0.5 for r in cert.constants["ratios"])

    def test_galerkin_refinement_steep_data_below_1e6(self):
        # steep analytic spectra: one mode-doubling changes the T=1 state by < 1e-6
        cfg = small_cfg(scenario="convergence", extra="[scenario]\ndecay_rate = 1.0\n")
        cert = galerkin_refinement(cfg, (16, 32, 64))
        assert cert.passed
        assert cert.constants["diffs"][-1] < 1e-6

    def test_galerkin_refinement_rough_data_out_of_scope(self):
        cfg = small_cfg(scenario="convergence", extra="[scenario]\ndata = seeded-random\n")
        with pytest.raises(ValueError, match="out of scope"):
            galerkin_refinement(cfg, (8, 16))

    def test_temporal_order(self):
        cert = temporal_order_study(small_cfg(scenario="convergence"))
        assert cert.passed
        assert all(1.8 < o < 2.2 for o in cert.constants["orders"])

    def test_absorbing_ensemble_forced(self, tmp_path):
        cfg = small_cfg(
            scenario="absorbing-ensemble",
            T=12.0,
            name="ens",
            extra="[forcing]\nf = 1:0.4+0i\nh = 2:0.2-0.1i\n[scenario]\nmembers = 4\nradii = 1, 2\n",
        )
        bundle = run_scenario(cfg, out=str(tmp_path))
        assert bundle.passed
        assert bundle.data["R0_est"] > 0 and bundle.data["t_abs"] < 12.0
        assert (tmp_path / "ens.member3.series.csv").exists()

    def test_zero_data_zero_forcing_all_pass(self, tmp_path):
        cfg = small_cfg(name="null", extra="[initial]\ntype = zero\n")
        bundle = run_scenario(cfg, out=str(tmp_path))
        assert bundle.passed
        rows = (tmp_path / "null.series.csv").read_text().splitlines()[1:]
        for row in rows:
            assert all(float(cell) == 0.0 for cell in row.split(",")[1:])

    def test_invalid_params_rejected(self):
        cfg = small_cfg(extra="[params]\na = 5\n")
        with pytest.raises(ValueError, match="a\\*U"):
            run_scenario(cfg, out=".")


class TestCli:
    def write_cfg(self, path, name="clirun", scenario="single-run", T=2.0):
        path.write_text(SMALL.format(scenario=scenario, T=T, stride=20, name=name))
        return path

    def test_run_ok_and_outputs(self, tmp_path, capsys):
        cfgp = self.write_cfg(tmp_path / "a.cfg")
        code = cli_main(["run", str(cfgp), "--out", str(tmp_path / "out")])
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
        assert (tmp_path / "out" / "clirun.series.csv").exists()

    def test_seed_override_and_quiet(self, tmp_path, capsys):
        cfgp = self.write_cfg(tmp_path / "a.cfg")
        code = cli_main(["run", str(cfgp), "--out", str(tmp_path), "--seed", "99", "--quiet"])
        assert code == 0
        assert capsys.readouterr().out == ""
        summary = json.loads((tmp_path / "clirun.summary.json").read_text())
        assert summary["config"]["run"]["seed"] == 99

    def test_env_out_dir_fallback(self, tmp_path, monkeypatch):
        cfgp = self.write_cfg(tmp_path / "a.cfg")
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("TDGL_OUT_DIR", str(tmp_path / "envout"))
        assert cli_main(["run", str(cfgp), "--quiet"]) == 0
        assert (tmp_path / "envout" / "clirun.series.csv").exists()

    def test_config_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[params]\nbogus = 1\n")
        assert cli_main(["run", str(bad), "--quiet"]) == 2
        assert cli_main(["run", str(tmp_path / "missing.cfg"), "--quiet"]) == 2

    def test_certificate_failure_exit_1(self, tmp_path):
        # forced ensemble whose horizon is shorter than the fitted absorbing
        # time: the uniform-absorption certificate fails, exit code 1
        cfgp = tmp_path / "short.cfg"
        cfgp.write_text(
            "[domain]\nmodes = 16\ngrid = 64\n"
            "[forcing]\nf = 1:0.4+0i\nh = 2:0.2-0.1i\n"
            "[integrator]\ndt = 1e-3\nT = 6\nsample_stride = 100\n"
            "[run]\nname = short\nscenario = absorbing-ensemble\nseed = 7\n"
            "[scenario]\nmembers = 3\nradii = 1, 2, 4\n"
        )
        assert cli_main(["run", str(cfgp), "--quiet", "--out", str(tmp_path)]) == 1

    def test_blowup_exit_2(self, tmp_path):
        cfgp = tmp_path / "g.cfg"
        cfgp.write_text(
            SMALL.format(scenario="single-run", T=2.0, stride=20, name="g")
            + "[integrator]\nguard = 1e-6\ndt = 1e-3\nT = 2.0\n"
        )
        assert cli_main(["run", str(cfgp), "--quiet", "--out", str(tmp_path)]) == 2

    def test_suite(self, tmp_path):
        self.write_cfg(tmp_path / "one.cfg", name="one")
        self.write_cfg(tmp_path / "two.cfg", name="two", scenario="decomposition")
        assert cli_main(["suite", str(tmp_path), "--out", str(tmp_path / "out"), "--quiet"]) == 0
        assert (tmp_path / "out" / "two.decay.csv").exists()
        assert cli_main(["suite", str(tmp_path / "empty"), "--quiet"]) == 2
