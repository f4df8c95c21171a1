"""Acceptance gate: one test per acceptance criterion, at its stated tolerance.

Run with `pytest -s tests/test_acceptance.py` to see one PASS line per
criterion. Budgets are wall-clock seconds where the criterion states one;
criteria sharing the default benchmark run are each charged its full cost.
"""

import time

import numpy as np
import pytest

from tdgl_bcsbec.config import ExperimentConfig, parse_config
from tdgl_bcsbec.decomposition import contraction_certificate, phi_d_exact, phi_d_stepped
from tdgl_bcsbec.diagnostics import absorbing_fit, h2_monitor, integral_monitor
from tdgl_bcsbec.dynamics import SystemState, expm2, integrate, linear_blocks, record_trajectory
from tdgl_bcsbec.experiments import (
    _records_along,
    build_forcing,
    galerkin_refinement,
    initial_state,
    run_absorbing_ensemble,
    run_two_trajectory,
    temporal_order_study,
)
from tdgl_bcsbec.model import Forcing, PhysParams
from tdgl_bcsbec.spectral import SpectralField, norms


def report(tag: str, detail: str) -> None:
    print(f"\nACCEPTANCE {tag}: PASS ({detail})")


@pytest.fixture(scope="module")
def default_cfg():
    return ExperimentConfig()  # benchmark defaults: l=64, N=256, dt=1e-3, T=20, f=h=0


@pytest.fixture(scope="module")
def default_run(default_cfg):
    """The default benchmark trajectory with full diagnostics (shared, timed)."""
    t0 = time.perf_counter()
    cfg = default_cfg
    F = build_forcing(cfg)
    s0 = initial_state(cfg)
    _, traj = record_trajectory(
        s0, cfg.params, F, cfg.integrator.T, cfg.integrator.dt, sample_stride=cfg.integrator.sample_stride
    )
    records = _records_along(traj, cfg.params, F, cfg.weights)
    return {"traj": traj, "records": records, "wall": time.perf_counter() - t0, "F": F}


def test_stable_part_decay_equality(default_cfg):
    t0 = time.perf_counter()
    cfg = default_cfg
    p = cfg.params
    phi0 = initial_state(cfg).phi
    h1_0 = norms(phi0).h1
    times = np.arange(0, 401) * 0.05  # the default sampling of [0, 20]
    worst_closed = 0.0
    for t in times:
        h1_t = norms(phi_d_exact(phi0, p, float(t))).h1
        worst_closed = max(worst_closed, abs(h1_t - np.exp(-p.gamma * t) * h1_0) / h1_0)
    stepped = phi_d_stepped(phi0, p, times, dt=1e-3)
    lam = cfg.domain.eigenvalues()
    h1_step = np.sqrt(np.sum((1 + lam)[None, :] * np.abs(stepped) ** 2, axis=1))
    worst_stepped = float(np.max(np.abs(h1_step - np.exp(-p.gamma * times) * h1_0)) / h1_0)
    wall = time.perf_counter() - t0
    assert worst_closed < 1e-10, worst_closed
    assert worst_stepped < 1e-6, worst_stepped
    assert wall < 10.0
    report(
        "stable-part decay (closed 1e-10 / stepped 1e-6)",
        f"closed {worst_closed:.2e}, stepped {worst_stepped:.2e}, {wall:.2f}s",
    )


def test_identity_residuals_default_run(default_run):
    records = default_run["records"]
    worst = max(max(r.res_phi_l2, r.res_phi_h1, r.res_v_l2) / (1.0 + r.e2) for r in records)
    wall = default_run["wall"]
    assert worst < 1e-9, worst
    assert wall < 30.0
    report("identity residuals < 1e-9 (1+E2)", f"worst {worst:.2e} over {len(records)} samples, {wall:.2f}s")


def test_dissipation_and_absorbing(default_run):
    t0 = time.perf_counter()
    # unforced: E1 strictly decreasing, fitted C5 > 0, violation margin < 1e-8
    records = default_run["records"]
    e1s = np.array([r.e1 for r in records])
    assert np.all(np.diff(e1s) < 0)
    fit = absorbing_fit(
        [r.t for r in records], e1s, [r.de1 for r in records], [r.e2 for r in records], tolerance=1e-8
    )
    assert fit.passed and fit.constants["C5"] > 0
    assert fit.evidence["worst_margin"] <= 1e-8 * (1 + float(np.max(e1s)))

    # forced: 8-member ensemble from H1 radii {1, 2, 4} absorbed into R0_est
    cfg = parse_config(
        "[forcing]\nf = 1:0.4+0i\nh = 2:0.2-0.1i\n"
        "[integrator]\nT = 15\nsample_stride = 50\n"
        "[run]\nscenario = absorbing-ensemble\nseed = 1234\n"
        "[scenario]\nmembers = 8\nradii = 1, 2, 4\n"
    )
    bundle = run_absorbing_ensemble(cfg)
    absorb = [c for c in bundle.certificates if c.name.startswith("uniform absorption")][0]
    wall = default_run["wall"] + (time.perf_counter() - t0)
    assert absorb.passed, absorb.constants
    assert wall < 60.0
    report(
        "dissipation/absorbing (decay + uniform ensemble absorption)",
        f"C5 {fit.constants['C5']:.3f}, R0_est {absorb.constants['R0_est']:.3f}, "
        f"t_abs {absorb.constants['t_abs']:.2f}, {wall:.2f}s",
    )


def test_linear_oracle_equivalence(default_cfg):
    cfg = default_cfg
    p = PhysParams(b=0.0)
    s0 = initial_state(cfg)
    out = integrate(s0, p, Forcing.zero(cfg.domain), 5.0, 1e-3)
    blocks = linear_blocks(p, cfg.domain.eigenvalues())
    z_exact = np.einsum("jab,jb->ja", expm2(5.0 * blocks), s0.as_array())
    lam = cfg.domain.eigenvalues()
    err = float(np.sqrt(np.sum((1 + lam)[:, None] * np.abs(out.as_array() - z_exact) ** 2)))
    assert err < 1e-10, err
    report("linear-oracle equivalence at T=5 (b=0)", f"H1 error {err:.2e}")


def test_continuous_dependence(default_cfg):
    cfg = parse_config(
        "[integrator]\nT = 2\nsample_stride = 20\n[run]\nscenario = two-trajectory\nseed = 1234\n"
        "[scenario]\ngaps = 1e-3, 1e-4, 1e-5\nt_pair = 2.0\n"
    )
    bundle = run_two_trajectory(cfg)
    fits = [c for c in bundle.certificates if c.name.startswith("continuous dependence")]
    assert len(fits) == 3
    for c in fits:
        assert c.passed and c.constants["L1"] >= 0 and c.constants["L2"] >= 0
    lin = [c for c in bundle.certificates if c.name.startswith("first-order gap linearity")][0]
    assert lin.passed and lin.constants["spread"] < 0.05
    report(
        "continuous dependence (feasible L1, L2; gap ratios within 5%)",
        f"spread {lin.constants['spread']:.2e}, ratios {['%.5f' % r for r in lin.constants['ratios']]}",
    )


def test_contraction_certificate(default_cfg):
    cfg = default_cfg
    p, F = cfg.params, build_forcing(cfg)
    lam = cfg.domain.eigenvalues()
    bases = []
    for k in range(8):
        s0 = initial_state(cfg, seed=cfg.seed + k, radius=(1.0, 2.0, 4.0)[k % 3])
        bases.append(integrate(s0, p, F, 5.0, 2e-3))  # burn-in toward the regular set
    pairs = []
    for k, base in enumerate(bases):
        rng = np.random.default_rng(cfg.seed + 5000 + k)
        dphi = lam**-1.5 * np.exp(2j * np.pi * rng.random(cfg.domain.n_modes))
        dphi *= 1e-2 / np.sqrt(np.sum((1 + lam) * np.abs(dphi) ** 2))
        pairs.append((base, SystemState(base.v, SpectralField(cfg.domain, base.phi.coeffs - dphi), base.t)))
    report_c = contraction_certificate(pairs, p, F, dt=1e-3, lambda_target=0.25, t_max=6.0, grid_stride=0.25)
    assert report_c.feasible
    assert abs(report_c.t_star - np.log(4.0) / p.gamma) <= report_c.grid_stride, report_c.t_star
    assert report_c.lam < 0.5
    assert np.isfinite(report_c.Lambda) and report_c.pairs == 8
    report(
        "contraction certificate (t* ~ ln4/gamma, lambda < 1/2, Lambda finite)",
        f"t* {report_c.t_star:.2f} vs {np.log(4.0) / p.gamma:.3f}, lambda {report_c.lam:.4f}, "
        f"Lambda {report_c.Lambda:.3f} over {report_c.pairs} pairs",
    )


def test_galerkin_convergence_and_temporal_order(default_cfg):
    cfg = parse_config("[run]\nscenario = convergence\nseed = 1234\n")
    cert = galerkin_refinement(cfg, (8, 16, 32, 64))
    assert cert.passed
    assert all(r < 0.5 for r in cert.constants["ratios"]), cert.constants
    order = temporal_order_study(cfg)
    assert order.passed
    assert all(1.8 <= o <= 2.2 for o in order.constants["orders"]), order.constants
    report(
        "Galerkin self-convergence + temporal order",
        f"ratios {['%.2e' % r for r in cert.constants['ratios']]}, "
        f"orders {['%.3f' % o for o in order.constants['orders']]}",
    )


def test_h2_and_integral_bound(default_run):
    records = default_run["records"]
    times = np.array([r.t for r in records])
    h2c = h2_monitor(times, [r.h2_v for r in records], burnins=(1.0,))
    assert h2c.passed and np.isfinite(h2c.constants["sup_r_1"])
    ic = integral_monitor(
        times,
        [r.nvt_h1 for r in records],
        [r.nphit for r in records],
        window=1.0,
        stab_after=5.0,
        stab_tol=0.2,
    )
    assert ic.passed
    assert ic.constants["stab_max_rel_change"] < 0.2
    assert np.isfinite(ic.constants["window_max"])
    report(
        "H2 regularization + integral bound",
        f"sup_t>=1 |v|_H2 = {h2c.constants['sup_r_1']:.4f}, window max {ic.constants['window_max']:.4f}, "
        f"stab change {ic.constants['stab_max_rel_change']:.3f}",
    )
