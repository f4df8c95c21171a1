"""Stable/compact trajectory splittings and the contraction/smoothing certificates.

Two splittings are implemented.

Single trajectory: phi = phi_d + phi_c, where phi_d solves the undriven,
undamped-in-v phi equation (diagonal per mode, closed form) so that
|phi_d(t)|_H1 = e^{-gamma t} |phi_0|_H1 holds as an exact identity, and the
remainder phi_c carries the v-coupling and forcing and stays bounded in H2.

Trajectory differences: z1 - z2 = (v_d, phi_d) + (v_c, phi_c), where the
stable part solves the triangular linear system (phi_d autonomous, v_d driven
by phi_d through the g-coupling) with the initial difference as data, and the
compact part is the remainder. At a time t* where the stable part has
contracted below lambda < 1/2 while the compact part stays H2-bounded by
Lambda times the initial H1 gap, the exponential-attractor hypotheses are
certified.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import Certificate
from .dynamics import (
    SystemState,
    Trajectory,
    _etd_step,
    _forcing_vector,
    _pair_nonlinearity,
    _phi_tables,
    expm2,
    record_trajectory,
    stable_blocks,
)
from .model import Forcing, PhysParams, require_admissible
from .spectral import BoxDomain, SpectralField, norms


def _phi_stable_rates(p: PhysParams, lam: np.ndarray) -> np.ndarray:
    """Per-mode decay factor exponents of the stable phi dynamics."""
    return -(p.gamma + 1j * (p.phi_rotation + lam / (4.0 * p.m)))


def phi_d_exact(phi0: SpectralField, p: PhysParams, t: float) -> SpectralField:
    """Closed-form stable part: every mode scaled by e^{-(gamma + i Omega_j) t}."""
    if t < 0:
        raise ValueError("t must be >= 0")
    require_admissible(p)
    lam = phi0.domain.eigenvalues()
    return SpectralField(phi0.domain, phi0.coeffs * np.exp(_phi_stable_rates(p, lam) * t))


def phi_d_stepped(phi0: SpectralField, p: PhysParams, times, dt: float) -> np.ndarray:
    """Stable part advanced by repeated one-step factors on the dt grid.

    Sample times must sit on the grid; returns the (n_times, n_modes) samples.
    This is the time-stepped counterpart of phi_d_exact used to bound the
    integrator's own drift on the stable equation.
    """
    require_admissible(p)
    lam = phi0.domain.eigenvalues()
    one_step = np.exp(_phi_stable_rates(p, lam) * dt)
    times = np.asarray(times, dtype=float)
    out = np.empty((len(times), phi0.domain.n_modes), dtype=np.complex128)
    cur = phi0.coeffs.copy()
    steps_done = 0
    for i, t in enumerate(times):
        target = round(t / dt)
        if abs(target * dt - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"sample time {t} is not on the dt={dt} grid")
        while steps_done < target:
            cur = cur * one_step
            steps_done += 1
        out[i] = cur
    return out


@dataclass
class SplitTrajectory:
    """Stable + compact parts sampled on the source trajectory's time grid."""

    domain: BoxDomain
    times: np.ndarray
    stable_phi: np.ndarray
    compact_phi: np.ndarray
    stable_v: np.ndarray | None = None
    compact_v: np.ndarray | None = None
    source: Trajectory | None = None
    info: dict = field(default_factory=dict)

    def stable_phi_field(self, i: int) -> SpectralField:
        return SpectralField(self.domain, self.stable_phi[i])

    def compact_phi_field(self, i: int) -> SpectralField:
        return SpectralField(self.domain, self.compact_phi[i])


def _pair_h1(domain: BoxDomain, z: np.ndarray) -> float:
    lam = domain.eigenvalues()
    w = 1.0 + lam
    return float(np.sqrt(np.sum(w[:, None] * np.abs(z) ** 2)))


def _pair_h2(domain: BoxDomain, z: np.ndarray) -> float:
    lam = domain.eigenvalues()
    w = 1.0 + lam + lam * lam
    return float(np.sqrt(np.sum(w[:, None] * np.abs(z) ** 2)))


def phi_c(
    traj: Trajectory,
    p: PhysParams,
    F: Forcing,
    dt: float,
    route_tol: float = 1e-8,
    burnin: float = 0.5,
    guard: float = 1e6,
) -> SplitTrajectory:
    """Compact part of phi, computed by two routes and cross-checked.

    Route (i): phi - phi_d_exact. Route (ii): direct integration of the
    driven compact equation, carried as a third component of an augmented
    per-mode system alongside (v, phi) with the same exponential integrator.
    Disagreement above route_tol in H1 flags integrator inconsistency.
    """
    require_admissible(p)
    domain = traj.domain
    lam = domain.eigenvalues()
    times = traj.times
    if abs(times[0]) > 1e-12:
        raise ValueError("phi_c expects a trajectory sampled from t = 0")

    # route (i): subtract the closed-form stable part
    rates = _phi_stable_rates(p, lam)
    stable = traj.phi[0][None, :] * np.exp(rates[None, :] * times[:, None])
    compact_i = traj.phi - stable

    # route (ii): augmented (v, phi, phi_c) system, phi_c row driven by v and h
    from .dynamics import linear_blocks  # local import keeps module init light

    A2 = linear_blocks(p, lam)
    n = domain.n_modes
    A3 = np.zeros((n, 3, 3), dtype=np.complex128)
    A3[:, :2, :2] = A2
    A3[:, 2, 0] = A2[:, 1, 0]
    A3[:, 2, 2] = A2[:, 1, 1]
    F3 = np.zeros((n, 3), dtype=np.complex128)
    F3[:, 0] = p.inv_d * F.f.coeffs
    F3[:, 1] = F.h.coeffs
    F3[:, 2] = F.h.coeffs
    pair_N = _pair_nonlinearity(domain, p)

    def N3(z, t):
        out = np.zeros_like(z)
        out[:, :2] = pair_N(z[:, :2], t)
        return out

    z = np.zeros((n, 3), dtype=np.complex128)
    z[:, 0] = traj.v[0]
    z[:, 1] = traj.phi[0]
    tables = _phi_tables(A3, dt)
    compact_ii = np.empty_like(compact_i)
    compact_ii[0] = 0.0
    stride = max(1, round((times[1] - times[0]) / dt)) if len(times) > 1 else 1
    idx = 1
    step_count = round(times[-1] / dt)
    if abs(step_count * dt - times[-1]) > 1e-9 * max(1.0, times[-1]):
        raise ValueError("trajectory horizon is not on the dt grid")
    for i in range(1, step_count + 1):
        z = _etd_step(z, (i - 1) * dt, dt, tables, N3, F3)
        if idx < len(times) and abs(i * dt - times[idx]) <= 1e-9 * max(1.0, times[idx]):
            compact_ii[idx] = z[:, 2]
            idx += 1
    if idx != len(times):
        raise ValueError("sample times do not line up with the dt grid")

    gap = max(
        float(np.sqrt(np.sum((1.0 + lam) * np.abs(compact_i[i] - compact_ii[i]) ** 2)))
        for i in range(len(times))
    )
    if gap > route_tol:
        raise ValueError(f"compact-part routes disagree by {gap:.3e} in H1 (tol {route_tol:.1e})")

    h2c = np.sqrt(np.sum((1.0 + lam + lam * lam)[None, :] * np.abs(compact_i) ** 2, axis=1))
    tail = h2c[times >= burnin]
    split = SplitTrajectory(
        domain=domain,
        times=times,
        stable_phi=stable,
        compact_phi=compact_i,
        source=traj,
        info={
            "route_gap_h1": gap,
            "sup_h2_compact": float(np.max(tail)) if len(tail) else 0.0,
            "burnin": burnin,
        },
    )
    return split


def difference_split(z1: Trajectory, z2: Trajectory, p: PhysParams) -> SplitTrajectory:
    """Split the difference of two trajectories into stable + compact parts.

    The stable part solves the triangular linear system per mode with the
    initial difference as data (closed form); the compact part is the pointwise
    remainder and must vanish at t = 0.
    """
    require_admissible(p)
    if z1.domain.modes != z2.domain.modes or z1.domain.lengths != z2.domain.lengths:
        raise ValueError("trajectories live on different domains")
    if len(z1.times) != len(z2.times) or np.max(np.abs(z1.times - z2.times)) > 1e-12:
        raise ValueError("trajectories are sampled on different time grids")
    domain = z1.domain
    lam = domain.eigenvalues()
    B = stable_blocks(p, lam)
    d0 = np.stack([z1.v[0] - z2.v[0], z1.phi[0] - z2.phi[0]], axis=1)
    m = len(z1.times)
    stable = np.empty((m, domain.n_modes, 2), dtype=np.complex128)
    t0 = z1.times[0]
    for i, t in enumerate(z1.times):
        stable[i] = np.einsum("jab,jb->ja", expm2((t - t0) * B), d0)
    diff_v = z1.v - z2.v
    diff_phi = z1.phi - z2.phi
    compact_v = diff_v - stable[:, :, 0]
    compact_phi = diff_phi - stable[:, :, 1]
    z0_gap = _pair_h1(domain, np.stack([compact_v[0], compact_phi[0]], axis=1))
    if z0_gap > 1e-9 * (1.0 + _pair_h1(domain, d0)):
        raise ValueError(f"compact part does not vanish at t=0 (H1 norm {z0_gap:.3e})")
    return SplitTrajectory(
        domain=domain,
        times=z1.times,
        stable_phi=stable[:, :, 1],
        compact_phi=compact_phi,
        stable_v=stable[:, :, 0],
        compact_v=compact_v,
        info={"initial_gap_h1": _pair_h1(domain, d0)},
    )


@dataclass(frozen=True)
class ContractionReport:
    """Verdict data for the two-part contraction/smoothing condition."""

    t_star: float
    lam: float
    Lambda: float
    pairs: int
    feasible: bool
    lambda_target: float
    grid_stride: float
    lambda_curve: tuple = ()

    def __post_init__(self):
        if self.t_star < 0 or self.lam < 0 or self.Lambda < 0:
            raise ValueError("contraction report entries must be nonnegative")

    def to_certificate(self) -> Certificate:
        return Certificate(
            name="contraction + smoothing (stable part below lambda, compact part H2-bounded)",
            constants={
                "t_star": self.t_star,
                "lambda": self.lam,
                "Lambda": self.Lambda,
                "lambda_target": self.lambda_target,
                "grid_stride": self.grid_stride,
            },
            tolerance=0.5,
            passed=self.feasible and self.lam < 0.5 and np.isfinite(self.Lambda),
            evidence={"pairs": self.pairs},
        )


def stable_contraction_curve(p: PhysParams, domain: BoxDomain, deltas, t_grid) -> np.ndarray:
    """max over pairs of |e^{tB} dz0|_{H1xH1} / |dz0|_{H1xH1} on the t grid."""
    lam = domain.eigenvalues()
    B = stable_blocks(p, lam)
    t_grid = np.asarray(t_grid, dtype=float)
    curve = np.zeros(len(t_grid))
    norms0 = [_pair_h1(domain, d0) for d0 in deltas]
    for i, t in enumerate(t_grid):
        E = expm2(t * B)
        worst = 0.0
        for d0, n0 in zip(deltas, norms0):
            if n0 == 0.0:
                continue  # degenerate pair contributes ratio 0
            worst = max(worst, _pair_h1(domain, np.einsum("jab,jb->ja", E, d0)) / n0)
        curve[i] = worst
    return curve


def contraction_certificate(
    pairs,
    p: PhysParams,
    F: Forcing,
    dt: float,
    lambda_target: float = 0.25,
    t_max: float = 6.0,
    grid_stride: float = 0.25,
    guard: float = 1e6,
) -> ContractionReport:
    """Certify the contraction pair (lambda, Lambda) over seeded state pairs.

    pairs: iterable of (SystemState, SystemState) drawn after burn-in. The
    stable-part contraction factor is evaluated in closed form on the t grid;
    the smoothing constant integrates both members to the certified t* and
    measures the compact remainder in H2 against the initial H1 gap.
    """
    if not 0.0 < lambda_target < 0.5:
        raise ValueError("lambda_target must lie in (0, 1/2)")
    require_admissible(p)
    pairs = list(pairs)
    domain = pairs[0][0].domain
    deltas = [a.as_array() - b.as_array() for a, b in pairs]
    live = [d for d in deltas if _pair_h1(domain, d) > 0.0]
    t_grid = np.arange(1, int(round(t_max / grid_stride)) + 1) * grid_stride
    curve = stable_contraction_curve(p, domain, live, t_grid)
    hits = np.nonzero(curve <= lambda_target)[0]
    feasible = len(hits) > 0
    i_star = hits[0] if feasible else int(np.argmin(curve))
    t_star = float(t_grid[i_star])
    lam_star = float(curve[i_star])

    lam = domain.eigenvalues()
    B = stable_blocks(p, lam)
    E_star = expm2(t_star * B)

    def pair_ratio(args):
        (s1, s2), d0 = args
        n0 = _pair_h1(domain, d0)
        if n0 == 0.0:
            return 0.0
        end1 = _integrate_to(s1, p, F, t_star, dt, guard)
        end2 = _integrate_to(s2, p, F, t_star, dt, guard)
        compact = (end1.as_array() - end2.as_array()) - np.einsum("jab,jb->ja", E_star, d0)
        return _pair_h2(domain, compact) / n0

    # pairs are independent; evaluate them on a small thread pool
    workers = min(len(pairs), os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ratios = list(pool.map(pair_ratio, zip(pairs, deltas)))
    else:
        ratios = [pair_ratio(args) for args in zip(pairs, deltas)]
    Lambda = max(ratios, default=0.0)
    return ContractionReport(
        t_star=t_star,
        lam=lam_star,
        Lambda=Lambda,
        pairs=len(live),
        feasible=feasible,
        lambda_target=lambda_target,
        grid_stride=grid_stride,
        lambda_curve=tuple(np.round(curve, 15)),
    )


def _integrate_to(s: SystemState, p, F, T, dt, guard):
    from .dynamics import integrate

    return integrate(s, p, F, T, dt, guard=guard)


def lipschitz_estimate(
    z01: SystemState,
    z02: SystemState,
    p: PhysParams,
    F: Forcing,
    T: float,
    dt: float,
    sample_stride: int = 50,
    guard: float = 1e6,
) -> Certificate:
    """Fit the continuous-dependence envelope D(t) <= L1 e^{L2 t} D(0).

    D(t) = |v1-v2|_H1^2 + |phi1-phi2|_H1^2 + int_0^t |v1t-v2t|^2, with the
    time integral accumulated by trapezoid over the exact rhs differences.
    """
    require_admissible(p)
    _, tr1 = record_trajectory(z01, p, F, T, dt, sample_stride=sample_stride, guard=guard)
    _, tr2 = record_trajectory(z02, p, F, T, dt, sample_stride=sample_stride, guard=guard)
    domain = tr1.domain
    lam = domain.eigenvalues()
    w1 = 1.0 + lam
    times = tr1.times
    gap_sq = np.sum(w1[None, :] * (np.abs(tr1.v - tr2.v) ** 2 + np.abs(tr1.phi - tr2.phi) ** 2), axis=1)
    dvt_sq = np.sum(np.abs(tr1.dv - tr2.dv) ** 2, axis=1)
    cumint = np.concatenate([[0.0], np.cumsum(0.5 * (dvt_sq[1:] + dvt_sq[:-1]) * np.diff(times))])
    D = gap_sq + cumint
    d0 = D[0]
    if d0 == 0.0:
        return Certificate(
            name="continuous dependence (D(t) <= L1 e^{L2 t} D(0))",
            constants={"L1": 1.0, "L2": 0.0, "D0": 0.0, "DT": float(D[-1])},
            tolerance=0.0,
            passed=bool(np.max(D) == 0.0),
            evidence={"samples": len(times), "note": "identical initial data"},
        )
    y = np.log(np.maximum(D, 1e-300) / d0)
    pos = times > 0
    L2 = max(0.0, float(np.max(y[pos] / times[pos])))
    L1 = float(np.exp(max(0.0, float(np.max(y - L2 * times)))))
    margin = float(np.max(D - L1 * np.exp(L2 * times) * d0))
    return Certificate(
        name="continuous dependence (D(t) <= L1 e^{L2 t} D(0))",
        constants={"L1": L1, "L2": L2, "D0": float(d0), "DT": float(D[-1]), "growth_ratio": float(D[-1] / d0)},
        tolerance=1e-9,
        passed=L1 >= 0 and L2 >= 0 and margin <= 1e-9 * max(1.0, float(np.max(D))),
        evidence={"samples": len(times), "worst_margin": margin},
    )


def holder_time_estimate(traj: Trajectory, window: tuple[float, float] | None = None) -> Certificate:
    """Half-Hoelder quotient sup |z(t)-z(tau)|_{H1xH1} / sqrt(t-tau) over sampled pairs.

    Reported, not thresholded: the analysis asserts finiteness but never
    quantifies the constant.
    """
    domain = traj.domain
    times = traj.times
    if window is not None:
        mask = (times >= window[0] - 1e-12) & (times <= window[1] + 1e-12)
        times = times[mask]
        vs = traj.v[mask]
        phis = traj.phi[mask]
    else:
        vs, phis = traj.v, traj.phi
    if len(times) < 2:
        raise ValueError("need at least two samples in the window")
    lam = domain.eigenvalues()
    w1 = 1.0 + lam
    sup = 0.0
    for i in range(len(times) - 1):
        dv = vs[i + 1 :] - vs[i]
        dphi = phis[i + 1 :] - phis[i]
        gaps = np.sqrt(np.sum(w1[None, :] * (np.abs(dv) ** 2 + np.abs(dphi) ** 2), axis=1))
        dts = times[i + 1 :] - times[i]
        sup = max(sup, float(np.max(gaps / np.sqrt(dts))))
    return Certificate(
        name="time Hoelder-1/2 quotient (reported)",
        constants={"H_sup": sup, "t_lo": float(times[0]), "t_hi": float(times[-1])},
        tolerance=0.0,
        passed=bool(np.isfinite(sup)),
        evidence={"samples": len(times)},
    )
