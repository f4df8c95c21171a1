"""Stable/compact splitting of the boson field phi = phi_d + phi_c.

The stable part solves an autonomous per-mode equation, so its H1 norm obeys
|phi_d(t)|_H1 = e^{-gamma t} |phi_0|_H1 exactly; the plot overlays the
measured norm on that envelope (they coincide to roundoff). The compact
remainder carries the coupling to v and stays bounded in H2, which is the
quantitative content behind precompactness of the phi component.

Run:  python3 demos/02_stable_compact_split.py
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tdgl_bcsbec.config import ExperimentConfig
from tdgl_bcsbec.decomposition import phi_c
from tdgl_bcsbec.dynamics import record_trajectory
from tdgl_bcsbec.experiments import build_forcing, initial_state

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

cfg = ExperimentConfig()
F = build_forcing(cfg)
_, traj = record_trajectory(
    initial_state(cfg), cfg.params, F, cfg.integrator.T, cfg.integrator.dt, sample_stride=cfg.integrator.sample_stride
)
split = phi_c(traj, cfg.params, F, dt=cfg.integrator.dt)

lam = cfg.domain.eigenvalues()
w1 = 1.0 + lam
h1_phid = np.sqrt(np.sum(w1[None, :] * np.abs(split.stable_phi) ** 2, axis=1))
h2_phic = np.sqrt(np.sum((w1 + lam * lam)[None, :] * np.abs(split.compact_phi) ** 2, axis=1))
envelope = h1_phid[0] * np.exp(-cfg.params.gamma * traj.times)

dev = np.max(np.abs(h1_phid - envelope)) / h1_phid[0]
print(f"max relative deviation from the exact decay law: {dev:.3e}")
print(f"dual-route gap of the compact part (H1): {split.info['route_gap_h1']:.3e}")
print(f"sup_t>=0.5 |phi_c|_H2 = {split.info['sup_h2_compact']:.4f}")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.semilogy(traj.times, h1_phid, label="|phi_d|_H1 (measured)")
ax1.semilogy(traj.times, envelope, "--", label="e^{-gamma t} |phi_0|_H1")
ax1.set_xlabel("t")
ax1.set_title(f"stable part: exact decay (dev {dev:.1e})")
ax1.legend()
ax2.plot(traj.times, h2_phic)
ax2.set_xlabel("t")
ax2.set_title("compact part: |phi_c|_H2 stays bounded")
fig.tight_layout()
path = os.path.join(OUT, "stable_compact_split.png")
fig.savefig(path, dpi=130)
print(f"wrote {path}")
