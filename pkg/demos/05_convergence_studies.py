"""Self-convergence in the mode count and temporal order of the stepper.

Left: one analytic datum (exponentially decaying spectrum) is projected onto
levels l = 8, 16, 32, 64 and integrated to T = 1; consecutive-level H1
differences shrink far faster than the required factor 1/2 per doubling.
Right: errors against a manufactured exactly-known solution under dt-halving
land on the second-order reference slope.

Run:  python3 demos/05_convergence_studies.py
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tdgl_bcsbec.config import parse_config
from tdgl_bcsbec.experiments import galerkin_refinement, temporal_order_study

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

cfg = parse_config("[run]\nscenario = convergence\nseed = 1234\n")
levels = (8, 16, 32, 64)
ref = galerkin_refinement(cfg, levels)
order = temporal_order_study(cfg)

print("level differences:", ["%.3e" % d for d in ref.constants["diffs"]])
print("contraction ratios per doubling:", ["%.3e" % r for r in ref.constants["ratios"]])
print("temporal errors:", ["%.3e" % e for e in order.constants["errors"]])
print("observed orders:", ["%.3f" % o for o in order.constants["orders"]])

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.semilogy(levels[1:], ref.constants["diffs"], "o-")
ax1.set_xlabel("mode count l")
ax1.set_ylabel("H1 difference to previous level at T=1")
ax1.set_title("Galerkin self-convergence")
dts = np.array(order.constants["dts"])
errs = np.array(order.constants["errors"])
ax2.loglog(dts, errs, "o-", label="measured")
ax2.loglog(dts, errs[0] * (dts / dts[0]) ** 2, "--", label="slope 2")
ax2.set_xlabel("dt")
ax2.set_ylabel("H1 error at T=1")
ax2.set_title("manufactured-solution temporal order")
ax2.legend()
fig.tight_layout()
path = os.path.join(OUT, "convergence_studies.png")
fig.savefig(path, dpi=130)
print(f"wrote {path}")
