"""Alternating-weight chained ring: where does the quantum value beat the classical one?

    python3 demos/chained_window.py
"""

import numpy as np

from bellenergy.experiments import run_chained
from bellenergy.ti_analytic import chained_violation_window

for m in (2, 3, 4):
    lo, hi = chained_violation_window(m)
    print(f"m={m}: per-site violation for eps in ({lo:.6f}, {hi:.6f})")

rep = run_chained(2, 8, np.linspace(0, 3.5, 8))
print("\n  eps   beta_c       E0   violation")
for r in rep.rows:
    print(f"{r.eps:5.2f}  {r.beta_c:7.3f}  {r.e0:8.3f}  {r.violation:8.4f}")
