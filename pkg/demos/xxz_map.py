"""Classical regions and quantum values of the elegant XXZ chain at n = 8.

    python3 demos/xxz_map.py
"""

from bellenergy.experiments import run_xxz_elegant

for p in run_xxz_elegant(8, (0.0, 1.0, 3.0), (0.0, 0.5, 2.0)):
    print(f"delta={p.a:4.1f} eps={p.b:4.1f} region={p.extra['region']:>4}  "
          f"beta_c={p.beta_c:7.2f}  E0={p.e0:9.4f}  violation={p.violation:8.4f}")
