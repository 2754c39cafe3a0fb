"""A small slice of the random-coupling phase diagram.

The full 20 x 20 grid is ``bellenergy spinglass --csv phase.csv`` (several minutes).

    python3 demos/spin_glass_slice.py
"""

from bellenergy.experiments import SweepSpec, run_spin_glass

spec = SweepSpec(grid_a=(-1.0, 0.0, 1.0), grid_b=(0.2, 1.0), n=40, realizations=20, base_seed=1)
for p in run_spin_glass(spec):
    print(f"mu={p.a:+.1f} sigma={p.b:.1f}  |E0|/beta_c = {p.ratio:.4f} +- {p.stderr:.4f}")
