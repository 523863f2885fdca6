"""
Sensitivity to the initial data
===============================

Perturb u0 by delta times a fixed unit mode and measure how far the state
at t_end moves.  For a Lipschitz solution map the amplification
K = distance / delta settles to a constant as delta shrinks.
"""

import os

from tumor_phasefield.experiments import probe_continuous_dependence
from tumor_phasefield.io import load_config

here = os.path.dirname(os.path.abspath(__file__))
run = load_config(os.path.join(here, "configs", "standard.txt"))

rep = probe_continuous_dependence(run, [1e-2, 1e-3, 1e-4, 1e-5])
for d, dist, k in zip(rep["deltas"], rep["distances"], rep["K"]):
    print(f"delta={d:.0e}  distance={dist:.4e}  K={k:.6f}")
print("successive K ratios:", ", ".join(f"{r:.4f}" for r in rep["ratios"]))
