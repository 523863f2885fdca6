"""
Long-time limits and the pure/mixed trichotomy
==============================================

Run the double obstacle model until the state stops moving, then sort the
limit into one of three cases: all tumor, all healthy, or a mixed state in
which the nutrient balances the chemical potential (sigma = gamma mu).
"""

import os

from tumor_phasefield import grid as g
from tumor_phasefield.experiments import run_relaxation
from tumor_phasefield.io import load_config
from tumor_phasefield.steady_state import classify_omega

here = os.path.dirname(os.path.abspath(__file__))
base = load_config(os.path.join(here, "configs", "obstacle_long.txt"))

cases = {
    "noisy start": base.init,
    # plenty of nutrient and a positive potential push everything to u = 1
    "biased start": base.init.__class__(kind="constant", mean=0.9, mu0=2.0, sigma0=2.0),
}

for name, init in cases.items():
    run = base.replace(init=init)
    res = run_relaxation(run, write=False)
    cls = classify_omega(res.final, run.solver, 1e-5)
    mu_s = g.mean(run.grid, res.final.mu)
    print(f"{name:>13}: steady at t={res.records[-1].t:7.2f}  branch={cls.branch.value:<10}"
          f" mu_s={mu_s:+.4f}  |sigma_s - gamma mu_s|={cls.gap:.1e}"
          f"  u in [{res.final.u.min():+.3f}, {res.final.u.max():+.3f}]")
