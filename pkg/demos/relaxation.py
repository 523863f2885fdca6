"""
Relaxation of a planar interface
================================

Integrate the standard scenario for one time unit and look at the two
quantities the scheme is built to respect: the mass ``int(alpha mu + u +
sigma)`` and the Lyapunov energy.
"""

import os

from tumor_phasefield.experiments import energy_violations, run_relaxation
from tumor_phasefield.io import load_config

here = os.path.dirname(os.path.abspath(__file__))
run = load_config(os.path.join(here, "configs", "standard.txt"))
run = run.replace(output_dir=os.path.join(here, "runs", "standard"))

# The run directory gets config.txt, timeseries.csv, snapshots/ and final.json.
result = run_relaxation(run)
first, last = result.records[0], result.records[-1]

print(f"{result.steps} steps, written to {result.output_dir}")
print(f"mass      {first.mass:.15f} -> {last.mass:.15f}")
print(f"energy    {first.energy_gamma:.6f} -> {last.energy_gamma:.6f}")

# Energy increases beyond round-off would show up here.
bad = energy_violations(result.records, run.solver.dt)
print(f"energy increases: {len(bad)} of {result.steps} steps")

# Newton work per step stays small because each step starts from the last one.
iters = [r.newton_iters for r in result.records[1:]]
print(f"Newton iterations per step: min {min(iters)}, max {max(iters)}")
