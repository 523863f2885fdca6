"""
Moreau envelopes of the three potentials
========================================

The convex part of each potential is replaced by its Moreau envelope.  As
eps shrinks the envelope rises towards the original function and never
crosses it.
"""

import numpy as np

from tumor_phasefield.experiments import sweep_eps
from tumor_phasefield.potentials import PotentialSpec, beta_eps, resolvent

eps = [0.2, 0.1, 0.05, 0.025]
points = [0.0, 0.9, 1.0, 1.2, 2.0]

for kind in ("quartic", "logarithmic", "double_obstacle"):
    rep = sweep_eps(kind, eps, points)
    print(f"\n{kind}  (monotone={rep['monotone']}, below beta_hat={rep['bounded']})")
    print("    eps  " + "".join(f"{p:>11.2f}" for p in points))
    for e, row in zip(eps, rep["table"]):
        print(f"  {e:5.3f}  " + "".join(f"{v:11.5f}" for v in row))
    print("  limit  " + "".join(f"{v:11.5f}" for v in rep["beta_hat"]))

# For the obstacle the regularized derivative is a penalty on leaving [-1, 1].
spec = PotentialSpec("double_obstacle", 0.05)
r = np.array([0.5, 1.0, 1.1, 1.5])
print("\nobstacle, eps=0.05")
print("  r          ", r)
print("  resolvent  ", resolvent(spec, r))
print("  beta_eps   ", beta_eps(spec, r))
