"""A scalar l0 instance where the dual is not tight.

For v = 0.5 and lam = 1 the dual optimum sits at mu = 1/8, where the
Lagrangian has two minimizers (0 and v/mu = 4), neither feasible with
zero slack.  The solver reports the gap and recovers the best feasible
primal point among the tied minimizers and their normalizations.
"""

import numpy as np

from onebitcs import Penalty, dual_bisection, objective, solve_l0

v = np.array([0.5])
pen = Penalty.l0(1.0)

sol = solve_l0(v, 1.0)
print(f"walk:      mu = {sol.mu:.12f}  status = {sol.status.value}  gap = {sol.gap:.6f}")
ref = dual_bisection(pen, v)
print(f"bisection: mu = {ref.mu:.12f}")

# the primal candidates: 0 and the unit vector along v
for x in (np.zeros(1), np.ones(1)):
    print(f"F({x[0]:.0f}) = {objective(pen, v, x):+.4f}")
print(f"returned x = {sol.x}")
