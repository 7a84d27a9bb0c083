"""
A second-order ODE without iterations
=====================================

For y'' = f the 1D catalyst is an explicit tent, so the discrete solution
is a finite sum of tents: one per source node plus two boundary ramps.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from dicat.ode1d import consistent_reference, example_problem, example_solution, tent_superpose_solve

p = example_problem(500)
y = tent_superpose_solve(p)

# %%
# cos(x) exp(-x/10) is not zero at x = 50, yet the problem imposes y(50) = 0.
# The discrete solution therefore converges to cos(x) exp(-x/10) minus a small
# ramp, and the gap to the curve itself stops shrinking under refinement.
for N in (250, 500, 1000, 2000):
    q = example_problem(N)
    yq = tent_superpose_solve(q)
    keep = q.x <= 45
    print(f"N={N:5d}  vs cos*exp: {np.abs(yq - example_solution(q.x))[keep].max():.2e}"
          f"  vs consistent: {np.abs(yq - consistent_reference(q.x))[keep].max():.2e}")

plt.figure(figsize=(7, 3.5))
plt.plot(p.x, y, label="tent superposition")
plt.plot(p.x, example_solution(p.x), "--", label="cos(x) exp(-x/10)")
plt.legend()
plt.xlabel("x")
plt.tight_layout()
plt.savefig("ode_example.png", dpi=120)
