"""
Boundary problems by superposition
==================================

With a block in hand, a Dirichlet problem becomes a sequence of block
translations at the boundary.  Here: constant boundary (S1) and one hot
side (S2), compared with plain Gauss-Seidel at equal accuracy.
"""

import time

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from dicat import bench
from dicat.catalyst import precompute_catalyst_2d
from dicat.export import export_field
from dicat.problems import make_problem
from dicat.solver import SolveConfig, solve

size, target = 100, 0.1
t = time.perf_counter()
block = precompute_catalyst_2d(size - 1, size - 1, 1e-4, "polar")
print(f"pre-computation {time.perf_counter() - t:.1f} s (paid once)")
bench.warm_up()

fields = {}
for name in ("s1", "s2"):
    problem = make_problem(name, size)
    rows = {s: bench.BenchRow(name, size, s, target) for s in ("gs", "di")}
    bench.run_one(problem, "gs", target, rows["gs"])
    bench.run_one(problem, "di", target, rows["di"], block)
    print(f"{name}: GS {rows['gs'].time:.3f} s, DI {rows['di'].time:.4f} s, "
          f"gain x{rows['gs'].time / rows['di'].time:.0f}, DI error {rows['di'].error:.3f}")
    fields[name] = solve(problem.domain, None, SolveConfig(target, block=block),
                         reference=problem.reference()).H

export_field(fields["s2"], "pgm", "s2.pgm")

fig, axes = plt.subplots(1, 2, figsize=(9, 4))
for ax, (name, H) in zip(axes, fields.items()):
    im = ax.imshow(H.T, origin="lower")
    ax.set_title(name.upper())
    fig.colorbar(im, ax=ax)
fig.tight_layout()
fig.savefig("s1_s2.png", dpi=120)
