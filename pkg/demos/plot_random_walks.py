"""
Checking a solution with random walks
=====================================

For the Laplace problem the value at a node is the mean boundary value hit
by a simple random walk started there.  That gives an estimate which shares
no code with the solvers.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from dicat.oracle import monte_carlo_harmonic, sparse_solve
from dicat.problems import make_problem

problem = make_problem("s2", 21)
exact = sparse_solve(problem.domain)

nodes = [(i, 10) for i in range(1, 20, 2)]
est = [monte_carlo_harmonic(problem.domain, node, 4000, seed=i) for i, node in enumerate(nodes)]
for node, e in zip(nodes, est):
    lo, hi = e.interval(3.0)
    flag = "" if lo <= exact[node] <= hi else "  outside 3 sigma"
    print(f"{node}: walks {e.mean:7.3f} +- {e.stderr:.3f}   direct {exact[node]:7.3f}{flag}")

x = [n[0] for n in nodes]
plt.errorbar(x, [e.mean for e in est], yerr=[3 * e.stderr for e in est], fmt="o", label="walks")
plt.plot(np.arange(21), exact[:, 10], label="direct solve")
plt.xlabel("i  (j = 10)")
plt.legend()
plt.savefig("random_walks.png", dpi=120)
