"""
The 1D elementary catalyst
==========================

Unit fluid starts at the origin of [-N, N].  The origin and both ends
absorb whatever reaches them, so the history settles on a tent.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from dicat.catalyst import absorbed_series_terms, catalyst_1d_analytic, precompute_catalyst_1d

N = 64
block = precompute_catalyst_1d(N, 1e-10)
n = np.arange(-N, N + 1)
print("max gap to 1 - |n|/N:", np.abs(block.H0[N:] - catalyst_1d_analytic(N)).max())
print("fluid returned to the origin:", block.origin_return_fraction, "expected", 1 - 1 / N)

# %%
# Half of the first push goes right.  On the unbounded half line all of it
# eventually comes back, in ever smaller doses.
terms = absorbed_series_terms(10**6)
partial = np.cumsum(terms)
print("after 10^6 returns:", partial[-1])

fig, (a, b) = plt.subplots(1, 2, figsize=(9, 3.5))
a.plot(n, block.H0, label="engine")
a.plot(n, 1 - np.abs(n) / N, "--", label="1 - |n|/N")
a.set_xlabel("n")
a.legend()
b.semilogx(np.arange(1, partial.size + 1), partial)
b.axhline(0.5, color="k", lw=0.5)
b.set_xlabel("returns counted")
b.set_ylabel("absorbed at origin")
fig.tight_layout()
fig.savefig("tent_and_series.png", dpi=120)
