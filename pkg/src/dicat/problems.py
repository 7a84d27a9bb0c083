"""Named test problems shared by the CLI and the benchmark harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diffusion import Stencil
from .grid import Domain, make_domain
from . import ode1d, oracle

PROBLEMS = ("s1", "s2", "poisson2d", "ode")


@dataclass
class Problem:
    name: str
    domain: Domain
    f: object = None
    stencil: Stencil | None = None
    exact: Callable[[], np.ndarray] | None = field(default=None, repr=False)
    analytic: np.ndarray | None = None
    _ref: np.ndarray | None = field(default=None, repr=False)

    def reference(self) -> np.ndarray | None:
        """Discrete limit of the problem (computed once)."""
        if self._ref is None and self.exact is not None:
            self._ref = np.asarray(self.exact(), float)
        return self._ref


def make_problem(name: str, size: int) -> Problem:
    """Build problem ``name`` on ``size`` nodes per side (``size`` intervals for ``ode``)."""
    if size < 3:
        raise ValueError("size must be >= 3")
    if name == "s1":
        d = make_domain(2, size, size, 100.0)
        return Problem(name, d, exact=lambda: np.full(d.shape, 100.0))
    if name == "s2":
        g = np.zeros((size, size))
        g[0, :] = 100.0
        d = make_domain(2, size, size, g)
        return Problem(name, d, exact=lambda: oracle.sparse_solve(d))
    if name == "poisson2d":
        h = 1.0 / (size - 1)
        d = make_domain(2, size, size, 0.0, eps=h)

        def f(x, y):
            return -2 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y)

        ax = np.arange(size) * h
        smooth = np.outer(np.sin(np.pi * ax), np.sin(np.pi * ax))
        return Problem(name, d, f, exact=lambda: oracle.sparse_solve(d, f=f), analytic=smooth)
    if name == "ode":
        p = ode1d.example_problem(size)
        stencil, f = ode1d.discretize(p)
        f[[0, -1]] = 0.0
        return Problem(name, p.domain(), f, stencil, exact=lambda: ode1d.tent_superpose_solve(p),
                       analytic=ode1d.example_solution(p.x))
    raise ValueError(f"unknown problem {name!r}; choose from {PROBLEMS}")
