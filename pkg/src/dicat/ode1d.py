"""Second-order linear BVP  y'' + alpha y' + beta y = f  on [0, L].

Two solution paths:

* :func:`tent_superpose_solve` for alpha = beta = 0, where the elementary
  catalyst is the tent and the answer needs no iteration at all;
* :func:`solve_general`, which pre-computes a 1D block for the discretised
  stencil with the diffusion engine and runs the superposition solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .catalyst import normalize_free_block, precompute_catalyst_1d, tent_block
from .diffusion import Stencil, constant_stencil_1d
from .grid import Domain, make_domain
from .solver import SolveConfig, solve


@dataclass
class Ode1dProblem:
    alpha: float
    beta: float
    f: Callable | np.ndarray | float
    L: float
    y0: float
    yL: float
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError("N must be an integer >= 2")
        if not self.L > 0:
            raise ValueError("L must be positive")
        den = 2.0 - self.beta * self.eps**2
        if den == 0 or not np.isfinite(den):
            raise ValueError("singular discretisation: 2 - beta*eps^2 = 0")
        if not callable(self.f) and np.ndim(self.f) > 0 and np.shape(self.f) != (self.N + 1,):
            raise ValueError(f"sampled f needs {self.N + 1} values")

    @property
    def eps(self) -> float:
        return self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.eps

    def samples(self) -> np.ndarray:
        if callable(self.f):
            return np.asarray(np.vectorize(self.f, otypes=[float])(self.x))
        return np.broadcast_to(np.asarray(self.f, float), (self.N + 1,)).copy()

    def domain(self) -> Domain:
        return make_domain(1, self.N + 1, boundary_spec={0: self.y0, self.N: self.yL}, eps=self.eps)


def example_source(x):
    return (-0.99 * np.cos(x) + 0.2 * np.sin(x)) * np.exp(-x / 10)


def example_solution(x):
    return np.cos(x) * np.exp(-np.asarray(x) / 10)


def example_problem(N: int = 500) -> Ode1dProblem:
    """y'' = f on [0, 50] with y(0)=1, y(50)=0, built so that y ~ cos(x) exp(-x/10)."""
    return Ode1dProblem(0.0, 0.0, example_source, 50.0, 1.0, 0.0, N)


def consistent_reference(x):
    """Exact solution of the example with the boundary value y(50)=0 it actually imposes.

    cos(x) exp(-x/10) is about 0.0065 at x=50, so the imposed data differ from
    it by a linear function.
    """
    x = np.asarray(x, float)
    return example_solution(x) - x / 50.0 * example_solution(50.0)


def load_source_csv(path) -> np.ndarray:
    """Sampled f, one value per line (blank lines and '#' comments skipped)."""
    return np.loadtxt(path, dtype=float, comments="#", ndmin=1)


def discretize(problem: Ode1dProblem, naive: bool = False) -> tuple[Stencil, np.ndarray]:
    """Three-point scheme for the problem.

    Returns the stencil (``source_coef`` already holds the scaling of f) and
    the sampled f.  The default uses centred differences for y'; ``naive``
    uses a forward difference instead.
    """
    a, b, e = problem.alpha, problem.beta, problem.eps
    if naive:
        den = 2.0 + a * e - b * e * e
        wp, wm = (1.0 + a * e) / den, 1.0 / den
    else:
        den = 2.0 - b * e * e
        wp, wm = (1.0 + a * e / 2) / den, (1.0 - a * e / 2) / den
    if den == 0 or not np.isfinite([wp, wm]).all():
        raise ValueError("singular discretisation")
    stencil = constant_stencil_1d(problem.N + 1, wm, wp, -e * e / den)
    return stencil, problem.samples()


def tent_superpose_solve(problem: Ode1dProblem) -> np.ndarray:
    """Explicit solution for alpha = beta = 0 by tent superposition."""
    if problem.alpha != 0 or problem.beta != 0:
        raise ValueError("tent superposition needs alpha = beta = 0")
    N = problem.N
    stencil, f = discretize(problem)
    src = stencil.source_coef * f
    src[[0, N]] = 0.0
    free = normalize_free_block(tent_block(N)).H0  # tent scaled by 1/(1-a)
    k = np.arange(N + 1)
    # rows: injection node i, columns: field node k; free.H0 is indexed by k - i + N
    tents = free[k[None, :] - k[:, None] + N]
    y = src @ tents
    left = 1.0 - k / N
    right = k / N
    y += (problem.y0 - y[0]) * left
    y += (problem.yL - y[N]) * right
    return y


def superposition_formula(problem: Ode1dProblem, nodes=None) -> np.ndarray:
    """Closed-form finite sum for y'' = f evaluated at grid nodes.

    y(aL) = (1-a) y(0) + a y(L) + L^2/(2N^2) sum_i (2ai - i + |aN - i| - aN) f_i
    """
    if problem.alpha != 0 or problem.beta != 0:
        raise ValueError("closed form needs alpha = beta = 0")
    N = problem.N
    k = np.arange(N + 1) if nodes is None else np.asarray(nodes)
    a = k / N
    i = np.arange(1, N)
    f = problem.samples()[1:N]
    w = 2 * a[:, None] * i - i + np.abs(a[:, None] * N - i) - a[:, None] * N
    return (1 - a) * problem.y0 + a * problem.yL + problem.L**2 / (2 * N**2) * (w @ f)


def solve_general(problem: Ode1dProblem, target: float = 1e-10, *, naive: bool = False,
                  block_target: float | None = None, rho: float = 0.5):
    """Block pre-computation for the problem's stencil, then superposition.

    Returns ``(y, SolveResult)``.
    """
    stencil, f = discretize(problem, naive)
    f[[0, -1]] = 0.0
    wm, wp = float(stencil.weights[0, 1]), float(stencil.weights[1, 1])
    block = precompute_catalyst_1d(problem.N, block_target or 1e-3 * target, wm, wp)
    domain = problem.domain()
    result = solve(domain, f, SolveConfig(target, rho=rho, block=block), stencil=stencil,
                   label="ode1d")
    return result.H, result
