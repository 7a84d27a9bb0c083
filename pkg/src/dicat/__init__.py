"""D-iteration solvers for discretised Laplace/Poisson Dirichlet problems.

Pre-computed elementary catalyst blocks are translated and superposed to
build solutions without sweeping the whole grid.
"""

import os

# numba probes TBB first and warns when the installed version is too old
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from .grid import Domain, FluidState, RunTrace, make_domain, residual  # noqa: E402
from .diffusion import (  # noqa: E402
    CatalystPolicy, ConvergenceError, Stencil, diffuse_node, gauss_seidel_solve, initial_state,
    laplacian_stencil, run_diffusion,
)
from .catalyst import (  # noqa: E402
    CatalystBlock, catalyst_1d_analytic, normalize_free_block, precompute_catalyst_1d,
    precompute_catalyst_2d,
)
from .blockfile import load_block, save_block  # noqa: E402
from .solver import SolveConfig, SolveResult, apply_block, boundary_correction_round, solve  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Domain", "FluidState", "RunTrace", "make_domain", "residual",
    "CatalystPolicy", "ConvergenceError", "Stencil", "diffuse_node", "gauss_seidel_solve",
    "initial_state", "laplacian_stencil", "run_diffusion",
    "CatalystBlock", "catalyst_1d_analytic", "normalize_free_block", "precompute_catalyst_1d",
    "precompute_catalyst_2d", "load_block", "save_block",
    "SolveConfig", "SolveResult", "apply_block", "boundary_correction_round", "solve",
]
