"""Benchmark harness: D-iteration with a pre-computed block against sweeps.

Every solver is stopped as soon as its max-norm distance to the known limit
is within the error target, so the time column compares equal accuracy.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .blockfile import load_block, save_block
from .catalyst import CatalystBlock, precompute_catalyst_1d, precompute_catalyst_2d
from .diffusion import ConvergenceError, gauss_seidel_solve, jacobi_sweep, laplacian_stencil
from .grid import fill_interior, make_domain
from .problems import Problem, make_problem
from .solver import SolveConfig, solve

log = logging.getLogger(__name__)

SCENARIOS = {"s1": "s1", "s2": "s2", "ode-example": "ode", "ode": "ode", "custom": "poisson2d",
             "poisson2d": "poisson2d"}
SOLVERS = ("gs", "jacobi", "di")
LARGE_SIZES = (1000, 2000)
LARGE_THRESHOLD = 1000

COLUMNS = ("scenario", "size", "solver", "target", "precomp", "init", "error", "error2", "time",
           "gain", "iterations", "status")


@dataclass
class BenchScenario:
    name: str
    sizes: list
    solvers: list = field(default_factory=lambda: ["gs", "di"])
    targets: list = field(default_factory=lambda: [0.1])
    reps: int = 1
    block_target: float = 1e-4
    block_dir: str | None = None
    seed_mode: str = "polar"
    max_sweeps: int = 50_000_000

    def __post_init__(self):
        if self.name.lower() not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.name!r}")
        if not self.sizes or min(self.sizes) < 3:
            raise ValueError("sizes must be >= 3")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        bad = set(self.solvers) - set(SOLVERS)
        if bad or not self.solvers:
            raise ValueError(f"unknown solvers {sorted(bad)}")
        if not self.targets or min(self.targets) <= 0:
            raise ValueError("targets must be positive")

    @property
    def problem(self) -> str:
        return SCENARIOS[self.name.lower()]


@dataclass
class BenchRow:
    scenario: str
    size: int
    solver: str
    target: float
    precomp: float = 0.0
    init: float = 0.0
    error: float = float("nan")
    error2: float = float("nan")
    time: float = float("nan")
    gain: float = float("nan")
    iterations: int = 0
    status: str = "ok"


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status == "ok" for r in self.rows)

    def fill_gain(self) -> None:
        """gain = baseline time / row time, baseline = GS (or the first solver run)."""
        groups = {}
        for r in self.rows:
            groups.setdefault((r.scenario, r.size, r.target), []).append(r)
        for rows in groups.values():
            base = next((r for r in rows if r.solver == "gs"), rows[0])
            for r in rows:
                ok = r.status == "ok" and base.status == "ok" and r.time > 0
                r.gain = base.time / r.time if ok else float("nan")

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
            w.writeheader()
            for r in self.rows:
                w.writerow(asdict(r))
        return path

    def table(self) -> str:
        head = ("scenario", "size", "solver", "Pre-comp", "target", "Init", "error", "error2",
                "time", "gain", "status")
        lines = ["  ".join(f"{h:>9}" for h in head)]
        for r in self.rows:
            cells = (r.scenario, r.size, r.solver, f"{r.precomp:.3g}", f"{r.target:.0e}",
                     f"{r.init:.3g}", f"{r.error:.3g}", f"{r.error2:.3g}", f"{r.time:.3g}",
                     f"x{r.gain:.3g}", r.status)
            lines.append("  ".join(f"{c!s:>9}" for c in cells))
        return "\n".join(lines)


def block_for(problem: Problem, size: int, scenario: BenchScenario, row: BenchRow) -> CatalystBlock:
    """Pre-compute (or reuse from ``block_dir``) a block large enough for the problem."""
    dim = problem.domain.dimension
    L = max(problem.domain.shape) - 1
    path = None
    if scenario.block_dir:
        Path(scenario.block_dir).mkdir(parents=True, exist_ok=True)
        tag = "ode" if problem.name == "ode" else "lap"
        path = Path(scenario.block_dir) / f"{tag}{dim}d_{L}_{scenario.block_target:.0e}.dicat"
    if path is None or not path.exists():
        t = time.perf_counter()
        if dim == 1:
            w = problem.stencil.weights
            # the free block is scaled by 1/(1-a) = L in 1D, so tighten accordingly
            block = precompute_catalyst_1d(L, scenario.block_target / L, float(w[0, 1]), float(w[1, 1]))
        else:
            block = precompute_catalyst_2d(L, L, scenario.block_target, scenario.seed_mode,
                                           max_sweeps=scenario.max_sweeps)
        row.precomp = time.perf_counter() - t
        if path is None:
            return block
        save_block(block, path)
    t = time.perf_counter()
    block = load_block(path)
    row.init = time.perf_counter() - t
    return block


def _jacobi(problem: Problem, ref, target, max_sweeps):
    d = problem.domain
    stencil = problem.stencil or laplacian_stencil(d)
    T = np.where(d.boundary, d.g, 0.0).astype(float)
    sweeps, inc = 0, np.inf
    while sweeps < max_sweeps:
        inc = jacobi_sweep(T, d, stencil, problem.f)
        sweeps += 1
        if sweeps % 10 == 0 and np.abs(T - ref).max() <= target:
            break
        if not np.isfinite(inc):
            raise ConvergenceError("Jacobi diverged")
    return T, inc, sweeps


def run_one(problem: Problem, solver: str, target: float, row: BenchRow, block=None,
            max_sweeps: int = 50_000_000) -> None:
    ref = problem.reference()
    t = time.perf_counter()
    if solver == "gs":
        # the increment test is only a backstop; the reference check ends the run
        T, trace = gauss_seidel_solve(problem.domain, problem.stencil, problem.f, tol=1e-6 * target,
                                      reference=ref, target_error=target, max_sweeps=max_sweeps,
                                      label=problem.name)
        elapsed = time.perf_counter() - t
        row.error2, row.iterations = trace.last_residual, trace.iterations
    elif solver == "jacobi":
        T, inc, sweeps = _jacobi(problem, ref, target, max_sweeps)
        elapsed = time.perf_counter() - t
        row.error2, row.iterations = float(inc), sweeps
    else:
        res = solve(problem.domain, problem.f, SolveConfig(target, block=block),
                    stencil=problem.stencil, reference=ref, label=problem.name)
        elapsed = time.perf_counter() - t
        T = res.H
        row.error2, row.iterations = res.residual, res.rounds
        if not res.converged:
            row.status = "not-converged"
    row.error = float(np.abs(T - ref).max())
    row.time = elapsed if np.isnan(row.time) else min(row.time, elapsed)
    if row.error > target and row.status == "ok":
        row.status = "not-converged"


def warm_up() -> None:
    """Trigger compilation (or cache loading) of the kernels before timing."""
    d = make_domain(2, 5, 5, 1.0)
    block = precompute_catalyst_2d(4, 4, 1e-3)
    solve(d, lambda x, y: 0 * x + 1.0, SolveConfig(1e-3, block=block), reference=None)
    gauss_seidel_solve(d, tol=1e-6, max_sweeps=20)
    jacobi_sweep(np.zeros(d.shape), d, laplacian_stencil(d), fill_interior(d, None))
    gauss_seidel_solve(make_domain(1, 5, boundary_spec=1.0), tol=1e-6, max_sweeps=20,
                       reference=np.ones(5), target_error=1.0)


def run_bench(scenario: BenchScenario) -> BenchReport:
    """Run every (size, target, solver) cell; failures are marked, not raised."""
    warm_up()
    report = BenchReport()
    for size in scenario.sizes:
        problem = make_problem(scenario.problem, size)
        problem.reference()
        block, block_cost = None, (0.0, 0.0)
        for target in scenario.targets:
            for solver in scenario.solvers:
                row = BenchRow(scenario.name, size, solver, target)
                try:
                    if solver == "di":
                        if block is None:
                            block = block_for(problem, size, scenario, row)
                            block_cost = (row.precomp, row.init)
                        row.precomp, row.init = block_cost
                    for _ in range(scenario.reps):
                        run_one(problem, solver, target, row, block, scenario.max_sweeps)
                except (ConvergenceError, ValueError, FloatingPointError) as exc:
                    log.error("%s size %d %s failed: %s", scenario.name, size, solver, exc)
                    row.status = f"failed: {exc}"
                report.rows.append(row)
    report.fill_gain()
    return report
