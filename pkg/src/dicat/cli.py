"""Command line: ``dicat precompute | solve | bench``.

Exit status is 0 on success, 1 on usage or input errors and 2 when a solver
fails its convergence guard.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bench, ode1d
from .blockfile import BlockFileError, load_block, save_block
from .catalyst import precompute_catalyst_1d, precompute_catalyst_2d
from .diffusion import ConvergenceError, gauss_seidel_solve
from .export import FORMATS, export_field, write_csv
from .problems import PROBLEMS, make_problem
from .solver import BlockTooSmallError, SolveConfig, solve

EXIT_OK, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dicat", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    pre = sub.add_parser("precompute", help="pre-compute an elementary catalyst block")
    pre.add_argument("--lx", type=int, required=True, help="half-extent along x")
    pre.add_argument("--ly", type=int, help="half-extent along y (default: lx)")
    pre.add_argument("--dim", type=int, choices=(1, 2), default=2)
    pre.add_argument("--target", type=float, default=1e-3, help="stop when residual fluid < target")
    pre.add_argument("--seed-mode", choices=("zero", "polar"), default="polar")
    pre.add_argument("--out", required=True)

    sol = sub.add_parser("solve", help="solve a named problem")
    sol.add_argument("--problem", choices=PROBLEMS, required=True)
    sol.add_argument("--size", type=int, default=100, help="nodes per side (intervals for ode)")
    sol.add_argument("--target", type=float, default=1e-3)
    sol.add_argument("--solver", choices=("di", "gs"), default="di")
    sol.add_argument("--block", help="catalyst block file (required for di except ode)")
    sol.add_argument("--use-f0", action=argparse.BooleanOptionalAction, default=True)
    sol.add_argument("--rho", type=float, default=0.5)
    sol.add_argument("--stop", choices=("auto", "residual", "reference"), default="auto",
                     help="auto: stop on distance to the known limit when there is one")
    sol.add_argument("--out", required=True)
    sol.add_argument("--format", choices=FORMATS, default="csv")

    bn = sub.add_parser("bench", help="timing comparison against Gauss-Seidel/Jacobi")
    bn.add_argument("--scenario", default="S1", help="S1, S2, ode-example or custom")
    bn.add_argument("--sizes", type=_ints, help="e.g. 100,200")
    bn.add_argument("--targets", type=_floats, default=[0.1])
    bn.add_argument("--solvers", default="gs,di")
    bn.add_argument("--reps", type=int, default=1)
    bn.add_argument("--blocks", help="directory caching pre-computed blocks")
    bn.add_argument("--block-target", type=float, default=1e-4)
    bn.add_argument("--large", action="store_true",
                    help=f"allow sizes >= {bench.LARGE_THRESHOLD} (hours of Gauss-Seidel)")
    bn.add_argument("--out", help="CSV report path")
    return p


def _check_writable(path) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise UsageError(f"cannot write to {path}")


def cmd_precompute(args) -> int:
    _check_writable(args.out)
    t = time.perf_counter()
    if args.dim == 1:
        block = precompute_catalyst_1d(args.lx, args.target)
    else:
        block = precompute_catalyst_2d(args.lx, args.ly or args.lx, args.target, args.seed_mode)
    elapsed = time.perf_counter() - t
    save_block(block, args.out)
    print(f"Pre-comp {elapsed:.3f} s  residual fluid {block.residual_fluid:.3e}  "
          f"return fraction {block.origin_return_fraction:.6f}  -> {args.out}")
    return EXIT_OK


def _write_trace(trace, path) -> None:
    times, res, err = trace.as_arrays()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "residual", "error"])
        w.writerows(zip(times.tolist(), res.tolist(), err.tolist()))


def cmd_solve(args) -> int:
    _check_writable(args.out)
    problem = make_problem(args.problem, args.size)
    ref = problem.reference()
    stop_on_ref = args.stop == "reference" or (args.stop == "auto" and ref is not None)
    converged = True
    if args.solver == "gs":
        # with a reference the increment test is only a backstop
        tol = 1e-6 * args.target if stop_on_ref else args.target
        H, trace = gauss_seidel_solve(problem.domain, problem.stencil, problem.f, tol=tol,
                                      reference=ref if stop_on_ref else None,
                                      target_error=args.target, label=args.problem)
        summary = f"sweeps {trace.iterations}  max increment {trace.last_residual:.3e}"
    elif args.problem == "ode" and not args.block:
        H = ode1d.tent_superpose_solve(ode1d.example_problem(args.size))
        trace = None
        summary = "explicit tent superposition"
    else:
        if not args.block:
            raise UsageError("--block is required for the di solver")
        block = load_block(args.block)
        cfg = SolveConfig(args.target, rho=args.rho, use_F0=args.use_f0, block=block)
        res = solve(problem.domain, problem.f, cfg, stencil=problem.stencil,
                    reference=ref if stop_on_ref else None, label=args.problem)
        H, trace, converged = res.H, res.trace, res.converged
        summary = f"rounds {res.rounds}  corrections {res.corrections}  residual r {res.residual:.3e}"
    eps = problem.domain.eps
    if args.problem == "ode" and args.format == "csv":
        write_csv(H, args.out, eps, extra={"analytic": problem.analytic})
    else:
        export_field(H, args.format, args.out, eps)
    if trace is not None:
        _write_trace(trace, str(args.out) + ".trace.csv")
    if ref is not None:
        summary += f"  error {np.abs(H - ref).max():.3e}"
    print(summary)
    if not converged:
        print("solver did not reach the target", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = args.sizes or (list(bench.LARGE_SIZES) if args.large else [100, 200])
    if max(sizes) >= bench.LARGE_THRESHOLD and not args.large:
        raise UsageError(f"sizes >= {bench.LARGE_THRESHOLD} need --large")
    if args.out:
        _check_writable(args.out)
    try:
        scenario = bench.BenchScenario(args.scenario, sizes, args.solvers.replace(",", " ").split(),
                                       args.targets, args.reps, args.block_target, args.blocks)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = bench.run_bench(scenario)
    print(report.table())
    if args.out:
        report.to_csv(args.out)
    return EXIT_OK if report.ok else EXIT_DIVERGED


def _threads() -> None:
    import numba

    n = os.environ.get("DICAT_THREADS", "1")
    try:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        raise UsageError(f"DICAT_THREADS must be an integer, got {n!r}") from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"precompute": cmd_precompute, "solve": cmd_solve, "bench": cmd_bench}
    try:
        _threads()
        return handlers[args.command](args)
    except (UsageError, BlockFileError, BlockTooSmallError, FileNotFoundError, ValueError) as exc:
        print(f"dicat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"dicat: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
