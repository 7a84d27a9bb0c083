"""D-iteration diffusion kernel plus Gauss-Seidel and Jacobi baselines.

Stencils are stored in *collection* form: ``weights[d, n]`` is the
coefficient of the neighbour in direction ``d`` in the equation of node
``n``::

    T(n) = sum_d weights[d, n] * T(n + offset_d) + source_coef[n] * f(n)

Gauss-Seidel reads the equation row by row.  The diffusion step pushes along
columns instead: node ``n`` hands ``weights[opp(d), n + offset_d] * F(n)`` to
its neighbour in direction ``d``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .grid import Domain, FluidState, RunTrace, fill_interior

log = logging.getLogger(__name__)

OFFSETS = {1: ((-1,), (1,)), 2: ((-1, 0), (1, 0), (0, -1), (0, 1))}
SKIP_EPS = 1e-300


class ConvergenceError(RuntimeError):
    """Raised when an iteration stops contracting."""


@dataclass
class Stencil:
    weights: np.ndarray
    source_coef: np.ndarray

    @property
    def dimension(self) -> int:
        return self.weights.ndim - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.weights.shape[1:]

    @property
    def offsets(self):
        return OFFSETS[self.dimension]

    def push_weights(self) -> np.ndarray:
        """``push[d, n]``: share of F(n) sent to the neighbour in direction d.

        Off the grid there is no receiving equation; the node's own weight is
        used so that the fluid leaving the domain is still accounted for.
        """
        push = np.empty_like(self.weights)
        for d, off in enumerate(self.offsets):
            opp = d ^ 1  # directions come in (-, +) pairs
            push[d] = self.weights[opp]
            src = [slice(None)] * self.dimension
            dst = [slice(None)] * self.dimension
            for ax, o in enumerate(off):
                if o == 1:
                    dst[ax], src[ax] = slice(0, -1), slice(1, None)
                elif o == -1:
                    dst[ax], src[ax] = slice(1, None), slice(0, -1)
            push[(d, *dst)] = self.weights[(opp, *src)]
        return push

    def unit_sum(self, domain: Domain | None = None) -> bool:
        """True when every interior node pushes out exactly all of its fluid."""
        push = self.push_weights()
        mask = np.ones(self.shape, bool) if domain is None else domain.interior
        return bool(np.allclose(push.sum(axis=0)[mask], 1.0, rtol=0, atol=1e-14))


def laplacian_stencil(domain: Domain) -> Stencil:
    """Plain Laplacian: weights 1/2 (1D) or 1/4 (2D), source -eps^2/2 or -eps^2/4."""
    ndir = 2 * domain.dimension
    w = np.full((ndir, *domain.shape), 1.0 / ndir)
    return Stencil(w, np.full(domain.shape, -domain.eps**2 / ndir))


def constant_stencil_1d(n: int, w_minus: float, w_plus: float, source_coef: float = 0.0) -> Stencil:
    w = np.empty((2, n))
    w[0] = w_minus
    w[1] = w_plus
    return Stencil(w, np.full(n, float(source_coef)))


@dataclass
class CatalystPolicy:
    """Catalyst nodes and their state (pending initial fluid or absorbing)."""

    status: np.ndarray

    @classmethod
    def from_domain(cls, domain: Domain) -> CatalystPolicy:
        status = np.where(domain.boundary, K.PENDING, K.REGULAR).astype(np.int8)
        return cls(status)

    @classmethod
    def from_mask(cls, mask: np.ndarray, absorbing: np.ndarray | None = None) -> CatalystPolicy:
        status = np.where(mask, K.PENDING, K.REGULAR).astype(np.int8)
        if absorbing is not None:
            status[absorbing] = K.ABSORBING
        return cls(status)

    @property
    def catalysts(self) -> np.ndarray:
        return self.status != K.REGULAR

    def is_absorbing(self, node) -> bool:
        return bool(self.status[node] == K.ABSORBING)


def initial_state(domain: Domain, stencil: Stencil | None = None, f=None) -> FluidState:
    """Catalysts hold g as initial fluid; interior nodes hold the scaled source."""
    state = FluidState.zeros(domain.shape)
    state.F[domain.boundary] = domain.g[domain.boundary]
    if f is not None:
        stencil = stencil or laplacian_stencil(domain)
        src = fill_interior(domain, f) * stencil.source_coef
        state.F[domain.interior] = src[domain.interior]
    return state


@dataclass
class _Tables:
    nbr: np.ndarray
    pw: np.ndarray


def _tables(stencil: Stencil) -> _Tables:
    shape = stencil.shape
    n = int(np.prod(shape))
    idx = np.arange(n).reshape(shape)
    offsets = stencil.offsets
    nbr = np.full((n, len(offsets)), -1, dtype=np.int64)
    for d, off in enumerate(offsets):
        shifted = np.full(shape, -1, dtype=np.int64)
        src = [slice(None)] * len(shape)
        dst = [slice(None)] * len(shape)
        for ax, o in enumerate(off):
            if o == 1:
                dst[ax], src[ax] = slice(0, -1), slice(1, None)
            elif o == -1:
                dst[ax], src[ax] = slice(1, None), slice(0, -1)
        shifted[tuple(dst)] = idx[tuple(src)]
        nbr[:, d] = shifted.ravel()
    pw = np.ascontiguousarray(stencil.push_weights().reshape(len(offsets), n).T)
    return _Tables(nbr, pw)


def _flat(state: FluidState, policy: CatalystPolicy):
    if state.absorbed_at is None:
        state.absorbed_at = np.zeros_like(state.H)
    for name, arr in (("H", state.H), ("F", state.F), ("absorbed_at", state.absorbed_at)):
        if not arr.flags.c_contiguous:
            raise ValueError(f"{name} must be C-contiguous")
    return (state.H.reshape(-1), state.F.reshape(-1), policy.status.reshape(-1),
            state.absorbed_at.reshape(-1))


def diffuse_node(state: FluidState, node, stencil: Stencil, policy: CatalystPolicy) -> None:
    """Diffuse the fluid held at one node.

    Regular nodes (and catalysts on their first diffusion) move F into H and
    push weighted shares to their neighbours; absorbing catalysts delete F.
    Fluid pushed onto a catalyst is absorbed there.
    """
    node = tuple(np.atleast_1d(node))
    if len(node) != stencil.dimension or any(not 0 <= i < s for i, s in zip(node, stencil.shape)):
        raise IndexError(f"node {node} outside domain of shape {stencil.shape}")
    tab = _tables(stencil)
    H, F, status, at = _flat(state, policy)
    acc = np.zeros(1)
    n = int(np.ravel_multi_index(node, stencil.shape))
    K.diffuse_one(n, H, F, tab.nbr, tab.pw, status, at, acc)
    state.absorbed += acc[0]


def pending_fluid(state: FluidState, policy: CatalystPolicy) -> float:
    """Sum of |F| over nodes that still diffuse (absorbing catalysts excluded)."""
    return float(np.abs(state.F[policy.status != K.ABSORBING]).sum())


def run_diffusion(state: FluidState, domain: Domain, stencil: Stencil, policy: CatalystPolicy,
                  schedule: str = "round-robin", target: float = 1e-10, *,
                  max_sweeps: int = 10_000_000, chunk: int = 50, window: int | None = None,
                  reference: np.ndarray | None = None, label: str = "") -> RunTrace:
    """Sweep the diffusion until the pending fluid drops below ``target``.

    ``schedule`` is ``"round-robin"`` (row-major over every node holding
    fluid) or ``"priority"`` (each pass only visits nodes holding at least the
    mean pending fluid).  Raises :class:`ConvergenceError` if the pending fluid
    fails to shrink by a factor 0.999 over ``window`` sweeps.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    if schedule not in ("round-robin", "priority"):
        raise ValueError(f"unknown schedule {schedule!r}")
    domain.check_field(state.H, "H")
    if stencil.shape != domain.shape:
        raise ValueError("stencil does not match the domain")
    tab = _tables(stencil)
    H, F, status, at = _flat(state, policy)
    acc = np.zeros(1)
    if window is None:
        window = max(64, max(domain.shape) ** 2 // 4)
    trace = RunTrace(solver="d-iteration", problem=label)

    def err():
        return None if reference is None else float(np.abs(state.H - reference).max())

    rest = K.pending_fluid(F, status)
    trace.record(rest, err())
    sweeps = 0
    mark_sweeps, mark_rest = 0, rest
    while rest >= target:
        if sweeps >= max_sweeps:
            log.warning("run_diffusion hit max_sweeps=%d with pending fluid %.3g", max_sweeps, rest)
            break
        step = min(chunk, max_sweeps - sweeps)
        done, rest = K.run_sweeps(H, F, tab.nbr, tab.pw, status, at, acc, SKIP_EPS, target,
                                  step, schedule == "priority")
        sweeps += done
        state.absorbed += acc[0]
        acc[0] = 0.0
        trace.record(rest, err())
        if not np.isfinite(rest):
            raise ConvergenceError("diffusion produced non-finite fluid")
        if sweeps - mark_sweeps >= window:
            if rest > 0.999 * mark_rest:
                raise ConvergenceError(
                    f"pending fluid went from {mark_rest:.3g} to {rest:.3g} over "
                    f"{sweeps - mark_sweeps} sweeps; the stencil does not contract")
            mark_sweeps, mark_rest = sweeps, rest
    trace.iterations = sweeps
    return trace


def _gs_arrays(values, domain: Domain, stencil: Stencil, source):
    domain.check_field(values, "values")
    if stencil.shape != domain.shape:
        raise ValueError("stencil does not match the domain")
    b = fill_interior(domain, source) * stencil.source_coef
    return b, domain.interior


def gauss_seidel_sweep(values: np.ndarray, domain: Domain, stencil: Stencil, source=None) -> float:
    """One in-place row-major sweep over interior nodes using the latest values.

    Returns the largest single-node increment.
    """
    b, interior = _gs_arrays(values, domain, stencil, source)
    if domain.dimension == 1:
        return float(K.gs_sweep_1d(values, stencil.weights, b, interior))
    return float(K.gs_sweep_2d(values, stencil.weights, b, interior))


def jacobi_sweep(values: np.ndarray, domain: Domain, stencil: Stencil, source=None) -> float:
    """Like :func:`gauss_seidel_sweep` but every update reads the previous iterate."""
    b, interior = _gs_arrays(values, domain, stencil, source)
    if domain.dimension == 1:
        return float(K.jacobi_sweep_1d(values, stencil.weights, b, interior))
    return float(K.jacobi_sweep_2d(values, stencil.weights, b, interior))


def gauss_seidel_solve(domain: Domain, stencil: Stencil | None = None, source=None, *,
                       tol: float = 1e-10, max_sweeps: int = 100_000_000,
                       reference: np.ndarray | float | None = None, target_error: float | None = None,
                       check_every: int = 10, chunk: int = 1000, values: np.ndarray | None = None,
                       label: str = ""):
    """Iterate Gauss-Seidel sweeps from ``values`` (default: g on the boundary, 0 inside).

    Stops once the max increment drops below ``tol``, or, when ``reference``
    and ``target_error`` are given, once ``max|T - reference| <= target_error``
    (checked every ``check_every`` sweeps).  Returns ``(T, trace)``; the trace
    residual column holds the max increment of the last sweep.
    """
    stencil = stencil or laplacian_stencil(domain)
    if values is None:
        values = np.where(domain.boundary, domain.g, 0.0)
    T = np.ascontiguousarray(values, dtype=float)
    b, interior = _gs_arrays(T, domain, stencil, source)
    if reference is not None and target_error is not None:
        ref = np.broadcast_to(np.asarray(reference, float), domain.shape).copy()
        ref_tol = float(target_error)
    else:
        ref, ref_tol = np.zeros(domain.shape), -1.0
    run = K.gs_run_1d if domain.dimension == 1 else K.gs_run_2d
    trace = RunTrace(solver="gauss-seidel", problem=label)
    sweeps = 0
    while sweeps < max_sweeps:
        done, inc = run(T, stencil.weights, b, interior, tol, min(chunk, max_sweeps - sweeps),
                        ref, ref_tol, check_every)
        sweeps += done
        err = float(np.abs(T - ref).max()) if ref_tol >= 0 else None
        trace.record(inc, err)
        if inc < tol or (err is not None and err <= ref_tol) or done < chunk:
            break
        if not np.isfinite(inc):
            raise ConvergenceError("Gauss-Seidel diverged")
    trace.iterations = sweeps
    return T, trace
