"""Elementary catalyst blocks: pre-computation, normalization and analytic profiles.

A block holds the diffusion state ``(H0, F0)`` obtained by putting unit fluid
on the origin of ``[-lx, lx] x [-ly, ly]`` with zero Dirichlet frame.  In the
catalyst convention the origin diffuses once and absorbs afterwards, so
``H0(origin) == 1``; the free (non-absorbing) block follows by scaling with
``1 / (1 - a)`` where ``a`` is the fluid that came back to the origin.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as K
from .diffusion import (CatalystPolicy, ConvergenceError, Stencil, constant_stencil_1d,
                        laplacian_stencil, run_diffusion)
from .grid import FluidState, make_domain

log = logging.getLogger(__name__)


@dataclass
class CatalystBlock:
    dim: int
    lx: int
    ly: int
    H0: np.ndarray
    F0: np.ndarray
    target_error: float
    origin_return_fraction: float
    origin_is_catalyst: bool = True

    def __post_init__(self):
        expected = (2 * self.lx + 1,) if self.dim == 1 else (2 * self.lx + 1, 2 * self.ly + 1)
        if self.H0.shape != expected or self.F0.shape != expected:
            raise ValueError(f"block arrays must have shape {expected}")

    @property
    def origin(self) -> tuple[int, ...]:
        return (self.lx,) if self.dim == 1 else (self.lx, self.ly)

    @property
    def residual_fluid(self) -> float:
        return float(np.abs(self.F0).sum())

    def value(self, offset) -> float:
        """H0 at a signed offset from the origin."""
        idx = tuple(int(o) + c for o, c in zip(np.atleast_1d(offset), self.origin))
        return float(self.H0[idx])

    def symmetry_spread(self) -> float:
        """Largest difference of H0 over the orbits of the grid's symmetry group."""
        H = self.H0
        images = [H, H[::-1]]
        if self.dim == 2:
            images += [H[:, ::-1], H[::-1, ::-1]]
            if self.lx == self.ly:
                images += [im.T for im in images]
        return float(max(np.abs(im - H).max() for im in images))


def catalyst_1d_analytic(N: int) -> np.ndarray:
    """One-sided tent profile ``1 - n/N`` for n = 0..N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 1.0 - np.arange(N + 1) / N


def tent_block(N: int) -> CatalystBlock:
    """Exact 1D catalyst block on [-N, N] (no residual fluid)."""
    one_sided = catalyst_1d_analytic(N)
    H0 = np.concatenate([one_sided[:0:-1], one_sided])
    return CatalystBlock(1, N, 0, H0, np.zeros_like(H0), 0.0, return_fraction(H0, (N,)))


def absorbed_series(k_terms: int) -> float:
    """Partial sum of x_{n+1} = (2n+1)/(2n+4) x_n with x_0 = 1/4.

    The terms decay like n^(-3/2) and the full series sums to 1/2: the share
    of the fluid sent to the right that an absorbing origin swallows on the
    half line.
    """
    if k_terms < 1:
        raise ValueError("k_terms must be >= 1")
    n = np.arange(k_terms - 1)
    x = 0.25 * np.concatenate([[1.0], np.cumprod((2 * n + 1) / (2 * n + 4))])
    return float(x.sum())


def absorbed_series_terms(k_terms: int) -> np.ndarray:
    n = np.arange(k_terms - 1)
    return 0.25 * np.concatenate([[1.0], np.cumprod((2 * n + 1) / (2 * n + 4))])


def polar_radial_profile(L_r: int, target: float = 1e-12, *, max_sweeps: int = 50_000_000) -> np.ndarray:
    """Fixed point of the rotation-invariant Laplacian recurrence

    ``T(n) = (2n+1)/(4n) T(n+1) + (2n-1)/(4n) T(n-1)`` with T(0) = 1, T(L_r) = 0,

    iterated with in-place sweeps until the largest increment is below
    ``target``.
    """
    if L_r < 2:
        raise ValueError("L_r must be >= 2")
    if target <= 0:
        raise ValueError("target must be positive")
    T = np.zeros(L_r + 1)
    T[0] = 1.0
    window = max(64, L_r * L_r)
    done = 0
    last = np.inf
    while done < max_sweeps:
        n, inc = K.polar_sweeps(T, target, min(window, max_sweeps - done))
        done += n
        if inc < target:
            return T
        if not np.isfinite(inc) or (np.isfinite(last) and inc > 0.999 * last):
            raise ConvergenceError(f"polar recurrence stalled at increment {inc:.3g}")
        last = inc
    raise ConvergenceError(f"polar recurrence not converged after {max_sweeps} sweeps")


def log_profile_approx(L_r: int, alpha: float) -> np.ndarray:
    """``T(0) = 1`` and ``T(n) = alpha (1 - log n / log L_r)`` for 1 <= n <= L_r."""
    if L_r < 2 or not 0 < alpha <= 1:
        raise ValueError("need L_r >= 2 and 0 < alpha <= 1")
    n = np.arange(1, L_r + 1)
    return np.concatenate([[1.0], alpha * (1.0 - np.log(n) / np.log(L_r))])


def fit_log_alpha(profile: np.ndarray) -> float:
    """Pick alpha so that the log profile matches ``profile`` at n = 1."""
    return float(profile[1])


def return_fraction(H0: np.ndarray, origin, weights: np.ndarray | None = None) -> float:
    """Fluid that flows back into the origin: sum over neighbours q of push(q -> origin) H0(q).

    With the plain Laplacian this is the mean of H0 over the origin's
    neighbours.  Evaluated on a partial state it equals the fluid the origin
    has absorbed so far, which keeps the rescaled free block an exact
    partial diffusion.
    """
    dim = H0.ndim
    total = 0.0
    for d, off in enumerate(((-1,), (1,)) if dim == 1 else ((-1, 0), (1, 0), (0, -1), (0, 1))):
        q = tuple(o + c for o, c in zip(off, origin))
        # neighbour q sends to the origin through q's opposite direction
        w = 1.0 / (2 * dim) if weights is None else weights[d]
        total += w * H0[q]
    return float(total)


def normalize_free_block(block: CatalystBlock) -> CatalystBlock:
    """Turn a catalyst block into the free block used to inject source fluid."""
    if not block.origin_is_catalyst:
        raise ValueError("block is already free")
    a = block.origin_return_fraction
    if not a < 1.0:
        raise ValueError(f"return fraction {a} >= 1: the free diffusion does not converge")
    s = 1.0 / (1.0 - a)
    return replace(block, H0=block.H0 * s, F0=block.F0 * s, target_error=block.target_error * s,
                   origin_is_catalyst=False)


def precompute_catalyst_1d(L: int, target: float, w_minus: float = 0.5, w_plus: float = 0.5,
                           *, schedule: str = "round-robin") -> CatalystBlock:
    """Elementary catalyst on [-L, L] for ``T(n) = w_minus T(n-1) + w_plus T(n+1)``.

    Runs the diffusion engine with the origin and both ends as catalysts.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    n = 2 * L + 1
    mask = np.zeros(n, bool)
    mask[[0, L, -1]] = True
    domain = make_domain(1, n, boundary_spec={0: 0.0, L: 1.0, n - 1: 0.0}, extra_boundary=mask)
    stencil = constant_stencil_1d(n, w_minus, w_plus)
    state = FluidState.zeros(n)
    state.F[L] = 1.0
    run_diffusion(state, domain, stencil, CatalystPolicy.from_domain(domain), schedule, target,
                  label=f"catalyst-1d-{L}")
    F0 = np.where(domain.boundary, 0.0, state.F)
    a = float(state.absorbed_at[L])
    return CatalystBlock(1, L, 0, state.H.copy(), F0, target, a)


def _seed_profile(Lx: int, Ly: int) -> np.ndarray:
    """Polar seed sampled on the quadrant [0, Lx] x [0, Ly], linear in the radius."""
    L_r = min(Lx, Ly)
    T = polar_radial_profile(L_r, 1e-13)
    r = np.hypot(*np.meshgrid(np.arange(Lx + 1), np.arange(Ly + 1), indexing="ij"))
    H = np.interp(r, np.arange(L_r + 1), T, right=0.0)
    H[Lx, :] = 0.0
    H[:, Ly] = 0.0
    H[0, 0] = 1.0
    return H


def _quadrant_imbalance(H: np.ndarray) -> np.ndarray:
    """avg(neighbours) - H on the quadrant, mirroring across both axes."""
    P = np.pad(H, 1)
    P[0, 1:-1] = H[1]
    P[1:-1, 0] = H[:, 1]
    return 0.25 * (P[:-2, 1:-1] + P[2:, 1:-1] + P[1:-1, :-2] + P[1:-1, 2:]) - H


def _mirror_octant(Q: np.ndarray, L: int) -> np.ndarray:
    a = np.abs(np.arange(-L, L + 1))
    hi = np.maximum(a[:, None], a[None, :])
    lo = np.minimum(a[:, None], a[None, :])
    return Q[hi, lo]


def precompute_catalyst_2d(Lx: int, Ly: int, target: float, seed_mode: str = "zero", *,
                           max_sweeps: int = 100_000_000) -> CatalystBlock:
    """Elementary catalyst of the 2D Laplacian on [-Lx, Lx] x [-Ly, Ly].

    Square blocks iterate on one octant and mirror; rectangular ones run the
    full plane through the generic engine.  ``seed_mode="polar"`` starts from
    the rotation-invariant profile, with F rebuilt as the per-node imbalance so
    the pair is still a valid partial diffusion.
    """
    if Lx < 2 or Ly < 2:
        raise ValueError("Lx and Ly must be >= 2")
    if target <= 0:
        raise ValueError("target must be positive")
    if seed_mode not in ("zero", "polar"):
        raise ValueError(f"unknown seed_mode {seed_mode!r}")
    if Lx == Ly:
        return _precompute_octant(Lx, target, seed_mode, max_sweeps)
    return _precompute_full(Lx, Ly, target, seed_mode, max_sweeps)


def _precompute_octant(L: int, target: float, seed_mode: str, max_sweeps: int) -> CatalystBlock:
    if seed_mode == "polar":
        H = _seed_profile(L, L)
        F = _quadrant_imbalance(H)
        F[L, :] = F[:, L] = 0.0
        F[0, 0] = H[1, 0]  # what the origin has absorbed so far
        H, F = np.tril(H), np.tril(F)
    else:
        H = np.zeros((L + 1, L + 1))
        F = np.zeros((L + 1, L + 1))
        H[0, 0] = 1.0
        F[1, 0] = 0.25
    window = max(64, (2 * L + 1) ** 2 // 4)
    done, mark = 0, np.inf
    rest = K.octant_pending(F, L)
    while rest >= target:
        if done >= max_sweeps:
            raise ConvergenceError(f"catalyst pre-computation not converged after {done} sweeps")
        n, rest = K.octant_sweeps(H, F, L, target, min(window, max_sweeps - done))
        done += n
        if not np.isfinite(rest) or (rest >= target and rest > 0.999 * mark):
            raise ConvergenceError(f"catalyst pre-computation stalled at residual fluid {rest:.3g}")
        mark = rest
    a = float(F[0, 0])
    F[0, 0] = 0.0
    F[L, :] = 0.0
    log.debug("octant catalyst L=%d: %d sweeps, residual %.3g, return %.6f", L, done, rest, a)
    return CatalystBlock(2, L, L, _mirror_octant(H, L), _mirror_octant(F, L), target, a)


def _precompute_full(Lx: int, Ly: int, target: float, seed_mode: str, max_sweeps: int) -> CatalystBlock:
    nx, ny = 2 * Lx + 1, 2 * Ly + 1
    origin = np.zeros((nx, ny), bool)
    origin[Lx, Ly] = True
    g = np.zeros((nx, ny))
    g[Lx, Ly] = 1.0
    domain = make_domain(2, nx, ny, g, extra_boundary=origin)
    stencil = laplacian_stencil(domain)
    state = FluidState.zeros((nx, ny))
    if seed_mode == "polar":
        Q = _seed_profile(Lx, Ly)
        H = np.zeros((nx, ny))
        H[Lx:, Ly:] = Q
        H[:Lx + 1, Ly:] = Q[::-1]
        H[Lx:, :Ly + 1] = Q[:, ::-1]
        H[:Lx + 1, :Ly + 1] = Q[::-1, ::-1]
        state.H[:] = H
        imb = np.zeros_like(H)
        imb[1:-1, 1:-1] = 0.25 * (H[:-2, 1:-1] + H[2:, 1:-1] + H[1:-1, :-2] + H[1:-1, 2:]) - H[1:-1, 1:-1]
        state.F[:] = np.where(domain.boundary, 0.0, imb)
        state.absorbed_at[Lx, Ly] = return_fraction(H, (Lx, Ly))
        policy = CatalystPolicy.from_mask(domain.boundary, absorbing=domain.boundary)
    else:
        state.F[Lx, Ly] = 1.0
        policy = CatalystPolicy.from_domain(domain)
    run_diffusion(state, domain, stencil, policy, "round-robin", target, max_sweeps=max_sweeps,
                  label=f"catalyst-2d-{Lx}x{Ly}")
    F0 = np.where(domain.boundary, 0.0, state.F)
    return CatalystBlock(2, Lx, Ly, state.H.copy(), F0, target, float(state.absorbed_at[Lx, Ly]))


def stencil_block_1d(stencil: Stencil) -> tuple[float, float]:
    """Constant (w_minus, w_plus) of a translation-invariant 1D stencil."""
    w = stencil.weights
    if not (np.allclose(w[0], w[0, 0]) and np.allclose(w[1], w[1, 0])):
        raise ValueError("stencil is not translation invariant")
    return float(w[0, 0]), float(w[1, 0])
