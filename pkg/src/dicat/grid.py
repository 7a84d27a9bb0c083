"""Grid geometry, node classification, fluid state and the residual estimate."""

from __future__ import annotations

import time
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Domain:
    """Rectangular grid of nodes, each one either interior or boundary.

    ``shape`` is ``(Lx,)`` or ``(Lx, Ly)`` in node counts.  ``boundary`` is a
    boolean mask over all nodes and ``g`` holds the Dirichlet value of every
    boundary node (entries on interior nodes are ignored and kept at 0).
    ``eps`` is the grid step, only used to scale source terms.
    """

    shape: tuple[int, ...]
    boundary: np.ndarray
    g: np.ndarray
    eps: float = 1.0

    @property
    def dimension(self) -> int:
        return len(self.shape)

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @property
    def n_interior(self) -> int:
        return int(self.interior.sum())

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def boundary_nodes(self) -> np.ndarray:
        """Boundary node coordinates in row-major order, shape ``(P, dim)``."""
        return np.argwhere(self.boundary)

    def check_field(self, values: np.ndarray, name: str = "field") -> None:
        if np.shape(values) != self.shape:
            raise ValueError(f"{name} has shape {np.shape(values)}, domain is {self.shape}")


def frame_mask(shape: tuple[int, ...]) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    mask[0] = mask[-1] = True
    if len(shape) == 2:
        mask[:, 0] = mask[:, -1] = True
    return mask


def make_domain(dimension, Lx, Ly=None, boundary_spec=0.0, *, eps=1.0, extra_boundary=None) -> Domain:
    """Build a rectangular domain whose outer frame is Dirichlet boundary.

    ``boundary_spec`` gives g on every boundary node and may be a scalar, a
    callable taking node coordinates (``g(x)`` or ``g(x, y)``), a mapping from
    node coordinates to values, or an array of the domain shape.
    ``extra_boundary`` optionally marks additional (interior) nodes as
    boundary; they must be covered by ``boundary_spec`` as well.
    """
    if dimension not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {dimension}")
    if Lx < 3 or (dimension == 2 and (Ly is None or Ly < 3)):
        raise ValueError(f"extents must be >= 3, got Lx={Lx}, Ly={Ly}")
    shape = (int(Lx),) if dimension == 1 else (int(Lx), int(Ly))
    boundary = frame_mask(shape)
    if extra_boundary is not None:
        extra = np.asarray(extra_boundary, dtype=bool)
        if extra.shape != shape:
            raise ValueError("extra_boundary must match the domain shape")
        boundary |= extra

    g = np.zeros(shape)
    nodes = np.argwhere(boundary)
    if np.isscalar(boundary_spec):
        g[boundary] = float(boundary_spec)
    elif callable(boundary_spec):
        for node in nodes:
            g[tuple(node)] = float(boundary_spec(*node))
    elif isinstance(boundary_spec, Mapping):
        spec = {_key(k): float(v) for k, v in boundary_spec.items()}
        for node in nodes:
            key = tuple(int(i) for i in node)
            if key not in spec:
                raise ValueError(f"boundary_spec has no value for boundary node {key}")
            g[key] = spec[key]
    else:
        values = np.asarray(boundary_spec, dtype=float)
        if values.shape != shape:
            raise ValueError(f"boundary_spec array has shape {values.shape}, expected {shape}")
        if not np.all(np.isfinite(values[boundary])):
            raise ValueError("boundary_spec array is missing values on boundary nodes")
        g[boundary] = values[boundary]
    return Domain(shape=shape, boundary=boundary, g=g, eps=float(eps))


def _key(k) -> tuple[int, ...]:
    if isinstance(k, (int, np.integer)):
        return (int(k),)
    return tuple(int(i) for i in k)


@dataclass
class FluidState:
    """History ``H`` and pending fluid ``F`` over all nodes.

    ``absorbed`` is the total fluid deleted at catalyst nodes (or sent off the
    grid); ``absorbed_at`` keeps the per-node share.
    """

    H: np.ndarray
    F: np.ndarray
    absorbed: float = 0.0
    absorbed_at: np.ndarray | None = None

    @classmethod
    def zeros(cls, shape) -> FluidState:
        return cls(H=np.zeros(shape), F=np.zeros(shape), absorbed=0.0, absorbed_at=np.zeros(shape))

    def copy(self) -> FluidState:
        at = None if self.absorbed_at is None else self.absorbed_at.copy()
        return FluidState(self.H.copy(), self.F.copy(), self.absorbed, at)

    def total_fluid(self) -> float:
        """Pending plus absorbed fluid; constant under unit-sum diffusion."""
        return float(self.F.sum()) + self.absorbed


@dataclass
class RunTrace:
    """Time-stamped convergence record of one solver run."""

    solver: str = ""
    problem: str = ""
    times: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    errors: list[float | None] = field(default_factory=list)
    iterations: int = 0
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def record(self, residual: float, error: float | None = None) -> None:
        t = time.perf_counter() - self._t0
        if self.times and t <= self.times[-1]:
            t = float(np.nextafter(self.times[-1], np.inf))
        self.times.append(t)
        self.residuals.append(float(residual))
        self.errors.append(None if error is None else float(error))

    def __len__(self) -> int:
        return len(self.times)

    @property
    def last_residual(self) -> float:
        return self.residuals[-1] if self.residuals else float("nan")

    def as_arrays(self):
        err = np.array([np.nan if e is None else e for e in self.errors])
        return np.array(self.times), np.array(self.residuals), err


def residual(state: FluidState, domain: Domain) -> float:
    """Sum of |F| over interior nodes plus sum of |g - H| over boundary nodes.

    Zero means ``H`` is the exact discrete solution.
    """
    domain.check_field(state.H, "H")
    domain.check_field(state.F, "F")
    interior = domain.interior
    b = domain.boundary
    return float(np.abs(state.F[interior]).sum() + np.abs(domain.g[b] - state.H[b]).sum())


def max_error(values: np.ndarray, reference) -> float:
    return float(np.max(np.abs(np.asarray(values) - reference)))


def fill_interior(domain: Domain, f: Callable | np.ndarray | float | None) -> np.ndarray:
    """Sample a source term on the grid; returns an array of the domain shape.

    Callables receive physical coordinates (node index times ``eps``).
    """
    if f is None:
        return np.zeros(domain.shape)
    if callable(f):
        axes = [np.arange(n) * domain.eps for n in domain.shape]
        grids = np.meshgrid(*axes, indexing="ij")
        out = np.asarray(f(*grids), dtype=float)
        return np.broadcast_to(out, domain.shape).copy()
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0:
        return np.full(domain.shape, float(arr))
    domain.check_field(arr, "f")
    return arr.copy()
