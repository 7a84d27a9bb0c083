import numpy as np
import pytest

from dicat import make_domain, precompute_catalyst_2d


def random_problem(rng, dim, max_side=8, with_source=True):
    """Random Dirichlet problem: g in [-1, 1] on the frame, f in [-1, 1] inside."""
    if dim == 1:
        n = int(rng.integers(3, 13))
        d = make_domain(1, n, boundary_spec={0: rng.uniform(-1, 1), n - 1: rng.uniform(-1, 1)})
    else:
        nx, ny = (int(v) for v in rng.integers(3, max_side + 1, size=2))
        d = make_domain(2, nx, ny, rng.uniform(-1, 1, size=(nx, ny)))
    f = rng.uniform(-1, 1, size=d.shape) * d.interior if with_source else None
    return d, f


@pytest.fixture(scope="session")
def block16():
    """Laplacian block with half-extent 16, converged to machine precision."""
    return precompute_catalyst_2d(16, 16, 1e-13)


@pytest.fixture(scope="session")
def block2():
    return precompute_catalyst_2d(2, 2, 1e-14)


@pytest.fixture(scope="session")
def desk_blocks(tmp_path_factory):
    """Laplacian blocks covering 100x100 and 200x200 grids, saved to disk.

    Built once per session (the 200 block takes ~20 s); pre-computation time
    is kept with each path.
    """
    import time

    from dicat.blockfile import save_block

    root = tmp_path_factory.mktemp("blocks")
    out = {}
    for size in (100, 200):
        t = time.perf_counter()
        block = precompute_catalyst_2d(size - 1, size - 1, 1e-4, "polar")
        elapsed = time.perf_counter() - t
        path = root / f"cat{size}.dicat"
        save_block(block, path)
        out[size] = (path, elapsed)
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
