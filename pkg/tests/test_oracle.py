import numpy as np
import pytest

from conftest import random_problem
from dicat.catalyst import catalyst_1d_analytic
from dicat.diffusion import gauss_seidel_solve
from dicat.grid import make_domain
from dicat.oracle import (
    DENSE_LIMIT, direct_solve_1d, direct_solve_2d_small, monte_carlo_harmonic, sparse_solve,
)


def one_hot_side(n=3):
    return make_domain(2, n, n, lambda x, y: 100.0 if x == 0 else 0.0)


def test_direct_1d_three_nodes():
    d = make_domain(1, 3, boundary_spec={0: 0.0, 2: 2.0})
    assert direct_solve_1d(d)[1] == pytest.approx(1.0)


def test_direct_1d_tent():
    N = 12
    mask = np.zeros(2 * N + 1, bool)
    mask[N] = True
    d = make_domain(1, 2 * N + 1, boundary_spec={0: 0.0, N: 1.0, 2 * N: 0.0}, extra_boundary=mask)
    np.testing.assert_allclose(direct_solve_1d(d)[N:], catalyst_1d_analytic(N), atol=1e-14)


def test_direct_2d_examples():
    np.testing.assert_allclose(direct_solve_2d_small(make_domain(2, 7, 5, 100.0)), 100.0, atol=1e-12)
    assert direct_solve_2d_small(one_hot_side())[1, 1] == pytest.approx(25.0)
    assert not direct_solve_2d_small(make_domain(2, 6, 6, 0.0)).any()


def test_dense_cap():
    with pytest.raises(ValueError):
        direct_solve_2d_small(make_domain(2, 70, 70, 0.0))
    assert DENSE_LIMIT == 4096


def test_sparse_matches_dense():
    rng = np.random.default_rng(1)
    d, f = random_problem(rng, 2, max_side=12)
    np.testing.assert_allclose(sparse_solve(d, f=f), direct_solve_2d_small(d, f=f), atol=1e-12)


def test_direct_agrees_with_gauss_seidel():
    rng = np.random.default_rng(4)
    for dim in (1, 2):
        d, f = random_problem(rng, dim)
        T, _ = gauss_seidel_solve(d, source=f, tol=1e-10)
        ref = direct_solve_1d(d, f=f) if dim == 1 else direct_solve_2d_small(d, f=f)
        np.testing.assert_allclose(T, ref, atol=1e-8)


def test_mc_constant_boundary():
    est = monte_carlo_harmonic(make_domain(2, 9, 9, 100.0), (4, 4), 1000, seed=1)
    assert est.mean == 100.0 and est.stderr == 0.0


def test_mc_one_hot_side():
    est = monte_carlo_harmonic(one_hot_side(), (1, 1), 10**5, seed=2024)
    assert abs(est.mean - 25.0) <= 4 * est.stderr
    assert est.count == 10**5 and est.seed == 2024


def test_mc_gamblers_ruin():
    d = make_domain(1, 3, boundary_spec={0: 0.0, 2: 2.0})
    est = monte_carlo_harmonic(d, 1, 20000, seed=3)
    assert abs(est.mean - 1.0) <= 4 * est.stderr


def test_mc_deterministic_and_thread_independent():
    import numba

    d = one_hot_side(7)
    a = monte_carlo_harmonic(d, (3, 2), 5000, seed=9)
    b = monte_carlo_harmonic(d, (3, 2), 5000, seed=9)
    assert a == b
    old = numba.get_num_threads()
    try:
        numba.set_num_threads(1)
        c = monte_carlo_harmonic(d, (3, 2), 5000, seed=9)
    finally:
        numba.set_num_threads(old)
    assert c == a


def test_mc_stderr_definition():
    d = one_hot_side(5)
    est = monte_carlo_harmonic(d, (2, 2), 4000, seed=5)
    assert est.stderr > 0
    lo, hi = est.interval(3)
    assert lo < est.mean < hi


def test_mc_agrees_with_direct_on_most_nodes():
    rng = np.random.default_rng(17)
    hits = total = 0
    for side in (6, 10, 16):
        g = rng.uniform(-1, 1, size=(side, side))
        d = make_domain(2, side, side, g)
        ref = direct_solve_2d_small(d)
        for node in np.argwhere(d.interior)[rng.choice(d.n_interior, 5, replace=False)]:
            est = monte_carlo_harmonic(d, tuple(node), 10**5, seed=int(rng.integers(1 << 30)))
            hits += abs(est.mean - ref[tuple(node)]) <= 4 * est.stderr
            total += 1
    assert hits >= 0.95 * total


def test_mc_input_errors():
    d = one_hot_side(5)
    with pytest.raises(IndexError):
        monte_carlo_harmonic(d, (9, 9), 100, seed=0)
    with pytest.raises(ValueError):
        monte_carlo_harmonic(d, (1,), 100, seed=0)
    with pytest.raises(RuntimeError):
        monte_carlo_harmonic(make_domain(2, 41, 41, 0.0), (20, 20), 10, seed=0, max_steps=5)
