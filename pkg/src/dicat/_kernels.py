# Compiled inner loops.  Everything here works on plain numpy arrays; the
# public modules own validation and bookkeeping.

import numpy as np
from numba import njit, prange

REGULAR = 0
PENDING = 1  # catalyst that still holds its initial fluid
ABSORBING = 2


@njit(cache=True)
def diffuse_one(n, H, F, nbr, pw, status, absorbed_at, acc):
    st = status[n]
    f = F[n]
    if st == ABSORBING:
        if f != 0.0:
            absorbed_at[n] += f
            acc[0] += f
            F[n] = 0.0
        return
    if st == PENDING:
        status[n] = ABSORBING
    if f == 0.0:
        return
    H[n] += f
    F[n] = 0.0
    for d in range(nbr.shape[1]):
        m = nbr[n, d]
        amt = pw[n, d] * f
        if m < 0:
            acc[0] += amt
        elif status[m] != REGULAR:
            absorbed_at[m] += amt
            acc[0] += amt
        else:
            F[m] += amt


@njit(cache=True)
def pending_fluid(F, status):
    s = 0.0
    for n in range(F.shape[0]):
        if status[n] != ABSORBING:
            s += abs(F[n])
    return s


@njit(cache=True)
def run_sweeps(H, F, nbr, pw, status, absorbed_at, acc, skip_eps, target, max_sweeps, priority):
    """Sweep until the pending fluid drops below target; returns (sweeps, fluid)."""
    N = F.shape[0]
    done = 0
    rest = pending_fluid(F, status)
    while done < max_sweeps and rest >= target:
        if priority:
            active = 0
            for n in range(N):
                if status[n] != ABSORBING and abs(F[n]) > skip_eps:
                    active += 1
            theta = rest / max(active, 1)
            for n in range(N):
                if status[n] != ABSORBING and abs(F[n]) >= theta:
                    diffuse_one(n, H, F, nbr, pw, status, absorbed_at, acc)
        else:
            for n in range(N):
                if status[n] != ABSORBING and abs(F[n]) > skip_eps:
                    diffuse_one(n, H, F, nbr, pw, status, absorbed_at, acc)
        done += 1
        rest = pending_fluid(F, status)
        if not np.isfinite(rest):
            break
    return done, rest


@njit(cache=True)
def gs_sweep_1d(T, W, b, interior):
    inc = 0.0
    for i in range(1, T.shape[0] - 1):
        if interior[i]:
            v = W[0, i] * T[i - 1] + W[1, i] * T[i + 1] + b[i]
            d = abs(v - T[i])
            if d > inc:
                inc = d
            T[i] = v
    return inc


@njit(cache=True)
def gs_sweep_2d(T, W, b, interior):
    nx, ny = T.shape
    inc = 0.0
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            if interior[i, j]:
                v = (W[0, i, j] * T[i - 1, j] + W[1, i, j] * T[i + 1, j]
                     + W[2, i, j] * T[i, j - 1] + W[3, i, j] * T[i, j + 1] + b[i, j])
                d = abs(v - T[i, j])
                if d > inc:
                    inc = d
                T[i, j] = v
    return inc


@njit(cache=True)
def gs_run_2d(T, W, b, interior, tol, max_sweeps, ref, ref_tol, check_every):
    """Repeated 2D sweeps; stops on max increment < tol or max|T - ref| <= ref_tol."""
    nx, ny = T.shape
    done = 0
    inc = np.inf
    while done < max_sweeps:
        inc = gs_sweep_2d(T, W, b, interior)
        done += 1
        if inc < tol:
            break
        if ref_tol >= 0.0 and done % check_every == 0:
            err = 0.0
            for i in range(nx):
                for j in range(ny):
                    e = abs(T[i, j] - ref[i, j])
                    if e > err:
                        err = e
            if err <= ref_tol:
                break
    return done, inc


@njit(cache=True)
def gs_run_1d(T, W, b, interior, tol, max_sweeps, ref, ref_tol, check_every):
    done = 0
    inc = np.inf
    while done < max_sweeps:
        inc = gs_sweep_1d(T, W, b, interior)
        done += 1
        if inc < tol:
            break
        if ref_tol >= 0.0 and done % check_every == 0:
            if np.max(np.abs(T - ref)) <= ref_tol:
                break
    return done, inc


@njit(cache=True, parallel=True)
def jacobi_sweep_1d(T, W, b, interior):
    old = T.copy()
    n = T.shape[0]
    incs = np.zeros(n)
    for i in prange(1, n - 1):
        if interior[i]:
            v = W[0, i] * old[i - 1] + W[1, i] * old[i + 1] + b[i]
            incs[i] = abs(v - old[i])
            T[i] = v
    return incs.max()


@njit(cache=True, parallel=True)
def jacobi_sweep_2d(T, W, b, interior):
    old = T.copy()
    nx, ny = T.shape
    incs = np.zeros(nx)
    for i in prange(1, nx - 1):
        row = 0.0
        for j in range(1, ny - 1):
            if interior[i, j]:
                v = (W[0, i, j] * old[i - 1, j] + W[1, i, j] * old[i + 1, j]
                     + W[2, i, j] * old[i, j - 1] + W[3, i, j] * old[i, j + 1] + b[i, j])
                d = abs(v - old[i, j])
                if d > row:
                    row = d
                T[i, j] = v
        incs[i] = row
    return incs.max()


# --- elementary catalyst on one octant of a square block -------------------

@njit(cache=True)
def _orbit(a, b):
    if a == 0 and b == 0:
        return 1.0
    if b == 0 or a == b:
        return 4.0
    return 8.0


@njit(cache=True)
def octant_pending(F, L):
    s = 0.0
    for n in range(1, L):
        for m in range(n + 1):
            s += _orbit(n, m) * abs(F[n, m])
    return s


@njit(cache=True)
def octant_sweeps(H, F, L, target, max_sweeps):
    """D-iteration of the unit catalyst restricted to 0 <= m <= n <= L.

    Each representative (n, m) stands for its whole dihedral orbit; diffusing
    it diffuses every image at once, so the state stays symmetric.  Fluid
    reaching the origin or the frame (n == L) piles up in F there and counts
    as absorbed.
    """
    done = 0
    rest = octant_pending(F, L)
    while done < max_sweeps and rest >= target:
        for n in range(1, L):
            for m in range(n + 1):
                f = F[n, m]
                if f == 0.0:
                    continue
                F[n, m] = 0.0
                H[n, m] += f
                q = 0.25 * f * _orbit(n, m)
                for k in range(4):
                    if k == 0:
                        a, b = n + 1, m
                    elif k == 1:
                        a, b = n - 1, m
                    elif k == 2:
                        a, b = n, m + 1
                    else:
                        a, b = n, abs(m - 1)
                    if b > a:
                        a, b = b, a
                    F[a, b] += q / _orbit(a, b)
        done += 1
        rest = octant_pending(F, L)
        if not np.isfinite(rest):
            break
    return done, rest


@njit(cache=True)
def polar_sweeps(T, tol, max_sweeps):
    Lr = T.shape[0] - 1
    done = 0
    inc = np.inf
    while done < max_sweeps:
        inc = 0.0
        for n in range(1, Lr):
            v = (2 * n + 1) / (4 * n) * T[n + 1] + (2 * n - 1) / (4 * n) * T[n - 1]
            d = abs(v - T[n])
            if d > inc:
                inc = d
            T[n] = v
        done += 1
        if inc < tol:
            break
    return done, inc


# --- superposition ---------------------------------------------------------

@njit(cache=True)
def add_block_2d(X, B, lx, ly, cx, cy, amount):
    nx, ny = X.shape
    for i in range(nx):
        ii = i - cx + lx
        for j in range(ny):
            X[i, j] += amount * B[ii, j - cy + ly]


@njit(cache=True)
def add_block_1d(X, B, lx, cx, amount):
    for i in range(X.shape[0]):
        X[i] += amount * B[i - cx + lx]


@njit(cache=True)
def correction_round_deferred(Hb, g, coef, H0, lx, ly, bx, by, order, threshold):
    """One correction pass that only tracks H on boundary nodes.

    The amounts are accumulated in ``coef``; the interior is summed later.
    Returns (corrections, max mismatch seen before each correction).
    """
    P = Hb.shape[0]
    count = 0
    worst = 0.0
    for s in range(P):
        k = order[s]
        t = g[k] - Hb[k]
        if abs(t) > worst:
            worst = abs(t)
        if abs(t) > threshold:
            count += 1
            coef[k] += t
            x = bx[k]
            y = by[k]
            for j in range(P):
                Hb[j] += t * H0[bx[j] - x + lx, by[j] - y + ly]
    return count, worst


# --- random walks ----------------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True)
def _splitmix(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return state, z ^ (z >> np.uint64(31))


@njit(cache=True)
def walker_state(seed, index):
    s, a = _splitmix(np.uint64(seed))
    s2, b = _splitmix(a ^ np.uint64(index))
    return b


@njit(cache=True, parallel=True)
def walk_2d(boundary, g, sx, sy, walkers, seed, max_steps):
    out = np.empty(walkers)
    for w in prange(walkers):
        state = walker_state(seed, w)
        x = sx
        y = sy
        steps = 0
        value = np.nan
        while steps < max_steps:
            state, z = _splitmix(state)
            d = z >> np.uint64(62)
            if d == 0:
                x -= 1
            elif d == 1:
                x += 1
            elif d == 2:
                y -= 1
            else:
                y += 1
            steps += 1
            if boundary[x, y]:
                value = g[x, y]
                break
        out[w] = value
    return out


@njit(cache=True, parallel=True)
def walk_1d(boundary, g, sx, walkers, seed, max_steps):
    out = np.empty(walkers)
    for w in prange(walkers):
        state = walker_state(seed, w)
        x = sx
        steps = 0
        value = np.nan
        while steps < max_steps:
            state, z = _splitmix(state)
            if z >> np.uint64(63):
                x += 1
            else:
                x -= 1
            steps += 1
            if boundary[x]:
                value = g[x]
                break
        out[w] = value
    return out


@njit(cache=True)
def materialize(H, F, H0, F0, lx, ly, bx, by, amounts, use_f0):
    """Add amounts[k] times the block centred on (bx[k], by[k]) to H (and F)."""
    for k in range(amounts.shape[0]):
        t = amounts[k]
        if t == 0.0:
            continue
        add_block_2d(H, H0, lx, ly, bx[k], by[k], t)
        if use_f0:
            add_block_2d(F, F0, lx, ly, bx[k], by[k], t)
