"""Hot-loop kernels for the firewood walks.

Both walks are inherently sequential per trip, so they run as tight scalar
loops: JIT-compiled via numba when it is importable, otherwise in pure Python.
Both paths share one explicit xorshift64* RNG seeded per trip, so results are
bit-identical with or without the JIT.

Status codes: 0 = reached a zone / demand met, 1 = step budget exhausted.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_DOUBLE_NORM = 1.0 / (1 << 53)

# neighbor order: N W, N, N E, W, E, S W, S, S E
_DR = np.array([-1, -1, -1, 0, 0, 1, 1, 1], dtype=np.int64)
_DC = np.array([-1, 0, 1, -1, 1, -1, 0, 1], dtype=np.int64)
_INV_DIAG = np.array([0.7071067811865475, 1.0, 0.7071067811865475,
                      1.0, 1.0,
                      0.7071067811865475, 1.0, 0.7071067811865475])


def seed_state(seed: int) -> int:
    """splitmix64 scramble so any seed (including 0) gives a healthy state."""
    z = (seed + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return z or 0x9E3779B97F4A7C15


def _py_next(state: int) -> tuple[int, float]:
    state ^= state >> 12
    state = (state ^ (state << 25)) & _MASK
    state ^= state >> 27
    value = (state * 0x2545F4914F6CDD1D) & _MASK
    return state, (value >> 11) * _DOUBLE_NORM


def _py_search(start: int, in_zone: np.ndarray, base_w: np.ndarray,
               h: int, w: int, max_steps: int, damping: float, seed: int):
    path = np.empty(max_steps + 1, dtype=np.int32)
    visited = np.zeros(h * w, dtype=np.uint8)
    state = seed_state(seed)
    i = start
    path[0] = i
    n = 1
    visited[i] = 1
    if in_zone[i]:
        return path, n, 0
    dr, dc, diag = _DR, _DC, _INV_DIAG
    for _ in range(max_steps):
        r, c = divmod(i, w)
        total = 0.0
        wts = [0.0] * 8
        idxs = [0] * 8
        m = 0
        for d in range(8):
            rr = r + dr[d]
            cc = c + dc[d]
            if 0 <= rr < h and 0 <= cc < w:
                j = rr * w + cc
                wgt = base_w[j] * diag[d]
                if visited[j]:
                    wgt *= damping
                wts[m] = wgt
                idxs[m] = j
                m += 1
                total += wgt
        state, u = _py_next(state)
        x = u * total
        acc = 0.0
        pick = idxs[m - 1]
        for k in range(m):
            acc += wts[k]
            if x < acc:
                pick = idxs[k]
                break
        i = pick
        path[n] = i
        n += 1
        visited[i] = 1
        if in_zone[i]:
            return path, n, 0
    return path, n, 1


def _py_collect(entry: int, demand: float, stock: np.ndarray, dist_age: np.ndarray,
                h: int, w: int, max_steps: int, disturb_all: int, seed: int):
    cells = np.empty(max_steps + 2, dtype=np.int32)
    taken = np.empty(max_steps + 2, dtype=np.float64)
    state = seed_state(seed)
    i = entry
    remaining = demand
    total = 0.0
    n = 0
    steps = 0
    status = 0
    dr, dc = _DR, _DC
    while remaining > 0.0:
        before = stock[i]
        if before > 0.0:
            take = before if before < remaining else remaining
            after = before - take
            stock[i] = after
            actual = before - after
            cells[n] = i
            taken[n] = actual
            n += 1
            total += actual
            remaining -= actual
            dist_age[i] = 0
            if remaining <= 0.0:
                break
        if disturb_all:
            dist_age[i] = 0
        if steps >= max_steps:
            status = 1
            break
        r, c = divmod(i, w)
        while True:
            state, u = _py_next(state)
            d = int(u * 8.0)
            rr = r + dr[d]
            cc = c + dc[d]
            if 0 <= rr < h and 0 <= cc < w:
                break
        i = rr * w + cc
        steps += 1
    return cells, taken, n, total, status


_search_impl = _py_search
_collect_impl = _py_collect
HAVE_NUMBA = False

try:  # pragma: no cover - exercised when numba is installed
    from numba import njit

    _U = np.uint64

    @njit(cache=True, inline="always")
    def _nb_next(state):
        state ^= state >> _U(12)
        state ^= state << _U(25)
        state ^= state >> _U(27)
        value = state * _U(0x2545F4914F6CDD1D)
        return state, (value >> _U(11)) * _DOUBLE_NORM

    @njit(cache=True)
    def _nb_seed(seed):
        z = seed + _U(0x9E3779B97F4A7C15)
        z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
        z = z ^ (z >> _U(31))
        if z == _U(0):
            z = _U(0x9E3779B97F4A7C15)
        return z

    @njit(cache=True)
    def _nb_search(start, in_zone, base_w, h, w, max_steps, damping, seed):
        path = np.empty(max_steps + 1, dtype=np.int32)
        visited = np.zeros(h * w, dtype=np.uint8)
        state = _nb_seed(_U(seed))
        dr = _DR
        dc = _DC
        diag = _INV_DIAG
        i = start
        path[0] = i
        n = 1
        visited[i] = 1
        if in_zone[i]:
            return path, n, 0
        wts = np.empty(8, dtype=np.float64)
        idxs = np.empty(8, dtype=np.int64)
        for _ in range(max_steps):
            r = i // w
            c = i - r * w
            total = 0.0
            m = 0
            for d in range(8):
                rr = r + dr[d]
                cc = c + dc[d]
                if 0 <= rr < h and 0 <= cc < w:
                    j = rr * w + cc
                    wgt = base_w[j] * diag[d]
                    if visited[j] == 1:
                        wgt *= damping
                    wts[m] = wgt
                    idxs[m] = j
                    m += 1
                    total += wgt
            state, u = _nb_next(state)
            x = u * total
            acc = 0.0
            pick = idxs[m - 1]
            for k in range(m):
                acc += wts[k]
                if x < acc:
                    pick = idxs[k]
                    break
            i = pick
            path[n] = np.int32(i)
            n += 1
            visited[i] = 1
            if in_zone[i]:
                return path, n, 0
        return path, n, 1

    @njit(cache=True)
    def _nb_collect(entry, demand, stock, dist_age, h, w, max_steps,
                    disturb_all, seed):
        cells = np.empty(max_steps + 2, dtype=np.int32)
        taken = np.empty(max_steps + 2, dtype=np.float64)
        state = _nb_seed(_U(seed))
        dr = _DR
        dc = _DC
        i = entry
        remaining = demand
        total = 0.0
        n = 0
        steps = 0
        status = 0
        while remaining > 0.0:
            before = stock[i]
            if before > 0.0:
                take = before if before < remaining else remaining
                after = before - take
                stock[i] = after
                actual = before - after
                cells[n] = np.int32(i)
                taken[n] = actual
                n += 1
                total += actual
                remaining -= actual
                dist_age[i] = 0
                if remaining <= 0.0:
                    break
            if disturb_all == 1:
                dist_age[i] = 0
            if steps >= max_steps:
                status = 1
                break
            r = i // w
            c = i - r * w
            while True:
                state, u = _nb_next(state)
                d = int(u * 8.0)
                rr = r + dr[d]
                cc = c + dc[d]
                if 0 <= rr < h and 0 <= cc < w:
                    break
            i = rr * w + cc
            steps += 1
        return cells, taken, n, total, status

    _search_impl = _nb_search
    _collect_impl = _nb_collect
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    pass


_SEED_MASK = (1 << 63) - 1  # keep seeds inside int64 for the jitted signature


def run_search(start: int, in_zone: np.ndarray, base_w: np.ndarray, h: int,
               w: int, max_steps: int, damping: float, seed: int):
    """Returns (path flat indices, length, status)."""
    return _search_impl(start, in_zone, base_w, h, w, max_steps, damping,
                        seed & _SEED_MASK)


def run_collect(entry: int, demand: float, stock: np.ndarray, dist_age: np.ndarray,
                h: int, w: int, max_steps: int, disturb_all: bool, seed: int):
    """Returns (harvest cells, harvest kg, count, total, status); mutates
    stock and dist_age in place."""
    return _collect_impl(entry, demand, stock, dist_age, h, w, max_steps,
                         1 if disturb_all else 0, seed & _SEED_MASK)
