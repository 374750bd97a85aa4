"""Tour-construction kernels.

Two interchangeable backends build ant tours from log-pheromone and
log-visibility matrices: a numba-compiled kernel and a pure-numpy fallback.
Selection is controlled by the ``ANTSWEEP_NUMBA`` environment variable at
import time: unset picks numba when importable, ``0`` forces the numpy path,
``1`` requires numba and raises if it is missing.

Both backends consume one uniform draw per decision (start city, then one
per roulette step) from a caller-supplied vector, so a given backend is
fully deterministic. Bit-identical tours across backends are not guaranteed:
the two paths may round ``exp`` differently in the last ulp.
"""

from __future__ import annotations

import math
import os

import numpy as np

ENV_FLAG = "ANTSWEEP_NUMBA"


def _requested() -> bool | None:
    raw = os.environ.get(ENV_FLAG)
    if raw is None or raw == "":
        return None
    if raw == "0":
        return False
    if raw == "1":
        return True
    raise ValueError(f"{ENV_FLAG} must be unset, '0', or '1'; got {raw!r}")


_req = _requested()
if _req is False:
    _njit = None
else:
    try:
        from numba import njit as _njit
    except ImportError:
        if _req is True:
            raise ImportError(f"{ENV_FLAG}=1 but numba is not importable")
        _njit = None

BACKEND = "numba" if _njit is not None else "numpy"


def _construct_tour_py(log_tau, log_eta, alpha, beta, dmat, uniforms, path):
    """Roulette-wheel tour construction. Weights are computed in log space
    and shifted by their maximum before exponentiation; a NaN weight is
    treated as zero, and if every candidate weight degenerates the step
    falls back to a uniform pick over the remaining cities."""
    n = log_tau.shape[0]
    start = int(uniforms[0] * n)
    if start >= n:
        start = n - 1
    path[0] = start
    visited = np.zeros(n, dtype=np.uint8)
    visited[start] = 1
    cur = start
    lw = np.empty(n, dtype=np.float64)
    length = 0
    for step in range(1, n):
        m = -1.0e308
        for j in range(n):
            if visited[j] == 0:
                w = alpha * log_tau[cur, j] + beta * log_eta[cur, j]
                lw[j] = w
                if w == w and w > m:
                    m = w
        total = 0.0
        for j in range(n):
            if visited[j] == 0:
                w = lw[j]
                if w == w and m > -1.0e308:
                    lw[j] = math.exp(w - m)
                else:
                    lw[j] = 0.0
                total += lw[j]
        nxt = -1
        if total > 0.0 and np.isfinite(total):
            r = uniforms[step] * total
            acc = 0.0
            for j in range(n):
                if visited[j] == 0:
                    acc += lw[j]
                    if acc > r:
                        nxt = j
                        break
            if nxt == -1:
                # accumulated round-off left r unreached; take the last candidate
                for j in range(n - 1, -1, -1):
                    if visited[j] == 0:
                        nxt = j
                        break
        else:
            remaining = n - step
            pick = int(uniforms[step] * remaining)
            if pick >= remaining:
                pick = remaining - 1
            seen = 0
            for j in range(n):
                if visited[j] == 0:
                    if seen == pick:
                        nxt = j
                        break
                    seen += 1
        path[step] = nxt
        visited[nxt] = 1
        length += dmat[cur, nxt]
        cur = nxt
    length += dmat[cur, start]
    return length


if _njit is not None:
    _construct_tour_nb = _njit(cache=True, nogil=True)(_construct_tour_py)
else:
    _construct_tour_nb = None


def _construct_tour_np(log_tau, log_eta, alpha, beta, dmat, uniforms, path):
    # Vectorized twin of _construct_tour_py; same draws, same tie handling.
    n = log_tau.shape[0]
    start = min(int(uniforms[0] * n), n - 1)
    path[0] = start
    unvisited = np.ones(n, dtype=bool)
    unvisited[start] = False
    cur = start
    length = 0
    for step in range(1, n):
        cand = np.flatnonzero(unvisited)
        lw = alpha * log_tau[cur, cand] + beta * log_eta[cur, cand]
        valid = ~np.isnan(lw)
        total = 0.0
        if valid.any():
            m = lw[valid].max()
            w = np.where(valid, np.exp(lw - m), 0.0)
            acc = np.cumsum(w)
            total = float(acc[-1])
        if total > 0.0 and math.isfinite(total):
            r = uniforms[step] * total
            k = int(np.searchsorted(acc, r, side="right"))
            if k >= cand.size:
                k = cand.size - 1
            nxt = int(cand[k])
        else:
            pick = min(int(uniforms[step] * cand.size), cand.size - 1)
            nxt = int(cand[pick])
        path[step] = nxt
        unvisited[nxt] = False
        length += int(dmat[cur, nxt])
        cur = nxt
    length += int(dmat[cur, start])
    return length


def construct_tour(
    log_tau: np.ndarray,
    log_eta: np.ndarray,
    alpha: float,
    beta: float,
    dmat: np.ndarray,
    uniforms: np.ndarray,
) -> tuple[np.ndarray, int]:
    """Build one closed tour; returns (path, integer length).

    ``uniforms`` must hold at least n draws in [0, 1): index 0 picks the
    start city, index ``step`` drives the roulette choice at that step.
    """
    n = log_tau.shape[0]
    if uniforms.shape[0] < n:
        raise ValueError(f"need at least {n} uniforms, got {uniforms.shape[0]}")
    path = np.empty(n, dtype=np.int64)
    if _construct_tour_nb is not None:
        length = _construct_tour_nb(log_tau, log_eta, alpha, beta, dmat, uniforms, path)
    else:
        length = _construct_tour_np(log_tau, log_eta, alpha, beta, dmat, uniforms, path)
    return path, int(length)


def construct_tour_with(
    backend: str,
    log_tau: np.ndarray,
    log_eta: np.ndarray,
    alpha: float,
    beta: float,
    dmat: np.ndarray,
    uniforms: np.ndarray,
) -> tuple[np.ndarray, int]:
    """Like construct_tour but with an explicit backend, for benchmarks and
    cross-checking. ``backend`` is 'numba', 'python' (the uncompiled loop),
    or 'numpy'."""
    path = np.empty(log_tau.shape[0], dtype=np.int64)
    if backend == "numba":
        if _construct_tour_nb is None:
            raise RuntimeError("numba backend unavailable")
        fn = _construct_tour_nb
    elif backend == "python":
        fn = _construct_tour_py
    elif backend == "numpy":
        fn = _construct_tour_np
    else:
        raise ValueError(f"unknown backend {backend!r}")
    length = fn(log_tau, log_eta, alpha, beta, dmat, uniforms, path)
    return path, int(length)
