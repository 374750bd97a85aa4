"""Ant-system primitives for symmetric TSP.

Transition probabilities follow tau^alpha * eta^beta with eta = 1/distance,
deposits are Q / L_k on every edge an ant used, and the per-iteration update
is tau' = rho * tau + sum(deposits): rho weights the retained pheromone
directly, so small rho means fast evaporation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tsp import DistanceMatrix, Instance

# Stand-in visibility for zero-distance pairs so coincident cities stay
# strongly preferred instead of poisoning the weight row with infinities.
ZERO_DISTANCE_VISIBILITY = 1e9


@dataclass(frozen=True)
class AcoParams:
    """One ant-system configuration."""

    alpha: float
    beta: float
    rho: float
    m: int  # number of ants
    iterations: int = 30
    tau0: float = 1.0
    q_deposit: float = 1000.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if self.m < 1:
            raise ValueError(f"ant count must be >= 1, got {self.m}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not (math.isfinite(self.tau0) and self.tau0 > 0):
            raise ValueError(f"tau0 must be finite and > 0, got {self.tau0}")
        if not (math.isfinite(self.q_deposit) and self.q_deposit > 0):
            raise ValueError(f"deposit constant must be finite and > 0, got {self.q_deposit}")


class PheromoneTable:
    """Symmetric pheromone levels over city pairs, plus the distance matrix.

    tau stays strictly positive and finite; both matrix triangles always
    carry the same value for an undirected edge.
    """

    def __init__(self, dmat: np.ndarray, tau: np.ndarray):
        dmat = np.asarray(dmat)
        tau = np.array(tau, dtype=np.float64)  # private copy
        if dmat.ndim != 2 or dmat.shape[0] != dmat.shape[1]:
            raise ValueError(f"distance matrix must be square, got {dmat.shape}")
        if tau.shape != dmat.shape:
            raise ValueError(f"tau shape {tau.shape} != distance shape {dmat.shape}")
        if not np.array_equal(dmat, dmat.T):
            raise ValueError("distance matrix must be symmetric")
        if not np.array_equal(tau, tau.T):
            raise ValueError("pheromone matrix must be symmetric")
        # self-loops never participate; pin the diagonal so tables compare
        # bit-identically whether they lived in memory or round-tripped a CSV
        np.fill_diagonal(tau, 1.0)
        if not (np.isfinite(tau).all() and (tau > 0).all()):
            raise ValueError("pheromone levels must be finite and strictly positive")
        tau.flags.writeable = False
        self.dmat = dmat
        self.tau = tau
        self._logs: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def n(self) -> int:
        return self.dmat.shape[0]

    @classmethod
    def initial(cls, dmat: np.ndarray | DistanceMatrix, tau0: float) -> "PheromoneTable":
        if isinstance(dmat, DistanceMatrix):
            dmat = dmat.d
        dmat = np.asarray(dmat)
        return cls(dmat, np.full(dmat.shape, float(tau0)))

    def log_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(log tau, log eta) for the kernels; computed once per table."""
        if self._logs is None:
            with np.errstate(divide="ignore"):
                log_tau = np.log(self.tau)
            d = self.dmat.astype(np.float64)
            eta = np.where(d > 0, 1.0 / np.where(d > 0, d, 1.0), ZERO_DISTANCE_VISIBILITY)
            log_eta = np.log(eta)
            np.fill_diagonal(log_tau, 0.0)
            np.fill_diagonal(log_eta, 0.0)
            log_tau.flags.writeable = False
            log_eta.flags.writeable = False
            self._logs = (log_tau, log_eta)
        return self._logs


def transition_weights(
    table: PheromoneTable, alpha: float, beta: float, current: int, visited: np.ndarray
) -> np.ndarray:
    """Normalized move probabilities from ``current``; visited cities get 0.

    Reference implementation of tau^alpha * eta^beta / sum(...), evaluated
    in log space with max shift. The kernels replicate this arithmetic.
    """
    log_tau, log_eta = table.log_arrays()
    n = table.n
    visited = np.asarray(visited, dtype=bool)
    if visited.shape != (n,):
        raise ValueError(f"visited mask must have shape ({n},)")
    if not visited[current]:
        raise ValueError("current city must be marked visited")
    lw = alpha * log_tau[current] + beta * log_eta[current]
    lw = np.where(visited, -np.inf, lw)
    finite = np.isfinite(lw)
    probs = np.zeros(n)
    if finite.any():
        m = lw[finite].max()
        w = np.where(finite, np.exp(lw - m), 0.0)
        total = w.sum()
        if total > 0 and np.isfinite(total):
            return w / total
    remaining = ~visited
    k = int(remaining.sum())
    if k == 0:
        raise ValueError("no unvisited cities remain")
    probs[remaining] = 1.0 / k
    return probs


def delta_tau(path: np.ndarray, length: int, q_deposit: float) -> dict[tuple[int, int], float]:
    """Per-edge deposit Q / L_k for one ant's closed tour.

    Keys are undirected edges normalized to (min, max); a tour over n
    cities yields exactly n entries.
    """
    if length <= 0:
        raise ValueError(f"tour length must be positive, got {length}")
    amount = q_deposit / float(length)
    n = len(path)
    out: dict[tuple[int, int], float] = {}
    for i in range(n):
        a = int(path[i])
        b = int(path[(i + 1) % n])
        key = (a, b) if a < b else (b, a)
        out[key] = out.get(key, 0.0) + amount
    return out


def update_pheromones(
    table: PheromoneTable, deposits: list[dict[tuple[int, int], float]], rho: float
) -> PheromoneTable:
    """tau' = rho * tau + total deposit, every edge decayed, deposits summed
    in ant order per edge."""
    totals: dict[tuple[int, int], float] = {}
    for dep in deposits:
        for key, val in dep.items():
            totals[key] = totals.get(key, 0.0) + val
    tau = rho * table.tau
    for (a, b) in sorted(totals):
        tau[a, b] += totals[(a, b)]
        if a != b:
            tau[b, a] += totals[(a, b)]
    return PheromoneTable(table.dmat, tau)


def encode_path(path) -> str:
    """Dash-joined city ids, e.g. '0-5-3-1'."""
    return "-".join(str(int(c)) for c in path)


def decode_path(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split("-"))
    except ValueError:
        raise ValueError(f"malformed encoded path {text!r}")


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one multi-iteration ACO run."""

    tuple_index: int
    run_index: int
    iteration_bests: tuple[int, ...]
    best_length: int
    best_path: tuple[int, ...]


def run(
    instance: Instance | DistanceMatrix | np.ndarray,
    params: AcoParams,
    entropy: int | tuple[int, ...],
    **engine_kwargs,
) -> RunRecord:
    """Run the configured iteration count; thin wrapper over the engine."""
    from . import engine

    return engine.run_iterations(instance, params, entropy, **engine_kwargs)
