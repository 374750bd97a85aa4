"""Low-discrepancy parameter sampling.

A small Sobol generator (direction numbers embedded for up to 8 dimensions,
Joe-Kuo D(6) parameters) feeds a Saltelli cross-sampling design that turns a
base sample of size N into N*(D+2) parameter tuples. Tuples round-trip
through a simple CSV format with header ``index,alpha,beta,rho,ants``.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

MAX_DIMS = 8
_NBITS = 32
_SCALE = 1.0 / (1 << _NBITS)

# (s, a, m) per dimension 2..8; dimension 1 is the base-2 van der Corput
# sequence (all direction integers 1).
_DIRECTION_PARAMS = (
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
)


def _direction_vectors(dim: int) -> np.ndarray:
    """Direction integers (already shifted to 32-bit fixed point) for one
    0-based dimension."""
    v = np.zeros(_NBITS, dtype=np.uint64)
    if dim == 0:
        for k in range(_NBITS):
            v[k] = np.uint64(1) << np.uint64(_NBITS - 1 - k)
        return v
    s, a, m = _DIRECTION_PARAMS[dim - 1]
    for k in range(s):
        v[k] = np.uint64(m[k]) << np.uint64(_NBITS - 1 - k)
    for k in range(s, _NBITS):
        val = v[k - s] ^ (v[k - s] >> np.uint64(s))
        for j in range(1, s):
            if (a >> (s - 1 - j)) & 1:
                val ^= v[k - j]
        v[k] = val
    return v


class SobolGenerator:
    """Gray-code Sobol sequence over the unit cube, up to 8 dimensions.

    The all-zeros point (sequence index 0) is skipped, so the first emitted
    point of any dimension count is (0.5, ..., 0.5). No scrambling is
    applied; output depends only on (dims, how many points were drawn).
    """

    def __init__(self, dims: int):
        if not 1 <= dims <= MAX_DIMS:
            raise ValueError(f"dims must be in [1, {MAX_DIMS}], got {dims}")
        self.dims = dims
        self._v = np.stack([_direction_vectors(d) for d in range(dims)])
        self._state = np.zeros(dims, dtype=np.uint64)
        self._index = 0  # points emitted so far; sequence index of the next point is _index + 1

    def next_points(self, n: int) -> np.ndarray:
        """The next ``n`` points as an (n, dims) float64 array in [0, 1)."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        out = np.empty((n, self.dims), dtype=np.float64)
        for i in range(n):
            # Gray-code step: flip the direction vector of the lowest zero
            # bit of the previous sequence index.
            c = 0
            prev = self._index
            while prev & 1:
                prev >>= 1
                c += 1
            self._state ^= self._v[:, c]
            self._index += 1
            out[i] = self._state * _SCALE
        return out


def sobol_points(dims: int, n: int) -> np.ndarray:
    """First ``n`` Sobol points in ``dims`` dimensions (zero point skipped)."""
    return SobolGenerator(dims).next_points(n)


@dataclass(frozen=True)
class DimSpec:
    name: str
    low: float
    high: float
    kind: str = "real"  # "real" or "integer"

    def __post_init__(self):
        if self.kind not in ("real", "integer"):
            raise ValueError(f"kind must be 'real' or 'integer', got {self.kind!r}")
        if not self.low < self.high:
            raise ValueError(f"{self.name}: low must be < high")


@dataclass(frozen=True)
class ParameterSpace:
    """The four swept dimensions: alpha, beta, rho, ants."""

    alpha: DimSpec
    beta: DimSpec
    rho: DimSpec
    ants: DimSpec

    def __post_init__(self):
        if self.alpha.low <= 0 or self.beta.low <= 0:
            raise ValueError("alpha and beta ranges must stay positive")
        if self.rho.low < 0 or self.rho.high >= 1:
            raise ValueError("rho range must lie within [0, 1)")
        if self.ants.low < 1:
            raise ValueError("ants low must be >= 1")
        if self.ants.kind != "integer":
            raise ValueError("ants must be an integer dimension")

    @property
    def dims(self) -> tuple[DimSpec, ...]:
        return (self.alpha, self.beta, self.rho, self.ants)

    @property
    def dimension(self) -> int:
        return len(self.dims)


def default_space() -> ParameterSpace:
    """The default sweep ranges: alpha in [0.5, 2], beta in [1, 5],
    rho in [0.1, 0.9], ants in [50, 250]."""
    return ParameterSpace(
        alpha=DimSpec("alpha", 0.5, 2.0),
        beta=DimSpec("beta", 1.0, 5.0),
        rho=DimSpec("rho", 0.1, 0.9),
        ants=DimSpec("ants", 50, 250, kind="integer"),
    )


@dataclass(frozen=True)
class ParameterTuple:
    index: int
    alpha: float
    beta: float
    rho: float
    ants: int


def scale_unit(u: float, dim: DimSpec) -> float | int:
    """Map a unit-cube coordinate into a dimension's range.

    Real dimensions map affinely onto [low, high); integer dimensions round
    the affine image half away from zero, then clamp to [low, high].
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"unit coordinate out of [0, 1): {u}")
    value = dim.low + u * (dim.high - dim.low)
    if dim.kind == "real":
        return value
    rounded = int(np.floor(value + 0.5)) if value >= 0 else -int(np.floor(-value + 0.5))
    return int(min(max(rounded, dim.low), dim.high))


def _tuple_from_row(index: int, row: np.ndarray, space: ParameterSpace) -> ParameterTuple:
    vals = [scale_unit(float(u), dim) for u, dim in zip(row, space.dims)]
    return ParameterTuple(index=index, alpha=vals[0], beta=vals[1], rho=vals[2], ants=vals[3])


def saltelli_sample(
    space: ParameterSpace, n_base: int, strict: bool = False
) -> list[ParameterTuple]:
    """Saltelli's cross-sampling design over a parameter space.

    Draws ``n_base`` rows from a 2D-dimensional Sobol sequence, splits them
    into matrices A and B, and emits per base row: the A row, the D rows
    where one column of A is replaced by B's, then the B row. Total count is
    ``n_base * (D + 2)``; indices follow emission order.

    ``n_base`` should be a power of two for the sequence's balance
    properties; other values warn (or raise when ``strict``).
    """
    if n_base < 1:
        raise ValueError("n_base must be >= 1")
    if n_base & (n_base - 1) != 0:
        msg = f"base sample count {n_base} is not a power of two; Sobol balance is lost"
        if strict:
            raise ValueError(msg)
        warnings.warn(msg, stacklevel=2)
    d = space.dimension
    base = sobol_points(2 * d, n_base)
    a, b = base[:, :d], base[:, d:]
    tuples: list[ParameterTuple] = []
    for j in range(n_base):
        tuples.append(_tuple_from_row(len(tuples), a[j], space))
        for i in range(d):
            cross = a[j].copy()
            cross[i] = b[j, i]
            tuples.append(_tuple_from_row(len(tuples), cross, space))
        tuples.append(_tuple_from_row(len(tuples), b[j], space))
    return tuples


TUPLES_HEADER = ["index", "alpha", "beta", "rho", "ants"]


def write_tuples_csv(tuples: Iterable[ParameterTuple], out: TextIO | str | Path) -> None:
    """Write tuples as CSV; reals use shortest round-trip decimal form."""
    if not hasattr(out, "write"):
        with open(out, "w", newline="") as fh:
            write_tuples_csv(tuples, fh)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TUPLES_HEADER)
    for t in tuples:
        writer.writerow([t.index, repr(t.alpha), repr(t.beta), repr(t.rho), t.ants])


def read_tuples_csv(source: TextIO | str | Path) -> list[ParameterTuple]:
    if not hasattr(source, "read"):
        with open(source, newline="") as fh:
            return read_tuples_csv(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("tuple CSV is empty (missing header)")
    if header != TUPLES_HEADER:
        raise ValueError(f"bad tuple CSV header {header!r}, expected {TUPLES_HEADER!r}")
    tuples = []
    seen = set()
    for row in reader:
        if not row:
            continue
        if len(row) != 5:
            raise ValueError(f"tuple CSV row has {len(row)} fields: {row!r}")
        try:
            idx = int(row[0])
            alpha, beta, rho = float(row[1]), float(row[2]), float(row[3])
            ants = int(row[4])
        except ValueError:
            raise ValueError(f"non-numeric field in tuple CSV row {row!r}")
        if idx in seen:
            raise ValueError(f"duplicate tuple index {idx}")
        seen.add(idx)
        tuples.append(ParameterTuple(index=idx, alpha=alpha, beta=beta, rho=rho, ants=ants))
    return tuples
