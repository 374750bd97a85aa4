"""TSPLIB instance handling: parsing, integer distances, tours, and a
small-instance exact solver used as a test oracle.

Only symmetric planar instances (``TYPE: TSP``, ``EDGE_WEIGHT_TYPE: EUC_2D``)
are supported; anything else is rejected at parse time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

BRUTE_FORCE_MAX_CITIES = 10


class TsplibParseError(ValueError):
    """Raised when a .tsp or .opt.tour file cannot be parsed."""


@dataclass(frozen=True)
class City:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Instance:
    """A parsed planar TSP instance with 0-based dense city ids."""

    name: str
    n: int
    cities: tuple[City, ...]
    metric: str = "EUC2D"

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"instance needs at least 3 cities, got {self.n}")
        if self.n != len(self.cities):
            raise ValueError(f"n={self.n} but {len(self.cities)} cities given")
        ids = [c.id for c in self.cities]
        if ids != list(range(self.n)):
            raise ValueError("city ids must be dense 0..n-1 in order")

    def distance_matrix(self) -> "DistanceMatrix":
        return DistanceMatrix.from_instance(self)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric integer edge lengths with zero diagonal."""

    n: int
    d: np.ndarray

    @classmethod
    def from_instance(cls, inst: Instance) -> "DistanceMatrix":
        xs = np.array([c.x for c in inst.cities], dtype=np.float64)
        ys = np.array([c.y for c in inst.cities], dtype=np.float64)
        dx = xs[:, None] - xs[None, :]
        dy = ys[:, None] - ys[None, :]
        d = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)
        np.fill_diagonal(d, 0)
        d.flags.writeable = False
        return cls(n=inst.n, d=d)


@dataclass(frozen=True)
class Tour:
    """A closed tour: ``path`` is a permutation of 0..n-1, ``length`` its
    integer cycle length including the edge back to path[0]."""

    path: tuple[int, ...]
    length: int


def euc2d_distance(a: City, b: City) -> int:
    """TSPLIB EUC_2D rule: Euclidean distance rounded to nearest integer."""
    return int(math.floor(math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2) + 0.5))


def tour_length(path, d: DistanceMatrix | np.ndarray) -> int:
    """Length of the closed tour visiting ``path`` in order.

    Raises ValueError if ``path`` is not a permutation of 0..n-1.
    """
    mat = d.d if isinstance(d, DistanceMatrix) else np.asarray(d)
    p = np.asarray(path, dtype=np.int64)
    n = mat.shape[0]
    if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError("path is not a permutation of 0..n-1")
    nxt = np.roll(p, -1)
    return int(mat[p, nxt].sum())


def _header_value(line: str) -> str:
    return line.split(":", 1)[1].strip() if ":" in line else ""


def parse_tsplib(text: str | Iterable[str]) -> Instance:
    """Parse a TSPLIB .tsp document from a string or an iterable of lines.

    Requires NAME, DIMENSION, EDGE_WEIGHT_TYPE: EUC_2D and a
    NODE_COORD_SECTION with 1-based ids, which are remapped to 0-based.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = list(text)

    name = None
    dimension = None
    ew_type = None
    coords: dict[int, tuple[float, float]] = {}

    it = iter(enumerate(lines, start=1))
    for lineno, raw in it:
        s = raw.strip()
        if not s:
            continue
        key = s.split(":", 1)[0].strip().upper()
        if key == "NAME":
            name = _header_value(s)
        elif key == "DIMENSION":
            val = _header_value(s)
            try:
                dimension = int(val)
            except ValueError:
                raise TsplibParseError(f"line {lineno}: bad DIMENSION {val!r}")
        elif key == "EDGE_WEIGHT_TYPE":
            ew_type = _header_value(s).upper()
        elif key in ("TYPE", "COMMENT", "DISPLAY_DATA_TYPE", "EOF"):
            continue
        elif key == "NODE_COORD_SECTION":
            if dimension is None:
                raise TsplibParseError("DIMENSION must appear before NODE_COORD_SECTION")
            if ew_type is None:
                raise TsplibParseError("EDGE_WEIGHT_TYPE must appear before NODE_COORD_SECTION")
            if ew_type != "EUC_2D":
                raise TsplibParseError(f"unsupported metric {ew_type!r}, only EUC_2D is handled")
            for lineno2, raw2 in it:
                s2 = raw2.strip()
                if not s2 or s2.upper() == "EOF":
                    break
                parts = s2.split()
                if len(parts) != 3:
                    raise TsplibParseError(f"line {lineno2}: malformed coordinate line {s2!r}")
                try:
                    cid = int(parts[0])
                    x, y = float(parts[1]), float(parts[2])
                except ValueError:
                    raise TsplibParseError(f"line {lineno2}: malformed coordinate line {s2!r}")
                if cid in coords:
                    raise TsplibParseError(f"line {lineno2}: duplicate city id {cid}")
                coords[cid] = (x, y)
        else:
            raise TsplibParseError(f"line {lineno}: unrecognized header {s!r}")

    if name is None:
        raise TsplibParseError("missing NAME header")
    if dimension is None:
        raise TsplibParseError("missing DIMENSION header")
    if ew_type is None:
        raise TsplibParseError("missing EDGE_WEIGHT_TYPE header")
    if ew_type != "EUC_2D":
        raise TsplibParseError(f"unsupported metric {ew_type!r}, only EUC_2D is handled")
    if not coords:
        raise TsplibParseError("missing NODE_COORD_SECTION")
    if len(coords) != dimension:
        raise TsplibParseError(
            f"DIMENSION says {dimension} cities but {len(coords)} coordinate lines found"
        )
    if sorted(coords) != list(range(1, dimension + 1)):
        raise TsplibParseError("city ids must be exactly 1..DIMENSION")

    cities = tuple(City(id=i, x=coords[i + 1][0], y=coords[i + 1][1]) for i in range(dimension))
    return Instance(name=name, n=dimension, cities=cities)


def parse_tsplib_file(path: str | Path) -> Instance:
    return parse_tsplib(Path(path).read_text())


def parse_opt_tour(text: str | Iterable[str], n: int | None = None) -> tuple[int, ...]:
    """Parse a TSPLIB .opt.tour TOUR_SECTION (1-based ids, -1 terminator)
    into a 0-based path."""
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = list(text)
    path: list[int] = []
    in_section = False
    for raw in lines:
        s = raw.strip()
        if not s:
            continue
        if s.upper() == "TOUR_SECTION":
            in_section = True
            continue
        if not in_section:
            continue
        if s == "-1" or s.upper() == "EOF":
            break
        for tok in s.split():
            try:
                path.append(int(tok) - 1)
            except ValueError:
                raise TsplibParseError(f"malformed tour entry {tok!r}")
    if not path:
        raise TsplibParseError("missing TOUR_SECTION")
    if n is not None and len(path) != n:
        raise TsplibParseError(f"tour has {len(path)} cities, expected {n}")
    if sorted(path) != list(range(len(path))):
        raise TsplibParseError("tour is not a permutation of the city ids")
    return tuple(path)


def parse_opt_tour_file(path: str | Path, n: int | None = None) -> tuple[int, ...]:
    return parse_opt_tour(Path(path).read_text(), n=n)


def brute_force_optimum(inst: Instance) -> Tour:
    """Globally optimal tour by exhaustive search with city 0 fixed.

    Only feasible for tiny instances; refuses n > BRUTE_FORCE_MAX_CITIES.
    """
    if inst.n > BRUTE_FORCE_MAX_CITIES:
        raise ValueError(
            f"brute force limited to n <= {BRUTE_FORCE_MAX_CITIES}, got {inst.n}"
        )
    d = inst.distance_matrix().d
    best_len = None
    best_path = None
    for perm in itertools.permutations(range(1, inst.n)):
        length = d[0, perm[0]] + d[perm[-1], 0]
        for a, b in zip(perm, perm[1:]):
            length += d[a, b]
        if best_len is None or length < best_len:
            best_len = int(length)
            best_path = (0,) + perm
    return Tour(path=best_path, length=best_len)


def bundled_instance_path(name: str = "berlin52") -> Path:
    """Path of a data file shipped with the package (.tsp by bare name)."""
    p = Path(__file__).parent / "data" / f"{name}.tsp"
    if not p.exists():
        raise FileNotFoundError(f"no bundled instance named {name!r}")
    return p


def bundled_opt_tour_path(name: str = "berlin52") -> Path:
    p = Path(__file__).parent / "data" / f"{name}.opt.tour"
    if not p.exists():
        raise FileNotFoundError(f"no bundled optimal tour for {name!r}")
    return p
