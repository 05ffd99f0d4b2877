import csv
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from lattice_model.core.exceptions import EmptyGrid, GridMismatch

logger = logging.getLogger(__name__)

# lattice coordinates within this fraction of a cell of a face count as on the face
SNAP_TOL = 1e-9


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box (lower_1, upper_1) x ... x (lower_d, upper_d)."""
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same dimension")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"Degenerate box {self.lower} x {self.upper}")

    @classmethod
    def unit(cls, d: int) -> "Box":
        return cls((0.0,) * d, (1.0,) * d)

    @classmethod
    def cell_aligned(cls, eps: float, lower_index: Sequence[int],
                     upper_index: Sequence[int]) -> "Box":
        """Box whose faces lie on cell faces, so that it is exactly the union of the cells
        of the lattice points eps*k with lower_index <= k <= upper_index."""
        lower = tuple((k - 0.5) * eps for k in lower_index)
        upper = tuple((k + 0.5) * eps for k in upper_index)
        return cls(lower, upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(np.subtract(self.upper, self.lower)))

    @property
    def bounding_box(self) -> "Box":
        return self

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return np.all((points > lo) & (points < hi), axis=1)

    def contains_box(self, other: "Box") -> bool:
        return all(lo <= olo and ohi <= hi for lo, hi, olo, ohi
                   in zip(self.lower, self.upper, other.lower, other.upper))

    def lattice_range(self, eps: float, axis: int) -> Tuple[int, int]:
        """Smallest and largest k with lower < eps*k < upper along `axis`."""
        lo = int(np.floor(self.lower[axis] / eps + SNAP_TOL)) + 1
        hi = int(np.ceil(self.upper[axis] / eps - SNAP_TOL)) - 1
        return lo, hi


@dataclass(frozen=True)
class IndicatorDomain:
    """Bounded region given by a vectorised membership predicate and a box containing it.
    No regularity of the boundary is checked."""
    predicate: Callable[[np.ndarray], np.ndarray]
    bounding_box: Box
    volume_hint: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.bounding_box.dim

    @property
    def diameter(self) -> float:
        return self.bounding_box.diameter

    @property
    def volume(self) -> float:
        if self.volume_hint is not None:
            return self.volume_hint
        rng = np.random.default_rng(0)
        bb = self.bounding_box
        pts = rng.uniform(bb.lower, bb.upper, size=(200_000, bb.dim))
        return bb.volume * float(np.mean(self.contains(pts)))

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.asarray(self.predicate(points), dtype=bool) & self.bounding_box.contains(points)

    def lattice_range(self, eps: float, axis: int) -> Tuple[int, int]:
        return self.bounding_box.lattice_range(eps, axis)


Domain = Union[Box, IndicatorDomain]


@dataclass(frozen=True, eq=False)
class GridSpec:
    """The lattice Q_eps = Q cap eps*Z^d with a dense index.

    Attributes:
        domain: the region Q.
        eps: grid size.
        lattice: (N, d) integer lattice coordinates, lexicographically ordered.
        nodes: (N, d) physical coordinates eps * lattice.
    """
    domain: Domain
    eps: float
    lattice: np.ndarray
    nodes: np.ndarray
    _origin: np.ndarray = field(repr=False)
    _lookup: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.lattice.shape[1]

    @property
    def size(self) -> int:
        return self.lattice.shape[0]

    @property
    def covered_volume(self) -> float:
        """eps^d * |Q_eps|, which tends to |Q| as eps -> 0."""
        return self.eps ** self.dim * self.size

    @property
    def cell_volume(self) -> float:
        return self.eps ** self.dim

    def index_of(self, lattice_coords: np.ndarray) -> np.ndarray:
        """Dense index of each lattice coordinate row, -1 where the point is not a node."""
        coords = np.atleast_2d(np.asarray(lattice_coords, dtype=np.int64))
        rel = coords - self._origin
        shape = np.asarray(self._lookup.shape)
        inside = np.all((rel >= 0) & (rel < shape), axis=1)
        out = np.full(coords.shape[0], -1, dtype=np.int64)
        if np.any(inside):
            out[inside] = self._lookup[tuple(rel[inside].T)]
        return out

    def shift_index(self, offset: Sequence[int]) -> np.ndarray:
        """Index of node i + offset for every node i, -1 where it leaves Q_eps."""
        return self.index_of(self.lattice + np.asarray(offset, dtype=np.int64))

    def same_as(self, other: "GridSpec") -> bool:
        return (self is other) or (
            self.eps == other.eps and self.lattice.shape == other.lattice.shape
            and np.array_equal(self.lattice, other.lattice))

    def require_same(self, other: "GridSpec", what: str = "field") -> None:
        if not self.same_as(other):
            raise GridMismatch(f"The {what} lives on a different grid")

    def to_csv(self, path) -> None:
        """Dump nodes with columns ix_0..ix_{d-1}, x_0..x_{d-1}."""
        d = self.dim
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow([f"ix_{i}" for i in range(d)] + [f"x_{i}" for i in range(d)])
            for k, x in zip(self.lattice, self.nodes):
                writer.writerow([int(v) for v in k] + [repr(float(v)) for v in x])


def build_grid(domain: Domain, eps: float) -> GridSpec:
    """Enumerate Q_eps = Q cap eps*Z^d in lexicographic lattice order.

    Raises:
        EmptyGrid: if no lattice point lies in Q.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    ranges = [domain.lattice_range(eps, axis) for axis in range(domain.dim)]
    if any(hi < lo for lo, hi in ranges):
        raise EmptyGrid(f"No lattice point of spacing {eps} lies in the domain")
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in ranges]
    mesh = np.meshgrid(*axes, indexing="ij")
    lattice = np.stack([m.ravel() for m in mesh], axis=1)
    if isinstance(domain, IndicatorDomain):
        lattice = lattice[domain.contains(lattice * eps)]
    if lattice.shape[0] == 0:
        raise EmptyGrid(f"No lattice point of spacing {eps} lies in the domain")

    origin = np.array([lo for lo, _ in ranges], dtype=np.int64)
    lookup = np.full([hi - lo + 1 for lo, hi in ranges], -1, dtype=np.int64)
    lookup[tuple((lattice - origin).T)] = np.arange(lattice.shape[0])
    logger.debug(f"Built grid with {lattice.shape[0]} nodes at eps={eps}")
    return GridSpec(domain=domain, eps=float(eps), lattice=lattice, nodes=lattice * float(eps),
                    _origin=origin, _lookup=lookup)


@dataclass(frozen=True, eq=False)
class NeighborStencil:
    """The neighbour set B minus the zero vector: all vectors with entries in {-1, 0, 1}."""
    offsets: np.ndarray

    @classmethod
    def for_dim(cls, d: int) -> "NeighborStencil":
        offsets = [b for b in itertools.product((-1, 0, 1), repeat=d) if any(b)]
        return cls(offsets=np.array(offsets, dtype=np.int64))

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.offsets, axis=1)

    def __len__(self):
        return self.offsets.shape[0]


@dataclass(frozen=True, eq=False)
class DiscreteField:
    """Vector values on the nodes of a grid, extended by zero outside Q_eps."""
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != self.grid.size:
            raise GridMismatch(
                f"Field has {values.shape[0]} values but the grid has {self.grid.size} nodes")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec, components: Optional[int] = None) -> "DiscreteField":
        return cls(grid, np.zeros((grid.size, components or grid.dim)))

    @property
    def components(self) -> int:
        return self.values.shape[1]

    def at(self, lattice_coords: np.ndarray) -> np.ndarray:
        """Values at lattice coordinates, the zero vector outside Q_eps."""
        idx = self.grid.index_of(lattice_coords)
        out = np.zeros((idx.shape[0], self.components))
        out[idx >= 0] = self.values[idx[idx >= 0]]
        return out

    def with_values(self, values: np.ndarray) -> "DiscreteField":
        return DiscreteField(self.grid, np.asarray(values, dtype=float).reshape(self.values.shape))

    def __add__(self, other: "DiscreteField") -> "DiscreteField":
        self.grid.require_same(other.grid)
        return DiscreteField(self.grid, self.values + other.values)

    def __sub__(self, other: "DiscreteField") -> "DiscreteField":
        self.grid.require_same(other.grid)
        return DiscreteField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "DiscreteField":
        return DiscreteField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def to_csv(self, path, prefix: str = "u") -> None:
        """Dump with columns ix_0..ix_{d-1}, u_0..u_{m-1}."""
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow([f"ix_{i}" for i in range(self.grid.dim)]
                            + [f"{prefix}_{i}" for i in range(self.components)])
            for k, v in zip(self.grid.lattice, self.values):
                writer.writerow([int(c) for c in k] + [repr(float(c)) for c in v])


@dataclass(frozen=True)
class SmoothField:
    """A continuum vector field u: R^d -> R^m given by vectorised callables.

    `value` maps points (M, d) to (M, m); `gradient` maps points (M, d) to (M, m, d) with
    gradient[..., i, j] = d u_i / d x_j. Without an analytic gradient, central
    differences with step `fd_step` are used.
    """
    value: Callable[[np.ndarray], np.ndarray]
    gradient_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    components: Optional[int] = None
    fd_step: float = 1e-6

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.asarray(self.value(points), dtype=float)
        return out.reshape(points.shape[0], -1)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.gradient_fn is not None:
            grad = np.asarray(self.gradient_fn(points), dtype=float)
            return grad.reshape(points.shape[0], -1, points.shape[1])
        d, h = points.shape[1], self.fd_step
        columns = []
        for j in range(d):
            step = np.zeros(d)
            step[j] = h
            columns.append((self(points + step) - self(points - step)) / (2 * h))
        return np.stack(columns, axis=-1)

    def scaled(self, factor: float) -> "SmoothField":
        return SmoothField(lambda x: factor * self(x), lambda x: factor * self.gradient(x),
                           components=self.components)


def zero_field(components: int) -> SmoothField:
    return SmoothField(lambda x: np.zeros((x.shape[0], components)),
                       lambda x: np.zeros((x.shape[0], components, x.shape[1])))
