"""Random long-range connections ("fibers") between lattice nodes.

Each ordered pair of distinct nodes x, y is connected independently with probability
C_tilde * eps^alpha * |xi|^(-d-ps+ell), xi = (x - y)/eps, and a present connection
carries the weight sigma = c * eps^-alpha * |xi|^(d+ps-ell). Two samplers produce the
same law: a naive one with one Bernoulli draw per pair (oracle, O(N^2)) and a shell
sampler that groups pairs by lattice offset and draws each group's edge count
binomially.
"""
import os
import csv
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from dotenv import load_dotenv

from lattice_model.core.exceptions import SizeLimit
from lattice_model.core.grid import GridSpec
from lattice_model.core.params import ModelParams

load_dotenv(".env")
logger = logging.getLogger(__name__)

DEFAULT_NAIVE_PAIR_CAP = 4_000_000
NAIVE_CHUNK_ROWS = 256


def naive_pair_cap() -> int:
    return int(os.getenv("LATTICE_NAIVE_PAIR_CAP") or DEFAULT_NAIVE_PAIR_CAP)


@dataclass(frozen=True)
class PairProbability:
    """Connection probability as a function of the lattice offset xi = (x - y)/eps.

    Args:
        params (ModelParams): model parameters.
        override (float, optional): constant probability for every xi != 0, replacing
            the power law. Used for oracles and tests.
    """
    params: ModelParams
    override: Optional[float] = None

    def of_length(self, length: np.ndarray) -> np.ndarray:
        """Probability for lattice distances |xi| (0 maps to 0)."""
        length = np.asarray(length, dtype=float)
        positive = length > 0
        out = np.zeros_like(length)
        if self.override is not None:
            out[positive] = self.override
            return out
        prm = self.params
        out[positive] = (prm.C_tilde * prm.eps ** prm.alpha
                         * length[positive] ** prm.probability_exponent)
        return out

    def __call__(self, offsets: np.ndarray) -> np.ndarray:
        offsets = np.atleast_2d(np.asarray(offsets, dtype=float))
        return self.of_length(np.linalg.norm(offsets, axis=1))


def pair_probability(params: ModelParams, offset) -> float:
    """Probability that two nodes at lattice offset `offset` are connected."""
    return float(PairProbability(params)(np.asarray(offset, dtype=float).reshape(1, -1))[0])


def sigma_weight(params: ModelParams, length) -> np.ndarray:
    """Weight c * eps^-alpha * |xi|^(d+ps-ell) of a present connection at lattice
    distance |xi|."""
    length = np.asarray(length, dtype=float)
    return params.c * params.eps ** (-params.alpha) * length ** (params.kernel_exponent - params.ell)


@dataclass(frozen=True, eq=False)
class FiberSet:
    """Sampled connections on a grid.

    Attributes:
        grid: grid the node indices refer to.
        edges: (E, 2) ordered node-index pairs (i, j), lexicographically sorted.
        weights: (E,) sigma for each edge.
        seed: RNG seed used.
        symmetric: whether the relation is symmetric (each edge stored in both orientations).
        params: parameters the weights were computed from.
    """
    grid: GridSpec
    edges: np.ndarray
    weights: np.ndarray
    seed: Optional[int] = None
    symmetric: bool = False
    params: Optional[ModelParams] = None
    meta: Dict[str, str] = field(default_factory=dict)

    def __len__(self):
        return self.edges.shape[0]

    @classmethod
    def empty(cls, grid: GridSpec, params: Optional[ModelParams] = None,
              seed: Optional[int] = None, symmetric: bool = False) -> "FiberSet":
        return cls(grid, np.zeros((0, 2), dtype=np.int64), np.zeros(0), seed, symmetric, params)

    @classmethod
    def from_edges(cls, grid: GridSpec, params: ModelParams, edges: np.ndarray,
                   seed: Optional[int] = None, symmetric: bool = False) -> "FiberSet":
        """Build a fiber set with closed-form weights, sorted and de-duplicated."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        edges = edges[edges[:, 0] != edges[:, 1]]
        if edges.shape[0]:
            edges = np.unique(edges, axis=0)
        length = np.linalg.norm(grid.lattice[edges[:, 0]] - grid.lattice[edges[:, 1]], axis=1)
        return cls(grid, edges, sigma_weight(params, length), seed, symmetric, params)

    def offsets(self) -> np.ndarray:
        """Lattice offsets xi = (x_i - x_j)/eps per edge."""
        return self.grid.lattice[self.edges[:, 0]] - self.grid.lattice[self.edges[:, 1]]

    def lengths(self) -> np.ndarray:
        """Physical lengths |x_i - x_j| per edge."""
        return self.grid.eps * np.linalg.norm(self.offsets(), axis=1)

    def per_offset_counts(self) -> Dict[Tuple[int, ...], int]:
        if len(self) == 0:
            return {}
        uniq, counts = np.unique(self.offsets(), axis=0, return_counts=True)
        return {tuple(int(v) for v in u): int(c) for u, c in zip(uniq, counts)}

    def to_csv(self, path) -> None:
        """Dump with columns i, j, weight."""
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["i", "j", "weight"])
            for (i, j), w in zip(self.edges, self.weights):
                writer.writerow([int(i), int(j), repr(float(w))])


def _zigzag(v: int) -> int:
    return 2 * v if v >= 0 else -2 * v - 1


def group_generator(seed: int, offset) -> np.random.Generator:
    """Counter-based generator keyed by (seed, offset), independent of the order in which
    groups are processed."""
    key = tuple(_zigzag(int(v)) for v in offset)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def run_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _is_full_box(grid: GridSpec) -> bool:
    return bool(np.all(grid._lookup >= 0))


def _candidate_offsets(grid: GridSpec, symmetric: bool) -> np.ndarray:
    """All nonzero lattice offsets that can connect two nodes, lexicographically ordered.
    With `symmetric`, only the half whose first nonzero entry is positive."""
    extent = np.asarray(grid._lookup.shape) - 1
    axes = [np.arange(-e, e + 1) for e in extent]
    mesh = np.meshgrid(*axes, indexing="ij")
    offsets = np.stack([m.ravel() for m in mesh], axis=1)
    nonzero = np.any(offsets != 0, axis=1)
    offsets = offsets[nonzero]
    if symmetric:
        first = offsets[np.arange(offsets.shape[0]), np.argmax(offsets != 0, axis=1)]
        offsets = offsets[first > 0]
    return offsets


def _group_sizes(grid: GridSpec, offsets: np.ndarray) -> np.ndarray:
    """Number of ordered pairs (i, j) with lattice_i - lattice_j = xi, per offset."""
    if _is_full_box(grid):
        shape = np.asarray(grid._lookup.shape)
        return np.prod(np.clip(shape[None, :] - np.abs(offsets), 0, None), axis=1)
    return np.array([int(np.sum(grid.shift_index(-xi) >= 0)) for xi in offsets], dtype=np.int64)


def _group_pairs(grid: GridSpec, offset: np.ndarray, positions: np.ndarray):
    """Map positions within an offset group (lexicographic in the source node) to node
    index pairs (i, j) with lattice_i - lattice_j = offset."""
    if _is_full_box(grid):
        shape = np.asarray(grid._lookup.shape)
        sub_shape = shape - np.abs(offset)
        start = grid._origin + np.maximum(offset, 0)
        local = np.stack(np.unravel_index(positions, tuple(sub_shape)), axis=1)
        src = start + local
        i = grid.index_of(src)
        j = grid.index_of(src - offset)
        return i, j
    partner = grid.shift_index(-offset)
    sources = np.flatnonzero(partner >= 0)
    i = sources[positions]
    return i, partner[i]


def _finish(grid, params, edges, seed, symmetric, sampler) -> FiberSet:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if symmetric and edges.shape[0]:
        edges = np.concatenate([edges, edges[:, ::-1]])
    if edges.shape[0]:
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
    length = np.linalg.norm(grid.lattice[edges[:, 0]] - grid.lattice[edges[:, 1]], axis=1)
    fibers = FiberSet(grid, edges, sigma_weight(params, length), seed, symmetric, params,
                      meta={"sampler": sampler})
    logger.debug(f"Sampled {len(fibers)} fibers ({sampler}, seed={seed}, symmetric={symmetric})")
    return fibers


def sample_naive(params: ModelParams, grid: GridSpec, seed: int, symmetric: bool = False,
                 probability: Optional[PairProbability] = None,
                 pair_cap: Optional[int] = None) -> FiberSet:
    """One Bernoulli draw per ordered pair (per unordered pair i < j when `symmetric`,
    then mirrored), consuming the generator in lexicographic pair order.

    Raises:
        SizeLimit: if N^2 exceeds the configured cap (LATTICE_NAIVE_PAIR_CAP).
    """
    cap = pair_cap if pair_cap is not None else naive_pair_cap()
    n = grid.size
    if n * n > cap:
        raise SizeLimit(f"Naive sampling of {n}^2 pairs exceeds the cap of {cap}")
    probability = probability or PairProbability(params)
    rng = run_generator(seed)
    found = []
    for start in range(0, n, NAIVE_CHUNK_ROWS):
        rows = np.arange(start, min(start + NAIVE_CHUNK_ROWS, n))
        i, j = np.meshgrid(rows, np.arange(n), indexing="ij")
        i, j = i.ravel(), j.ravel()
        keep = (j > i) if symmetric else (j != i)
        i, j = i[keep], j[keep]
        p = probability(grid.lattice[i] - grid.lattice[j])
        hit = rng.random(i.shape[0]) < p
        found.append(np.stack([i[hit], j[hit]], axis=1))
    edges = np.concatenate(found) if found else np.zeros((0, 2), dtype=np.int64)
    return _finish(grid, params, edges, seed, symmetric, "naive")


def sample_shells(params: ModelParams, grid: GridSpec, seed: int, symmetric: bool = False,
                  probability: Optional[PairProbability] = None) -> FiberSet:
    """Group pairs by lattice offset (equal probability within a group), draw each
    group's edge count from Binomial(group size, p), then pick that many pairs
    uniformly without replacement. Same law as `sample_naive`."""
    probability = probability or PairProbability(params)
    offsets = _candidate_offsets(grid, symmetric)
    sizes = _group_sizes(grid, offsets)
    p = probability(offsets)
    active = (sizes > 0) & (p > 0)
    found = []
    for xi, size, prob in zip(offsets[active], sizes[active], p[active]):
        rng = group_generator(seed, xi)
        count = int(rng.binomial(int(size), min(float(prob), 1.0)))
        if count == 0:
            continue
        positions = rng.choice(int(size), size=count, replace=False)
        i, j = _group_pairs(grid, xi, np.sort(positions))
        found.append(np.stack([i, j], axis=1))
    logger.debug(f"Shell sampler visited {int(np.sum(active))} offset groups")
    edges = np.concatenate(found) if found else np.zeros((0, 2), dtype=np.int64)
    return _finish(grid, params, edges, seed, symmetric, "shells")


SAMPLERS = {
    "shells": sample_shells,
    "naive": sample_naive,
}


def sample_fibers(params: ModelParams, grid: GridSpec, seed: int, symmetric: bool = False,
                  sampler: str = "shells", **kwargs) -> FiberSet:
    if sampler not in SAMPLERS:
        raise ValueError(f"Sampler {sampler} not found.")
    return SAMPLERS[sampler](params, grid, seed, symmetric=symmetric, **kwargs)


def expected_edge_count(params: ModelParams, grid: GridSpec,
                        probability: Optional[PairProbability] = None) -> float:
    """Expected number of ordered connected pairs: the sum of pair probabilities.

    When ell > ps the sum over offsets is dominated by long fibers and the count scales
    like eps^(-d+alpha+ps-ell). When ell < ps it is dominated by short ones and the
    count grows like eps^(alpha-d), the number of nodes times eps^alpha.
    """
    probability = probability or PairProbability(params)
    offsets = _candidate_offsets(grid, symmetric=False)
    sizes = _group_sizes(grid, offsets)
    return float(np.sum(sizes * probability(offsets)))
