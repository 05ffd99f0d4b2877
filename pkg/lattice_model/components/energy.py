"""Discrete energy E_eps = E^V_eps + E^loc_eps - F_eps and its gradient.

Displacements are stored as (N, d) arrays on the nodes of Q_eps and extended by zero
outside. Internally an extra zero row is appended, so that index -1 reads the exterior.
"""
import logging
from dataclasses import dataclass, asdict
from typing import Optional, Tuple

import numpy as np

from lattice_model.core.exceptions import ConditionViolated, InvalidParameters
from lattice_model.core.grid import DiscreteField, GridSpec, NeighborStencil
from lattice_model.core.params import ModelParams
from lattice_model.core.quadrature import compensated_sum
from lattice_model.components.fibers import FiberSet
from lattice_model.potentials import AbstractPotential, ProjectionPotential

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnergyBreakdown:
    """The three parts of an energy and their combination total = e_nonlocal + e_local - work."""
    e_nonlocal: float
    e_local: float
    work: float
    total: float

    @classmethod
    def compose(cls, e_nonlocal: float, e_local: float, work: float) -> "EnergyBreakdown":
        return cls(float(e_nonlocal), float(e_local), float(work),
                   float(e_nonlocal) + float(e_local) - float(work))

    @classmethod
    def zero(cls) -> "EnergyBreakdown":
        return cls(0.0, 0.0, 0.0, 0.0)

    def gap(self, other: "EnergyBreakdown") -> "EnergyBreakdown":
        """Componentwise absolute differences."""
        return EnergyBreakdown(abs(self.e_nonlocal - other.e_nonlocal),
                               abs(self.e_local - other.e_local),
                               abs(self.work - other.work),
                               abs(self.total - other.total))

    def to_dict(self):
        return asdict(self)


def _padded(values: np.ndarray) -> np.ndarray:
    return np.vstack([values, np.zeros((1, values.shape[1]))])


def _scatter(index: np.ndarray, rows: np.ndarray, size: int) -> np.ndarray:
    """Sum `rows` into `size` + 1 slots by `index` (-1 goes to the extra slot)."""
    index = np.where(index < 0, size, index)
    return np.stack([np.bincount(index, weights=rows[:, k], minlength=size + 1)
                     for k in range(rows.shape[1])], axis=1)


class EnergyModel:
    """Energy of displacements on a fixed grid with a fixed fiber sample.

    Precomputes the local stencil terms: every (x, b) with x in Z^d_eps, b in B minus 0
    and at least one of x, x + eps*b in Q_eps. Each term reads
    ((u(x + eps*b) - u(x)) . b/|b|^2)^2.

    Args:
        grid (GridSpec): grid of the displacements.
        fibers (FiberSet, optional): sampled connections; no non-local part without them.
        pot (AbstractPotential, optional): pair potential, projection by default.
        params (ModelParams, optional): parameters for the kernel exponent, taken from
            the fibers when omitted.
        interior_only (bool): keep only local terms with both ends in Q_eps.
    """

    def __init__(self, grid: GridSpec, fibers: Optional[FiberSet] = None,
                 pot: Optional[AbstractPotential] = None, params: Optional[ModelParams] = None,
                 interior_only: bool = False):
        if fibers is not None:
            grid.require_same(fibers.grid, "fiber set")
        self.grid = grid
        self.fibers = fibers
        self.pot = pot or ProjectionPotential()
        self.params = params if params is not None else (fibers.params if fibers else None)
        self.interior_only = interior_only
        self._build_local_terms()
        self._build_nonlocal_terms()

    def _build_local_terms(self):
        stencil = NeighborStencil.for_dim(self.grid.dim)
        plus, minus, direction = [], [], []
        nodes = np.arange(self.grid.size)
        for b, norm in zip(stencil.offsets, stencil.norms):
            w = b / norm ** 2
            ahead = self.grid.shift_index(b)
            keep = nodes if not self.interior_only else nodes[ahead >= 0]
            plus.append(ahead[keep])
            minus.append(keep)
            direction.append(np.tile(w, (keep.shape[0], 1)))
            if not self.interior_only:
                # x outside Q_eps, x + eps*b inside
                behind = self.grid.shift_index(-b)
                entering = nodes[behind < 0]
                plus.append(entering)
                minus.append(np.full(entering.shape[0], -1, dtype=np.int64))
                direction.append(np.tile(w, (entering.shape[0], 1)))
        self._plus = np.concatenate(plus)
        self._minus = np.concatenate(minus)
        self._w = np.concatenate(direction)
        self._local_scale = self.grid.eps ** (self.grid.dim - 2)

    def _build_nonlocal_terms(self):
        fibers = self.fibers
        if fibers is None or len(fibers) == 0:
            self._edges = np.zeros((0, 2), dtype=np.int64)
            self._kappa = np.zeros(0)
            return
        if self.params is None:
            raise ValueError("Model parameters are required for the non-local energy")
        d = self.grid.dim
        self._edges = fibers.edges
        self._x = self.grid.nodes[fibers.edges[:, 0]]
        self._y = self.grid.nodes[fibers.edges[:, 1]]
        length = np.linalg.norm(self._x - self._y, axis=1)
        self._kappa = self.grid.eps ** (2 * d) * fibers.weights / length ** self.params.kernel_exponent

    def _values(self, u) -> np.ndarray:
        if isinstance(u, DiscreteField):
            self.grid.require_same(u.grid)
            return u.values
        return np.asarray(u, dtype=float).reshape(self.grid.size, -1)

    def _strains(self, values: np.ndarray) -> np.ndarray:
        padded = _padded(values)
        return np.einsum("tk,tk->t", padded[self._plus] - padded[self._minus], self._w)

    def local_energy(self, u) -> float:
        t = self._strains(self._values(u))
        return self._local_scale * compensated_sum(t ** 2)

    def local_gradient(self, u) -> np.ndarray:
        values = self._values(u)
        t = self._strains(values)
        rows = 2.0 * self._local_scale * t[:, None] * self._w
        n = self.grid.size
        return (_scatter(self._plus, rows, n) - _scatter(self._minus, rows, n))[:n]

    def nonlocal_energy(self, u) -> float:
        if self._kappa.size == 0:
            return 0.0
        values = self._values(u)
        zeta = values[self._edges[:, 0]] - values[self._edges[:, 1]]
        return compensated_sum(self._kappa * self.pot.evaluate(self._x, self._y, zeta))

    def nonlocal_gradient(self, u) -> np.ndarray:
        values = self._values(u)
        n = self.grid.size
        if self._kappa.size == 0:
            return np.zeros_like(values)
        zeta = values[self._edges[:, 0]] - values[self._edges[:, 1]]
        rows = self._kappa[:, None] * self.pot.derivative(self._x, self._y, zeta)
        return (_scatter(self._edges[:, 0], rows, n) - _scatter(self._edges[:, 1], rows, n))[:n]

    def work(self, u, f) -> float:
        values = self._values(u)
        forces = self._values(f)
        return self.grid.cell_volume * compensated_sum(np.sum(forces * values, axis=1))

    def energy(self, u, f=None) -> EnergyBreakdown:
        work = 0.0 if f is None else self.work(u, f)
        return EnergyBreakdown.compose(self.nonlocal_energy(u), self.local_energy(u), work)

    def gradient(self, u, f=None) -> np.ndarray:
        grad = self.local_gradient(u) + self.nonlocal_gradient(u)
        if f is not None:
            grad = grad - self.grid.cell_volume * self._values(f)
        return grad

    def energy_change(self, u, v, f=None) -> float:
        """E(v) - E(u), summed term by term so that it stays accurate when v is close to u."""
        a, b = self._values(u), self._values(v)
        t_a, t_b = self._strains(a), self._strains(b)
        change = self._local_scale * compensated_sum((t_b - t_a) * (t_b + t_a))
        if self._kappa.size:
            zeta_a = a[self._edges[:, 0]] - a[self._edges[:, 1]]
            zeta_b = b[self._edges[:, 0]] - b[self._edges[:, 1]]
            change += compensated_sum(
                self._kappa * self.pot.difference(self._x, self._y, zeta_a, zeta_b))
        if f is not None:
            change -= self.grid.cell_volume * compensated_sum(
                np.sum(self._values(f) * (b - a), axis=1))
        return float(change)

    def diagonal(self) -> np.ndarray:
        """Positive per-unknown curvature estimate (N, d): exact diagonal of the local
        quadratic form plus kappa * hessian_bound for every edge end."""
        n, d = self.grid.size, self.grid.dim
        rows = 2.0 * self._local_scale * self._w ** 2
        diag = (_scatter(self._plus, rows, n) + _scatter(self._minus, rows, n))[:n]
        if self._kappa.size:
            bound = self._kappa * self.pot.hessian_bound(self._x, self._y)
            rows = np.tile(bound[:, None], (1, d))
            diag += (_scatter(self._edges[:, 0], rows, n) + _scatter(self._edges[:, 1], rows, n))[:n]
        return np.where(diag > 0, diag, 1.0)

    def __repr__(self):
        return (f"<EnergyModel nodes={self.grid.size} local_terms={self._plus.shape[0]} "
                f"edges={self._kappa.size} pot={self.pot.instance_id}>")


def local_energy(u: DiscreteField, interior_only: bool = False) -> float:
    """eps^(d-2) * sum over x in Z^d_eps and b in B minus 0 of the squared projected
    differences of the zero-extended field."""
    return EnergyModel(u.grid, interior_only=interior_only).local_energy(u)


def nonlocal_energy(u: DiscreteField, fibers: FiberSet, pot: AbstractPotential,
                    params: Optional[ModelParams] = None) -> float:
    """eps^(2d) * sum over edges of sigma * V(x, y, u(x) - u(y)) / |x - y|^(d+ps).

    Raises:
        GridMismatch: if the fibers live on another grid.
    """
    fibers.grid.require_same(u.grid, "fiber set")
    return EnergyModel(u.grid, fibers, pot, params).nonlocal_energy(u)


def work_term(u: DiscreteField, f: DiscreteField) -> float:
    """eps^d * sum over nodes of f(x) . u(x).

    Raises:
        GridMismatch: if f and u live on different grids.
    """
    u.grid.require_same(f.grid, "force")
    return u.grid.cell_volume * compensated_sum(np.sum(f.values * u.values, axis=1))


def total_energy(u: DiscreteField, f: Optional[DiscreteField], fibers: Optional[FiberSet],
                 pot: Optional[AbstractPotential] = None,
                 params: Optional[ModelParams] = None) -> EnergyBreakdown:
    if f is not None:
        u.grid.require_same(f.grid, "force")
    return EnergyModel(u.grid, fibers, pot, params).energy(u, f)


def gradient(u: DiscreteField, f: Optional[DiscreteField], fibers: Optional[FiberSet],
             pot: Optional[AbstractPotential] = None,
             params: Optional[ModelParams] = None) -> DiscreteField:
    """Per-node gradient of `total_energy` with respect to the node values."""
    if f is not None:
        u.grid.require_same(f.grid, "force")
    model = EnergyModel(u.grid, fibers, pot, params)
    return u.with_values(model.gradient(u, f))


def _forward_differences(u: DiscreteField, include_exterior: bool) -> np.ndarray:
    """Squared forward differences |u(x + eps*e_i) - u(x)|^2 for all x with a nonzero term."""
    grid = u.grid
    padded = _padded(u.values)
    nodes = np.arange(grid.size)
    squares = []
    for axis in range(grid.dim):
        step = np.zeros(grid.dim, dtype=np.int64)
        step[axis] = 1
        ahead = grid.shift_index(step)
        squares.append(np.sum((padded[ahead] - u.values) ** 2, axis=1))
        if include_exterior:
            entering = nodes[grid.shift_index(-step) < 0]
            squares.append(np.sum(u.values[entering] ** 2, axis=1))
    return np.concatenate(squares)


def korn_lhs(u: DiscreteField) -> float:
    """eps^d * sum over x in Q_eps and axes i of eps^-2 |u(x + eps*e_i) - u(x)|^2."""
    grid = u.grid
    return grid.eps ** (grid.dim - 2) * compensated_sum(_forward_differences(u, False))


def poincare_check(u: DiscreteField, p: float) -> Tuple[float, float]:
    """Both sides of the discrete Poincare inequality without its constant:
    lhs = (eps^d sum |u|^p)^(1/p), rhs = (eps^d sum over x in Z^d_eps and axes i of
    eps^-2 |u(x + eps*e_i) - u(x)|^2)^(1/2).

    Raises:
        InvalidParameters: if p is outside [1, 2d/(d-2)) (any p >= 1 for d <= 2).
    """
    grid = u.grid
    d = grid.dim
    if p < 1 or (d > 2 and p >= 2 * d / (d - 2)):
        raise InvalidParameters([ConditionViolated(
            "growth_exponent", "1 <= p < 2d/(d-2)", f"p={p:g}, d={d}")])
    norms = np.linalg.norm(u.values, axis=1)
    lhs = (grid.cell_volume * compensated_sum(norms ** p)) ** (1.0 / p)
    rhs = np.sqrt(grid.eps ** (d - 2) * compensated_sum(_forward_differences(u, True)))
    return float(lhs), float(rhs)
