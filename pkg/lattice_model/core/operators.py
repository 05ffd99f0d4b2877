"""Discretization R_eps (cell averages) and piecewise-constant extension R*_eps."""
import logging
from typing import Callable, Iterable, Union

import numpy as np

from lattice_model.core.grid import Box, DiscreteField, Domain, GridSpec, SmoothField
from lattice_model.core.quadrature import (
    cell_face_breakpoints,
    composite_box_rule,
    compensated_sum,
    tensor_rule,
)

logger = logging.getLogger(__name__)

ContinuumFn = Union[SmoothField, Callable[[np.ndarray], np.ndarray]]

CELL_ORDER = 3  # Gauss points per axis for cell averages


def _evaluate(u: ContinuumFn, points: np.ndarray) -> np.ndarray:
    out = np.asarray(u(points), dtype=float)
    return out.reshape(points.shape[0], -1)


def full_cells(grid: GridSpec) -> np.ndarray:
    """Mask of nodes whose whole cell x + (-eps/2, eps/2]^d lies in Q.

    Exact for boxes. For an indicator domain a cell counts as full when its corners and
    the points of the cell quadrature rule all lie in Q, so the average in `restrict`
    never samples outside Q; a hole that misses all of them goes unnoticed.
    """
    half = grid.eps / 2.0
    domain = grid.domain
    if isinstance(domain, Box):
        tol = 1e-9 * grid.eps
        lo, hi = np.asarray(domain.lower), np.asarray(domain.upper)
        return np.all((grid.nodes - half >= lo - tol) & (grid.nodes + half <= hi + tol), axis=1)
    shrink = half * (1.0 - 1e-9)
    corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * grid.dim, indexing="ij")).reshape(grid.dim, -1).T
    gauss, _ = tensor_rule(np.full(grid.dim, -0.5), np.full(grid.dim, 0.5), CELL_ORDER)
    mask = np.ones(grid.size, dtype=bool)
    for offset in np.vstack([shrink * corners, grid.eps * gauss]):
        mask &= domain.contains(grid.nodes + offset)
    return mask


def restrict(u: ContinuumFn, grid: GridSpec) -> DiscreteField:
    """The operator R_eps: cell average of u over x + (-eps/2, eps/2]^d for every node.

    Cells inside Q use a 3^d-point tensor Gauss rule; cells cut by the boundary of Q use
    the value at the cell centre.
    """
    full = full_cells(grid)
    centre_values = _evaluate(u, grid.nodes)
    values = centre_values.copy()
    if np.any(full):
        ref_pts, ref_wts = tensor_rule(np.full(grid.dim, -0.5), np.full(grid.dim, 0.5), CELL_ORDER)
        nodes = grid.nodes[full]
        pts = (nodes[:, None, :] + grid.eps * ref_pts[None, :, :]).reshape(-1, grid.dim)
        samples = _evaluate(u, pts).reshape(nodes.shape[0], ref_pts.shape[0], -1)
        values[full] = np.einsum("q,nqm->nm", ref_wts, samples)
    logger.debug(f"Restricted field to {grid.size} nodes ({int(np.sum(~full))} boundary cells)")
    return DiscreteField(grid, values)


class PiecewiseConstant:
    """The operator R*_eps applied to a discrete field: constant u_eps(z) on each cell
    z + (-eps/2, eps/2]^d intersected with Q, zero elsewhere."""

    def __init__(self, field: DiscreteField):
        self.field = field
        self.grid = field.grid

    def cell_index(self, points: np.ndarray) -> np.ndarray:
        """Node index of the cell containing each point, -1 if none."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        # x in (z - eps/2, z + eps/2]  <=>  k = ceil(x/eps - 1/2)
        k = np.ceil(points / self.grid.eps - 0.5 - 1e-9).astype(np.int64)
        idx = self.grid.index_of(k)
        idx[~self.grid.domain.contains(points)] = -1
        return idx

    def __call__(self, points: np.ndarray) -> np.ndarray:
        idx = self.cell_index(points)
        out = np.zeros((idx.shape[0], self.field.components))
        hit = idx >= 0
        out[hit] = self.field.values[idx[hit]]
        return out


def extend(u_eps: DiscreteField) -> PiecewiseConstant:
    """The operator R*_eps."""
    return PiecewiseConstant(u_eps)


def domain_rule(domain: Domain, eps_values: Iterable[float], order: int = 4,
                panels: int = 0):
    """Composite Gauss rule on Q whose panels respect the cell faces of every grid size
    in `eps_values` (piecewise-constant extensions are then integrated exactly). With
    `panels` > 0, uniform breakpoints are merged in as well. Points outside an indicator
    domain get zero weight."""
    box = domain.bounding_box
    axis_breaks = []
    for axis in range(box.dim):
        lo, hi = box.lower[axis], box.upper[axis]
        pieces = [np.array([lo, hi])]
        pieces += [cell_face_breakpoints(lo, hi, eps) for eps in eps_values]
        if panels:
            pieces.append(np.linspace(lo, hi, panels + 1))
        axis_breaks.append(np.unique(np.concatenate(pieces)))
    points, weights = composite_box_rule(axis_breaks, order)
    if not isinstance(domain, Box):
        weights = weights * domain.contains(points)
    return points, weights


def integrate(fn: ContinuumFn, domain: Domain, eps_values: Iterable[float] = (),
              order: int = 4, panels: int = 0) -> np.ndarray:
    """Integral over Q of a vector-valued function, component-wise."""
    points, weights = domain_rule(domain, eps_values, order=order, panels=panels)
    values = _evaluate(fn, points)
    return np.array([compensated_sum(weights * values[:, k]) for k in range(values.shape[1])])


def roundtrip_defect(u: ContinuumFn, grid: GridSpec, order: int = 4) -> float:
    """L2(Q) norm of R*_eps R_eps u - u."""
    pc = extend(restrict(u, grid))
    points, weights = domain_rule(grid.domain, [grid.eps], order=order)
    diff = pc(points) - _evaluate(u, points)
    return float(np.sqrt(compensated_sum(weights * np.sum(diff ** 2, axis=1))))


def l2_distance(a: DiscreteField, b: DiscreteField) -> float:
    """L2(Q) distance between the piecewise-constant extensions of two discrete fields,
    possibly on different grids over the same domain. Exact up to rounding."""
    domain = a.grid.domain
    points, weights = domain_rule(domain, [a.grid.eps, b.grid.eps], order=1)
    diff = extend(a)(points) - extend(b)(points)
    return float(np.sqrt(compensated_sum(weights * np.sum(diff ** 2, axis=1))))


def l2_norm(a: DiscreteField) -> float:
    return float(np.sqrt(a.grid.cell_volume * compensated_sum(np.sum(a.values ** 2, axis=1))))
