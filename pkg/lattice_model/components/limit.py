"""Continuum limit functional

    E(u) = c_bar * int_Q int_Q V(x, y, u(x) - u(y)) / |x - y|^(d+ps) dy dx
           + int_Q sum_{b in B minus 0} (b/|b| . grad u b/|b|)^2 dx
           - int_Q u . f dx

for smooth u on a box Q.

The double integral is singular on the diagonal. For every outer point x the inner domain
Q is split into the 2d pyramids with apex x and one face F of Q as base,
y = x + t (z - x) with z in F and t in [0, 1], so that dy = t^(d-1) dist(x, F) dt dz.
After this change of variables the singularity sits at t = 0 with the known power
t^(p(1-s)-1), which a Gauss-Jacobi rule integrates without loss. Face coordinates use
rules graded towards the foot point of x on F.
"""
import math
import logging
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.special import roots_jacobi

from lattice_model.core.exceptions import NoConvergence, NonIntegrable
from lattice_model.core.grid import Box, DiscreteField, Domain, NeighborStencil, SmoothField
from lattice_model.core.params import ModelParams
from lattice_model.core.quadrature import compensated_sum, composite_box_rule, gauss_legendre
from lattice_model.components.energy import EnergyBreakdown
from lattice_model.potentials import AbstractPotential, ProjectionPotential

logger = logging.getLogger(__name__)

ContinuumFn = Union[SmoothField, Callable[[np.ndarray], np.ndarray]]

DEFAULT_RTOL = 1e-4
OUTER_ORDER = 4
GRADING_RATIO = 0.25
ROWS_PER_CHUNK = 400_000


@lru_cache(maxsize=None)
def jacobi_rule(order: int, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1] for int_0^1 t^beta g(t) dt, beta > -1."""
    x, w = roots_jacobi(order, 0.0, beta)
    return (x + 1.0) / 2.0, w * 2.0 ** (-beta - 1.0)


@lru_cache(maxsize=None)
def geometric_rule(order: int, levels: int, ratio: float = GRADING_RATIO) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on [0, 1] with panels [ratio^(k+1), ratio^k] graded towards 0."""
    breaks = np.concatenate([[0.0], ratio ** np.arange(levels, -1, -1.0)])
    x, w = gauss_legendre(order)
    a, b = breaks[:-1], breaks[1:]
    nodes = (a[:, None] + (b - a)[:, None] * x[None, :]).ravel()
    weights = ((b - a)[:, None] * w[None, :]).ravel()
    return nodes, weights


def _as_box(domain: Domain) -> Box:
    if not isinstance(domain, Box):
        raise ValueError("Limit energies are evaluated on box domains only")
    return domain


def _evaluate(u: ContinuumFn, points: np.ndarray) -> np.ndarray:
    out = np.asarray(u(points), dtype=float)
    return out.reshape(points.shape[0], -1)


def _gradient(u: ContinuumFn, points: np.ndarray) -> np.ndarray:
    field = u if isinstance(u, SmoothField) else SmoothField(u)
    return field.gradient(points)


def outer_rule(box: Box, panels: int, order: int = OUTER_ORDER):
    axis_breaks = [np.linspace(lo, hi, panels + 1) for lo, hi in zip(box.lower, box.upper)]
    return composite_box_rule(axis_breaks, order)


def _face_points(x: np.ndarray, box: Box, axis: int, side: float, order: int, levels: int):
    """Points z on the face {z_axis = side} with weights, graded towards the foot point of
    every x. Returns arrays of shape (X, K, d) and (X, K)."""
    d = box.dim
    n_x = x.shape[0]
    tau, omega = geometric_rule(order, levels)
    axes_nodes, axes_weights = [], []
    for b in range(d):
        if b == axis:
            continue
        lo, hi = box.lower[b], box.upper[b]
        left = x[:, b:b + 1] - tau[None, :] * (x[:, b:b + 1] - lo)
        right = x[:, b:b + 1] + tau[None, :] * (hi - x[:, b:b + 1])
        axes_nodes.append(np.concatenate([left, right], axis=1))
        axes_weights.append(np.concatenate([omega[None, :] * (x[:, b:b + 1] - lo),
                                            omega[None, :] * (hi - x[:, b:b + 1])], axis=1))
    if not axes_nodes:
        z = np.full((n_x, 1, 1), side)
        return z, np.ones((n_x, 1))
    k = axes_nodes[0].shape[1]
    grids = np.meshgrid(*[np.arange(k)] * len(axes_nodes), indexing="ij")
    combos = np.stack([g.ravel() for g in grids], axis=1)
    points = np.empty((n_x, combos.shape[0], d))
    weights = np.ones((n_x, combos.shape[0]))
    column = 0
    for b in range(d):
        if b == axis:
            points[:, :, b] = side
            continue
        points[:, :, b] = axes_nodes[column][:, combos[:, column]]
        weights *= axes_weights[column][:, combos[:, column]]
        column += 1
    return points, weights


def _nonlocal_at_resolution(u: ContinuumFn, params: ModelParams, pot: AbstractPotential,
                            box: Box, resolution: int) -> float:
    d = box.dim
    kernel = params.kernel_exponent
    beta = params.p * (1.0 - params.s) - 1.0
    inner_order = 6 + int(math.log2(max(resolution, 1)))
    levels = max(3, int(math.ceil(math.log(8.0 * resolution * OUTER_ORDER) / math.log(1.0 / GRADING_RATIO))))
    t_nodes, t_weights = jacobi_rule(inner_order, beta)
    xs, wx = outer_rule(box, resolution)
    face_size = (2 * (levels + 1) * inner_order) ** (d - 1)
    chunk = max(1, ROWS_PER_CHUNK // (face_size * inner_order))
    partial = []
    for start in range(0, xs.shape[0], chunk):
        x = xs[start:start + chunk]
        ux = _evaluate(u, x)
        inner = np.zeros(x.shape[0])
        for axis in range(d):
            for side in (box.lower[axis], box.upper[axis]):
                z, wz = _face_points(x, box, axis, side, inner_order, levels)
                height = np.abs(x[:, axis] - side)
                span = z - x[:, None, :]
                span_len = np.linalg.norm(span, axis=2)
                n_x, n_z = wz.shape
                n_t = t_nodes.shape[0]
                y = x[:, None, None, :] + t_nodes[None, None, :, None] * span[:, :, None, :]
                y = y.reshape(-1, d)
                x_rep = np.broadcast_to(x[:, None, None, :], (n_x, n_z, n_t, d)).reshape(-1, d)
                ux_rep = np.broadcast_to(ux[:, None, None, :], (n_x, n_z, n_t, ux.shape[1]))
                zeta = ux_rep.reshape(-1, ux.shape[1]) - _evaluate(u, y)
                values = pot.evaluate(x_rep, y, zeta).reshape(n_x, n_z, n_t)
                # V / |x - y|^(d+ps) * t^(d-1) = t^beta * (V t^-p) / |z - x|^(d+ps)
                scaled = values * t_nodes[None, None, :] ** (-params.p)
                radial = np.einsum("xzt,t->xz", scaled, t_weights)
                inner += height * np.einsum("xz,xz->x", wz, radial / span_len ** kernel)
        partial.append(wx[start:start + chunk] * inner)
    return params.c_bar * compensated_sum(np.concatenate(partial))


def nonlocal_limit(u: ContinuumFn, params: ModelParams, pot: Optional[AbstractPotential] = None,
                   domain: Optional[Domain] = None, resolution: int = 4,
                   rtol: float = DEFAULT_RTOL, max_resolution: int = 64) -> float:
    """c_bar * int_Q int_Q V(x, y, u(x) - u(y)) / |x - y|^(d+ps), refined by doubling the
    number of outer panels per axis until successive values differ by less than `rtol`.

    Args:
        - u: smooth displacement, vectorised over points (M, d) -> (M, d).
        - params (ModelParams): supplies c_bar, p and s.
        - pot (AbstractPotential): pair potential, projection by default.
        - domain (Box): Q, the unit box by default.
        - resolution (int): initial number of outer panels per axis.
        - rtol (float): relative tolerance between successive refinements.
        - max_resolution (int): refinement stops with NoConvergence beyond this.

    Raises:
        NonIntegrable: if p(1 - s) <= 0.
        NoConvergence: if the tolerance is not met up to `max_resolution`; `best` holds
            the finest value.
    """
    if params.p * (1.0 - params.s) <= 0:
        raise NonIntegrable(f"p(1 - s) = {params.p * (1.0 - params.s):g} <= 0")
    pot = pot or ProjectionPotential()
    box = _as_box(domain or Box.unit(params.d))
    if params.c_bar == 0:
        return 0.0
    previous = _nonlocal_at_resolution(u, params, pot, box, resolution)
    level = resolution
    while level * 2 <= max_resolution:
        level *= 2
        current = _nonlocal_at_resolution(u, params, pot, box, level)
        change = abs(current - previous)
        logger.debug(f"Non-local limit at {level} panels: {current:.12g} (change {change:.3e})")
        if change <= rtol * abs(current) or current == 0.0:
            return float(current)
        previous = current
    raise NoConvergence(f"Non-local limit did not settle to rtol={rtol} up to {max_resolution} "
                        f"panels", best=float(previous))


def local_density(gradients: np.ndarray) -> np.ndarray:
    """sum over b in B minus 0 of (b/|b| . G b/|b|)^2 for gradients G of shape (M, m, d)."""
    d = gradients.shape[-1]
    stencil = NeighborStencil.for_dim(d)
    unit = stencil.offsets / stencil.norms[:, None]
    normal = np.einsum("bi,mij,bj->mb", unit, gradients[:, :d, :], unit)
    return np.sum(normal ** 2, axis=1)


def expanded_local_density_2d(gradients: np.ndarray) -> np.ndarray:
    """The same density written out term by term for d = 2:
    3 (d1 u1)^2 + 3 (d2 u2)^2 + 2 d1u1 d2u2 + (d2 u1 + d1 u2)^2."""
    g11, g12 = gradients[:, 0, 0], gradients[:, 0, 1]
    g21, g22 = gradients[:, 1, 0], gradients[:, 1, 1]
    return 3.0 * g11 ** 2 + 3.0 * g22 ** 2 + 2.0 * g11 * g22 + (g12 + g21) ** 2


def local_limit(u: ContinuumFn, resolution: int = 32, domain: Optional[Domain] = None,
                order: int = OUTER_ORDER, dim: Optional[int] = None) -> float:
    """int_Q sum_b (b/|b| . grad u b/|b|)^2 with a composite Gauss rule of `resolution`
    panels per axis."""
    box = _as_box(domain or Box.unit(dim or 2))
    points, weights = outer_rule(box, resolution, order)
    return compensated_sum(weights * local_density(_gradient(u, points)))


def work_limit(u: ContinuumFn, f: Optional[ContinuumFn], resolution: int = 32,
               domain: Optional[Domain] = None, order: int = OUTER_ORDER,
               dim: Optional[int] = None) -> float:
    if f is None:
        return 0.0
    box = _as_box(domain or Box.unit(dim or 2))
    points, weights = outer_rule(box, resolution, order)
    return compensated_sum(weights * np.sum(_evaluate(u, points) * _evaluate(f, points), axis=1))


def limit_total(u: ContinuumFn, f: Optional[ContinuumFn], params: ModelParams,
                pot: Optional[AbstractPotential] = None, resolution: int = 32,
                domain: Optional[Domain] = None, rtol: float = DEFAULT_RTOL,
                nonlocal_resolution: int = 4) -> EnergyBreakdown:
    """All three parts of the limit functional."""
    box = _as_box(domain or Box.unit(params.d))
    e_nonlocal = nonlocal_limit(u, params, pot, box, resolution=nonlocal_resolution, rtol=rtol)
    e_local = local_limit(u, resolution, box)
    work = work_limit(u, f, resolution, box)
    breakdown = EnergyBreakdown.compose(e_nonlocal, e_local, work)
    logger.debug(f"Limit energy: {breakdown}")
    return breakdown


def expected_discrete_nonlocal(u_eps: DiscreteField, params: ModelParams,
                               pot: Optional[AbstractPotential] = None,
                               chunk_rows: int = 256) -> float:
    """Seed average of the discrete non-local energy:
    c_bar * eps^(2d) * sum over x != y in Q_eps of V(x, y, u(x) - u(y)) / |x - y|^(d+ps)."""
    pot = pot or ProjectionPotential()
    grid = u_eps.grid
    n = grid.size
    parts = []
    for start in range(0, n, chunk_rows):
        rows = np.arange(start, min(start + chunk_rows, n))
        i, j = np.meshgrid(rows, np.arange(n), indexing="ij")
        i, j = i.ravel(), j.ravel()
        keep = i != j
        i, j = i[keep], j[keep]
        x, y = grid.nodes[i], grid.nodes[j]
        length = np.linalg.norm(x - y, axis=1)
        zeta = u_eps.values[i] - u_eps.values[j]
        parts.append(pot.evaluate(x, y, zeta) / length ** params.kernel_exponent)
    if not parts:
        return 0.0
    return params.c_bar * grid.eps ** (2 * grid.dim) * compensated_sum(np.concatenate(parts))
