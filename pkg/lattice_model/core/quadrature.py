import math
import itertools
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np


def compensated_sum(values) -> float:
    """Error-free accumulated sum of all entries (math.fsum)."""
    return math.fsum(np.asarray(values, dtype=float).ravel())


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def tensor_rule(lower: Sequence[float], upper: Sequence[float],
                order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss rule with `order` points per axis on a single box."""
    x, w = gauss_legendre(order)
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    d = lower.shape[0]
    pts = np.array(list(itertools.product(x, repeat=d)))
    wts = np.prod(np.array(list(itertools.product(w, repeat=d))), axis=1)
    return lower + pts * (upper - lower), wts * float(np.prod(upper - lower))


def composite_axis_rule(breakpoints: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on one axis, one panel per consecutive pair of breakpoints."""
    x, w = gauss_legendre(order)
    a, b = breakpoints[:-1], breakpoints[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    nodes = (a[:, None] + (b - a)[:, None] * x[None, :]).ravel()
    weights = ((b - a)[:, None] * w[None, :]).ravel()
    return nodes, weights


def composite_box_rule(axis_breakpoints: Sequence[np.ndarray],
                       order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor product of composite axis rules. Exact for piecewise polynomials of degree
    < 2*order whose pieces are aligned with the breakpoints."""
    rules = [composite_axis_rule(np.asarray(bp, float), order) for bp in axis_breakpoints]
    mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    weights = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    return points, weights


def uniform_breakpoints(lower: float, upper: float, panels: int) -> np.ndarray:
    return np.linspace(lower, upper, panels + 1)


def cell_face_breakpoints(lower: float, upper: float, eps: float) -> np.ndarray:
    """Box ends plus every cell face (k + 1/2)*eps strictly inside (lower, upper)."""
    k_lo = math.ceil(lower / eps - 0.5)
    k_hi = math.floor(upper / eps - 0.5)
    faces = (np.arange(k_lo, k_hi + 1) + 0.5) * eps
    faces = faces[(faces > lower) & (faces < upper)]
    return np.unique(np.concatenate([[lower], faces, [upper]]))


def graded_rule(length: float, order: int, grading: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss rule on [0, length] graded towards 0 via r = length * t**grading, for
    integrands with an integrable singularity at the origin."""
    t, w = gauss_legendre(order)
    r = length * t ** grading
    jac = length * grading * t ** (grading - 1.0)
    return r, w * jac
