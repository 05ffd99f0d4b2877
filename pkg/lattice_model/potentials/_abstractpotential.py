from abc import ABC, abstractmethod
from typing import Optional

import numpy as np


class AbstractPotential(ABC):
    """Abstract class for pair potentials V(x, y, zeta) of the long-range fibers. Each
    implementation should define an instance_id, the growth metadata and the following
    methods: evaluate and derivative.

    All methods are vectorised over rows: x, y and zeta have shape (E, d). Shipped
    potentials depend on x and y only through x - y.
    """
    instance_id = None
    """The name of the potential in configs. This should be set by subclasses."""

    growth_exponent: float = 2.0
    """Exponent p of the upper growth bound V <= c_xy |zeta|^p."""

    convex: bool = True
    """Whether V is treated as convex in zeta by the solvers."""

    quadratic: bool = False
    """Whether V is a quadratic form in zeta (enables the linear solver)."""

    @abstractmethod
    def evaluate(self, x: np.ndarray, y: np.ndarray, zeta: np.ndarray) -> np.ndarray:
        """Evaluate V for every row.

        Args:
            x (np.ndarray): first points, shape (E, d).
            y (np.ndarray): second points, shape (E, d).
            zeta (np.ndarray): displacement differences u(x) - u(y), shape (E, d).

        Returns:
            np.ndarray: values of shape (E,), all >= 0.
        """
        ...

    @abstractmethod
    def derivative(self, x: np.ndarray, y: np.ndarray, zeta: np.ndarray) -> np.ndarray:
        """Derivative of V in its third argument, shape (E, d)."""
        ...

    @abstractmethod
    def growth_constant(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Pairwise constant c_xy of the growth bound, shape (E,)."""
        ...

    def difference(self, x: np.ndarray, y: np.ndarray, zeta_from: np.ndarray,
                   zeta_to: np.ndarray) -> np.ndarray:
        """V(x, y, zeta_to) - V(x, y, zeta_from) per row. Override with a form that stays
        accurate when the two arguments are close."""
        return self.evaluate(x, y, zeta_to) - self.evaluate(x, y, zeta_from)

    def uniform_growth_constant(self, diameter: float) -> float:
        """Constant valid for all pairs in a domain of the given diameter."""
        return float(self.growth_constant(np.zeros((1, 1)), np.full((1, 1), diameter))[0])

    def hessian_bound(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Per-pair scalar bound on the curvature in zeta, used for diagonal scaling.
        Defaults to 2*c_xy, exact for quadratics with p = 2."""
        return 2.0 * self.growth_constant(x, y)

    def __call__(self, x: np.ndarray, y: np.ndarray, zeta: np.ndarray,
                 derivative: Optional[bool] = False) -> np.ndarray:
        x, y, zeta = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (x, y, zeta))
        if derivative:
            return self.derivative(x, y, zeta)
        return self.evaluate(x, y, zeta)

    def __repr__(self):
        return f"<{self.__class__.__name__} instance_id={self.instance_id}>"
