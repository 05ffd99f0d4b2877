import numpy as np

from lattice_model.potentials._abstractpotential import AbstractPotential


class ProjectionPotential(AbstractPotential):
    """Linearized rod energy V(x, y, zeta) = |zeta . (x - y)|^2.

    Exactly quadratic in zeta, so the total energy is a quadratic form and the linear
    solver applies. Growth p = 2 with c_xy = |x - y|^2 (Cauchy-Schwarz).

    Usage:
    ```python
    pot = ProjectionPotential()
    pot.evaluate(x, y, zeta)
    ```
    """
    instance_id = "projection"
    growth_exponent = 2.0
    convex = True
    quadratic = True

    def evaluate(self, x, y, zeta):
        proj = np.einsum("ij,ij->i", zeta, x - y)
        return proj ** 2

    def derivative(self, x, y, zeta):
        r = x - y
        proj = np.einsum("ij,ij->i", zeta, r)
        return 2.0 * proj[:, None] * r

    def growth_constant(self, x, y):
        return np.sum((x - y) ** 2, axis=1)

    def difference(self, x, y, zeta_from, zeta_to):
        r = x - y
        a = np.einsum("ij,ij->i", zeta_from, r)
        b = np.einsum("ij,ij->i", zeta_to, r)
        return (b - a) * (b + a)
