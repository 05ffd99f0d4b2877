import numpy as np

from lattice_model.potentials._abstractpotential import AbstractPotential


class CauchyPotential(AbstractPotential):
    """Nonlinear rod energy V(x, y, zeta) = (|(x - y) + |x - y| zeta| - |x - y|)^2.

    The squared change of length of a rod from y to x whose ends are displaced by a
    difference zeta (in units of the rod length). For small zeta it agrees with the
    projection potential to leading order. Growth p = 2 with c_xy = |x - y|^2 from the
    reverse triangle inequality.

    The derivative at the single configuration (x - y) + |x - y| zeta = 0 is taken as 0.
    """
    instance_id = "cauchy"
    growth_exponent = 2.0
    convex = True
    quadratic = False

    def _parts(self, x, y, zeta):
        r = x - y
        length = np.linalg.norm(r, axis=1)
        w = r + length[:, None] * zeta
        stretched = np.linalg.norm(w, axis=1)
        return length, w, stretched

    def evaluate(self, x, y, zeta):
        length, _, stretched = self._parts(x, y, zeta)
        return (stretched - length) ** 2

    def derivative(self, x, y, zeta):
        length, w, stretched = self._parts(x, y, zeta)
        safe = np.where(stretched > 0, stretched, 1.0)
        coef = np.where(stretched > 0, 2.0 * (stretched - length) * length / safe, 0.0)
        return coef[:, None] * w

    def growth_constant(self, x, y):
        return np.sum((x - y) ** 2, axis=1)

    def difference(self, x, y, zeta_from, zeta_to):
        length, w1, n1 = self._parts(x, y, zeta_from)
        _, w2, n2 = self._parts(x, y, zeta_to)
        total = n1 + n2
        safe = np.where(total > 0, total, 1.0)
        # n2 - n1 = (|w2|^2 - |w1|^2) / (n2 + n1)
        dn = np.where(total > 0, np.einsum("ij,ij->i", w2 - w1, w2 + w1) / safe, 0.0)
        return dn * (n1 + n2 - 2.0 * length)
