import unittest

import numpy as np

from lattice_model.core import GrowthViolated, UnknownPotential
from lattice_model.potentials import (
    AbstractPotential,
    CauchyPotential,
    POTENTIAL_REPO,
    ProjectionPotential,
    check_growth,
    get_potential,
    probe_convexity,
)


class ZeroPotential(AbstractPotential):
    instance_id = "zero"

    def evaluate(self, x, y, zeta):
        return np.zeros(x.shape[0])

    def derivative(self, x, y, zeta):
        return np.zeros_like(zeta)

    def growth_constant(self, x, y):
        return np.sum((x - y) ** 2, axis=1)


class CubicPotential(ZeroPotential):
    """Grows like |zeta|^3 while claiming p = 2."""
    instance_id = "cubic"

    def evaluate(self, x, y, zeta):
        return np.sum((x - y) ** 2, axis=1) * np.linalg.norm(zeta, axis=1) ** 3


class AnchoredPotential(ZeroPotential):
    """Constants that depend on where the pair sits, not only on its length."""
    instance_id = "anchored"

    def growth_constant(self, x, y):
        return np.sum(x ** 2 + y ** 2, axis=1)


def _random_rows(seed, n=20, d=2):
    rng = np.random.default_rng(seed)
    return rng.uniform(size=(n, d)), rng.uniform(size=(n, d)), rng.normal(size=(n, d))


class TestProjectionPotential(unittest.TestCase):

    def setUp(self):
        self.pot = ProjectionPotential()

    def test_values(self):
        x = np.array([[1.0, 0.0], [0.0, 2.0]])
        y = np.zeros((2, 2))
        zeta = np.array([[3.0, 5.0], [1.0, -1.0]])
        np.testing.assert_allclose(self.pot.evaluate(x, y, zeta), [9.0, 4.0])
        np.testing.assert_allclose(self.pot.derivative(x, y, zeta), [[6.0, 0.0], [0.0, -8.0]])

    def test_call_accepts_single_rows(self):
        self.assertEqual(self.pot([1.0, 1.0], [0.0, 0.0], [1.0, 2.0]).tolist(), [9.0])
        np.testing.assert_allclose(self.pot([1.0, 1.0], [0.0, 0.0], [1.0, 2.0], derivative=True),
                                   [[6.0, 6.0]])

    def test_metadata(self):
        self.assertTrue(self.pot.quadratic)
        self.assertTrue(self.pot.convex)
        self.assertEqual(self.pot.growth_exponent, 2.0)
        self.assertAlmostEqual(self.pot.uniform_growth_constant(np.sqrt(2.0)), 2.0)
        x, y, _ = _random_rows(0)
        np.testing.assert_allclose(self.pot.hessian_bound(x, y), 2 * np.sum((x - y) ** 2, axis=1))

    def test_growth_and_convexity(self):
        report = check_growth(self.pot, budget=2000, seed=3)
        self.assertLessEqual(report.max_ratio, 1.0 + 1e-12)
        self.assertGreaterEqual(report.min_value, 0.0)
        self.assertTrue(probe_convexity(self.pot, budget=2000, seed=3).passed)


class TestCauchyPotential(unittest.TestCase):

    def setUp(self):
        self.pot = CauchyPotential()

    def test_values(self):
        x = np.array([[1.0, 0.0], [3.0, 4.0]])
        y = np.zeros((2, 2))
        zeta = np.array([[1.0, 0.0], [0.0, 0.0]])
        # |(1,0) + (1,0)| - 1 = 1 and zero displacement
        np.testing.assert_allclose(self.pot.evaluate(x, y, zeta), [1.0, 0.0])
        self.assertFalse(self.pot.quadratic)

    def test_derivative_at_collapsed_rod(self):
        x, y = np.array([[1.0, 0.0]]), np.zeros((1, 2))
        np.testing.assert_array_equal(self.pot.derivative(x, y, np.array([[-1.0, 0.0]])),
                                      [[0.0, 0.0]])

    def test_matches_projection_for_small_zeta(self):
        x = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
        y = np.zeros((3, 2))
        zeta = np.array([[1.0, 1.0], [0.5, 1.0], [1.0, -0.5]])
        projection = ProjectionPotential().evaluate(x, y, zeta)
        for t in (1e-2, 1e-4):
            ratio = self.pot.evaluate(x, y, t * zeta) / (t ** 2 * projection)
            np.testing.assert_allclose(ratio, 1.0, rtol=50 * t)

    def test_growth_bound_holds(self):
        report = check_growth(self.pot, budget=5000, seed=11, d=3)
        self.assertLessEqual(report.max_ratio, 1.0 + 1e-12)

    def test_midpoint_convexity_fails_with_witness(self):
        x, y = np.array([[1.0, 0.0]]), np.zeros((1, 2))
        mid = self.pot.evaluate(x, y, np.array([[-1.0, 0.0]]))
        ends = self.pot.evaluate(x, y, np.array([[-2.0, 0.0], [0.0, 0.0]]))
        self.assertEqual(mid[0], 1.0)
        np.testing.assert_array_equal(ends, [0.0, 0.0])
        with self.assertLogs("lattice_model.potentials.growth", level="WARNING"):
            report = probe_convexity(self.pot, budget=5000, d=1, seed=2, zeta_radius=2.0)
        self.assertFalse(report.passed)
        self.assertGreater(report.worst_gap, 0.0)
        self.assertLessEqual(len(report.witnesses), 5)


class TestDerivativesAndDifferences(unittest.TestCase):

    def test_derivative_matches_central_differences(self):
        h = 1e-6
        for pot in (ProjectionPotential(), CauchyPotential()):
            for seed in range(5):
                x, y, zeta = _random_rows(seed)
                numeric = np.zeros_like(zeta)
                for k in range(zeta.shape[1]):
                    step = np.zeros_like(zeta)
                    step[:, k] = h
                    numeric[:, k] = (pot.evaluate(x, y, zeta + step)
                                     - pot.evaluate(x, y, zeta - step)) / (2 * h)
                np.testing.assert_allclose(pot.derivative(x, y, zeta), numeric,
                                           rtol=1e-5, atol=1e-6)

    def test_difference_is_consistent(self):
        for pot in (ProjectionPotential(), CauchyPotential()):
            x, y, z1 = _random_rows(7)
            _, _, z2 = _random_rows(8)
            np.testing.assert_allclose(pot.difference(x, y, z1, z2),
                                       pot.evaluate(x, y, z2) - pot.evaluate(x, y, z1),
                                       rtol=1e-10, atol=1e-12)
            delta = 1e-9 * z2
            first_order = np.einsum("ij,ij->i", pot.derivative(x, y, z1), delta)
            np.testing.assert_allclose(pot.difference(x, y, z1, z1 + delta), first_order,
                                       rtol=1e-5, atol=1e-14)


class TestGrowthChecks(unittest.TestCase):

    def test_zero_potential_passes(self):
        report = check_growth(ZeroPotential(), budget=500)
        self.assertEqual(report.max_ratio, 0.0)
        self.assertEqual(report.probes, 500)

    def test_violation_raises_with_witness(self):
        with self.assertRaises(GrowthViolated) as ctx:
            check_growth(CubicPotential(), budget=500, zeta_radius=10.0)
        x, y, zeta = ctx.exception.witness
        self.assertGreater(np.linalg.norm(zeta), 1.0)
        self.assertGreater(ctx.exception.ratio, 1.0)

    def test_report_carries_uniform_constant(self):
        report = check_growth(ProjectionPotential(), budget=500, d=3)
        self.assertAlmostEqual(report.uniform_constant, 3.0)

    def test_pairwise_constant_above_uniform_raises(self):
        with self.assertRaises(GrowthViolated) as ctx:
            check_growth(AnchoredPotential(), budget=500)
        self.assertGreater(ctx.exception.ratio, 1.0)


class TestRegistry(unittest.TestCase):

    def test_get_potential(self):
        self.assertEqual(set(POTENTIAL_REPO), {"projection", "cauchy"})
        self.assertIsInstance(get_potential("cauchy"), CauchyPotential)
        self.assertIsInstance(get_potential("projection"), ProjectionPotential)

    def test_unknown_name(self):
        with self.assertRaises(UnknownPotential):
            get_potential("harmonic")
        # also a ValueError for callers that do not know the library errors
        with self.assertRaises(ValueError):
            get_potential("")


if __name__ == '__main__':
    unittest.main()
