from django.test import SimpleTestCase
import numpy as np
from scipy.special import jv

from .bessel import BesselDomainError, bessel_j, bessel_row


class BesselValueTest(SimpleTestCase):
    def test_matches_reference_values(self):
        for x in (0.5, 2.0, 5.0, 10.0, 25.0):
            for n in range(0, 41):
                expected = jv(n, x)
                self.assertAlmostEqual(bessel_j(n, x), expected, delta=1e-13 + 1e-10 * abs(expected))

    def test_negative_order_parity(self):
        for n in range(1, 15):
            self.assertEqual(bessel_j(-n, 10.0), (-1) ** n * bessel_j(n, 10.0))

    def test_zero_argument(self):
        self.assertEqual(bessel_j(0, 0.0), 1.0)
        self.assertEqual(bessel_j(3, 0.0), 0.0)
        self.assertEqual(bessel_j(-4, 0.0), 0.0)

    def test_three_term_recurrence(self):
        x = 10.0
        for n in range(1, 30):
            lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
            rhs = 2 * n / x * bessel_j(n, x)
            self.assertAlmostEqual(lhs, rhs, delta=1e-13)

    def test_domain_errors(self):
        with self.assertRaises(BesselDomainError):
            bessel_j(0, -1.0)
        with self.assertRaises(BesselDomainError):
            bessel_j(500, 1.0)
        with self.assertRaises(BesselDomainError):
            bessel_row(-2.0, 10)


class BesselRowTest(SimpleTestCase):
    def setUp(self):
        self.row = bessel_row(10.0, 30)

    def test_layout(self):
        # m = -M sits at index 0
        self.assertEqual(len(self.row.values), 61)
        self.assertEqual(self.row.orders[0], -30)
        self.assertEqual(self.row(0), self.row.values[30])
        self.assertEqual(self.row(31), 0.0)

    def test_matches_scalar_values(self):
        for m in range(-30, 31):
            self.assertAlmostEqual(self.row(m), jv(m, 10.0), delta=1e-13)

    def test_closure(self):
        """Sum of J_m(a)^2 over m = -M..M is 1 once M clears a by the padding"""
        for a in (0.0, 1.5, 5.0, 10.0, 15.0):
            row = bessel_row(a)
            self.assertLessEqual(row.closure, 1.0 + 1e-14)
            self.assertGreater(row.closure, 1.0 - 1e-12)

    def test_closure_for_small_arguments(self):
        """Fast downward growth for small a must not overflow the closure sum"""
        for a in np.concatenate([[1e-4, 1e-2], np.linspace(0.05, 3.0, 60)]):
            for M in (21, 23, 42, 46):
                row = bessel_row(a, M)
                self.assertAlmostEqual(row.closure, 1.0, delta=1e-12)
                np.testing.assert_allclose(row.values, jv(row.orders, a), rtol=0, atol=1e-13)

    def test_values_are_read_only(self):
        with self.assertRaises(ValueError):
            self.row.values[0] = 1.0

    def test_parity_inside_row(self):
        orders = self.row.orders
        np.testing.assert_array_equal(
            self.row.values[::-1], self.row.values * np.where(orders % 2, -1.0, 1.0)
        )
