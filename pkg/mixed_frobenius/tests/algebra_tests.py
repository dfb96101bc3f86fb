import sympy as sp
from django.test import SimpleTestCase

from mixed_frobenius.domains.algebra import (
    FiniteAlgebra,
    annihilator,
    check_invariant_metric,
    check_semisimple_action,
    frobenius_filtration_existence,
    ideal_power,
    nilradical,
    nilradical_powers,
)
from mixed_frobenius.domains.errors import AlgebraValidationError, NonSplitAlgebraError, NotNilpotentError


def gaussian_integers() -> FiniteAlgebra:
    """Q[i]/(i² + 1)."""
    def product(a, b):
        if a == 1 and b == 1:
            return (-1, 0)
        return (1, 0) if a + b == 0 else (0, 1)
    return FiniteAlgebra.from_multiplication(('1', 'i'), product, (1, 0))


class FiniteAlgebraTests(SimpleTestCase):
    def test_truncated_polynomial(self):
        algebra = FiniteAlgebra.truncated_polynomial(3)
        x = algebra.basis_vector(1)
        self.assertEqual(algebra.basis_names, ('1', 'x', 'x2'))
        self.assertEqual(algebra.multiply(x, x), (0, 0, 1))
        self.assertEqual(algebra.power(x, 3), (0, 0, 0))
        self.assertTrue(algebra.is_nilpotent(x))
        self.assertEqual(algebra.degree_of((0, 0, 5)), 2)
        self.assertIsNone(algebra.degree_of((1, 1, 0)))

    def test_rejects_non_commutative_table(self):
        table = (((1, 0), (0, 1)), ((0, 0), (0, 0)))
        with self.assertRaisesRegex(AlgebraValidationError, "Not commutative"):
            FiniteAlgebra(('1', 'a'), table, (1, 0))

    def test_rejects_broken_unit(self):
        table = (((1, 0), (0, 1)), ((0, 1), (0, 0)))
        with self.assertRaisesRegex(AlgebraValidationError, "Unit axiom"):
            FiniteAlgebra(('1', 'a'), table, (0, 1))

    def test_rejects_inhomogeneous_product(self):
        table = (((1, 0), (0, 1)), ((0, 1), (1, 0)))
        with self.assertRaises(AlgebraValidationError):
            FiniteAlgebra(('1', 'a'), table, (1, 0), (0, 1))

    def test_products_of_algebras(self):
        product = FiniteAlgebra.direct_product(FiniteAlgebra.truncated_polynomial(2), FiniteAlgebra.split_semisimple(1))
        self.assertEqual(product.dim, 3)
        self.assertEqual(product.unit, (1, 0, 1))
        tensor = FiniteAlgebra.tensor_product(
            FiniteAlgebra.truncated_polynomial(2, 'x'), FiniteAlgebra.truncated_polynomial(2, 'y'))
        self.assertEqual(tensor.basis_names, ('1', 'y', 'x', 'xy'))
        self.assertEqual(tensor.grading, (0, 1, 1, 2))

    def test_invert_monic(self):
        algebra = FiniteAlgebra.truncated_polynomial(3, 'h')
        inverse = algebra.invert_monic([(0, -3, 0)])
        self.assertEqual(inverse.coefficient(-1), (1, 0, 0))
        self.assertEqual(inverse.coefficient(-2), (0, 3, 0))
        self.assertEqual(inverse.coefficient(-3), (0, 0, 9))
        self.assertEqual(inverse.coefficient(-4), (0, 0, 0))

    def test_invert_monic_needs_nilpotents(self):
        algebra = FiniteAlgebra.truncated_polynomial(2)
        with self.assertRaises(NotNilpotentError):
            algebra.invert_monic([(1, 0)])


class IdealTests(SimpleTestCase):
    def test_nilradical_of_tensor_square(self):
        algebra = FiniteAlgebra.tensor_product(
            FiniteAlgebra.truncated_polynomial(2, 'x'), FiniteAlgebra.truncated_polynomial(2, 'y'))
        self.assertEqual(nilradical(algebra).dimension, 3)
        self.assertEqual([ideal.dimension for ideal in nilradical_powers(algebra)], [4, 3, 1, 0])

    def test_nilradical_of_semisimple_is_zero(self):
        self.assertEqual(nilradical(FiniteAlgebra.split_semisimple(3)).dimension, 0)

    def test_ideal_power(self):
        radical = nilradical(FiniteAlgebra.truncated_polynomial(4))
        self.assertEqual([ideal_power(radical, k).dimension for k in range(6)], [4, 3, 2, 1, 0, 0])
        self.assertTrue(ideal_power(radical, 3).contains((0, 0, 0, 1)))
        with self.assertRaises(ValueError):
            ideal_power(radical, -1)

    def test_annihilator(self):
        algebra = FiniteAlgebra.truncated_polynomial(3, 'e')
        space = annihilator(algebra, (0, 1, 0), 1)
        self.assertEqual(space.dimension, 1)
        self.assertTrue(space.contains((0, 0, 1)))
        self.assertEqual(annihilator(algebra, (0, 1, 0), 2).dimension, 2)


class InvariantMetricTests(SimpleTestCase):
    def test_frobenius_metric(self):
        algebra = FiniteAlgebra.truncated_polynomial(3)
        gram = sp.Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
        report = check_invariant_metric(algebra, gram)
        self.assertTrue(report.passed)

    def test_non_invariant_metric(self):
        algebra = FiniteAlgebra.truncated_polynomial(2)
        report = check_invariant_metric(algebra, sp.eye(2))
        self.assertFalse(report.passed)
        self.assertEqual(report.failed_names(), ['metric invariant'])
        self.assertIn("x*x", report.get('metric invariant').counterexample)

    def test_degenerate_metric(self):
        algebra = FiniteAlgebra.truncated_polynomial(2)
        report = check_invariant_metric(algebra, sp.Matrix([[1, 0], [0, 0]]))
        self.assertFalse(report.get('metric nondegenerate').passed)


class ExistenceTests(SimpleTestCase):
    def test_truncated_polynomial_filtration(self):
        chain, metrics = frobenius_filtration_existence(FiniteAlgebra.truncated_polynomial(3))
        self.assertEqual([ideal.dimension for ideal in chain], [0, 1, 2, 3])
        self.assertEqual([form.size for form in metrics], [1, 1, 1])
        self.assertTrue(all(form.matrix == sp.eye(1) for form in metrics))

    def test_semisimple_algebra_uses_idempotents(self):
        chain, metrics = frobenius_filtration_existence(FiniteAlgebra.split_semisimple(2))
        self.assertEqual([ideal.dimension for ideal in chain], [0, 2])
        self.assertEqual(sorted(metrics[0].basis), [(0, 1), (1, 0)])

    def test_non_split_algebra(self):
        with self.assertRaises(NonSplitAlgebraError):
            frobenius_filtration_existence(gaussian_integers())

    def test_semisimple_action(self):
        algebra = FiniteAlgebra.direct_product(FiniteAlgebra.truncated_polynomial(3), FiniteAlgebra.split_semisimple(1))
        report = check_semisimple_action(algebra)
        self.assertTrue(report.passed)
        self.assertIsNotNone(report.get('radical annihilates N^1/N^2'))

    def test_semisimple_action_reports_non_split(self):
        report = check_semisimple_action(gaussian_integers())
        self.assertEqual(report.failed_names(), ['semisimple action on N^0/N^1'])
