import sympy as sp
from django.test import SimpleTestCase

from mixed_frobenius.domains.algebra import FiniteAlgebra
from mixed_frobenius.domains.errors import InvarianceError, LambdaPoleError, NonUnimodularError, NotNilpotentError
from mixed_frobenius.domains.exactalg import LaurentPoly, RationalSubspace
from mixed_frobenius.domains.mfa import (
    LambdaAlgebra,
    LocalizedMetric,
    MixedFrobeniusAlgebra,
    NilpotentData,
    NondegenerateFiltration,
    check_closing_formulas,
    check_mfa,
    existence_mfa,
    extract_filtration,
    filtration_from_profile,
    mfa_from_invariant_localized_metric,
    nilpotent_filtration_direct,
    nilpotent_localized_metric,
    nilpotent_mfa,
    normalize_metric,
    residue_metric_well_defined_check,
    verify_division_identity,
)

ANTIDIAGONAL_3 = sp.Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])


def lam(exponent, coefficient=1):
    return LaurentPoly.monomial(coefficient, exponent)


def local_p2_metric() -> LocalizedMetric:
    return LocalizedMetric.from_rows([
        [lam(-3, 9), lam(-2, 3), lam(-1)],
        [lam(-2, 3), lam(-1), 0],
        [lam(-1), 0, 0],
    ])


def dual_numbers_data() -> NilpotentData:
    """Q[ε]/(ε²), g(1, ε) = 1, n = λ + ε."""
    return NilpotentData(FiniteAlgebra.truncated_polynomial(2, 'e'), sp.Matrix([[0, 1], [1, 0]]), ((0, 1),))


def cubic_data(*nilpotents) -> NilpotentData:
    return NilpotentData(FiniteAlgebra.truncated_polynomial(3, 'e'), ANTIDIAGONAL_3, tuple(nilpotents))


class LocalizedMetricTests(SimpleTestCase):
    def test_local_p2_profile(self):
        metric = local_p2_metric()
        self.assertEqual(metric.matrix.determinant(), lam(-3, -1))
        profile = normalize_metric(metric)
        self.assertEqual(profile.kappas, (3, 0, 0))
        self.assertEqual(profile.shift, 3)
        self.assertTrue(profile.pairing_holds(metric))

    def test_local_p2_filtration(self):
        filtration = extract_filtration(local_p2_metric())
        self.assertEqual(filtration.jumps, (0, 3))
        self.assertEqual(filtration.subspace(0), RationalSubspace.spanned_by(3, [(0, 1, 0), (0, 0, 1)]))
        self.assertEqual(filtration.rank(3), 3)
        self.assertEqual(filtration.metric_value(3, (1, 0, 0), (1, 0, 0)), 9)
        self.assertTrue(filtration.is_exhaustive)

    def test_identity_metric(self):
        metric = LocalizedMetric.from_rows([[1, 0], [0, 1]])
        filtration = extract_filtration(metric)
        self.assertEqual(normalize_metric(metric).kappas, (0, 0))
        self.assertEqual(filtration.jumps, (0,))
        self.assertEqual(filtration.layer(0).metric.matrix, sp.eye(2))

    def test_non_unimodular_metric(self):
        with self.assertRaisesRegex(NonUnimodularError, "non-monomial factor"):
            LocalizedMetric.from_rows([[LaurentPoly.from_terms({0: -1, 1: 1}), 0], [0, 1]])

    def test_asymmetric_metric(self):
        with self.assertRaises(InvarianceError):
            LocalizedMetric.from_rows([[0, 1], [lam(0, 2), 0]])

    def test_residue_is_well_defined(self):
        metric = local_p2_metric()
        for k in (0, 3):
            self.assertTrue(residue_metric_well_defined_check(metric, k, trials=10, seed=11))

    def test_filtration_from_hand_profile(self):
        metric = LocalizedMetric.from_rows([[lam(-2), 0], [0, 1]])
        profile = normalize_metric(metric)
        self.assertEqual(sorted(profile.kappas), [0, 2])
        filtration = filtration_from_profile(profile, metric)
        self.assertEqual(filtration.jumps, (0, 2))
        self.assertEqual(filtration.subspace(0), RationalSubspace.spanned_by(2, [(0, 1)]))
        self.assertEqual(filtration.metric_value(2, (1, 0), (1, 0)), 1)


class NilpotentConstructionTests(SimpleTestCase):
    def test_localized_metric_of_dual_numbers(self):
        metric = nilpotent_localized_metric(dual_numbers_data())
        self.assertEqual(metric.matrix.entry(0, 0), lam(-2, -1))
        self.assertEqual(metric.matrix.entry(0, 1), lam(-1))
        self.assertEqual(metric.matrix.entry(1, 1), LaurentPoly.zero())

    def test_direct_filtration_of_dual_numbers(self):
        filtration = nilpotent_filtration_direct(dual_numbers_data())
        self.assertEqual(filtration.jumps, (0, 2))
        self.assertEqual(filtration.metric_value(0, (0, 1), (0, 1)), 1)
        self.assertEqual(filtration.metric_value(2, (1, 0), (1, 0)), -1)

    def test_direct_filtration_of_cubic(self):
        data = cubic_data((0, 1, 0))
        filtration = nilpotent_filtration_direct(data)
        self.assertEqual(filtration.subspace(0), RationalSubspace.spanned_by(3, [(0, 1, 0), (0, 0, 1)]))
        self.assertEqual(filtration.jumps, (0, 3))
        self.assertEqual(filtration.metric_value(3, (1, 0, 0), (1, 0, 0)), 1)

    def test_direct_agrees_with_smith_pipeline(self):
        for data in (dual_numbers_data(), cubic_data((0, 1, 0)), cubic_data((0, 1, 0), (0, 0, 1)),
                     cubic_data((0, 0, 1))):
            generic = extract_filtration(nilpotent_localized_metric(data))
            self.assertIsNone(nilpotent_filtration_direct(data).mismatch(generic))

    def test_closing_formulas(self):
        data = cubic_data((0, 1, 0))
        report = check_closing_formulas(data, nilpotent_filtration_direct(data))
        self.assertTrue(report.passed)
        self.assertEqual(report.failed_names(), [])
        with self.assertRaises(ValueError):
            check_closing_formulas(cubic_data((0, 1, 0), (0, 0, 1)), nilpotent_filtration_direct(data))

    def test_division_identity(self):
        data = cubic_data((0, 1, 0), (0, 0, 1))
        x = [(1, 2, 0), (0, -1, 3)]
        for k in range(4):
            self.assertTrue(verify_division_identity(data, x, k).passed)

    def test_nilpotent_mfa_axioms(self):
        report = check_mfa(nilpotent_mfa(cubic_data((0, 1, 0))))
        self.assertTrue(report.passed)
        self.assertIsNotNone(report.get('invariant g_3'))

    def test_rejects_non_nilpotent(self):
        with self.assertRaises(NotNilpotentError):
            cubic_data((1, 0, 0))

    def test_rejects_non_invariant_metric(self):
        with self.assertRaises(InvarianceError):
            NilpotentData(FiniteAlgebra.truncated_polynomial(2), sp.eye(2), ((0, 1),))


class MixedFrobeniusAlgebraTests(SimpleTestCase):
    def setUp(self):
        self.algebra = FiniteAlgebra.truncated_polynomial(3)
        self.filtration = NondegenerateFiltration.from_layers(3, {
            0: ([(0, 1, 0), (0, 0, 1)], sp.Matrix([[0, 1], [1, 0]])),
            3: ([(1, 0, 0)], sp.Matrix([[1]])),
        })

    def test_existence_mfa(self):
        m = existence_mfa(self.algebra)
        self.assertEqual([layer.rank for layer in m.filtration.layers], [1, 1, 1])
        self.assertTrue(check_mfa(m).passed)

    def test_existence_mfa_on_truncated_polynomials(self):
        for n in range(1, 6):
            with self.subTest(n=n):
                report = check_mfa(existence_mfa(FiniteAlgebra.truncated_polynomial(n)))
                self.assertTrue(report.passed, report.failed_names())

    def test_existence_mfa_on_products(self):
        algebra = FiniteAlgebra.direct_product(
            FiniteAlgebra.truncated_polynomial(2), FiniteAlgebra.truncated_polynomial(3))
        report = check_mfa(existence_mfa(FiniteAlgebra.direct_product(algebra, FiniteAlgebra.split_semisimple(1))))
        self.assertTrue(report.passed, report.failed_names())

    def test_graded_charges(self):
        report = check_mfa(MixedFrobeniusAlgebra(self.algebra, self.filtration, {0: 3, 3: 0}))
        self.assertTrue(report.passed)
        self.assertTrue(report.get('charge g_0').passed)

    def test_wrong_charge(self):
        report = check_mfa(MixedFrobeniusAlgebra(self.algebra, self.filtration, {0: 2, 3: 0}))
        self.assertEqual(report.failed_names(), ['charge g_0'])

    def test_filter_that_is_not_an_ideal(self):
        filtration = NondegenerateFiltration.from_layers(2, {
            0: ([(1, 0)], sp.Matrix([[1]])),
            1: ([(0, 1)], sp.Matrix([[1]])),
        })
        report = check_mfa(MixedFrobeniusAlgebra(FiniteAlgebra.truncated_polynomial(2), filtration))
        self.assertIn('ideal I_0', report.failed_names())

    def test_non_exhaustive_filtration(self):
        filtration = NondegenerateFiltration.from_layers(3, {0: ([(0, 0, 1)], sp.Matrix([[1]]))})
        report = check_mfa(MixedFrobeniusAlgebra(self.algebra, filtration))
        self.assertFalse(report.get('filtration exhaustive').passed)

    def test_dependent_layers_are_rejected(self):
        with self.assertRaises(ValueError):
            NondegenerateFiltration.from_layers(2, {
                0: ([(0, 1)], sp.Matrix([[1]])),
                1: ([(0, 2)], sp.Matrix([[1]])),
            })


class LambdaAlgebraTests(SimpleTestCase):
    def test_constant_cup_product_on_local_p2(self):
        lambda_algebra = LambdaAlgebra.constant(FiniteAlgebra.truncated_polynomial(3, 'h'))
        m = mfa_from_invariant_localized_metric(lambda_algebra, local_p2_metric())
        self.assertEqual(m.filtration.jumps, (0, 3))
        self.assertEqual(m.algebra.dim, 3)
        self.assertTrue(check_mfa(m).passed)

    def test_rejects_non_invariant_metric(self):
        lambda_algebra = LambdaAlgebra.constant(FiniteAlgebra.truncated_polynomial(2, 'e'))
        with self.assertRaises(InvarianceError):
            mfa_from_invariant_localized_metric(lambda_algebra, LocalizedMetric.from_rows([[1, 0], [0, 1]]))

    def test_pole_in_structure_constant(self):
        # e * e = λ^-1 keeps g(x * y, z) = g(x, y * z) for the antidiagonal g
        lambda_algebra = LambdaAlgebra(
            ('1', 'e'),
            (((1, 0), (0, 1)), ((0, 1), (lam(-1), 0))),
            (1, 0),
        )
        with self.assertRaises(LambdaPoleError):
            mfa_from_invariant_localized_metric(lambda_algebra, LocalizedMetric.from_rows([[0, 1], [1, 0]]))
