import sympy as sp
from django.test import SimpleTestCase

from mixed_frobenius.domains.algebra import FiniteAlgebra
from mixed_frobenius.domains.errors import GradingError, IntegrabilityError, LambdaPoleError
from mixed_frobenius.domains.exactalg import LaurentPoly
from mixed_frobenius.domains.formal import (
    FormalSaito,
    LocalizedFormalFrobenius,
    SeriesRing,
    check_formal_mfs,
    check_formal_saito,
    check_localized_formal_frobenius,
    limit_mfs,
    mfs_from_graded_mfa,
    potential_vector_field,
    saito_from_algebra,
)
from mixed_frobenius.domains.mfa import (
    LocalizedMetric,
    MixedFrobeniusAlgebra,
    NondegenerateFiltration,
    existence_mfa,
)


def lam(exponent, coefficient=1):
    return LaurentPoly.monomial(coefficient, exponent)


def dual_numbers_saito(ring: SeriesRing, overrides=None) -> FormalSaito:
    """Q[ε]/(ε²) on the frame (t0, t1) with E = t0 ∂_t0, plus overridden constants."""
    constants = [[[ring.zero() for _ in range(2)] for _ in range(2)] for _ in range(2)]
    constants[0][0][0] = ring.constant(1)
    constants[0][1][1] = ring.constant(1)
    constants[1][0][1] = ring.constant(1)
    for (a, b, c), value in (overrides or {}).items():
        constants[a][b][c] = value
    frozen = tuple(tuple(tuple(row) for row in plane) for plane in constants)
    return FormalSaito(ring, frozen, (1, 0), (ring.variable(0), ring.zero()))


def dual_numbers_metric() -> LocalizedMetric:
    """g^λ(x, y) = g(x·y·(λ + ε)^{-1}) for g(1, ε) = 1."""
    return LocalizedMetric.from_rows([[lam(-2, -1), lam(-1)], [lam(-1), 0]])


def graded_cubic_mfa(charges) -> MixedFrobeniusAlgebra:
    filtration = NondegenerateFiltration.from_layers(3, {
        0: ([(0, 1, 0), (0, 0, 1)], sp.Matrix([[0, 1], [1, 0]])),
        3: ([(1, 0, 0)], sp.Matrix([[1]])),
    })
    return MixedFrobeniusAlgebra(FiniteAlgebra.truncated_polynomial(3), filtration, charges)


class TruncatedSeriesTests(SimpleTestCase):
    def setUp(self):
        self.ring = SeriesRing.standard(['t0'], ['q1'], order=2)

    def test_truncation_by_total_degree(self):
        t, q = self.ring.variable(0), self.ring.variable(1)
        self.assertTrue((t * t * q).is_zero)
        self.assertEqual((t * q).coefficient((1, 1, 0, 0)), 1)

    def test_log_and_lambda_do_not_count(self):
        t, log_q = self.ring.variable(0), self.ring.log_variable(1)
        power = t * t * log_q * log_q * log_q
        self.assertEqual(power.coefficient((2, 0, 3, 0)), 1)

    def test_q_derivative_acts_on_log(self):
        q, log_q = self.ring.variable(1), self.ring.log_variable(1)
        derivative = (q * log_q).derivative(1)
        self.assertEqual(derivative.coefficient((0, 1, 1, 0)), 1)
        self.assertEqual(derivative.coefficient((0, 1, 0, 0)), 1)
        self.assertEqual(log_q.derivative(1), self.ring.constant(1))

    def test_lambda_shift_is_minimal(self):
        product = self.ring.from_laurent(lam(-1)) * self.ring.from_laurent(lam(1))
        self.assertFalse(product.has_lambda_pole)
        self.assertEqual(product, self.ring.constant(1))

    def test_lambda_euler(self):
        series = self.ring.from_laurent(lam(-2, 3)).lambda_euler()
        self.assertEqual(series.lam_shift, 2)
        self.assertEqual(series.coefficient((0, 0, 0, 0)), -6)

    def test_pole_at_lambda_zero(self):
        with self.assertRaises(LambdaPoleError):
            self.ring.from_laurent(lam(-1)).at_lambda_zero()
        value = self.ring.from_laurent(LaurentPoly.from_terms({0: 2, 1: 5})).at_lambda_zero()
        self.assertEqual(value, self.ring.constant(2))

    def test_first_difference(self):
        t = self.ring.variable(0)
        self.assertIsNone((t + 1).first_difference(1 + t, 2))
        self.assertEqual((t * t).first_difference(self.ring.zero(), 2), "t0^2 (off by 1)")
        self.assertIsNone((t * t).first_difference(self.ring.zero(), 1))


class FormalSaitoTests(SimpleTestCase):
    def test_constant_structure_of_graded_algebra(self):
        report = check_formal_saito(saito_from_algebra(FiniteAlgebra.truncated_polynomial(3), order=3))
        self.assertTrue(report.passed)
        self.assertEqual(report.get('flatness (fmfs1)').certified_order, 2)

    def test_broken_flatness(self):
        ring = SeriesRing.standard(['t0', 't1'], order=3)
        saito = dual_numbers_saito(ring, {(1, 1, 0): ring.variable(0)})
        report = check_formal_saito(saito)
        self.assertIn('flatness (fmfs1)', report.failed_names())
        self.assertTrue(report.get('associativity').passed)
        self.assertTrue(report.get('commutativity').passed)

    def test_non_commutative_constants(self):
        ring = SeriesRing.standard(['t0', 't1'], order=2)
        saito = dual_numbers_saito(ring, {(1, 0, 1): ring.constant(2)})
        self.assertIn('commutativity', check_formal_saito(saito).failed_names())

    def test_nonlinear_euler(self):
        ring = SeriesRing.standard(['t0', 't1'], order=3)
        base = dual_numbers_saito(ring)
        saito = FormalSaito(ring, base.structure_constants, base.unit,
                            (ring.variable(0) * ring.variable(0), ring.zero()))
        self.assertFalse(check_formal_saito(saito).get('euler flat').passed)


class FormalMFSTests(SimpleTestCase):
    def test_graded_mfa(self):
        report = check_formal_mfs(mfs_from_graded_mfa(graded_cubic_mfa({0: 3, 3: 0}), order=3))
        self.assertTrue(report.passed)
        self.assertIsNotNone(report.get('charge equation (Eg) g_0'))

    def test_wrong_charge_is_a_grading_error(self):
        with self.assertRaises(GradingError):
            mfs_from_graded_mfa(graded_cubic_mfa({0: 2, 3: 0}))

    def test_graded_algebra_needs_charges(self):
        with self.assertRaises(GradingError):
            mfs_from_graded_mfa(graded_cubic_mfa(None))

    def test_ungraded_existence_filtration(self):
        algebra = FiniteAlgebra.truncated_polynomial(3, graded=False)
        mfs = mfs_from_graded_mfa(existence_mfa(algebra), order=2)
        self.assertEqual(mfs.charges, {1: 0, 2: 0, 3: 0})
        self.assertTrue(check_formal_mfs(mfs).passed)


class LocalizedFormalFrobeniusTests(SimpleTestCase):
    def setUp(self):
        self.saito = saito_from_algebra(FiniteAlgebra.truncated_polynomial(2, 'e'), order=3)

    def test_nilpotent_metric_structure(self):
        report = check_localized_formal_frobenius(
            LocalizedFormalFrobenius(self.saito, dual_numbers_metric(), 2))
        self.assertTrue(report.passed)

    def test_wrong_charge_fails_metric_homogeneity_only(self):
        report = check_localized_formal_frobenius(
            LocalizedFormalFrobenius(self.saito, dual_numbers_metric(), 3))
        self.assertEqual(report.failed_names(), ['metric homogeneity (EF2)'])

    def test_limit(self):
        mfs = limit_mfs(LocalizedFormalFrobenius(self.saito, dual_numbers_metric(), 2))
        self.assertEqual(mfs.charges, {0: 2, 2: 0})
        self.assertEqual(mfs.filtration.jumps, (0, 2))
        self.assertTrue(check_formal_mfs(mfs).passed)

    def test_limit_with_pole(self):
        ring = self.saito.ring
        saito = dual_numbers_saito(ring, {(1, 1, 0): ring.from_laurent(lam(-1))})
        with self.assertRaises(LambdaPoleError) as cm:
            limit_mfs(LocalizedFormalFrobenius(saito, dual_numbers_metric(), 2))
        self.assertIn('C_{t1,t1}^t0', str(cm.exception))


class PotentialVectorFieldTests(SimpleTestCase):
    def test_dual_numbers(self):
        ring = SeriesRing.standard(['t0', 't1'], order=4)
        saito = dual_numbers_saito(ring)
        potential = potential_vector_field(saito)
        t0, t1 = ring.variable(0), ring.variable(1)
        self.assertEqual(potential.certified_order, 2)
        self.assertIsNone(potential.components[0].first_difference(t0 * t0 * sp.Rational(1, 2), 4))
        self.assertIsNone(potential.components[1].first_difference(t0 * t1, 4))
        self.assertTrue(potential.verify(saito).passed)

    def test_q_dependent_constants(self):
        ring = SeriesRing.standard(['t0'], ['q1'], order=3)
        q = ring.variable(1)
        constants = (
            ((ring.constant(1), ring.zero()), (ring.zero(), ring.constant(1))),
            ((ring.zero(), ring.constant(1)), (q * 3, ring.zero())),
        )
        saito = FormalSaito(ring, constants, (1, 0), (ring.variable(0), ring.zero()))
        potential = potential_vector_field(saito)
        self.assertEqual(potential.components[0].coefficient((0, 1, 0, 0)), 3)
        self.assertTrue(potential.verify(saito).get('potential (ddG = C)').passed)

    def test_integrability_error(self):
        ring = SeriesRing.standard(['t0', 't1'], order=3)
        with self.assertRaises(IntegrabilityError):
            potential_vector_field(dual_numbers_saito(ring, {(1, 1, 0): ring.variable(0)}))
