"""
Mixed Frobenius Algebra Domain Module

Localized K[λ]-metrics and the extraction of a nondegenerate filtration from
them, the nilpotent construction A[λ] with g^λ(x, y) = g(x·y, n^{-1}), and the
axiom checker for mixed Frobenius algebras.

The localized metric on H^λ = A[λ] is always represented on the K[λ]-basis
given by the A-basis; H^λ has infinite rank over K but rank dim A over K[λ].

Usage:
    metric = LocalizedMetric(LaurentMatrix.diagonal([LaurentPoly.monomial(1, -2), 1]))
    profile = normalize_metric(metric)
    filtration = filtration_from_profile(profile, metric)
"""

import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp
from sympy import Matrix

from .algebra import (
    BilinearForm,
    FiniteAlgebra,
    check_invariant_metric,
    frobenius_filtration_existence,
    ideal_violation,
)
from .errors import (
    FrobeniusError,
    InvarianceError,
    LambdaPoleError,
    NonUnimodularError,
    NotNilpotentError,
)
from .exactalg import (
    LaurentMatrix,
    LaurentPoly,
    QuotientCoordinates,
    RationalSubspace,
    Vector,
    add_vectors,
    divide_by_monic,
    format_vector,
    is_unimodular_laurent,
    kernel,
    non_monomial_factor,
    polynomial_add,
    polynomial_multiply,
    polynomials_equal,
    rational_vector,
    scale_vector,
    smith_normal_form,
    to_rational,
    unit_vector,
    zero_vector,
)
from .reports import VerificationReport

logger = logging.getLogger(__name__)

LaurentVector = Tuple[LaurentPoly, ...]


def _laurent_vector(values: Sequence) -> LaurentVector:
    return tuple(LaurentPoly.coerce(v) for v in values)


def _add_laurent_vectors(a: Sequence[LaurentPoly], b: Sequence[LaurentPoly]) -> LaurentVector:
    return tuple(x + y for x, y in zip(a, b))


def _scale_laurent_vector(c: LaurentPoly, a: Sequence[LaurentPoly]) -> LaurentVector:
    return tuple(c * x for x in a)


# ---------------------------------------------------------------------------
# Localized metrics and their profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalizedMetric:
    """
    Symmetric K[λ]-bilinear form on H^λ valued in K[λ, λ^-1].

    Attributes:
        matrix (LaurentMatrix): Representation of g^λ on a K[λ]-basis

    Raises:
        InputError: If the matrix is not symmetric
        NonUnimodularError: If det is not a monomial; the message cites the
            non-monomial factor
    """
    matrix: LaurentMatrix

    def __post_init__(self):
        if not self.matrix.is_symmetric():
            raise InvarianceError("Localized metric matrix is not symmetric")
        if not is_unimodular_laurent(self.matrix):
            det = self.matrix.determinant()
            raise NonUnimodularError(
                f"Localized metric is not unimodular: determinant has the non-monomial factor "
                f"{non_monomial_factor(det)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> 'LocalizedMetric':
        return cls(LaurentMatrix.from_rows(rows))

    @property
    def ambient_dim(self) -> int:
        return self.matrix.size

    def pair(self, x: Sequence, y: Sequence) -> LaurentPoly:
        return self.matrix.bilinear(x, y)

    def transformed(self, change: LaurentMatrix) -> 'LocalizedMetric':
        """The same form written on the basis given by the columns of change: Pᵀ·G·P."""
        return LocalizedMetric(change.transpose() @ self.matrix @ change)


@dataclass(frozen=True)
class FiltrationProfile:
    """
    Adapted bases with g^λ(x_i, y_j) = λ^{-κ_i}·δ_{ij}.

    Attributes:
        kappas (Tuple[int, ...]): κ_1 ≥ … ≥ κ_s
        basis_x (Tuple[LaurentVector, ...]): x_i, rows of the left Smith factor
        basis_y (Tuple[LaurentVector, ...]): y_j, columns of the right Smith factor
        shift (int): k_0 used to clear denominators
    """
    kappas: Tuple[int, ...]
    basis_x: Tuple[LaurentVector, ...]
    basis_y: Tuple[LaurentVector, ...]
    shift: int = 0

    @property
    def size(self) -> int:
        return len(self.kappas)

    def reduced_x(self, index: int) -> Vector:
        """π(x_i): the evaluation of x_i at λ = 0."""
        return tuple(entry.at_zero() for entry in self.basis_x[index])

    def indices_up_to(self, k: int) -> List[int]:
        return [i for i, kappa in enumerate(self.kappas) if kappa <= k]

    def pairing_holds(self, metric: LocalizedMetric) -> bool:
        for i in range(self.size):
            for j in range(self.size):
                expected = LaurentPoly.monomial(1, -self.kappas[i]) if i == j else LaurentPoly()
                if metric.pair(self.basis_x[i], self.basis_y[j]) != expected:
                    return False
        return True

    def lift(self, vector: Sequence, k: int) -> LaurentVector:
        """
        Deterministic lift of x ∈ I_k to I_k^λ.

        x is written in the π(x_i) with κ_i ≤ k and the same constant
        coefficients are used on the x_i.
        """
        indices = self.indices_up_to(k)
        size = len(self.basis_x[0]) if self.basis_x else 0
        coordinates = QuotientCoordinates(
            [self.reduced_x(i) for i in indices], RationalSubspace.zero(size)).coordinates(vector)
        lifted = _laurent_vector(zero_vector(size))
        for coefficient, index in zip(coordinates, indices):
            lifted = _add_laurent_vectors(
                lifted, _scale_laurent_vector(LaurentPoly.constant(coefficient), self.basis_x[index]))
        return lifted


def normalize_metric(metric: LocalizedMetric) -> FiltrationProfile:
    """
    Compute the elementary-divisor exponents κ_i of a localized metric.

    With k_0 clearing the denominators, U·(λ^{k_0}G)·V = diag(λ^{a_i}) and
    κ_i = k_0 − a_i.

    Raises:
        NonUnimodularError: If g is not unimodular
    """
    if not is_unimodular_laurent(metric.matrix):
        raise NonUnimodularError(
            f"Determinant factor {non_monomial_factor(metric.matrix.determinant())} is not a unit")
    shift, polynomial = metric.matrix.clear_denominators()
    decomposition = smith_normal_form(polynomial, shift=shift)
    if not decomposition.verify(polynomial):
        raise FrobeniusError("Smith decomposition failed certification")
    try:
        exponents = decomposition.exponents()
    except ValueError as e:
        raise NonUnimodularError(str(e))
    kappas = tuple(shift - a for a in exponents)
    size = metric.ambient_dim
    basis_x = tuple(
        tuple(LaurentPoly.from_poly(decomposition.left.entry(i, a)) for a in range(size))
        for i in range(size)
    )
    basis_y = tuple(
        tuple(LaurentPoly.from_poly(decomposition.right.entry(a, j)) for a in range(size))
        for j in range(size)
    )
    logger.debug(f"κ profile {kappas} with shift k0={shift}")
    return FiltrationProfile(kappas, basis_x, basis_y, shift)


# ---------------------------------------------------------------------------
# Nondegenerate filtrations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiltrationLayer:
    """
    The graded piece I_k/I_{k-1} at a jump k.

    Attributes:
        jump (int): k
        representatives (Tuple[Vector, ...]): Ambient vectors whose classes form
            a basis of I_k/I_{k-1}
        metric (BilinearForm): g_k on those classes
    """
    jump: int
    representatives: Tuple[Vector, ...]
    metric: BilinearForm

    @property
    def rank(self) -> int:
        return len(self.representatives)


@dataclass(frozen=True)
class NondegenerateFiltration:
    """
    Increasing filtration of Q^n with metrics on the graded quotients.

    Only jump indices are stored: I_k is spanned by the representatives of
    all layers with jump ≤ k, so I_k = 0 below the first jump.
    """
    ambient_dim: int
    layers: Tuple[FiltrationLayer, ...] = ()

    def __post_init__(self):
        layers = tuple(sorted(self.layers, key=lambda layer: layer.jump))
        jumps = [layer.jump for layer in layers]
        if len(set(jumps)) != len(jumps):
            raise ValueError(f"Duplicate jump indices {jumps}")
        object.__setattr__(self, 'layers', layers)
        current = RationalSubspace.zero(self.ambient_dim)
        for layer in layers:
            if layer.rank == 0:
                raise ValueError(f"Layer {layer.jump} has no representatives")
            if layer.metric.size != layer.rank:
                raise ValueError(f"Layer {layer.jump}: metric size does not match rank")
            if len(current.extend_basis(layer.representatives)) != layer.rank:
                raise ValueError(f"Layer {layer.jump}: representatives are dependent modulo I_{layer.jump - 1}")
            current = current + RationalSubspace.spanned_by(self.ambient_dim, layer.representatives)

    @classmethod
    def from_layers(cls, ambient_dim: int, layers: Dict[int, Tuple[Sequence, Matrix]]) -> 'NondegenerateFiltration':
        """Build from {k: (representatives, gram)}, skipping empty layers."""
        built = []
        for jump, (representatives, gram) in sorted(layers.items()):
            representatives = tuple(rational_vector(r) for r in representatives)
            if not representatives:
                continue
            built.append(FiltrationLayer(jump, representatives, BilinearForm(Matrix(gram), representatives)))
        return cls(ambient_dim, tuple(built))

    @classmethod
    def trivial(cls, ambient_dim: int, gram: Matrix, jump: int = 0) -> 'NondegenerateFiltration':
        """0 ⊂ I_jump = Q^n with the given metric on the standard basis."""
        basis = [unit_vector(ambient_dim, i) for i in range(ambient_dim)]
        return cls.from_layers(ambient_dim, {jump: (basis, gram)})

    @property
    def jumps(self) -> Tuple[int, ...]:
        return tuple(layer.jump for layer in self.layers)

    def layer(self, k: int) -> Optional[FiltrationLayer]:
        for layer in self.layers:
            if layer.jump == k:
                return layer
        return None

    def subspace(self, k: int) -> RationalSubspace:
        vectors = [v for layer in self.layers if layer.jump <= k for v in layer.representatives]
        return RationalSubspace.spanned_by(self.ambient_dim, vectors)

    def rank(self, k: int) -> int:
        return sum(layer.rank for layer in self.layers if layer.jump <= k)

    def ranks(self, low: int, high: int) -> Tuple[int, ...]:
        return tuple(self.rank(k) for k in range(low, high + 1))

    @property
    def is_exhaustive(self) -> bool:
        return self.rank(self.jumps[-1] if self.layers else 0) == self.ambient_dim

    def quotient_coordinates(self, k: int) -> Optional[QuotientCoordinates]:
        layer = self.layer(k)
        if layer is None:
            return None
        return QuotientCoordinates(layer.representatives, self.subspace(k - 1))

    def metric_value(self, k: int, x: Sequence, y: Sequence) -> sp.Rational:
        """
        g_k(x̄, ȳ) for x, y ∈ I_k; zero when I_k/I_{k-1} vanishes.

        Raises:
            ValueError: If x or y does not lie in I_k
        """
        coordinates = self.quotient_coordinates(k)
        if coordinates is None:
            if not (self.subspace(k).contains(x) and self.subspace(k).contains(y)):
                raise ValueError(f"Vectors do not lie in I_{k}")
            return sp.S.Zero
        return self.layer(k).metric.evaluate(coordinates.coordinates(x), coordinates.coordinates(y))

    def mismatch(self, other: 'NondegenerateFiltration') -> Optional[str]:
        """First difference from other as a readable locus, None if the filtrations agree."""
        if self.ambient_dim != other.ambient_dim:
            return f"ambient dimensions {self.ambient_dim} != {other.ambient_dim}"
        if self.jumps != other.jumps:
            return f"jumps {list(self.jumps)} != {list(other.jumps)}"
        for layer in self.layers:
            k = layer.jump
            if self.subspace(k) != other.subspace(k):
                return f"I_{k} differs"
            for i, x in enumerate(layer.representatives):
                for j, y in enumerate(layer.representatives):
                    if layer.metric.matrix[i, j] != other.metric_value(k, x, y):
                        return f"g_{k} differs on ({format_vector(x)}, {format_vector(y)})"
        return None

    def equivalent_to(self, other: 'NondegenerateFiltration') -> bool:
        return self.mismatch(other) is None

    def describe(self) -> dict:
        return {
            str(layer.jump): {
                'rank': self.rank(layer.jump),
                'representatives': [format_vector(v) for v in layer.representatives],
                'gram': [[str(layer.metric.matrix[i, j]) for j in range(layer.rank)]
                         for i in range(layer.rank)],
            }
            for layer in self.layers
        }


def filtration_from_profile(profile: FiltrationProfile, metric: LocalizedMetric) -> NondegenerateFiltration:
    """
    Extract (I_•, g_•) from an adapted profile.

    I_k is spanned by π(x_i) for κ_i ≤ k; on the new representatives of a jump k
    the metric is g_k(x̄, ȳ) = Res_{λ=0} λ^{k-1} g^λ(x, y), i.e. the coefficient
    of λ^{-k}.
    """
    layers = {}
    for k in sorted(set(profile.kappas)):
        indices = [i for i, kappa in enumerate(profile.kappas) if kappa == k]
        representatives = [profile.reduced_x(i) for i in indices]
        gram = Matrix(len(indices), len(indices), lambda a, b: metric.pair(
            profile.basis_x[indices[a]], profile.basis_x[indices[b]]).coeff(-k))
        if gram.det() == 0:
            raise FrobeniusError(f"g_{k} came out degenerate")
        layers[k] = (representatives, gram)
    filtration = NondegenerateFiltration.from_layers(metric.ambient_dim, layers)
    logger.debug(f"Filtration jumps {filtration.jumps} with ranks "
                 f"{[filtration.rank(k) for k in filtration.jumps]}")
    return filtration


def extract_filtration(metric: LocalizedMetric) -> NondegenerateFiltration:
    return filtration_from_profile(normalize_metric(metric), metric)


def _random_polynomial(rng: random.Random, degree: int = 2) -> LaurentPoly:
    return LaurentPoly.from_terms({e: rng.randint(-3, 3) for e in range(degree + 1)})


def _random_lattice_adjustment(
    profile: FiltrationProfile, k: int, rng: random.Random
) -> LaurentVector:
    """A random element of I_k^λ ∩ λH^λ."""
    size = profile.size
    adjustment = _laurent_vector(zero_vector(size))
    for i, kappa in enumerate(profile.kappas):
        power = 1 if kappa <= k else kappa - k
        coefficient = _random_polynomial(rng).shift(power)
        adjustment = _add_laurent_vectors(adjustment, _scale_laurent_vector(coefficient, profile.basis_x[i]))
    return adjustment


def _random_member(subspace: RationalSubspace, rng: random.Random) -> Vector:
    vector = zero_vector(subspace.ambient_dim)
    for basis_vector in subspace.basis:
        vector = add_vectors(vector, scale_vector(rng.randint(-3, 3), basis_vector))
    return vector


def residue_metric_well_defined_check(
    metric: LocalizedMetric,
    k: int,
    trials: int,
    seed: int = 0
) -> bool:
    """
    Verify that Res λ^{k-1} g^λ only depends on the classes in I_k/I_{k-1}.

    Each trial re-lifts random x, y ∈ I_k after adding random elements of
    I_{k-1}, perturbs the lifts by random elements of I_k^λ ∩ λH^λ, and
    compares the residue with g_k(x̄, ȳ). It also checks that the residue
    vanishes when one argument is lifted from I_{k-1}.
    """
    profile = normalize_metric(metric)
    filtration = filtration_from_profile(profile, metric)
    upper = filtration.subspace(k)
    lower = filtration.subspace(k - 1)
    rng = random.Random(seed)
    for trial in range(trials):
        x = _random_member(upper, rng)
        y = _random_member(upper, rng)
        expected = filtration.metric_value(k, x, y)
        x_lift = _add_laurent_vectors(
            profile.lift(add_vectors(x, _random_member(lower, rng)), k),
            _random_lattice_adjustment(profile, k, rng))
        y_lift = _add_laurent_vectors(
            profile.lift(add_vectors(y, _random_member(lower, rng)), k),
            _random_lattice_adjustment(profile, k, rng))
        if metric.pair(x_lift, y_lift).coeff(-k) != expected:
            logger.debug(f"Residue at k={k} changed under re-lift in trial {trial}")
            return False
        low_lift = _add_laurent_vectors(
            profile.lift(_random_member(lower, rng), k - 1),
            _random_lattice_adjustment(profile, k - 1, rng))
        if metric.pair(low_lift, y_lift).coeff(-k) != 0:
            logger.debug(f"Residue at k={k} does not vanish on I_{k - 1} in trial {trial}")
            return False
    return True


# ---------------------------------------------------------------------------
# Mixed Frobenius algebras
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixedFrobeniusAlgebra:
    algebra: FiniteAlgebra
    filtration: NondegenerateFiltration
    charges: Optional[Dict[int, sp.Rational]] = None

    def __post_init__(self):
        if self.filtration.ambient_dim != self.algebra.dim:
            raise ValueError("Filtration and algebra dimensions differ")
        if self.charges is not None:
            object.__setattr__(self, 'charges', {int(k): to_rational(d) for k, d in self.charges.items()})


def homogeneous_defect(algebra: FiniteAlgebra, space: RationalSubspace) -> Optional[Vector]:
    """First basis vector of space with a homogeneous component outside space, if any."""
    for vector in space.basis:
        for component in algebra.homogeneous_components(vector).values():
            if not space.contains(component):
                return vector
    return None


def homogeneous_layer_basis(
    algebra: FiniteAlgebra, filtration: NondegenerateFiltration, k: int
) -> List[Tuple[int, Vector]]:
    """Homogeneous representatives of I_k/I_{k-1} with their degrees; needs I_k graded."""
    candidates = [
        component
        for vector in filtration.subspace(k).basis
        for component in algebra.homogeneous_components(vector).values()
    ]
    candidates.sort(key=lambda v: algebra.degree_of(v))
    chosen = filtration.subspace(k - 1).extend_basis(candidates)
    return [(algebra.degree_of(v), v) for v in chosen]


def _charge_violation(m: MixedFrobeniusAlgebra, k: int) -> Optional[str]:
    algebra, filtration = m.algebra, m.filtration
    if k not in m.charges:
        return f"no charge declared for jump {k}"
    for subspace_index in (k - 1, k):
        defect = homogeneous_defect(algebra, filtration.subspace(subspace_index))
        if defect is not None:
            return f"I_{subspace_index} is not graded: {algebra.format_element(defect)}"
    charge = m.charges[k]
    basis = homogeneous_layer_basis(algebra, filtration, k)
    for degree_x, x in basis:
        for degree_y, y in basis:
            if degree_x + degree_y != charge and filtration.metric_value(k, x, y) != 0:
                return (f"g_{k}({algebra.format_element(x)}, {algebra.format_element(y)}) != 0 "
                        f"with degrees {degree_x}+{degree_y} != D_{k}={charge}")
    return None


def check_mfa(m: MixedFrobeniusAlgebra) -> VerificationReport:
    """
    Check the Frobenius filtration axioms on a mixed Frobenius algebra.

    Records: exhaustiveness, then per jump k the ideal property of I_k and
    symmetry, nondegeneracy and A/I_{k-1}-invariance of g_k; with charges and
    a grading also the charge condition.
    """
    report = VerificationReport()
    algebra, filtration = m.algebra, m.filtration
    report.add('filtration exhaustive', filtration.is_exhaustive,
               counterexample=f"top filter has rank {filtration.rank(max(filtration.jumps, default=0))} "
                              f"of {algebra.dim}")
    names = algebra.basis_names
    for layer in filtration.layers:
        k = layer.jump
        violation = ideal_violation(algebra, filtration.subspace(k))
        report.add(f"ideal I_{k}", violation is None, counterexample=violation and (
            f"{names[violation[0]]} * {format_vector(violation[1])} leaves I_{k}"))
        report.add(f"symmetric g_{k}", layer.metric.is_symmetric(),
                   counterexample=f"gram {layer.metric.matrix.tolist()} is not symmetric")
        report.add(f"nondegenerate g_{k}", layer.metric.is_nondegenerate(),
                   counterexample=f"gram {layer.metric.matrix.tolist()} is singular")
        failure = _invariance_failure(algebra, filtration, layer)
        report.add(f"invariant g_{k}", failure is None, counterexample=failure)
    if m.charges is not None and algebra.is_graded:
        for k in filtration.jumps:
            failure = _charge_violation(m, k)
            report.add(f"charge g_{k}", failure is None, counterexample=failure)
    return report


def _invariance_failure(algebra: FiniteAlgebra, filtration: NondegenerateFiltration,
                        layer: FiltrationLayer) -> Optional[str]:
    k = layer.jump
    for a in range(algebra.dim):
        e_a = algebra.basis_vector(a)
        for x in layer.representatives:
            for y in layer.representatives:
                try:
                    left = filtration.metric_value(k, algebra.multiply(e_a, x), y)
                    right = filtration.metric_value(k, x, algebra.multiply(e_a, y))
                except ValueError:
                    return f"g_{k} undefined on {algebra.basis_names[a]} * {format_vector(x)}"
                if left != right:
                    return (f"g_{k}({algebra.basis_names[a]}*{format_vector(x)}, {format_vector(y)}) "
                            f"!= g_{k}({format_vector(x)}, {algebra.basis_names[a]}*{format_vector(y)})")
    return None


def existence_mfa(algebra: FiniteAlgebra) -> MixedFrobeniusAlgebra:
    """Package frobenius_filtration_existence as a mixed Frobenius algebra."""
    _, metrics = frobenius_filtration_existence(algebra)
    layers = {k: (form.basis, form.matrix) for k, form in enumerate(metrics, start=1)}
    return MixedFrobeniusAlgebra(algebra, NondegenerateFiltration.from_layers(algebra.dim, layers))


# ---------------------------------------------------------------------------
# Algebras over K[λ]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaAlgebra:
    """
    Commutative product on H^λ = K[λ]^s: structure_constants[i][j] is the
    vector of e_i ∗ e_j with Laurent coefficients.
    """
    basis_names: Tuple[str, ...]
    structure_constants: Tuple[Tuple[LaurentVector, ...], ...]
    unit: Vector

    def __post_init__(self):
        object.__setattr__(self, 'structure_constants', tuple(
            tuple(_laurent_vector(v) for v in row) for row in self.structure_constants))
        object.__setattr__(self, 'unit', rational_vector(self.unit))

    @classmethod
    def constant(cls, algebra: FiniteAlgebra) -> 'LambdaAlgebra':
        """A[λ] with the λ-independent product of algebra."""
        return cls(algebra.basis_names, algebra.structure_constants, algebra.unit)

    @property
    def dim(self) -> int:
        return len(self.basis_names)

    def reduction(self) -> FiniteAlgebra:
        """The induced product on H^λ/λH^λ.

        Raises:
            LambdaPoleError: If a structure constant has a negative power of λ
        """
        names = self.basis_names
        for i in range(self.dim):
            for j in range(self.dim):
                for k, value in enumerate(self.structure_constants[i][j]):
                    if not value.is_polynomial:
                        raise LambdaPoleError(
                            f"Structure constant C_{{{names[i]},{names[j]}}}^{names[k]} = {value} "
                            f"has a pole at λ = 0")
        table = tuple(
            tuple(tuple(entry.at_zero() for entry in vector) for vector in row)
            for row in self.structure_constants
        )
        return FiniteAlgebra(names, table, self.unit)


def mfa_from_invariant_localized_metric(
    lambda_algebra: LambdaAlgebra, metric: LocalizedMetric
) -> MixedFrobeniusAlgebra:
    """
    The mixed Frobenius algebra (H_K, I_•, g_•) induced by a ∗-invariant g^λ.

    Raises:
        InvarianceError: Naming the first basis triple with
            g^λ(e_i ∗ e_j, e_k) != g^λ(e_i, e_j ∗ e_k)
    """
    names = lambda_algebra.basis_names
    size = lambda_algebra.dim
    identity = [unit_vector(size, i) for i in range(size)]
    for i in range(size):
        for j in range(size):
            for k in range(size):
                left = metric.pair(lambda_algebra.structure_constants[i][j], identity[k])
                right = metric.pair(identity[i], lambda_algebra.structure_constants[j][k])
                if left != right:
                    raise InvarianceError(
                        f"g(e_{names[i]} * e_{names[j]}, e_{names[k]}) != g(e_{names[i]}, e_{names[j]} * e_{names[k]})")
    algebra = lambda_algebra.reduction()
    return MixedFrobeniusAlgebra(algebra, extract_filtration(metric))


# ---------------------------------------------------------------------------
# Nilpotent construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NilpotentData:
    """
    A Frobenius algebra (A, g) with nilpotents n_1..n_r defining
    n = λ^r + n_1 λ^{r-1} + … + n_r.

    Raises:
        InvarianceError: If g is not an invariant metric on A
        NotNilpotentError: If some n_i is not nilpotent
    """
    base: FiniteAlgebra
    metric: sp.ImmutableMatrix
    nilpotents: Tuple[Vector, ...]

    def __post_init__(self):
        object.__setattr__(self, 'metric', sp.ImmutableMatrix(self.metric))
        object.__setattr__(self, 'nilpotents', tuple(self.base.element(n) for n in self.nilpotents))
        if not self.nilpotents:
            raise NotNilpotentError("At least one nilpotent n_1 is required")
        report = check_invariant_metric(self.base, self.metric)
        if not report.passed:
            failure = report.failures()[0]
            raise InvarianceError(f"{failure.name}: {failure.counterexample}")
        for index, n in enumerate(self.nilpotents, start=1):
            if not self.base.is_nilpotent(n):
                raise NotNilpotentError(f"n_{index} = {self.base.format_element(n)} is not nilpotent")

    @property
    def r(self) -> int:
        return len(self.nilpotents)

    @property
    def s(self) -> int:
        return self.base.dim

    def pairing(self, x: Sequence, y: Sequence) -> sp.Rational:
        return (Matrix([list(x)]) * self.metric * Matrix(list(y)))[0, 0]

    @property
    def companion(self) -> Matrix:
        """N on A^{⊕r}: block column 1 holds −L_{n_1}..−L_{n_r}, identities on the superdiagonal."""
        r, s = self.r, self.s
        matrix = sp.zeros(r * s, r * s)
        for i, n in enumerate(self.nilpotents):
            matrix[i * s:(i + 1) * s, 0:s] = -self.base.multiplication_matrix(n)
            if i + 1 < r:
                matrix[i * s:(i + 1) * s, (i + 1) * s:(i + 2) * s] = sp.eye(s)
        return matrix

    def divisor(self) -> List[Vector]:
        """Coefficients of n, lowest degree first."""
        return list(reversed(self.nilpotents)) + [self.base.unit]

    def first(self, vector: Sequence) -> Vector:
        return tuple(vector[:self.s])

    def last(self, vector: Sequence) -> Vector:
        return tuple(vector[(self.r - 1) * self.s:])


def nilpotent_localized_metric(data: NilpotentData) -> LocalizedMetric:
    """g^λ(e_a, e_b) = g(e_a·e_b, n^{-1}) on the A-basis of A[λ]."""
    inverse = data.base.invert_monic(data.nilpotents)
    size = data.s
    rows = [
        [inverse.apply(lambda v, a=a, b=b: data.pairing(data.base.structure_constants[a][b], v))
         for b in range(size)]
        for a in range(size)
    ]
    return LocalizedMetric.from_rows(rows)


def nilpotent_filtration_direct(data: NilpotentData) -> NondegenerateFiltration:
    """
    The filtration of the nilpotent construction without any Smith form.

    I_0 = {x·n_r} with g_0(x·n_r, y·n_r) = g(x·y, n_r); for k > 0,
    I_k = I_0 + p_r(Ker N^k) with g_k(x̄, ȳ) = g(x, p_1(N^{k-1} ȳ⃗)) where
    ȳ⃗ ∈ Ker N^k lifts y. Lifts are kernel vectors in echelon order.
    """
    algebra = data.base
    size = data.s
    n_r = data.nilpotents[-1]
    layers = {}

    current = RationalSubspace.zero(size)
    preimages = []
    for j in range(size):
        column = algebra.multiply(n_r, algebra.basis_vector(j))
        if not current.contains(column):
            preimages.append(algebra.basis_vector(j))
            current = current + RationalSubspace.spanned_by(size, [column])
    if preimages:
        representatives = [algebra.multiply(p, n_r) for p in preimages]
        gram = Matrix(len(preimages), len(preimages), lambda a, b: data.pairing(
            algebra.multiply(preimages[a], preimages[b]), n_r))
        layers[0] = (representatives, gram)

    companion = data.companion
    power = sp.eye(data.r * size)
    k = 0
    while current.dimension < size:
        k += 1
        if k > data.r * size + 1:
            raise NotNilpotentError("Companion matrix is not nilpotent")
        previous_power = power
        power = companion * power
        lifts = []
        for vector in kernel(power).basis:
            tail = data.last(vector)
            if not current.contains(tail):
                lifts.append(vector)
                current = current + RationalSubspace.spanned_by(size, [tail])
        if not lifts:
            continue
        representatives = [data.last(v) for v in lifts]
        images = [data.first(tuple(previous_power * Matrix(list(v)))) for v in lifts]
        gram = Matrix(len(lifts), len(lifts), lambda a, b: data.pairing(representatives[a], images[b]))
        layers[k] = (representatives, gram)

    filtration = NondegenerateFiltration.from_layers(size, layers)
    logger.debug(f"Direct nilpotent filtration jumps {filtration.jumps}")
    return filtration


def nilpotent_mfa(data: NilpotentData) -> MixedFrobeniusAlgebra:
    return MixedFrobeniusAlgebra(data.base, nilpotent_filtration_direct(data))


def verify_division_identity(data: NilpotentData, x: Sequence[Sequence], k: int) -> VerificationReport:
    """
    Check λ^k x = Σ_{i<k} (p_1 N^i ρ)(x) λ^{k-1-i}·n + (ρ^{-1} N^k ρ)(x).

    Args:
        data (NilpotentData): Defines n and N
        x (Sequence[Sequence]): (a_1, …, a_r) standing for Σ a_i λ^{r-i}
        k (int): Power of λ

    Returns:
        VerificationReport: The identity by direct multiplication, and its
            agreement with divide_by_monic
    """
    algebra = data.base
    r = data.r
    vector = tuple(c for a in x for c in algebra.element(a))
    if len(x) != r:
        raise ValueError(f"Expected {r} coefficients, got {len(x)}")

    def unflatten(v: Sequence) -> List[Vector]:
        """ρ^{-1} as a coefficient list, lowest degree first."""
        return [tuple(v[i * data.s:(i + 1) * data.s]) for i in reversed(range(r))]

    companion = data.companion
    column = Matrix(list(vector))
    quotient = [algebra.zero() for _ in range(max(k, 1))]
    for i in range(k):
        quotient[k - 1 - i] = data.first(tuple(companion ** i * column))
    remainder = unflatten(tuple(companion ** k * column))

    shifted = [algebra.zero()] * k + unflatten(vector)
    rebuilt = polynomial_add(polynomial_multiply(quotient, data.divisor(), algebra), remainder, algebra)
    report = VerificationReport()
    report.add('division identity', polynomials_equal(rebuilt, shifted, algebra),
               counterexample=f"λ^{k}·x is not reproduced")
    stepwise_quotient, stepwise_remainder = divide_by_monic(shifted, data.divisor(), algebra)
    agrees = (polynomials_equal(stepwise_quotient, quotient, algebra)
              and polynomials_equal(stepwise_remainder, remainder, algebra))
    report.add('division matches long division', agrees,
               counterexample=f"closed form and divide_by_monic differ at k={k}")
    return report


def check_closing_formulas(data: NilpotentData, filtration: NondegenerateFiltration) -> VerificationReport:
    """
    For r = 1: J_k = {x : n_1^k x = 0} and g_k(x̄, ȳ) = g(x·y, (−n_1)^{k-1}).
    """
    if data.r != 1:
        raise ValueError("Closing formulas apply to r = 1 only")
    algebra = data.base
    n = data.nilpotents[0]
    report = VerificationReport()
    image = RationalSubspace.spanned_by(
        algebra.dim, [algebra.multiply(n, algebra.basis_vector(j)) for j in range(algebra.dim)])
    for layer in filtration.layers:
        k = layer.jump
        if k <= 0:
            continue
        expected = image + kernel(algebra.multiplication_matrix(algebra.power(n, k)))
        report.add(f"J_{k} annihilator", expected == filtration.subspace(k),
                   counterexample=f"I_{k} != I_0 + Ann(n_1^{k})")
        twist = algebra.power(scale_vector(-1, n), k - 1)
        mismatch = None
        for x in layer.representatives:
            for y in layer.representatives:
                value = data.pairing(algebra.multiply(x, y), twist)
                if value != filtration.metric_value(k, x, y):
                    mismatch = f"g_{k}({format_vector(x)}, {format_vector(y)}) != {value}"
                    break
            if mismatch:
                break
        report.add(f"g_{k} closing formula", mismatch is None, counterexample=mismatch)
    return report
