"""
Finite Algebra Domain Module

Finite-dimensional commutative unital algebras over the rationals, given by
structure constants, together with the ideal theory the filtration
constructions need: nilradical, ideal powers, annihilators, invariant metrics
and the constructive existence of Frobenius filtrations on split algebras.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import sympy as sp
from sympy import Matrix, Poly, QQ

from .errors import AlgebraValidationError, NonSplitAlgebraError, NotNilpotentError
from .exactalg import (
    LAMBDA,
    LaurentPoly,
    QuotientCoordinates,
    RationalSubspace,
    Vector,
    add_vectors,
    format_vector,
    is_zero_vector,
    kernel,
    polynomial_multiply,
    rational_vector,
    scale_vector,
    sub_vectors,
    to_rational,
    unit_vector,
    zero_vector,
)
from .reports import VerificationReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteAlgebra:
    """
    Commutative associative unital algebra with a fixed basis.

    The product table is stored as vectors: structure_constants[i][j] is the
    coordinate vector of e_i·e_j, i.e. its k-th entry is c_{ij}^k.
    Commutativity, associativity, the unit axiom and (when present) grading
    compatibility are verified on construction.

    Attributes:
        basis_names (Tuple[str, ...]): Labels of the basis e_0..e_{s-1}
        structure_constants (Tuple[Tuple[Vector, ...], ...]): Product table
        unit (Vector): Coordinates of the unit element
        grading (Optional[Tuple[int, ...]]): Degree |e_i| of each basis vector

    Raises:
        AlgebraValidationError: Naming the first basis triple that fails
    """
    basis_names: Tuple[str, ...]
    structure_constants: Tuple[Tuple[Vector, ...], ...]
    unit: Vector
    grading: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        size = len(self.basis_names)
        if size == 0:
            raise AlgebraValidationError("Algebra must have a non-empty basis")
        if len(set(self.basis_names)) != size:
            raise AlgebraValidationError(f"Duplicate basis names in {self.basis_names}")
        table = tuple(tuple(rational_vector(v) for v in row) for row in self.structure_constants)
        if len(table) != size or any(len(row) != size for row in table) \
                or any(len(v) != size for row in table for v in row):
            raise AlgebraValidationError(f"Structure constants must form a {size}x{size}x{size} tensor")
        object.__setattr__(self, 'basis_names', tuple(self.basis_names))
        object.__setattr__(self, 'structure_constants', table)
        object.__setattr__(self, 'unit', rational_vector(self.unit))
        if len(self.unit) != size:
            raise AlgebraValidationError(f"Unit has {len(self.unit)} coordinates, expected {size}")
        if self.grading is not None:
            object.__setattr__(self, 'grading', tuple(int(d) for d in self.grading))
            if len(self.grading) != size:
                raise AlgebraValidationError(f"Grading has {len(self.grading)} entries, expected {size}")
        self._validate()

    def _validate(self) -> None:
        names = self.basis_names
        size = self.dim
        for i in range(size):
            for j in range(i + 1, size):
                if self.structure_constants[i][j] != self.structure_constants[j][i]:
                    raise AlgebraValidationError(
                        f"Not commutative: {names[i]}*{names[j]} != {names[j]}*{names[i]}")
        for i in range(size):
            e_i = self.basis_vector(i)
            if self.multiply(self.unit, e_i) != e_i:
                raise AlgebraValidationError(f"Unit axiom fails on {names[i]}")
        for i in range(size):
            for j in range(size):
                left = self.structure_constants[i][j]
                for k in range(size):
                    first = self.multiply(left, self.basis_vector(k))
                    second = self.multiply(self.basis_vector(i), self.structure_constants[j][k])
                    if first != second:
                        raise AlgebraValidationError(
                            f"Not associative on triple ({names[i]}, {names[j]}, {names[k]})")
        if self.grading is not None:
            for i in range(size):
                for j in range(size):
                    for k, value in enumerate(self.structure_constants[i][j]):
                        if value != 0 and self.grading[k] != self.grading[i] + self.grading[j]:
                            raise AlgebraValidationError(
                                f"Product {names[i]}*{names[j]} has a component along {names[k]} "
                                f"of degree {self.grading[k]}, expected {self.grading[i] + self.grading[j]}")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_multiplication(
        cls,
        basis_names: Sequence[str],
        product: Callable[[int, int], Sequence],
        unit: Sequence,
        grading: Optional[Sequence[int]] = None
    ) -> 'FiniteAlgebra':
        size = len(basis_names)
        table = tuple(
            tuple(rational_vector(product(i, j)) for j in range(size)) for i in range(size))
        return cls(tuple(basis_names), table, rational_vector(unit),
                   None if grading is None else tuple(grading))

    @classmethod
    def truncated_polynomial(cls, n: int, variable: str = 'x', graded: bool = True) -> 'FiniteAlgebra':
        """Q[x]/(x^n) on the monomial basis 1, x, …, x^{n-1}."""
        names = ['1'] + [variable if i == 1 else f"{variable}{i}" for i in range(1, n)]

        def product(i, j):
            return unit_vector(n, i + j) if i + j < n else zero_vector(n)

        return cls.from_multiplication(
            names, product, unit_vector(n, 0), list(range(n)) if graded else None)

    @classmethod
    def split_semisimple(cls, n: int) -> 'FiniteAlgebra':
        """Q^n with componentwise product, on the idempotent basis."""

        def product(i, j):
            return unit_vector(n, i) if i == j else zero_vector(n)

        return cls.from_multiplication(
            [f"p{i}" for i in range(n)], product, tuple(sp.S.One for _ in range(n)))

    @classmethod
    def direct_product(cls, first: 'FiniteAlgebra', second: 'FiniteAlgebra') -> 'FiniteAlgebra':
        m, n = first.dim, second.dim
        names = [f"a.{name}" for name in first.basis_names] + [f"b.{name}" for name in second.basis_names]

        def product(i, j):
            if i < m and j < m:
                return tuple(first.structure_constants[i][j]) + zero_vector(n)
            if i >= m and j >= m:
                return zero_vector(m) + tuple(second.structure_constants[i - m][j - m])
            return zero_vector(m + n)

        grading = None
        if first.grading is not None and second.grading is not None:
            grading = list(first.grading) + list(second.grading)
        return cls.from_multiplication(names, product, tuple(first.unit) + tuple(second.unit), grading)

    @classmethod
    def tensor_product(cls, first: 'FiniteAlgebra', second: 'FiniteAlgebra') -> 'FiniteAlgebra':
        m, n = first.dim, second.dim
        pairs = [(a, b) for a in range(m) for b in range(n)]
        names = [
            first.basis_names[a] if second.basis_names[b] == '1' else
            second.basis_names[b] if first.basis_names[a] == '1' else
            f"{first.basis_names[a]}{second.basis_names[b]}"
            for a, b in pairs
        ]
        if len(set(names)) != len(names):
            names = [f"{first.basis_names[a]}*{second.basis_names[b]}" for a, b in pairs]

        def product(i, j):
            a1, b1 = pairs[i]
            a2, b2 = pairs[j]
            left = first.structure_constants[a1][a2]
            right = second.structure_constants[b1][b2]
            return tuple(left[a] * right[b] for a, b in pairs)

        unit = tuple(first.unit[a] * second.unit[b] for a, b in pairs)
        grading = None
        if first.grading is not None and second.grading is not None:
            grading = [first.grading[a] + second.grading[b] for a, b in pairs]
        return cls.from_multiplication(names, product, unit, grading)

    # -- arithmetic -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis_names)

    @property
    def is_graded(self) -> bool:
        return self.grading is not None

    def index_of(self, name: str) -> int:
        return self.basis_names.index(name)

    def basis_vector(self, index: int) -> Vector:
        return unit_vector(self.dim, index)

    def element(self, coordinates: Sequence) -> Vector:
        vector = rational_vector(coordinates)
        if len(vector) != self.dim:
            raise ValueError(f"Element needs {self.dim} coordinates, got {len(vector)}")
        return vector

    def multiply(self, x: Sequence, y: Sequence) -> Vector:
        result = [sp.S.Zero] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                coefficient = xi * yj
                for k, c in enumerate(self.structure_constants[i][j]):
                    if c != 0:
                        result[k] += coefficient * c
        return tuple(result)

    def power(self, a: Sequence, k: int) -> Vector:
        result = self.unit
        for _ in range(k):
            result = self.multiply(result, a)
        return result

    def multiplication_matrix(self, a: Sequence) -> Matrix:
        """Matrix of x ↦ a·x; column j holds a·e_j."""
        columns = [self.multiply(a, self.basis_vector(j)) for j in range(self.dim)]
        return Matrix(columns).T

    def is_nilpotent(self, a: Sequence) -> bool:
        return is_zero_vector(self.power(a, self.dim))

    def trace_form(self) -> Matrix:
        return Matrix(self.dim, self.dim, lambda i, j: self.multiplication_matrix(
            self.structure_constants[i][j]).trace())

    # CoefficientRing protocol, so A[λ] division works with algebra coefficients

    def zero(self) -> Vector:
        return zero_vector(self.dim)

    def one(self) -> Vector:
        return self.unit

    def add(self, a, b) -> Vector:
        return add_vectors(a, b)

    def sub(self, a, b) -> Vector:
        return sub_vectors(a, b)

    def mul(self, a, b) -> Vector:
        return self.multiply(a, b)

    def is_zero(self, a) -> bool:
        return is_zero_vector(a)

    # -- grading --------------------------------------------------------------

    def homogeneous_components(self, vector: Sequence) -> Dict[int, Vector]:
        if self.grading is None:
            return {0: rational_vector(vector)}
        components: Dict[int, List] = {}
        for index, value in enumerate(vector):
            if value == 0:
                continue
            degree = self.grading[index]
            components.setdefault(degree, [sp.S.Zero] * self.dim)[index] = to_rational(value)
        return {degree: tuple(component) for degree, component in sorted(components.items())}

    def degree_of(self, vector: Sequence) -> Optional[int]:
        """Degree of a nonzero homogeneous vector, None when inhomogeneous or zero."""
        components = self.homogeneous_components(vector)
        if len(components) != 1:
            return None
        return next(iter(components))

    def format_element(self, vector: Sequence) -> str:
        terms = [
            f"{to_rational(c)}*{name}" for c, name in zip(vector, self.basis_names) if c != 0
        ]
        return ' + '.join(terms) if terms else '0'

    # -- polynomials over the algebra -----------------------------------------

    def invert_monic(self, lower_coefficients: Sequence[Sequence]) -> 'AlgebraLaurent':
        """
        Invert n = λ^r + a_1 λ^{r-1} + … + a_r with nilpotent a_i.

        n^{-1} = Σ_{j≥0} (λ^r − n)^j λ^{-(j+1)r}; the sum stops once (λ^r − n)^j
        vanishes, which nilpotency guarantees within dim A + 1 steps.

        Raises:
            NotNilpotentError: If some a_i is not nilpotent
        """
        r = len(lower_coefficients)
        coefficients = [self.element(a) for a in lower_coefficients]
        for index, a in enumerate(coefficients, start=1):
            if not self.is_nilpotent(a):
                raise NotNilpotentError(
                    f"Coefficient {index} ({self.format_element(a)}) is not nilpotent")
        terms: Dict[int, Vector] = {}
        if r == 0:
            return AlgebraLaurent(self, ((0, self.unit),))
        # λ^r − n, lowest degree first: coefficient of λ^{r-i} is −a_i.
        difference = [zero_vector(self.dim) for _ in range(r)]
        for i, a in enumerate(coefficients, start=1):
            difference[r - i] = scale_vector(-1, a)
        power = [self.unit]
        for j in range(self.dim + 2):
            if all(is_zero_vector(c) for c in power):
                break
            for degree, coefficient in enumerate(power):
                if is_zero_vector(coefficient):
                    continue
                exponent = degree - (j + 1) * r
                terms[exponent] = add_vectors(terms.get(exponent, zero_vector(self.dim)), coefficient)
            power = polynomial_multiply(power, difference, self)
        else:
            raise NotNilpotentError("Geometric series for the inverse did not terminate")
        return AlgebraLaurent.from_terms(self, terms)


@dataclass(frozen=True)
class AlgebraLaurent:
    """Laurent polynomial in λ with coefficients in a FiniteAlgebra: Σ λ^e·v_e."""
    algebra: FiniteAlgebra
    terms: Tuple[Tuple[int, Vector], ...] = ()

    @classmethod
    def from_terms(cls, algebra: FiniteAlgebra, terms: Dict[int, Sequence]) -> 'AlgebraLaurent':
        cleaned = tuple(
            (int(e), rational_vector(v)) for e, v in sorted(terms.items()) if not is_zero_vector(v))
        return cls(algebra, cleaned)

    @classmethod
    def from_polynomial(cls, algebra: FiniteAlgebra, coefficients: Sequence[Sequence]) -> 'AlgebraLaurent':
        return cls.from_terms(algebra, {e: v for e, v in enumerate(coefficients)})

    def coefficient(self, exponent: int) -> Vector:
        for e, v in self.terms:
            if e == exponent:
                return v
        return zero_vector(self.algebra.dim)

    def __mul__(self, other: 'AlgebraLaurent') -> 'AlgebraLaurent':
        product: Dict[int, Vector] = {}
        for e1, v1 in self.terms:
            for e2, v2 in other.terms:
                value = self.algebra.multiply(v1, v2)
                product[e1 + e2] = add_vectors(product.get(e1 + e2, zero_vector(self.algebra.dim)), value)
        return AlgebraLaurent.from_terms(self.algebra, product)

    def is_one(self) -> bool:
        return self.terms == ((0, self.algebra.unit),)

    def multiply_element(self, x: Sequence) -> 'AlgebraLaurent':
        return AlgebraLaurent.from_terms(
            self.algebra, {e: self.algebra.multiply(x, v) for e, v in self.terms})

    def apply(self, functional: Callable[[Vector], sp.Rational]) -> LaurentPoly:
        """Apply a linear functional coefficientwise, e.g. an integral or g(x, -)."""
        return LaurentPoly.from_terms({e: functional(v) for e, v in self.terms})

    def __str__(self) -> str:
        if not self.terms:
            return '0'
        return ' + '.join(f"({self.algebra.format_element(v)})*λ^{e}" for e, v in self.terms)


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------

def ideal_violation(algebra: FiniteAlgebra, space: RationalSubspace) -> Optional[Tuple[int, Vector]]:
    """First (basis index, subspace vector) whose product leaves the subspace, if any."""
    for vector in space.basis:
        for index in range(algebra.dim):
            product = algebra.multiply(algebra.basis_vector(index), vector)
            if not space.contains(product):
                return index, vector
    return None


@dataclass(frozen=True)
class IdealSubspace:
    """Subspace of a FiniteAlgebra closed under multiplication by every basis element."""
    ambient: FiniteAlgebra
    space: RationalSubspace

    def __post_init__(self):
        violation = ideal_violation(self.ambient, self.space)
        if violation is not None:
            index, vector = violation
            raise AlgebraValidationError(
                f"Subspace is not an ideal: {self.ambient.basis_names[index]} * "
                f"{format_vector(vector)} leaves it")

    @classmethod
    def generated_by(cls, algebra: FiniteAlgebra, generators: Sequence[Sequence]) -> 'IdealSubspace':
        vectors = [
            algebra.multiply(algebra.basis_vector(i), rational_vector(g))
            for g in generators for i in range(algebra.dim)
        ]
        return cls(algebra, RationalSubspace.spanned_by(algebra.dim, vectors))

    @classmethod
    def whole(cls, algebra: FiniteAlgebra) -> 'IdealSubspace':
        return cls(algebra, RationalSubspace.full(algebra.dim))

    @classmethod
    def zero(cls, algebra: FiniteAlgebra) -> 'IdealSubspace':
        return cls(algebra, RationalSubspace.zero(algebra.dim))

    @property
    def basis(self) -> Tuple[Vector, ...]:
        return self.space.basis

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def contains(self, vector: Sequence) -> bool:
        return self.space.contains(vector)

    def product(self, other: 'IdealSubspace') -> 'IdealSubspace':
        vectors = [self.ambient.multiply(a, b) for a in self.basis for b in other.basis]
        return IdealSubspace(self.ambient, RationalSubspace.spanned_by(self.ambient.dim, vectors))


def nilradical(algebra: FiniteAlgebra) -> IdealSubspace:
    """Kernel of the trace form (x, y) ↦ tr(L_{xy}); the nilradical in characteristic zero."""
    radical = IdealSubspace(algebra, kernel(algebra.trace_form()))
    logger.debug(f"Nilradical has dimension {radical.dimension} of {algebra.dim}")
    return radical


def ideal_power(ideal: IdealSubspace, k: int) -> IdealSubspace:
    if k < 0:
        raise ValueError("Ideal powers need k >= 0")
    result = IdealSubspace.whole(ideal.ambient)
    for _ in range(k):
        result = result.product(ideal)
    return result


def nilradical_powers(algebra: FiniteAlgebra) -> List[IdealSubspace]:
    """[A, 𝔑, 𝔑², …, 𝔑^l = 0]."""
    radical = nilradical(algebra)
    powers = [IdealSubspace.whole(algebra)]
    while powers[-1].dimension > 0:
        powers.append(powers[-1].product(radical))
        if len(powers) > algebra.dim + 2:
            raise AlgebraValidationError("Nilradical powers do not terminate")
    return powers


def annihilator(algebra: FiniteAlgebra, a: Sequence, k: int) -> RationalSubspace:
    """Kernel of multiplication by a^k."""
    return kernel(algebra.multiplication_matrix(algebra.power(algebra.element(a), k)))


# ---------------------------------------------------------------------------
# Bilinear forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BilinearForm:
    """
    Gram matrix of a bilinear form on the span of the listed basis vectors.

    When the form lives on a quotient I_k/I_{k-1}, the basis vectors are
    representatives in the ambient space.
    """
    matrix: sp.ImmutableMatrix
    basis: Tuple[Vector, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'matrix', sp.ImmutableMatrix(self.matrix))
        object.__setattr__(self, 'basis', tuple(rational_vector(v) for v in self.basis))
        if self.matrix.rows != self.matrix.cols:
            raise ValueError("Gram matrix must be square")
        if self.basis and len(self.basis) != self.matrix.rows:
            raise ValueError("Gram matrix size does not match the number of basis vectors")

    @property
    def size(self) -> int:
        return self.matrix.rows

    def is_symmetric(self) -> bool:
        return self.matrix == self.matrix.T

    def is_nondegenerate(self) -> bool:
        return self.size == 0 or self.matrix.det() != 0

    def evaluate(self, x: Sequence, y: Sequence) -> sp.Rational:
        """Value on coordinate vectors relative to the basis."""
        return (Matrix([list(x)]) * self.matrix * Matrix(list(y)))[0, 0]


def check_invariant_metric(algebra: FiniteAlgebra, gram: Matrix) -> VerificationReport:
    """Check that gram defines a Frobenius metric: symmetric, nondegenerate, g(xy, z) = g(x, yz)."""
    report = VerificationReport()
    gram = Matrix(gram)
    names = algebra.basis_names
    report.add('metric symmetric', gram == gram.T, counterexample='Gram matrix is not symmetric')
    report.add('metric nondegenerate', gram.det() != 0, counterexample='Gram matrix is singular')

    def pairing(x, y):
        return (Matrix([list(x)]) * gram * Matrix(list(y)))[0, 0]

    violation = None
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            for k in range(algebra.dim):
                left = pairing(algebra.structure_constants[i][j], algebra.basis_vector(k))
                right = pairing(algebra.basis_vector(i), algebra.structure_constants[j][k])
                if left != right:
                    violation = f"g({names[i]}*{names[j]}, {names[k]}) != g({names[i]}, {names[j]}*{names[k]})"
                    break
            if violation:
                break
        if violation:
            break
    report.add('metric invariant', violation is None, counterexample=violation)
    return report


# ---------------------------------------------------------------------------
# Existence of Frobenius filtrations
# ---------------------------------------------------------------------------

def _restricted_operator(operator: Matrix, space: Matrix) -> Matrix:
    """Matrix S with operator·space = space·S, for an invariant subspace given by columns."""
    return (space.T * space).inv() * space.T * operator * space


def _split_by_eigenvalues(operator: Matrix, space: Matrix, where: str) -> List[Matrix]:
    """
    Split an invariant subspace into eigenspaces of operator.

    Raises:
        NonSplitAlgebraError: If the characteristic polynomial has an
            irreducible factor of degree > 1 over Q, or the operator is not
            diagonalizable on the subspace
    """
    restricted = _restricted_operator(operator, space)
    characteristic = Poly(restricted.charpoly(LAMBDA).as_expr(), LAMBDA, domain=QQ)
    _, factors = characteristic.factor_list()
    roots = []
    for factor, _ in factors:
        if factor.degree() > 1:
            raise NonSplitAlgebraError(
                f"{where} has a simple summand of dimension {factor.degree()} "
                f"(irreducible factor {factor.as_expr()})")
        roots.append(-factor.TC() / factor.LC())
    pieces = []
    size = restricted.rows
    for root in sorted(roots):
        eigenvectors = (restricted - root * sp.eye(size)).nullspace()
        pieces.append(space * Matrix.hstack(*eigenvectors))
    if sum(piece.cols for piece in pieces) != space.cols:
        raise NonSplitAlgebraError(f"{where} is not a completely reducible module over Q")
    return pieces


def simple_summand_basis(algebra: FiniteAlgebra, upper: IdealSubspace,
                         lower: IdealSubspace, where: str) -> List[Vector]:
    """
    Basis of upper/lower made of generators of 1-dimensional simple summands.

    Simultaneous eigenspaces of the commuting multiplication operators are
    found by iterated kernel splitting over the algebra basis, in basis order.

    Returns:
        List[Vector]: Representatives in the ambient algebra
    """
    complement = lower.space.complement_in(upper.space)
    if not complement:
        return []
    coordinates = QuotientCoordinates(complement, lower.space)
    size = len(complement)
    pieces = [sp.eye(size)]
    for index in range(algebra.dim):
        columns = [
            coordinates.coordinates(algebra.multiply(algebra.basis_vector(index), c)) for c in complement
        ]
        operator = Matrix(columns).T
        refined = []
        for piece in pieces:
            refined.extend(_split_by_eigenvalues(operator, piece, where))
        pieces = refined
    representatives = []
    for piece in pieces:
        for column in range(piece.cols):
            weights = piece.col(column)
            vector = zero_vector(algebra.dim)
            for weight, c in zip(weights, complement):
                vector = add_vectors(vector, scale_vector(weight, c))
            representatives.append(vector)
    return representatives


def check_semisimple_action(algebra: FiniteAlgebra) -> VerificationReport:
    """
    Verify that 𝔑 annihilates every 𝔑^i/𝔑^{i+1} and that A acts on it
    through a split semisimple quotient.
    """
    report = VerificationReport()
    powers = nilradical_powers(algebra)
    radical = powers[1] if len(powers) > 1 else IdealSubspace.zero(algebra)
    for i in range(1, len(powers) - 1):
        upper, lower = powers[i], powers[i + 1]
        product = radical.product(upper)
        report.add(
            f"radical annihilates N^{i}/N^{i + 1}",
            product.space.is_subspace_of(lower.space),
            counterexample=f"N*N^{i} is not contained in N^{i + 1}",
        )
    for i in range(len(powers) - 1):
        try:
            simple_summand_basis(algebra, powers[i], powers[i + 1], f"N^{i}/N^{i + 1}")
            report.add(f"semisimple action on N^{i}/N^{i + 1}", True)
        except NonSplitAlgebraError as e:
            report.add(f"semisimple action on N^{i}/N^{i + 1}", False, counterexample=str(e))
    return report


def frobenius_filtration_existence(
    algebra: FiniteAlgebra
) -> Tuple[List[IdealSubspace], List[BilinearForm]]:
    """
    Build the Frobenius filtration I_k = 𝔑^{l-k} of a split algebra.

    Each graded piece I_k/I_{k-1} = 𝔑^{l-k}/𝔑^{l-k+1} gets the metric that
    makes a basis of 1-dimensional simple summands orthonormal.

    Args:
        algebra (FiniteAlgebra): The algebra; must be split over Q

    Returns:
        Tuple[List[IdealSubspace], List[BilinearForm]]: The chain I_0 = 0, I_1,
            …, I_l = A and the metrics g_1, …, g_l (representatives in
            BilinearForm.basis)

    Raises:
        NonSplitAlgebraError: Naming the quotient 𝔑^i/𝔑^{i+1} that is not split
    """
    powers = nilradical_powers(algebra)
    length = len(powers) - 1
    chain = [powers[length - k] for k in range(length + 1)]
    metrics = []
    for k in range(1, length + 1):
        i = length - k
        representatives = simple_summand_basis(
            algebra, chain[k], chain[k - 1], f"quotient N^{i}/N^{i + 1}")
        metrics.append(BilinearForm(sp.eye(len(representatives)), tuple(representatives)))
    logger.debug(f"Existence filtration ranks {[ideal.dimension for ideal in chain]}")
    return chain, metrics
