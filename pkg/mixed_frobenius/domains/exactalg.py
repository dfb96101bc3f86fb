"""
Exact Algebra Kernel

This module provides the exact-arithmetic layer every other domain module is
built on. Nothing here ever touches floating point.

- Rational scalars and vectors (sympy Rational tuples)
- Rational subspaces in reduced row echelon form, quotient coordinates
- LaurentPoly: elements of Q[λ, λ^-1]
- LaurentMatrix: square matrices over Q[λ, λ^-1] (representations of g^λ)
- PolynomialMatrix and SmithDecomposition: Smith normal form over Q[λ] with
  explicit transformation tracking
- divide_by_monic: long division by a monic polynomial whose coefficients live
  in an arbitrary coefficient ring (for instance a FiniteAlgebra)

Usage:
    g = LaurentMatrix.from_rows([[LaurentPoly.monomial(1, -2), 0], [0, 1]])
    shift, polynomial = g.clear_denominators()
    decomposition = smith_normal_form(polynomial, shift=shift)
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Protocol, Sequence, Tuple

import sympy as sp
from sympy import Matrix, Poly, QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement

from .errors import NonMonicDivisorError

logger = logging.getLogger(__name__)

LAMBDA = sp.Symbol('lambda')

Vector = Tuple[sp.Rational, ...]


def to_rational(value) -> sp.Rational:
    """Coerce ints, strings like '3/2', Fractions and QQ elements to a sympy Rational."""
    if isinstance(value, sp.Rational):
        return value
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError(f"Refusing floating point value {value!r}; use an exact rational")
    if QQ.of_type(value):
        return QQ.to_sympy(value)
    result = sp.sympify(value)
    if not result.is_Rational:
        raise TypeError(f"Not an exact rational: {value!r}")
    return result


def rational_vector(values: Iterable) -> Vector:
    return tuple(to_rational(v) for v in values)


def zero_vector(size: int) -> Vector:
    return tuple(sp.S.Zero for _ in range(size))


def unit_vector(size: int, index: int) -> Vector:
    return tuple(sp.S.One if i == index else sp.S.Zero for i in range(size))


def add_vectors(a: Sequence, b: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub_vectors(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale_vector(c, a: Sequence) -> Vector:
    c = to_rational(c)
    return tuple(c * x for x in a)


def is_zero_vector(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def format_rational(value) -> str:
    value = to_rational(value)
    if value.q == 1:
        return str(value.p)
    return f"{value.p}/{value.q}"


def format_vector(vector: Sequence) -> str:
    return '(' + ', '.join(format_rational(x) for x in vector) + ')'


# ---------------------------------------------------------------------------
# Rational subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalSubspace:
    """
    Subspace of Q^n stored by its reduced row echelon basis.

    The echelon basis is canonical, so two subspaces are equal exactly when
    their dataclass fields are equal.

    Attributes:
        ambient_dim (int): Dimension n of the ambient space
        basis (Tuple[Vector, ...]): Rows of the reduced row echelon form
        pivots (Tuple[int, ...]): Pivot column of each basis row
    """
    ambient_dim: int
    basis: Tuple[Vector, ...] = ()
    pivots: Tuple[int, ...] = ()

    @classmethod
    def spanned_by(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> 'RationalSubspace':
        rows = [rational_vector(v) for v in vectors]
        if not rows:
            return cls(ambient_dim)
        reduced, pivots = Matrix(rows).rref()
        basis = tuple(
            tuple(reduced[i, j] for j in range(ambient_dim)) for i in range(len(pivots))
        )
        return cls(ambient_dim, basis, tuple(pivots))

    @classmethod
    def zero(cls, ambient_dim: int) -> 'RationalSubspace':
        return cls(ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> 'RationalSubspace':
        return cls.spanned_by(ambient_dim, [unit_vector(ambient_dim, i) for i in range(ambient_dim)])

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def reduce(self, vector: Sequence) -> Vector:
        """Subtract the echelon basis from vector; the result is zero iff vector lies in the subspace."""
        residual = list(rational_vector(vector))
        for row, pivot in zip(self.basis, self.pivots):
            factor = residual[pivot]
            if factor != 0:
                residual = [r - factor * b for r, b in zip(residual, row)]
        return tuple(residual)

    def contains(self, vector: Sequence) -> bool:
        return is_zero_vector(self.reduce(vector))

    def coordinates(self, vector: Sequence) -> Vector:
        """Coordinates of a member vector with respect to the echelon basis."""
        vector = rational_vector(vector)
        return tuple(vector[p] for p in self.pivots)

    def is_subspace_of(self, other: 'RationalSubspace') -> bool:
        return all(other.contains(v) for v in self.basis)

    def __add__(self, other: 'RationalSubspace') -> 'RationalSubspace':
        return RationalSubspace.spanned_by(self.ambient_dim, list(self.basis) + list(other.basis))

    def extend_basis(self, candidates: Iterable[Sequence]) -> List[Vector]:
        """
        Pick, in order, the candidates that are independent modulo this subspace.

        Returns:
            List[Vector]: Selected candidates; together with this subspace they
                span self + span(candidates)
        """
        selected = []
        current = self
        for candidate in candidates:
            candidate = rational_vector(candidate)
            if not current.contains(candidate):
                selected.append(candidate)
                current = RationalSubspace.spanned_by(
                    self.ambient_dim, list(current.basis) + [candidate])
        return selected

    def complement_in(self, larger: 'RationalSubspace') -> List[Vector]:
        return self.extend_basis(larger.basis)


def kernel(matrix: Matrix) -> RationalSubspace:
    return RationalSubspace.spanned_by(
        matrix.cols, [tuple(v) for v in matrix.nullspace()])


def image(matrix: Matrix) -> RationalSubspace:
    return RationalSubspace.spanned_by(
        matrix.rows, [tuple(matrix.col(j)) for j in range(matrix.cols)])


class QuotientCoordinates:
    """
    Coordinates on a quotient W/U with respect to chosen representatives.

    Every w ∈ W is written uniquely as w = Σ a_i r_i + u with u ∈ U; the map
    w ↦ (a_i) identifies W/U with Q^m.
    """

    def __init__(self, representatives: Sequence[Sequence], sub: RationalSubspace):
        self.representatives = [rational_vector(r) for r in representatives]
        self.sub = sub
        columns = self.representatives + list(sub.basis)
        self._size = len(self.representatives)
        if not columns:
            self._matrix = None
            self._left_inverse = None
            return
        self._matrix = Matrix(columns).T
        gram = self._matrix.T * self._matrix
        if gram.det() == 0:
            raise ValueError("Representatives are not independent modulo the subspace")
        self._left_inverse = gram.inv() * self._matrix.T

    @property
    def dimension(self) -> int:
        return self._size

    def solve(self, vector: Sequence) -> Optional[Vector]:
        vector = rational_vector(vector)
        if self._matrix is None:
            return () if is_zero_vector(vector) else None
        column = Matrix(vector)
        solution = self._left_inverse * column
        if self._matrix * solution != column:
            return None
        return tuple(solution)

    def coordinates(self, vector: Sequence) -> Vector:
        solution = self.solve(vector)
        if solution is None:
            raise ValueError(f"Vector {format_vector(vector)} does not lie in the filter")
        return solution[:self._size]


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------

def _poly(expr) -> Poly:
    return Poly(expr, LAMBDA, domain=QQ)


@dataclass(frozen=True)
class LaurentPoly:
    """
    Element of Q[λ, λ^-1].

    Attributes:
        min_exponent (int): Exponent of the first stored coefficient
        coefficients (Tuple[Rational, ...]): Coefficient of λ^(min_exponent + i)
            at index i. Leading and trailing coefficients are nonzero; the zero
            polynomial stores no coefficients and min_exponent 0.
    """
    min_exponent: int = 0
    coefficients: Tuple[sp.Rational, ...] = ()

    def __post_init__(self):
        coefficients = [to_rational(c) for c in self.coefficients]
        start = 0
        while start < len(coefficients) and coefficients[start] == 0:
            start += 1
        end = len(coefficients)
        while end > start and coefficients[end - 1] == 0:
            end -= 1
        if start == end:
            object.__setattr__(self, 'min_exponent', 0)
            object.__setattr__(self, 'coefficients', ())
        else:
            object.__setattr__(self, 'min_exponent', int(self.min_exponent) + start)
            object.__setattr__(self, 'coefficients', tuple(coefficients[start:end]))

    @classmethod
    def zero(cls) -> 'LaurentPoly':
        return cls()

    @classmethod
    def constant(cls, value) -> 'LaurentPoly':
        return cls(0, (to_rational(value),))

    @classmethod
    def monomial(cls, coefficient, exponent: int) -> 'LaurentPoly':
        return cls(exponent, (to_rational(coefficient),))

    @classmethod
    def coerce(cls, value) -> 'LaurentPoly':
        if isinstance(value, LaurentPoly):
            return value
        return cls.constant(value)

    @classmethod
    def from_terms(cls, terms: Dict[int, object]) -> 'LaurentPoly':
        terms = {int(e): to_rational(c) for e, c in terms.items() if to_rational(c) != 0}
        if not terms:
            return cls()
        low, high = min(terms), max(terms)
        return cls(low, tuple(terms.get(e, sp.S.Zero) for e in range(low, high + 1)))

    @classmethod
    def from_poly(cls, poly: Poly, shift: int = 0) -> 'LaurentPoly':
        """Return poly(λ)·λ^shift."""
        coefficients = list(reversed(poly.all_coeffs()))
        return cls(shift, tuple(coefficients))

    @classmethod
    def from_expr(cls, expr) -> 'LaurentPoly':
        """Convert a sympy expression in λ whose denominator is a monomial."""
        numerator, denominator = sp.fraction(sp.together(sp.expand(expr)))
        denominator = _poly(denominator)
        if not denominator.is_monomial:
            raise ValueError(f"Not a Laurent polynomial: {expr}")
        scale = denominator.LC()
        exponent = denominator.degree()
        return cls.from_poly(_poly(numerator), -exponent) * (1 / scale)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def max_exponent(self) -> int:
        return self.min_exponent + len(self.coefficients) - 1

    @property
    def is_monomial(self) -> bool:
        return len(self.coefficients) == 1

    @property
    def is_polynomial(self) -> bool:
        return self.is_zero or self.min_exponent >= 0

    def coeff(self, exponent: int) -> sp.Rational:
        index = exponent - self.min_exponent
        if 0 <= index < len(self.coefficients):
            return self.coefficients[index]
        return sp.S.Zero

    def terms(self) -> List[Tuple[int, sp.Rational]]:
        return [(self.min_exponent + i, c) for i, c in enumerate(self.coefficients) if c != 0]

    def shift(self, k: int) -> 'LaurentPoly':
        """Multiply by λ^k."""
        if self.is_zero:
            return self
        return LaurentPoly(self.min_exponent + k, self.coefficients)

    def shifted_poly(self) -> Tuple[Poly, int]:
        """Return (p, e) with self = p(λ)·λ^e and p a polynomial."""
        return _poly_from_coefficients(self.coefficients), self.min_exponent

    def to_poly(self) -> Poly:
        if not self.is_polynomial:
            raise ValueError(f"{self} has negative powers of λ")
        if self.is_zero:
            return _poly(0)
        return _poly_from_coefficients(self.coefficients) * _poly(LAMBDA ** self.min_exponent)

    def at_zero(self) -> sp.Rational:
        """Evaluate at λ = 0; only defined without negative powers."""
        if not self.is_polynomial:
            raise ValueError(f"{self} has a pole at λ = 0")
        return self.coeff(0)

    def as_expr(self):
        return sum((c * LAMBDA ** e for e, c in self.terms()), sp.S.Zero)

    def serialize(self) -> List[Tuple[int, int, int]]:
        return [(e, int(c.p), int(c.q)) for e, c in self.terms()]

    def __add__(self, other) -> 'LaurentPoly':
        other = LaurentPoly.coerce(other)
        terms = dict(self.terms())
        for e, c in other.terms():
            terms[e] = terms.get(e, sp.S.Zero) + c
        return LaurentPoly.from_terms(terms)

    __radd__ = __add__

    def __neg__(self) -> 'LaurentPoly':
        return LaurentPoly(self.min_exponent, tuple(-c for c in self.coefficients))

    def __sub__(self, other) -> 'LaurentPoly':
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other) -> 'LaurentPoly':
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other) -> 'LaurentPoly':
        if not isinstance(other, LaurentPoly):
            scale = to_rational(other)
            return LaurentPoly(self.min_exponent, tuple(scale * c for c in self.coefficients))
        if self.is_zero or other.is_zero:
            return LaurentPoly()
        left, left_shift = self.shifted_poly()
        right, right_shift = other.shifted_poly()
        return LaurentPoly.from_poly(left * right, left_shift + right_shift)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.is_zero:
            return '0'
        parts = []
        for e, c in self.terms():
            if e == 0:
                parts.append(format_rational(c))
            else:
                parts.append(f"{format_rational(c)}*λ^{e}")
        return ' + '.join(parts)


def _poly_from_coefficients(coefficients: Sequence) -> Poly:
    if not coefficients:
        return _poly(0)
    return Poly.from_list(list(reversed(coefficients)), LAMBDA, domain=QQ)


def residue_at_zero(f: LaurentPoly) -> sp.Rational:
    """Coefficient of λ^-1."""
    return f.coeff(-1)


# ---------------------------------------------------------------------------
# Polynomial matrices and Smith normal form
# ---------------------------------------------------------------------------

# Arithmetic runs on sparse ring elements of Q[λ]; Poly only appears at the API.
_DOMAIN = QQ[LAMBDA]
_RING = _DOMAIN.ring

RingRows = List[List[PolyElement]]


def _to_ring(poly: Poly) -> PolyElement:
    return _RING.from_dict(dict(poly.terms()))


def _from_ring(element: PolyElement) -> Poly:
    return Poly.from_dict(dict(element.items()), LAMBDA, domain=QQ)


def _ring_identity(size: int) -> RingRows:
    return [[_RING.one if i == j else _RING.zero for j in range(size)] for i in range(size)]


def _ring_matmul(a: RingRows, b: RingRows) -> RingRows:
    columns = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, column) if x and y), _RING.zero) for column in columns] for row in a]


def _ring_determinant(rows: RingRows) -> PolyElement:
    """Fraction-free (Bareiss) determinant over Q[λ]."""
    size = len(rows)
    if size == 0:
        return _RING.one
    return DomainMatrix([list(row) for row in rows], (size, size), _DOMAIN).det()


@dataclass(frozen=True)
class PolynomialMatrix:
    """Matrix over Q[λ] with Poly entries in the single generator λ."""
    rows: Tuple[Tuple[Poly, ...], ...]

    @classmethod
    def from_exprs(cls, rows: Sequence[Sequence]) -> 'PolynomialMatrix':
        return cls(tuple(tuple(_poly(entry) for entry in row) for row in rows))

    @classmethod
    def from_sympy(cls, matrix: Matrix) -> 'PolynomialMatrix':
        return cls.from_exprs(matrix.tolist())

    @classmethod
    def identity(cls, size: int) -> 'PolynomialMatrix':
        return cls.from_exprs([[1 if i == j else 0 for j in range(size)] for i in range(size)])

    @classmethod
    def from_ring_rows(cls, rows: RingRows) -> 'PolynomialMatrix':
        return cls(tuple(tuple(_from_ring(entry) for entry in row) for row in rows))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def entry(self, i: int, j: int) -> Poly:
        return self.rows[i][j]

    def to_sympy(self) -> Matrix:
        return Matrix([[entry.as_expr() for entry in row] for row in self.rows])

    def ring_rows(self) -> RingRows:
        return [[_to_ring(entry) for entry in row] for row in self.rows]

    def __matmul__(self, other: 'PolynomialMatrix') -> 'PolynomialMatrix':
        return PolynomialMatrix.from_ring_rows(_ring_matmul(self.ring_rows(), other.ring_rows()))

    def determinant(self) -> Poly:
        return _from_ring(_ring_determinant(self.ring_rows()))

    def is_unimodular(self) -> bool:
        """True iff the determinant is a nonzero rational."""
        det = _ring_determinant(self.ring_rows())
        return bool(det) and det.degree() == 0

    def is_diagonal(self) -> bool:
        return all(
            self.rows[i][j].is_zero
            for i in range(self.nrows) for j in range(self.ncols) if i != j
        )


@dataclass(frozen=True)
class SmithDecomposition:
    """
    Smith normal form U·M·V = diag(e_1, …, e_s) over Q[λ].

    Attributes:
        left (PolynomialMatrix): Unimodular U
        diag (Tuple[Poly, ...]): Monic elementary divisors, e_i | e_{i+1}; zero
            entries (at the end) flag rank deficiency
        right (PolynomialMatrix): Unimodular V
        shift (int): k_0 with M = λ^{k_0}·G when M came from a Laurent matrix G
    """
    left: PolynomialMatrix
    diag: Tuple[Poly, ...]
    right: PolynomialMatrix
    shift: int = 0

    @property
    def rank(self) -> int:
        return sum(1 for e in self.diag if not e.is_zero)

    @property
    def is_rank_deficient(self) -> bool:
        return self.rank < len(self.diag)

    def diagonal_matrix(self) -> PolynomialMatrix:
        size = len(self.diag)
        return PolynomialMatrix(tuple(
            tuple(self.diag[i] if i == j else _poly(0) for j in range(size))
            for i in range(size)
        ))

    def divisibility_chain_holds(self) -> bool:
        for current, following in zip(self.diag, self.diag[1:]):
            if current.is_zero:
                if not following.is_zero:
                    return False
            elif not following.rem(current).is_zero:
                return False
        return True

    def verify(self, matrix: PolynomialMatrix) -> bool:
        """
        Certify the decomposition of matrix by exact re-multiplication.

        When M has full rank, det(U)·det(M)·det(V) = ∏ e_i with ∏ e_i a nonzero
        rational multiple of det(M) forces det(U)·det(V) to be a nonzero
        rational, so neither transform needs its own determinant. Rank
        deficient decompositions compute both determinants directly.
        """
        if not self.divisibility_chain_holds():
            return False
        if any(not e.is_zero and e.LC() != 1 for e in self.diag):
            return False
        left, right = self.left.ring_rows(), self.right.ring_rows()
        diag = [_to_ring(e) for e in self.diag]
        product = _ring_matmul(_ring_matmul(left, matrix.ring_rows()), right)
        size = len(diag)
        if any(product[i][j] != (diag[i] if i == j else _RING.zero) for i in range(size) for j in range(size)):
            return False
        if self.is_rank_deficient:
            return all(
                bool(det) and det.degree() == 0
                for det in (_ring_determinant(left), _ring_determinant(right))
            )
        det = _ring_determinant(matrix.ring_rows())
        elementary = _RING.one
        for e in diag:
            elementary *= e
        # det M is nonzero here: U·M·V has full rank
        return det.degree() == elementary.degree() and elementary == det.monic()

    def exponents(self) -> Tuple[int, ...]:
        """Degrees a_i of the elementary divisors; each must be a monomial λ^{a_i}."""
        degrees = []
        for e in self.diag:
            if e.is_zero or not e.is_monomial:
                raise ValueError(f"Elementary divisor {e.as_expr()} is not a power of λ")
            degrees.append(e.degree())
        return tuple(degrees)


def _swap_rows(rows: RingRows, i: int, j: int) -> None:
    rows[i], rows[j] = rows[j], rows[i]


def _swap_columns(rows: RingRows, i: int, j: int) -> None:
    for row in rows:
        row[i], row[j] = row[j], row[i]


def _add_row_multiple(rows: RingRows, target: int, source: int, factor: PolyElement) -> None:
    rows[target] = [t + factor * s if s else t for t, s in zip(rows[target], rows[source])]


def _add_column_multiple(rows: RingRows, target: int, source: int, factor: PolyElement) -> None:
    for row in rows:
        if row[source]:
            row[target] = row[target] + factor * row[source]


def _scale_row(rows: RingRows, index: int, scale) -> None:
    rows[index] = [entry * scale for entry in rows[index]]


def _height(entry: PolyElement) -> int:
    return max(int(c.numerator).bit_length() + int(c.denominator).bit_length() for c in entry.values())


def _pivot_position(work: RingRows, start: int) -> Optional[Tuple[int, int]]:
    """
    Nonzero entry of least degree. Ties keep the current pivot, so a
    divisibility repair always lowers the pivot degree; after that the entry of
    least coefficient height wins, then the first in row-major order.
    """
    best, best_key = None, None
    size = len(work)
    for i in range(start, size):
        for j in range(start, size):
            entry = work[i][j]
            if not entry:
                continue
            key = (entry.degree(), (i, j) != (start, start), _height(entry))
            if best_key is None or key < best_key:
                best, best_key = (i, j), key
    return best


def _clear_pivot_cross(work: RingRows, left: RingRows, right: RingRows, t: int) -> bool:
    """Reduce row t and column t modulo the monic pivot; True when every remainder vanished."""
    pivot = work[t][t]
    clean = True
    for i in range(t + 1, len(work)):
        if not work[i][t]:
            continue
        quotient, remainder = work[i][t].div(pivot)
        if quotient:
            _add_row_multiple(work, i, t, -quotient)
            _add_row_multiple(left, i, t, -quotient)
        if remainder:
            clean = False
    for j in range(t + 1, len(work)):
        if not work[t][j]:
            continue
        quotient, remainder = work[t][j].div(pivot)
        if quotient:
            _add_column_multiple(work, j, t, -quotient)
            _add_column_multiple(right, j, t, -quotient)
        if remainder:
            clean = False
    return clean


def _non_divisible_column(work: RingRows, t: int) -> Optional[int]:
    pivot = work[t][t]
    if pivot.degree() == 0:
        return None
    for j in range(t + 1, len(work)):
        for i in range(t + 1, len(work)):
            if work[i][j] and work[i][j].rem(pivot):
                return j
    return None


def smith_normal_form(matrix: PolynomialMatrix, shift: int = 0) -> SmithDecomposition:
    """
    Compute the Smith normal form of a square polynomial matrix.

    Pivoting picks the nonzero entry of least degree (ties broken by the
    current pivot, then coefficient height, then row-major order), so the
    output is deterministic.
    Each pivot is made monic before it divides anything, which keeps the
    Euclidean steps free of leading-coefficient denominators. A pivot that
    fails to divide the trailing block pulls the offending column in and the
    step repeats with a strictly smaller pivot degree.

    Args:
        matrix (PolynomialMatrix): Square matrix over Q[λ]
        shift (int): Recorded k_0, untouched by the computation

    Returns:
        SmithDecomposition: U, diag(e_i), V with U·M·V = diag(e_i)

    Example:
        >>> d = smith_normal_form(PolynomialMatrix.from_exprs([[0, 1], [1, LAMBDA]]))
        >>> [e.as_expr() for e in d.diag]
        [1, 1]
    """
    size = matrix.nrows
    if size != matrix.ncols:
        raise ValueError(f"Smith normal form needs a square matrix, got {size}x{matrix.ncols}")
    work = matrix.ring_rows()
    left = _ring_identity(size)
    right = _ring_identity(size)

    for t in range(size):
        while True:
            position = _pivot_position(work, t)
            if position is None:
                break
            i, j = position
            _swap_rows(work, t, i)
            _swap_rows(left, t, i)
            _swap_columns(work, t, j)
            _swap_columns(right, t, j)
            lead = work[t][t].LC
            if lead != 1:
                _scale_row(work, t, 1 / lead)
                _scale_row(left, t, 1 / lead)
            if not _clear_pivot_cross(work, left, right, t):
                continue
            offending = _non_divisible_column(work, t)
            if offending is None:
                break
            _add_column_multiple(work, t, offending, _RING.one)
            _add_column_multiple(right, t, offending, _RING.one)
        if not work[t][t]:
            break

    decomposition = SmithDecomposition(
        left=PolynomialMatrix.from_ring_rows(left),
        diag=tuple(_from_ring(work[i][i]) for i in range(size)),
        right=PolynomialMatrix.from_ring_rows(right),
        shift=shift,
    )
    if decomposition.is_rank_deficient:
        logger.warning(f"Smith decomposition is rank deficient: rank {decomposition.rank} of {size}")
    return decomposition


# ---------------------------------------------------------------------------
# Laurent matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentMatrix:
    """Square matrix over Q[λ, λ^-1]; symmetry is checked on demand, never assumed."""
    entries: Tuple[Tuple[LaurentPoly, ...], ...]

    def __post_init__(self):
        entries = tuple(tuple(LaurentPoly.coerce(e) for e in row) for row in self.entries)
        if not entries or any(len(row) != len(entries) for row in entries):
            raise ValueError("LaurentMatrix must be square and non-empty")
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> 'LaurentMatrix':
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, size: int) -> 'LaurentMatrix':
        return cls.from_rows([[1 if i == j else 0 for j in range(size)] for i in range(size)])

    @classmethod
    def diagonal(cls, values: Sequence) -> 'LaurentMatrix':
        size = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(size)] for i in range(size)])

    @classmethod
    def from_sympy(cls, matrix: Matrix) -> 'LaurentMatrix':
        return cls.from_rows([[LaurentPoly.from_expr(e) for e in row] for row in matrix.tolist()])

    @property
    def size(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> LaurentPoly:
        return self.entries[i][j]

    def is_symmetric(self) -> bool:
        return all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.size) for j in range(i + 1, self.size)
        )

    def transpose(self) -> 'LaurentMatrix':
        return LaurentMatrix.from_rows(
            [[self.entries[j][i] for j in range(self.size)] for i in range(self.size)])

    def min_exponent(self) -> int:
        exponents = [e.min_exponent for row in self.entries for e in row if not e.is_zero]
        return min(exponents) if exponents else 0

    def clear_denominators(self) -> Tuple[int, PolynomialMatrix]:
        """Return (k_0, λ^{k_0}·M) with k_0 ≥ 0 minimal such that the product is polynomial."""
        shift = max(0, -self.min_exponent())
        return shift, PolynomialMatrix(tuple(
            tuple(entry.shift(shift).to_poly() for entry in row) for row in self.entries
        ))

    def to_sympy(self) -> Matrix:
        return Matrix([[entry.as_expr() for entry in row] for row in self.entries])

    def determinant(self) -> LaurentPoly:
        shift, polynomial = self.clear_denominators()
        return LaurentPoly.from_poly(polynomial.determinant(), -shift * self.size)

    def inverse(self) -> 'LaurentMatrix':
        """Inverse over Q[λ, λ^-1]; requires a unimodular matrix."""
        shift, polynomial = self.clear_denominators()
        det = polynomial.determinant()
        if det.is_zero or not det.is_monomial:
            raise ValueError("Matrix is not invertible over Q[λ, λ^-1]")
        adjugate = polynomial.to_sympy().adjugate(method='berkowitz')
        scale = 1 / det.LC()
        offset = shift - det.degree()
        return LaurentMatrix.from_rows([
            [LaurentPoly.from_poly(_poly(sp.expand(adjugate[i, j])), offset) * scale
             for j in range(self.size)]
            for i in range(self.size)
        ])

    def __matmul__(self, other: 'LaurentMatrix') -> 'LaurentMatrix':
        size = self.size
        return LaurentMatrix.from_rows([
            [sum((self.entries[i][k] * other.entries[k][j] for k in range(size)), LaurentPoly())
             for j in range(size)]
            for i in range(size)
        ])

    def bilinear(self, x: Sequence, y: Sequence) -> LaurentPoly:
        """Evaluate xᵀ·M·y for coordinate vectors over Q[λ, λ^-1]."""
        total = LaurentPoly()
        for i, xi in enumerate(x):
            xi = LaurentPoly.coerce(xi)
            if xi.is_zero:
                continue
            for j, yj in enumerate(y):
                yj = LaurentPoly.coerce(yj)
                if yj.is_zero or self.entries[i][j].is_zero:
                    continue
                total = total + xi * self.entries[i][j] * yj
        return total

    def __str__(self) -> str:
        return '[' + '; '.join(', '.join(str(e) for e in row) for row in self.entries) + ']'


def is_unimodular_laurent(matrix: LaurentMatrix) -> bool:
    """True iff det(matrix) is a nonzero rational times a power of λ."""
    return matrix.determinant().is_monomial


def non_monomial_factor(det: LaurentPoly) -> LaurentPoly:
    """Strip the λ-power from det, leaving the factor with nonzero constant term."""
    if det.is_zero:
        return det
    return det.shift(-det.min_exponent)


# ---------------------------------------------------------------------------
# Division by a monic polynomial over a coefficient ring
# ---------------------------------------------------------------------------

class CoefficientRing(Protocol):
    """Operations divide_by_monic needs from the coefficient ring."""

    def zero(self): ...

    def one(self): ...

    def add(self, a, b): ...

    def sub(self, a, b): ...

    def mul(self, a, b): ...

    def is_zero(self, a) -> bool: ...


class RationalField:
    """Q itself as a coefficient ring."""

    def zero(self):
        return sp.S.Zero

    def one(self):
        return sp.S.One

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a) -> bool:
        return a == 0


def polynomial_multiply(a: Sequence, b: Sequence, ring: CoefficientRing) -> List:
    """Product of coefficient lists (lowest degree first)."""
    if not a or not b:
        return []
    product = [ring.zero() for _ in range(len(a) + len(b) - 1)]
    for i, ai in enumerate(a):
        if ring.is_zero(ai):
            continue
        for j, bj in enumerate(b):
            product[i + j] = ring.add(product[i + j], ring.mul(ai, bj))
    return product


def polynomial_add(a: Sequence, b: Sequence, ring: CoefficientRing) -> List:
    size = max(len(a), len(b))
    padded_a = list(a) + [ring.zero()] * (size - len(a))
    padded_b = list(b) + [ring.zero()] * (size - len(b))
    return [ring.add(x, y) for x, y in zip(padded_a, padded_b)]


def polynomials_equal(a: Sequence, b: Sequence, ring: CoefficientRing) -> bool:
    difference = polynomial_add(a, [ring.sub(ring.zero(), c) for c in b], ring)
    return all(ring.is_zero(c) for c in difference)


def divide_by_monic(x: Sequence, n: Sequence, ring: CoefficientRing) -> Tuple[List, List]:
    """
    Divide x by a monic polynomial n over a commutative coefficient ring.

    Args:
        x (Sequence): Coefficients of the dividend, lowest degree first
        n (Sequence): Coefficients of the divisor, lowest degree first; the last
            one must equal ring.one()
        ring (CoefficientRing): Coefficient arithmetic

    Returns:
        Tuple[List, List]: (quotient, remainder) with x = n·quotient + remainder
            and len(remainder) == deg n

    Raises:
        NonMonicDivisorError: If n is empty or its leading coefficient is not one

    Example:
        >>> divide_by_monic([0, 0, 1], [1, 1], RationalField())
        ([-1, 1], [1])
    """
    if not n:
        raise NonMonicDivisorError("Divisor is empty")
    degree = len(n) - 1
    if not ring.is_zero(ring.sub(n[degree], ring.one())):
        raise NonMonicDivisorError(f"Divisor leading coefficient {n[degree]} is not one")
    remainder = list(x) + [ring.zero()] * max(0, degree - len(x))
    quotient = [ring.zero() for _ in range(max(len(x) - degree, 0))]
    for top in range(len(remainder) - 1, degree - 1, -1):
        coefficient = remainder[top]
        if ring.is_zero(coefficient):
            continue
        quotient[top - degree] = coefficient
        for i in range(degree + 1):
            remainder[top - degree + i] = ring.sub(
                remainder[top - degree + i], ring.mul(coefficient, n[i]))
    return quotient, remainder[:degree]
