"""
Seeded random instances for the property sweeps: polynomial matrices, unimodular
changes of basis, split Frobenius algebras with nilpotents and synthetic
correlator data.

Every generator takes a random.Random so a seed reproduces a sweep exactly.
"""

import logging
import random
from typing import Optional, Sequence

import sympy as sp
from sympy import Matrix

from .algebra import FiniteAlgebra, nilradical
from .exactalg import LAMBDA, LaurentMatrix, PolynomialMatrix, add_vectors, scale_vector, zero_vector
from .geom import GWDataset
from .mfa import NilpotentData

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 50


def random_polynomial(rng: random.Random, degree: int, bound: int = 3) -> sp.Expr:
    return sum((rng.randint(-bound, bound) * LAMBDA ** e for e in range(degree + 1)), sp.S.Zero)


def random_polynomial_matrix(rng: random.Random, size: int, degree: int) -> PolynomialMatrix:
    return PolynomialMatrix.from_exprs(
        [[random_polynomial(rng, rng.randint(0, degree)) for _ in range(size)] for _ in range(size)])


def random_unimodular(rng: random.Random, size: int, steps: Optional[int] = None, degree: int = 2) -> LaurentMatrix:
    """
    A product of elementary matrices over Q[λ] and nonzero constant scalings,
    so the determinant is a nonzero rational.
    """
    matrix = sp.eye(size)
    for _ in range(steps if steps is not None else 2 * size):
        i, j = rng.sample(range(size), 2) if size > 1 else (0, 0)
        elementary = sp.eye(size)
        if i != j:
            elementary[i, j] = random_polynomial(rng, degree)
        else:
            elementary[i, i] = rng.choice([-2, -1, 1, 2])
        matrix = (matrix * elementary).expand()
    return LaurentMatrix.from_sympy(matrix)


def _random_local_factor(rng: random.Random, max_dim: int) -> FiniteAlgebra:
    n = rng.randint(1, min(max_dim, 4))
    if n == 4 and rng.random() < 0.5:
        return FiniteAlgebra.tensor_product(
            FiniteAlgebra.truncated_polynomial(2, 'x'), FiniteAlgebra.truncated_polynomial(2, 'y'))
    return FiniteAlgebra.truncated_polynomial(n, 'x')


def random_split_algebra(rng: random.Random, max_dim: int = 6) -> FiniteAlgebra:
    """A direct product of local algebras Q[x]/(x^n) and Q[x,y]/(x²,y²)."""
    algebra = _random_local_factor(rng, max_dim)
    while algebra.dim < max_dim and rng.random() < 0.5:
        algebra = FiniteAlgebra.direct_product(algebra, _random_local_factor(rng, max_dim - algebra.dim))
    return algebra


def random_invariant_metric(rng: random.Random, algebra: FiniteAlgebra) -> Matrix:
    """
    g(x, y) = φ(xy) for a random functional φ, retried until nondegenerate.

    Raises:
        ValueError: If no nondegenerate form turned up
    """
    for _ in range(MAX_ATTEMPTS):
        functional = [rng.randint(-3, 3) for _ in range(algebra.dim)]
        gram = Matrix(algebra.dim, algebra.dim, lambda i, j: sum(
            c * f for c, f in zip(algebra.structure_constants[i][j], functional)))
        if gram.det() != 0:
            return gram
    raise ValueError(f"No nondegenerate invariant metric found on {algebra.basis_names}")


def random_nilpotent_data(rng: random.Random, max_dim: int = 6, max_r: int = 3) -> NilpotentData:
    algebra = random_split_algebra(rng, max_dim)
    gram = random_invariant_metric(rng, algebra)
    radical = nilradical(algebra).basis
    nilpotents = []
    for _ in range(rng.randint(1, max_r)):
        n = zero_vector(algebra.dim)
        for vector in radical:
            n = add_vectors(n, scale_vector(rng.randint(-2, 2), vector))
        nilpotents.append(n)
    data = NilpotentData(algebra, gram, tuple(nilpotents))
    logger.debug(f"Sampled algebra {algebra.basis_names} with r={data.r}")
    return data


def synthetic_local_p2_dataset(values: Sequence, divisor_index: int = 1) -> GWDataset:
    """⟨h, h, h⟩_d = values[d-1] at λ^0 for local P²."""
    entries = [((d,), (divisor_index,) * 3, value) for d, value in enumerate(values, start=1)]
    return GWDataset.from_records(entries, max_degree=len(values), lambda_degree=0)

