"""
Geometric Domain Module

Even cohomology rings of a target X, twisting data of a concave bundle V and
the twisted quantum product assembled from genus-zero correlator values, which
are ingested as data.

Degrees are complex degrees: |φ| = 1 for divisor classes. The frame of the
formal layer follows the basis order φ_0, …, φ_s: t_0 for the unit,
q_1..q_p for the divisor classes φ_1..φ_p and t_α for the rest.
"""

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp
from sympy import Matrix

from .algebra import AlgebraLaurent, FiniteAlgebra
from .errors import DatasetValidationError, DegenerateModelError, GradingError, LambdaPoleError
from .exactalg import LaurentPoly, Vector, image, rational_vector, to_rational, unit_vector, zero_vector
from .formal import (
    FormalSaito,
    FrameVariable,
    LocalizedFormalFrobenius,
    PotentialVectorField,
    SeriesRing,
    TruncatedSeries,
    VectorField,
    _coefficient_vectors,
    check_localized_formal_frobenius,
)
from .mfa import LocalizedMetric, NilpotentData, NondegenerateFiltration, nilpotent_filtration_direct
from .reports import VerificationReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CohomologyModel:
    """
    Even cohomology of X on a basis φ_0 = 1, φ_1..φ_p (divisors), φ_{p+1}..φ_s.

    Attributes:
        algebra (FiniteAlgebra): Cup product, graded by complex degree
        integral (Vector): ∫_X φ_α for each basis element
        c1 (Vector): Coordinates of c_1(X)
        dimension (int): Complex dimension of X

    Raises:
        DegenerateModelError: If the basis is not ordered as above, ∫ is not
            supported in top degree, or the intersection pairing is degenerate
        GradingError: If c_1(X) is not of degree 1
    """
    algebra: FiniteAlgebra
    integral: Vector
    c1: Vector
    dimension: int
    dual_basis: Tuple[Vector, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        algebra = self.algebra
        object.__setattr__(self, 'integral', rational_vector(self.integral))
        object.__setattr__(self, 'c1', algebra.element(self.c1))
        if not algebra.is_graded:
            raise DegenerateModelError("Cohomology model needs degrees on its basis")
        degrees = algebra.grading
        if algebra.unit != unit_vector(algebra.dim, 0) or degrees[0] != 0:
            raise DegenerateModelError("φ_0 must be the unit, of degree 0")
        p = self.divisor_count
        if any(d == 1 for d in degrees[p + 1:]) or any(d < 1 for d in degrees[1:]):
            raise DegenerateModelError(
                f"Basis must list φ_0, then all degree-1 classes, then higher degrees: {degrees}")
        for alpha, value in enumerate(self.integral):
            if value != 0 and degrees[alpha] != self.dimension:
                raise DegenerateModelError(
                    f"∫ is nonzero on {algebra.basis_names[alpha]} of degree {degrees[alpha]} != {self.dimension}")
        pairing = self.pairing
        if pairing.det() == 0:
            raise DegenerateModelError("Intersection pairing ∫ x∪y is degenerate")
        if not all(c == 0 for c in self.c1) and algebra.degree_of(self.c1) != 1:
            raise GradingError("c_1(X) must have degree 1")
        inverse = pairing.inv()
        object.__setattr__(self, 'dual_basis', tuple(
            tuple(inverse[alpha, beta] for beta in range(algebra.dim)) for alpha in range(algebra.dim)))

    @classmethod
    def projective_space(cls, n: int) -> 'CohomologyModel':
        """H*(P^n) = Q[h]/(h^{n+1}) with c_1 = (n+1)h."""
        algebra = FiniteAlgebra.truncated_polynomial(n + 1, 'h')
        c1 = [0] * (n + 1)
        if n >= 1:
            c1[1] = n + 1
        return cls(algebra, unit_vector(n + 1, n), tuple(c1), n)

    @classmethod
    def point(cls) -> 'CohomologyModel':
        algebra = FiniteAlgebra(('1',), (((sp.S.One,),),), (sp.S.One,), (0,))
        return cls(algebra, (1,), (0,), 0)

    @property
    def size(self) -> int:
        return self.algebra.dim

    @property
    def degrees(self) -> Tuple[int, ...]:
        return self.algebra.grading

    @property
    def divisor_count(self) -> int:
        return sum(1 for d in self.algebra.grading if d == 1)

    def integrate(self, x: Sequence) -> sp.Rational:
        return sum((a * b for a, b in zip(self.integral, x)), sp.S.Zero)

    @property
    def pairing(self) -> Matrix:
        """η_{αβ} = ∫ φ_α ∪ φ_β."""
        return Matrix(self.size, self.size, lambda a, b: self.integrate(self.algebra.structure_constants[a][b]))

    def frame(self) -> Tuple[FrameVariable, ...]:
        p = self.divisor_count
        return tuple(
            FrameVariable('q', f"q{alpha}") if 1 <= alpha <= p else FrameVariable('t', f"t{alpha}")
            for alpha in range(self.size)
        )

    def series_ring(self, order: int) -> SeriesRing:
        return SeriesRing(self.frame(), order)


@dataclass(frozen=True)
class BundleData:
    """
    Chern classes c_1..c_r of V as elements of a cohomology model.

    Raises:
        GradingError: If some c_i is not homogeneous of degree i
    """
    rank: int
    chern: Tuple[Vector, ...]

    def __post_init__(self):
        object.__setattr__(self, 'chern', tuple(rational_vector(c) for c in self.chern))
        if self.rank < 0 or len(self.chern) != self.rank:
            raise GradingError(f"Bundle of rank {self.rank} needs exactly {self.rank} Chern classes")

    @classmethod
    def line_bundle(cls, model: CohomologyModel, c1: Sequence) -> 'BundleData':
        bundle = cls(1, (model.algebra.element(c1),))
        bundle.validate(model)
        return bundle

    @classmethod
    def trivial(cls, model: CohomologyModel, rank: int) -> 'BundleData':
        return cls(rank, tuple(zero_vector(model.size) for _ in range(rank)))

    def validate(self, model: CohomologyModel) -> None:
        for index, c in enumerate(self.chern, start=1):
            if len(c) != model.size:
                raise GradingError(f"c_{index} has {len(c)} coordinates, expected {model.size}")
            if all(x == 0 for x in c):
                continue
            if model.algebra.degree_of(c) != index:
                raise GradingError(f"c_{index}(V) = {model.algebra.format_element(c)} is not of degree {index}")

    @property
    def top(self) -> Vector:
        return self.chern[-1]


def equivariant_euler(model: CohomologyModel, bundle: BundleData) -> AlgebraLaurent:
    """e_{S1}(V) = λ^r + c_1 λ^{r-1} + … + c_r."""
    return AlgebraLaurent.from_polynomial(model.algebra, list(reversed(bundle.chern)) + [model.algebra.unit])


def equivariant_euler_inverse(model: CohomologyModel, bundle: BundleData) -> AlgebraLaurent:
    """
    1/e_{S1}(V) as a finite λ-Laurent expansion.

    Example:
        P² with V = O(−3): λ^{-1} + 3h·λ^{-2} + 9h²·λ^{-3}
    """
    bundle.validate(model)
    return model.algebra.invert_monic(bundle.chern)


def localized_metric_geom(model: CohomologyModel, bundle: BundleData) -> LocalizedMetric:
    """
    g^λ(φ, φ') = ∫ φ ∪ φ' ∪ e_{S1}(V)^{-1}.

    Raises:
        GradingError: If an entry is not a multiple of λ^{|φ_α|+|φ_β|−dim X−r}
    """
    inverse = equivariant_euler_inverse(model, bundle)
    charge = model.dimension + bundle.rank
    rows = []
    for a in range(model.size):
        row = []
        for b in range(model.size):
            cup = model.algebra.structure_constants[a][b]
            entry = inverse.apply(lambda v, cup=cup: model.integrate(model.algebra.multiply(cup, v)))
            expected = model.degrees[a] + model.degrees[b] - charge
            if not entry.is_zero and (not entry.is_monomial or entry.min_exponent != expected):
                raise GradingError(
                    f"g({model.algebra.basis_names[a]}, {model.algebra.basis_names[b]}) = {entry} "
                    f"is not a multiple of λ^{expected}")
            row.append(entry)
        rows.append(row)
    return LocalizedMetric.from_rows(rows)


@dataclass(frozen=True)
class EulerData:
    field: VectorField
    weights: Tuple[sp.Rational, ...]


def euler_field(model: CohomologyModel, bundle: BundleData, ring: Optional[SeriesRing] = None) -> EulerData:
    """
    E = Σ (1 − |φ_α|) t_α ∂_α + Σ ξ_i q_i ∂_{q_i} with c_1(X) + c_1(V) = Σ ξ_i φ_i.

    Raises:
        DegenerateModelError: If c_1(X) + c_1(V) leaves the span of φ_1..φ_p
    """
    ring = ring or model.series_ring(1)
    total = list(model.c1)
    if bundle.rank:
        total = [a + b for a, b in zip(total, bundle.chern[0])]
    p = model.divisor_count
    outside = [model.algebra.basis_names[a] for a, c in enumerate(total) if c != 0 and not 1 <= a <= p]
    if outside:
        raise DegenerateModelError(f"c_1(X) + c_1(V) has components along {outside}")
    weights = tuple(to_rational(total[i]) for i in range(1, p + 1))
    components = []
    for alpha in range(model.size):
        if 1 <= alpha <= p:
            components.append(ring.constant(weights[alpha - 1]))
        else:
            components.append(ring.variable(alpha) * (1 - model.degrees[alpha]))
    return EulerData(tuple(components), weights)


# ---------------------------------------------------------------------------
# Correlator data
# ---------------------------------------------------------------------------

CorrelatorKey = Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class GWDataset:
    """
    Twisted genus-zero correlators ⟨x_1, …, x_m⟩_{V,d} with d ≠ 0.

    Keys are (d, sorted insertion indices), so values are symmetric under
    permuting insertions by construction. Beyond three slots, insertions must
    come from the τ_{≥4} sector φ_{p+1}..φ_s.
    """
    records: Tuple[Tuple[CorrelatorKey, LaurentPoly], ...]
    max_degree: int
    lambda_degree: Optional[int] = None

    @classmethod
    def from_records(
        cls,
        entries: Sequence[Tuple[Sequence[int], Sequence[int], object]],
        max_degree: int,
        lambda_degree: Optional[int] = None
    ) -> 'GWDataset':
        """
        Raises:
            DatasetValidationError: If two records for the same key disagree
        """
        table: Dict[CorrelatorKey, LaurentPoly] = {}
        for degree, insertions, value in entries:
            key = (tuple(int(d) for d in degree), tuple(sorted(int(i) for i in insertions)))
            value = LaurentPoly.coerce(value)
            if key in table and table[key] != value:
                raise DatasetValidationError(
                    f"Conflicting values for d={list(key[0])}, insertions {list(key[1])}: {table[key]} vs {value}")
            table[key] = value
        return cls(tuple(sorted(table.items())), max_degree, lambda_degree)

    @classmethod
    def empty(cls, max_degree: int = 0) -> 'GWDataset':
        return cls((), max_degree)

    def value(self, degree: Sequence[int], insertions: Sequence[int]) -> LaurentPoly:
        key = (tuple(degree), tuple(sorted(insertions)))
        for stored, value in self.records:
            if stored == key:
                return value
        return LaurentPoly()

    def validate(self, model: CohomologyModel, weights: Sequence, rank: int = 0,
                 check_degree_axiom: bool = True) -> None:
        """
        A nonzero value must be homogeneous of λ-degree
        Σ(|x_i| − 1) + 3 − dim X − r − Σ ξ_i d_i.

        Raises:
            DatasetValidationError: On a bad degree vector, an out-of-range or
                non-τ_{≥4} insertion, a λ-pole, a λ-degree above the bound, or
                (when asked) a value violating the degree axiom
        """
        p = model.divisor_count
        charge = model.dimension + rank
        for (degree, insertions), value in self.records:
            label = f"record d={list(degree)}, insertions {list(insertions)}"
            if len(degree) != p or any(d < 0 for d in degree) or not any(degree):
                raise DatasetValidationError(f"{label}: degree must be a nonzero vector in Z_{{>=0}}^{p}")
            if any(d > self.max_degree for d in degree):
                raise DatasetValidationError(f"{label}: degree exceeds max_degree {self.max_degree}")
            if len(insertions) < 3 or any(not 0 <= i < model.size for i in insertions):
                raise DatasetValidationError(f"{label}: needs at least three insertions from the basis")
            if sum(1 for i in insertions if i > p) < len(insertions) - 3:
                raise DatasetValidationError(f"{label}: extra insertions must come from φ_{p + 1}..φ_{model.size - 1}")
            if not value.is_polynomial:
                raise DatasetValidationError(f"{label}: value {value} has a pole at λ = 0")
            if self.lambda_degree is not None and not value.is_zero and value.max_exponent > self.lambda_degree:
                raise DatasetValidationError(f"{label}: λ-degree exceeds {self.lambda_degree}")
            if check_degree_axiom and not value.is_zero:
                expected = (sum(model.degrees[i] - 1 for i in insertions) + 3 - charge
                            - sum(w * d for w, d in zip(weights, degree)))
                if not value.is_monomial or value.min_exponent != expected:
                    raise DatasetValidationError(
                        f"{label}: value {value} is not homogeneous of λ-degree {expected}")

    def digest(self) -> str:
        canonical = ';'.join(
            f"{list(d)}|{list(i)}|{value.serialize()}" for (d, i), value in self.records)
        return hashlib.sha256(f"{self.max_degree}:{canonical}".encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class TwistedProductModel:
    structure: LocalizedFormalFrobenius
    digest: str
    model: CohomologyModel
    bundle: BundleData
    weights: Tuple[sp.Rational, ...]

    def verify(self) -> VerificationReport:
        return check_localized_formal_frobenius(self.structure)


def _correlator_sums(
    model: CohomologyModel, gw: GWDataset, ring: SeriesRing
) -> Dict[Tuple[int, int, int], TruncatedSeries]:
    """Σ_d Σ_M ⟨φ_a, φ_b, φ_c, φ_M⟩_d q^d t^M / M! over the dataset."""
    p = model.divisor_count
    sums: Dict[Tuple[int, int, int], TruncatedSeries] = {}
    width = len(ring.poly_ring.gens)
    for (degree, insertions), value in gw.records:
        available = Counter(insertions)
        for a in range(model.size):
            for b in range(a, model.size):
                for c in range(model.size):
                    rest = available - Counter((a, b, c))
                    if sum(rest.values()) != len(insertions) - 3 or any(i <= p for i in rest):
                        continue
                    monomial = [0] * width
                    for i, d in zip(range(1, p + 1), degree):
                        monomial[i] = d
                    weight = 1
                    for index, multiplicity in rest.items():
                        monomial[index] += multiplicity
                        weight *= factorial(multiplicity)
                    term = ring.from_laurent(value) * ring.from_terms({tuple(monomial): sp.Rational(1, weight)})
                    for key in {(a, b, c), (b, a, c)}:
                        sums[key] = sums.get(key, ring.zero()) + term
    return sums


def build_twisted_product(
    model: CohomologyModel,
    bundle: BundleData,
    gw: GWDataset,
    order: int,
    check_degree_axiom: bool = True
) -> TwistedProductModel:
    """
    Assemble ∗_V from g^λ(x ∗ y, z) = g^λ(x∪y, z) + quantum correlator sums.

    The d = 0 sector is the classical twisted pairing, so q, t → 0 recovers the
    cup product.

    Raises:
        DatasetValidationError: If the dataset fails validation
        LambdaPoleError: Naming the first structure constant with a pole at λ = 0
    """
    ring = model.series_ring(order)
    euler = euler_field(model, bundle, ring)
    gw.validate(model, euler.weights, bundle.rank, check_degree_axiom)
    metric = localized_metric_geom(model, bundle)
    inverse = metric.matrix.inverse()
    sums = _correlator_sums(model, gw, ring)
    size = model.size
    names = model.algebra.basis_names
    constants = []
    for a in range(size):
        row = []
        for b in range(size):
            cup = model.algebra.structure_constants[a][b]
            column = []
            for g in range(size):
                total = ring.constant(cup[g])
                for d in range(size):
                    quantum = sums.get((a, b, d))
                    if quantum is not None and not inverse.entry(d, g).is_zero:
                        total = total + quantum * inverse.entry(d, g)
                if total.has_lambda_pole:
                    logger.error(f"λ-pole in C_{{{names[a]},{names[b]}}}^{names[g]}")
                    raise LambdaPoleError(
                        f"Structure constant C_{{{names[a]},{names[b]}}}^{names[g]} = {total} has a pole at λ = 0")
                column.append(total)
            row.append(tuple(column))
        constants.append(tuple(row))
    saito = FormalSaito(ring, tuple(constants), model.algebra.unit, euler.field)
    structure = LocalizedFormalFrobenius(saito, metric, model.dimension + bundle.rank)
    logger.debug(f"Twisted product assembled from {len(gw.records)} correlator records at order {order}")
    return TwistedProductModel(structure, gw.digest(), model, bundle, euler.weights)


def classical_limit_filtration(model: CohomologyModel, bundle: BundleData) -> NondegenerateFiltration:
    """The nilpotent construction on (H, ∪, ∫) with n_i = c_i(V)."""
    return nilpotent_filtration_direct(classical_nilpotent_data(model, bundle))


def classical_nilpotent_data(model: CohomologyModel, bundle: BundleData) -> NilpotentData:
    bundle.validate(model)
    return NilpotentData(model.algebra, model.pairing, bundle.chern)


def compute_phi_cl(model: CohomologyModel) -> sp.Poly:
    """Φ_cl = (1/3!) ∫ τ∪τ∪τ with τ = Σ t_α φ_α, as a cubic in t_0..t_s."""
    symbols = sp.symbols(f"t0:{model.size}")
    tau = [symbols[alpha] for alpha in range(model.size)]
    total = sp.S.Zero
    for a in range(model.size):
        for b in range(model.size):
            cup = model.algebra.structure_constants[a][b]
            for c in range(model.size):
                value = model.integrate(model.algebra.multiply(cup, model.algebra.basis_vector(c)))
                if value != 0:
                    total += value * tau[a] * tau[b] * tau[c]
    return sp.Poly(total / 6, *symbols, domain=sp.QQ)


def check_degree_bound(twisted: TwistedProductModel) -> Optional[VerificationReport]:
    """
    For Euler weights ξ_i ≤ 0, φ_α ∘ φ_β has no components of degree below
    |φ_α| + |φ_β| at λ = 0. Returns None when some ξ_i > 0.
    """
    if any(w > 0 for w in twisted.weights):
        return None
    saito = twisted.structure.saito
    degrees = twisted.model.degrees
    names = twisted.model.algebra.basis_names
    failure = None
    for a in range(saito.size):
        for b in range(saito.size):
            for c in range(saito.size):
                if degrees[c] >= degrees[a] + degrees[b]:
                    continue
                value = saito.structure_constants[a][b][c].at_lambda_zero()
                if not value.is_zero:
                    failure = f"C_{{{names[a]},{names[b]}}}^{names[c]} = {value}"
                    break
            if failure:
                break
        if failure:
            break
    report = VerificationReport()
    report.add('degree bound', failure is None, certified_order=saito.ring.order, counterexample=failure)
    return report


def _classical_potential(model: CohomologyModel, ring: SeriesRing) -> List[TruncatedSeries]:
    """Σ_α ∂_α Φ_cl φ^α in the frame, with t_i read as L_i = log q_i on divisor coordinates."""
    phi = compute_phi_cl(model)
    symbols = phi.gens
    p = model.divisor_count

    def to_series(poly: sp.Poly) -> TruncatedSeries:
        width = len(ring.poly_ring.gens)
        terms = {}
        for exponents, coefficient in poly.terms():
            monomial = [0] * width
            for alpha, e in enumerate(exponents):
                index = ring.log_index(alpha) if 1 <= alpha <= p else alpha
                monomial[index] += e
            terms[tuple(monomial)] = coefficient
        return ring.from_terms(terms)

    gradients = [to_series(phi.diff(symbols[alpha])) for alpha in range(model.size)]
    components = []
    for gamma in range(model.size):
        total = ring.zero()
        for alpha in range(model.size):
            weight = model.dual_basis[alpha][gamma]
            if weight != 0:
                total = total + gradients[alpha] * weight
        components.append(total)
    return components


def check_potential_decomposition(
    twisted: TwistedProductModel, limit: FormalSaito, potential: PotentialVectorField
) -> VerificationReport:
    """
    Compare G with Σ ∂_αΦ_cl φ^α + Σ ∂_αΦ_qu c_r(V)∪φ^α at λ = 0.

    Records: the q^0 part of G is the classical term, and every q^d part
    (d ≠ 0) lies in the image of c_r(V)∪, both to the certified order.
    """
    model, bundle = twisted.model, twisted.bundle
    ring = limit.ring
    order = potential.certified_order
    classical = _classical_potential(model, ring)
    q_indices = ring.q_indices
    report = VerificationReport()

    failure = None
    for gamma, component in enumerate(potential.components):
        q_free = ring.from_terms(
            {m: c for m, c in component.terms() if not any(m[i] for i in q_indices)}, component.lam_shift)
        locus = q_free.first_difference(classical[gamma], order)
        if locus:
            failure = f"G^{limit.name(gamma)}: {locus}"
            break
    report.add('classical potential', failure is None, certified_order=order, counterexample=failure)

    failure = None
    if bundle.rank:
        cap = image(model.algebra.multiplication_matrix(bundle.top))
        for key, vector in _coefficient_vectors(potential.components).items():
            monomial = key[:-1]
            if ring.total_degree(monomial) > order or not any(monomial[i] for i in q_indices):
                continue
            if not cap.contains(vector):
                failure = f"coefficient of {ring.format_monomial(monomial)} is outside c_r(V)∪H"
                break
    report.add('quantum potential in c_r image', failure is None, certified_order=order, counterexample=failure)
    return report
