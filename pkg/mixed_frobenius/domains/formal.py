"""
Formal Structures Domain Module

Truncated power series in flat frame coordinates (t_1..t_n, q_1..q_m) with
logarithmic symbols L_i = log q_i and a parameter λ, and the structures built
on them: formal Saito structures, formal mixed Frobenius structures and
localized formal Frobenius structures over K[λ].

Conventions:
    - Frame derivations are D_t = ∂/∂t and D_q = q ∂/∂q, so D_{q_i} L_j = δ_ij.
    - Truncation is by total (t, q) degree; λ and L exponents do not count.
    - An axiom involving j derivatives is certified to order T − j only; every
      report record states its certified order.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy as sp
from sympy import QQ
from sympy.polys.rings import PolyElement, PolyRing

from .algebra import FiniteAlgebra
from .errors import GradingError, IntegrabilityError, LambdaPoleError
from .exactalg import LaurentPoly, RationalSubspace, Vector, rational_vector, to_rational
from .mfa import (
    LocalizedMetric,
    MixedFrobeniusAlgebra,
    NondegenerateFiltration,
    _charge_violation,
    extract_filtration,
    homogeneous_defect,
)
from .reports import VerificationReport

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrameVariable:
    kind: str
    name: str

    def __post_init__(self):
        if self.kind not in ('t', 'q'):
            raise ValueError(f"Frame variable kind must be 't' or 'q', got {self.kind!r}")


@dataclass(frozen=True)
class SeriesRing:
    """
    Coefficient ring Q[[t, q]][L, λ] truncated at total (t, q) degree `order`.

    Generators of the underlying sparse ring are the frame variables in frame
    order, then one L per q-variable, then λ.
    """
    frame: Tuple[FrameVariable, ...]
    order: int
    poly_ring: PolyRing = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'frame', tuple(self.frame))
        names = [v.name for v in self.frame]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate frame variable names {names}")
        if self.order < 0:
            raise ValueError("Truncation order must be non-negative")
        symbols = names + [f"L_{v.name}" for v in self.frame if v.kind == 'q'] + ['lambda']
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"Frame names clash with reserved symbols: {symbols}")
        object.__setattr__(self, 'poly_ring', PolyRing(symbols, QQ))

    @classmethod
    def standard(cls, t_names: Sequence[str], q_names: Sequence[str] = (), order: int = 4) -> 'SeriesRing':
        frame = [FrameVariable('t', n) for n in t_names] + [FrameVariable('q', n) for n in q_names]
        return cls(tuple(frame), order)

    def with_order(self, order: int) -> 'SeriesRing':
        return SeriesRing(self.frame, order)

    @property
    def size(self) -> int:
        return len(self.frame)

    @property
    def q_indices(self) -> List[int]:
        return [alpha for alpha, v in enumerate(self.frame) if v.kind == 'q']

    @property
    def t_indices(self) -> List[int]:
        return [alpha for alpha, v in enumerate(self.frame) if v.kind == 't']

    def log_index(self, alpha: int) -> int:
        """Generator index of L for the q-variable at frame index alpha."""
        return self.size + self.q_indices.index(alpha)

    @property
    def lambda_index(self) -> int:
        return len(self.poly_ring.gens) - 1

    def gen(self, index: int) -> PolyElement:
        return self.poly_ring.gens[index]

    def total_degree(self, monomial: Monomial) -> int:
        return sum(monomial[:self.size])

    # -- constructors ---------------------------------------------------------

    def series(self, poly: PolyElement, lam_shift: int = 0) -> 'TruncatedSeries':
        return TruncatedSeries(self, poly, lam_shift)

    def zero(self) -> 'TruncatedSeries':
        return self.series(self.poly_ring.zero)

    def constant(self, value) -> 'TruncatedSeries':
        return self.series(self.poly_ring(QQ.from_sympy(to_rational(value))))

    def variable(self, alpha: int) -> 'TruncatedSeries':
        return self.series(self.gen(alpha))

    def log_variable(self, alpha: int) -> 'TruncatedSeries':
        return self.series(self.gen(self.log_index(alpha)))

    def from_terms(self, terms: Dict[Monomial, object], lam_shift: int = 0) -> 'TruncatedSeries':
        poly = self.poly_ring.from_dict(
            {tuple(m): QQ.from_sympy(to_rational(c)) for m, c in terms.items() if to_rational(c) != 0})
        return self.series(poly, lam_shift)

    def from_laurent(self, value: LaurentPoly) -> 'TruncatedSeries':
        """A series constant in (t, q) with Laurent λ-dependence."""
        value = LaurentPoly.coerce(value)
        width = len(self.poly_ring.gens)
        shift = max(0, -value.min_exponent) if not value.is_zero else 0
        terms = {}
        for exponent, coefficient in value.terms():
            monomial = [0] * width
            monomial[self.lambda_index] = exponent + shift
            terms[tuple(monomial)] = coefficient
        return self.from_terms(terms, shift)

    def format_monomial(self, monomial: Monomial) -> str:
        parts = []
        for symbol, exponent in zip(self.poly_ring.symbols, monomial):
            if exponent == 1:
                parts.append(str(symbol))
            elif exponent > 1:
                parts.append(f"{symbol}^{exponent}")
        return '*'.join(parts) if parts else '1'


@dataclass(frozen=True)
class TruncatedSeries:
    """
    poly·λ^{-lam_shift}, with every term of total (t, q) degree > order dropped.

    lam_shift is kept minimal; a positive lam_shift means a genuine pole at λ = 0.
    """
    ring: SeriesRing
    poly: PolyElement
    lam_shift: int = 0

    def __post_init__(self):
        poly = self.poly
        order = self.ring.order
        if any(self.ring.total_degree(m) > order for m in poly.keys()):
            poly = self.ring.poly_ring.from_dict(
                {m: c for m, c in poly.items() if self.ring.total_degree(m) <= order})
        shift = self.lam_shift
        if shift > 0:
            index = self.ring.lambda_index
            if not poly:
                shift = 0
            else:
                reducible = min(min(m[index] for m in poly.keys()), shift)
                if reducible:
                    poly = self.ring.poly_ring.from_dict({
                        m[:index] + (m[index] - reducible,) + m[index + 1:]: c for m, c in poly.items()})
                    shift -= reducible
        object.__setattr__(self, 'poly', poly)
        object.__setattr__(self, 'lam_shift', shift)

    def _wrap(self, poly: PolyElement, lam_shift: int) -> 'TruncatedSeries':
        return type(self)(self.ring, poly, lam_shift)

    def _raised(self, shift: int) -> PolyElement:
        """The polynomial part rewritten over the common denominator λ^shift."""
        extra = shift - self.lam_shift
        if extra == 0:
            return self.poly
        return self.poly * self.ring.gen(self.ring.lambda_index) ** extra

    @property
    def is_zero(self) -> bool:
        return not self.poly

    @property
    def has_lambda_pole(self) -> bool:
        return self.lam_shift > 0

    def terms(self) -> List[Tuple[Monomial, sp.Rational]]:
        return sorted((m, QQ.to_sympy(c)) for m, c in self.poly.items())

    def coefficient(self, monomial: Monomial) -> sp.Rational:
        return QQ.to_sympy(self.poly.get(tuple(monomial), QQ.zero))

    def __add__(self, other) -> 'TruncatedSeries':
        if not isinstance(other, TruncatedSeries):
            other = self.ring.constant(other)
        shift = max(self.lam_shift, other.lam_shift)
        return self._wrap(self._raised(shift) + other._raised(shift), shift)

    __radd__ = __add__

    def __neg__(self) -> 'TruncatedSeries':
        return self._wrap(-self.poly, self.lam_shift)

    def __sub__(self, other) -> 'TruncatedSeries':
        if not isinstance(other, TruncatedSeries):
            other = self.ring.constant(other)
        return self + (-other)

    def __mul__(self, other) -> 'TruncatedSeries':
        if isinstance(other, TruncatedSeries):
            return self._wrap(self.poly * other.poly, self.lam_shift + other.lam_shift)
        if isinstance(other, LaurentPoly):
            return self * self.ring.from_laurent(other)
        return self._wrap(self.poly * QQ.from_sympy(to_rational(other)), self.lam_shift)

    __rmul__ = __mul__

    def derivative(self, alpha: int) -> 'TruncatedSeries':
        """D_alpha: ∂/∂t, or q∂/∂q acting on both q and L = log q."""
        generator = self.ring.gen(alpha)
        if self.ring.frame[alpha].kind == 't':
            return self._wrap(self.poly.diff(generator), self.lam_shift)
        log_generator = self.ring.gen(self.ring.log_index(alpha))
        scaled = self.ring.poly_ring.from_dict({m: c * m[alpha] for m, c in self.poly.items() if m[alpha]})
        return self._wrap(scaled + self.poly.diff(log_generator), self.lam_shift)

    def log_derivative(self, alpha: int) -> 'TruncatedSeries':
        """∂/∂L for the q-variable at frame index alpha."""
        return self._wrap(self.poly.diff(self.ring.gen(self.ring.log_index(alpha))), self.lam_shift)

    def lambda_euler(self) -> 'TruncatedSeries':
        """λ ∂/∂λ."""
        index = self.ring.lambda_index
        scaled = self.ring.poly_ring.from_dict(
            {m: c * (m[index] - self.lam_shift) for m, c in self.poly.items() if m[index] != self.lam_shift})
        return self._wrap(scaled, self.lam_shift)

    def at_lambda_zero(self, label: str = 'series') -> 'TruncatedSeries':
        """
        Evaluate at λ = 0.

        Raises:
            LambdaPoleError: If the series has a negative power of λ
        """
        if self.has_lambda_pole:
            raise LambdaPoleError(f"{label} has a pole of order {self.lam_shift} at λ = 0")
        index = self.ring.lambda_index
        return self._wrap(self.ring.poly_ring.from_dict(
            {m: c for m, c in self.poly.items() if m[index] == 0}), 0)

    def truncated(self, order: int) -> 'TruncatedSeries':
        return self._wrap(self.ring.poly_ring.from_dict(
            {m: c for m, c in self.poly.items() if self.ring.total_degree(m) <= order}), self.lam_shift)

    def first_difference(self, other: 'TruncatedSeries', order: int) -> Optional[str]:
        """First monomial of total degree ≤ order where the series differ, formatted."""
        difference = self - other
        for monomial, coefficient in difference.terms():
            if self.ring.total_degree(monomial) <= order:
                suffix = f"*lambda^-{difference.lam_shift}" if difference.lam_shift else ''
                return f"{self.ring.format_monomial(monomial)}{suffix} (off by {coefficient})"
        return None

    def as_expr(self):
        expr = self.poly.as_expr()
        if self.lam_shift:
            expr = expr * sp.Symbol('lambda') ** (-self.lam_shift)
        return expr

    def __str__(self) -> str:
        return str(self.as_expr())


class LogSeries(TruncatedSeries):
    """TruncatedSeries that may carry L = log q monomials."""

    @property
    def log_degree(self) -> int:
        indices = [self.ring.log_index(alpha) for alpha in self.ring.q_indices]
        return max((sum(m[i] for i in indices) for m in self.poly.keys()), default=0)


VectorField = Tuple[TruncatedSeries, ...]


def apply_field(ring: SeriesRing, field_: Sequence[TruncatedSeries], f: TruncatedSeries) -> TruncatedSeries:
    """V(f) = Σ V^α D_α f."""
    total = ring.zero()
    for alpha, component in enumerate(field_):
        if not component.is_zero:
            total = total + component * f.derivative(alpha)
    return total


def bracket(ring: SeriesRing, first: Sequence[TruncatedSeries], second: Sequence[TruncatedSeries]) -> VectorField:
    """[V, W]^γ = V(W^γ) − W(V^γ) in the commuting flat frame."""
    return tuple(
        apply_field(ring, first, second[gamma]) - apply_field(ring, second, first[gamma])
        for gamma in range(ring.size)
    )


def constant_field(ring: SeriesRing, vector: Sequence) -> VectorField:
    return tuple(ring.constant(c) for c in vector)


def _first_failure(
    checks: Iterable[Tuple[str, TruncatedSeries, TruncatedSeries]], order: int
) -> Optional[str]:
    for label, left, right in checks:
        locus = left.first_difference(right, order)
        if locus is not None:
            return f"{label}: {locus}"
    return None


# ---------------------------------------------------------------------------
# Product structures
# ---------------------------------------------------------------------------

StructureConstants = Tuple[Tuple[Tuple[TruncatedSeries, ...], ...], ...]


@dataclass(frozen=True)
class FormalSaito:
    """
    Multiplication C_{αβ}^γ, unit and Euler field on the frame of a SeriesRing.

    Attributes:
        ring (SeriesRing): Frame and truncation order
        structure_constants (StructureConstants): C[α][β][γ]
        unit (Vector): Constant coordinates of the unit field
        euler (VectorField): Components E^γ
    """
    ring: SeriesRing
    structure_constants: StructureConstants
    unit: Vector
    euler: VectorField

    def __post_init__(self):
        size = self.ring.size
        object.__setattr__(self, 'unit', rational_vector(self.unit))
        if len(self.structure_constants) != size or len(self.unit) != size or len(self.euler) != size:
            raise ValueError(f"Structure data must match the frame dimension {size}")

    @classmethod
    def constant(cls, ring: SeriesRing, table: Sequence[Sequence[Sequence]], unit: Sequence,
                 euler: Sequence[TruncatedSeries]) -> 'FormalSaito':
        size = ring.size
        constants = tuple(
            tuple(tuple(ring.constant(table[a][b][c]) for c in range(size)) for b in range(size))
            for a in range(size)
        )
        return cls(ring, constants, unit, tuple(euler))

    @property
    def size(self) -> int:
        return self.ring.size

    def product(self, x: Sequence[TruncatedSeries], y: Sequence[TruncatedSeries]) -> VectorField:
        result = [self.ring.zero() for _ in range(self.size)]
        for a, xa in enumerate(x):
            if xa.is_zero:
                continue
            for b, yb in enumerate(y):
                if yb.is_zero:
                    continue
                coefficient = xa * yb
                for c in range(self.size):
                    constant = self.structure_constants[a][b][c]
                    if not constant.is_zero:
                        result[c] = result[c] + coefficient * constant
        return tuple(result)

    def frame_field(self, alpha: int) -> VectorField:
        return tuple(self.ring.constant(1 if gamma == alpha else 0) for gamma in range(self.size))

    def structure_vector(self, a: int, b: int) -> VectorField:
        return self.structure_constants[a][b]

    def name(self, alpha: int) -> str:
        return self.ring.frame[alpha].name


def _product_records(
    saito: FormalSaito, report: VerificationReport, prefix: str = ''
) -> None:
    ring, order, size = saito.ring, saito.ring.order, saito.size
    C = saito.structure_constants
    name = saito.name

    report.add(f"{prefix}commutativity", **_outcome(_first_failure(
        ((f"C_{{{name(a)},{name(b)}}}^{name(c)}", C[a][b][c], C[b][a][c])
         for a in range(size) for b in range(a + 1, size) for c in range(size)), order)), certified_order=order)

    def associativity_checks():
        for a in range(size):
            for b in range(size):
                left_inner = saito.structure_vector(a, b)
                for d in range(size):
                    left = saito.product(left_inner, saito.frame_field(d))
                    right = saito.product(saito.frame_field(a), saito.structure_vector(b, d))
                    for c in range(size):
                        yield f"(d{name(a)}*d{name(b)})*d{name(d)} along d{name(c)}", left[c], right[c]

    report.add(f"{prefix}associativity", **_outcome(_first_failure(associativity_checks(), order)),
               certified_order=order)

    unit_field = constant_field(ring, saito.unit)

    def unit_checks():
        for b in range(size):
            product = saito.product(unit_field, saito.frame_field(b))
            for c in range(size):
                yield f"e*d{name(b)} along d{name(c)}", product[c], ring.constant(1 if b == c else 0)

    report.add(f"{prefix}unit", **_outcome(_first_failure(unit_checks(), order)), certified_order=order)

    def flatness_checks():
        for a in range(size):
            for b in range(a + 1, size):
                for g in range(size):
                    for d in range(size):
                        yield (f"D_{name(a)} C_{{{name(b)},{name(g)}}}^{name(d)}",
                               C[b][g][d].derivative(a), C[a][g][d].derivative(b))

    report.add(f"{prefix}flatness (fmfs1)", **_outcome(_first_failure(flatness_checks(), order - 1)),
               certified_order=order - 1)


def _outcome(failure: Optional[str]) -> dict:
    return {'passed': failure is None, 'counterexample': failure}


def _euler_flat_failure(ring: SeriesRing, euler: Sequence[TruncatedSeries]) -> Optional[str]:
    """E must be linear in t and constant in q, L and λ."""
    t_set = set(ring.t_indices)
    for gamma, component in enumerate(euler):
        if component.has_lambda_pole:
            return f"E^{ring.frame[gamma].name} depends on λ"
        for monomial, _ in component.terms():
            t_degree = sum(monomial[i] for i in t_set)
            other = sum(e for i, e in enumerate(monomial) if i not in t_set)
            if t_degree > 1 or other > 0:
                return f"E^{ring.frame[gamma].name} has the term {ring.format_monomial(monomial)}"
    return None


def _euler_homogeneity_checks(saito: FormalSaito, euler_lambda: bool):
    """[E, x∘y] − [E, x]∘y − x∘[E, y] = x∘y on frame pairs, with E^λ = E + λ∂_λ if asked."""
    ring, size, name = saito.ring, saito.size, saito.name

    def lie(field_: VectorField) -> VectorField:
        result = bracket(ring, saito.euler, field_)
        if euler_lambda:
            result = tuple(r + f.lambda_euler() for r, f in zip(result, field_))
        return result

    brackets = [lie(saito.frame_field(alpha)) for alpha in range(size)]
    for a in range(size):
        for b in range(a, size):
            product = saito.structure_vector(a, b)
            left = lie(product)
            first = saito.product(brackets[a], saito.frame_field(b))
            second = saito.product(saito.frame_field(a), brackets[b])
            for c in range(size):
                yield (f"[E, d{name(a)}*d{name(b)}] along d{name(c)}",
                       left[c] - first[c] - second[c], product[c])


def check_formal_saito(saito: FormalSaito) -> VerificationReport:
    """
    Check a formal Saito structure coefficientwise.

    Records: commutativity, associativity and unit to order T; flatness
    D_α C_{βγ} = D_β C_{αγ} (fmfs1) and Euler homogeneity (E1) to order T − 1;
    ∇∇E = 0 exactly.
    """
    report = VerificationReport()
    order = saito.ring.order
    _product_records(saito, report)
    report.add('euler flat', **_outcome(_euler_flat_failure(saito.ring, saito.euler)))
    report.add('euler homogeneity (E1)',
               **_outcome(_first_failure(_euler_homogeneity_checks(saito, False), order - 1)),
               certified_order=order - 1)
    return report


# ---------------------------------------------------------------------------
# Formal mixed Frobenius structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormalMFS:
    saito: FormalSaito
    filtration: NondegenerateFiltration
    charges: Dict[int, sp.Rational]

    def __post_init__(self):
        if self.filtration.ambient_dim != self.saito.size:
            raise ValueError("Filtration and frame dimensions differ")
        object.__setattr__(self, 'charges', {int(k): to_rational(d) for k, d in self.charges.items()})


def _coefficient_vectors(field_: Sequence[TruncatedSeries]) -> Dict[Monomial, Vector]:
    """Regroup a vector field as {monomial: coefficient vector}."""
    size = len(field_)
    grouped: Dict[Monomial, List] = {}
    for gamma, component in enumerate(field_):
        shift = component.lam_shift
        for monomial, coefficient in component.terms():
            key = monomial + (shift,)
            grouped.setdefault(key, [sp.S.Zero] * size)[gamma] = coefficient
    return {key: tuple(vector) for key, vector in sorted(grouped.items())}


def _outside_subspace(ring: SeriesRing, field_: Sequence[TruncatedSeries],
                      subspace: RationalSubspace, order: int) -> Optional[str]:
    for key, vector in _coefficient_vectors(field_).items():
        if ring.total_degree(key) <= order and not subspace.contains(vector):
            return f"coefficient of {ring.format_monomial(key[:-1])}"
    return None


def extended_metric(
    ring: SeriesRing,
    filtration: NondegenerateFiltration,
    k: int,
    x: Sequence[TruncatedSeries],
    y: Sequence[TruncatedSeries]
) -> TruncatedSeries:
    """
    g_k extended O-bilinearly to O⊗I_k.

    Raises:
        ValueError: If a coefficient of x or y does not lie in I_k
    """
    coordinates = filtration.quotient_coordinates(k)
    if coordinates is None:
        return ring.zero()
    gram = filtration.layer(k).metric.matrix
    width = len(ring.poly_ring.gens)

    def as_coordinate_series(field_):
        columns = [ring.zero() for _ in range(coordinates.dimension)]
        for key, vector in _coefficient_vectors(field_).items():
            monomial, shift = key[:width], key[width]
            weights = coordinates.coordinates(vector)
            for i, weight in enumerate(weights):
                if weight != 0:
                    columns[i] = columns[i] + ring.from_terms({monomial: weight}, shift)
        return columns

    left, right = as_coordinate_series(x), as_coordinate_series(y)
    total = ring.zero()
    for i, xi in enumerate(left):
        for j, yj in enumerate(right):
            if gram[i, j] != 0 and not xi.is_zero and not yj.is_zero:
                total = total + xi * yj * gram[i, j]
    return total


def check_formal_mfs(mfs: FormalMFS) -> VerificationReport:
    """
    Check a formal mixed Frobenius structure.

    The Saito records come first, then per jump k: O⊗I_k is a ∘-ideal (order T),
    g_k is ∘-invariant (order T), [E, −] preserves O⊗I_k and the charge
    equation −g_k([E,x],y) − g_k(x,[E,y]) = (2 − D_k) g_k(x,y) holds for
    constant x, y (order T − 1).
    """
    saito, filtration = mfs.saito, mfs.filtration
    ring, order = saito.ring, saito.ring.order
    report = check_formal_saito(saito)

    for layer in filtration.layers:
        k = layer.jump
        subspace = filtration.subspace(k)
        members = [constant_field(ring, v) for v in subspace.basis]
        failure = None
        for alpha in range(saito.size):
            for member in members:
                failure = _outside_subspace(ring, saito.product(saito.frame_field(alpha), member), subspace, order)
                if failure:
                    failure = f"d{saito.name(alpha)} * I_{k}: {failure}"
                    break
            if failure:
                break
        report.add(f"ideal O*I_{k}", failure is None, certified_order=order, counterexample=failure)

        representatives = [constant_field(ring, v) for v in layer.representatives]
        failure = None
        if report.get(f"ideal O*I_{k}").passed:
            for alpha in range(saito.size):
                frame = saito.frame_field(alpha)
                for i, x in enumerate(representatives):
                    for j, y in enumerate(representatives):
                        left = extended_metric(ring, filtration, k, saito.product(frame, x), y)
                        right = extended_metric(ring, filtration, k, x, saito.product(frame, y))
                        locus = left.first_difference(right, order)
                        if locus:
                            failure = f"g_{k}(d{saito.name(alpha)}*x{i}, x{j}): {locus}"
                            break
                    if failure:
                        break
                if failure:
                    break
        else:
            failure = f"I_{k} is not an ideal"
        report.add(f"invariant g_{k}", failure is None, certified_order=order, counterexample=failure)

        brackets = [bracket(ring, saito.euler, x) for x in representatives]
        member_brackets = [bracket(ring, saito.euler, m) for m in members]
        failure = None
        for image in member_brackets:
            failure = _outside_subspace(ring, image, subspace, order - 1)
            if failure:
                failure = f"[E, I_{k}]: {failure}"
                break
        report.add(f"euler preserves I_{k}", failure is None, certified_order=order - 1, counterexample=failure)

        if k not in mfs.charges:
            report.add(f"charge equation (Eg) g_{k}", False, certified_order=order - 1,
                       counterexample=f"no charge declared for jump {k}")
            continue
        failure = None
        if report.get(f"euler preserves I_{k}").passed:
            factor = 2 - mfs.charges[k]
            truncated = [[b.truncated(order - 1) for b in bracket_x]
                         for bracket_x in brackets]
            for i, x in enumerate(representatives):
                for j, y in enumerate(representatives):
                    left = (-extended_metric(ring, filtration, k, truncated[i], y)
                            - extended_metric(ring, filtration, k, x, truncated[j]))
                    right = extended_metric(ring, filtration, k, x, y) * factor
                    locus = left.first_difference(right, order - 1)
                    if locus:
                        failure = f"g_{k}(x{i}, x{j}) with D_{k}={mfs.charges[k]}: {locus}"
                        break
                if failure:
                    break
        else:
            failure = f"[E, -] does not preserve I_{k}"
        report.add(f"charge equation (Eg) g_{k}", failure is None, certified_order=order - 1,
                   counterexample=failure)
    return report


def mfs_from_graded_mfa(m: MixedFrobeniusAlgebra, order: int = 4) -> FormalMFS:
    """
    The formal MFS of a graded mixed Frobenius algebra on its own frame.

    Coordinates t_a dual to the algebra basis, constant structure constants and
    E = Σ (1 − |e_a|) t_a ∂_a. An ungraded algebra is read as A = A_0 with all
    charges 0.

    Raises:
        GradingError: If some I_k is not graded or the charge condition
            g_k(x, y) = 0 unless |x| + |y| = D_k fails
    """
    algebra, filtration = m.algebra, m.filtration
    if algebra.is_graded:
        if m.charges is None:
            raise GradingError("A graded algebra needs charges D_k for every jump")
        for k in filtration.jumps:
            defect = homogeneous_defect(algebra, filtration.subspace(k))
            if defect is not None:
                raise GradingError(f"I_{k} is not graded: {algebra.format_element(defect)}")
            failure = _charge_violation(m, k)
            if failure is not None:
                raise GradingError(failure)
        charges = dict(m.charges)
    else:
        charges = {k: 0 for k in filtration.jumps} if m.charges is None else dict(m.charges)
        if any(d != 0 for d in charges.values()):
            raise GradingError("An ungraded algebra only carries the charges D_k = 0")
    return FormalMFS(saito_from_algebra(algebra, order), filtration, charges)


def saito_from_algebra(algebra: FiniteAlgebra, order: int = 4) -> FormalSaito:
    """Constant structure constants on the frame t_a dual to the basis, E = Σ (1 − |e_a|) t_a ∂_a."""
    degrees = algebra.grading if algebra.is_graded else (0,) * algebra.dim
    ring = SeriesRing.standard([f"t{a}" for a in range(algebra.dim)], order=order)
    euler = tuple(ring.variable(a) * (1 - degrees[a]) for a in range(algebra.dim))
    return FormalSaito.constant(ring, algebra.structure_constants, algebra.unit, euler)


# ---------------------------------------------------------------------------
# Localized formal Frobenius structures over K[λ]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalizedFormalFrobenius:
    """
    Structure constants over K[λ], Euler field E (E^λ = E + λ∂_λ implicit),
    a localized metric constant in the frame and a charge D.
    """
    saito: FormalSaito
    metric: LocalizedMetric
    charge: sp.Rational

    def __post_init__(self):
        object.__setattr__(self, 'charge', to_rational(self.charge))
        if self.metric.ambient_dim != self.saito.size:
            raise ValueError("Metric and frame dimensions differ")


def _lambda_euler_laurent(value: LaurentPoly) -> LaurentPoly:
    return LaurentPoly.from_terms({e: e * c for e, c in value.terms()})


def check_localized_formal_frobenius(structure: LocalizedFormalFrobenius) -> VerificationReport:
    """
    Check a localized formal Frobenius structure over K[λ].

    Records: product axioms and flatness as for a Saito structure, ∗-invariance
    of g^λ (order T), Euler compatibility of ∗ with E^λ (EF1) and the metric
    equation E^λ g^λ(x,y) − g^λ([E^λ,x],y) − g^λ(x,[E^λ,y]) = (2 − D) g^λ(x,y)
    (EF2), both to order T − 1.
    """
    saito, metric = structure.saito, structure.metric
    ring, order, size, name = saito.ring, saito.ring.order, saito.size, saito.name
    G = metric.matrix
    report = VerificationReport()
    _product_records(saito, report)

    def invariance_checks():
        C = saito.structure_constants
        for a in range(size):
            for b in range(size):
                for c in range(size):
                    left = ring.zero()
                    right = ring.zero()
                    for d in range(size):
                        left = left + C[a][b][d] * G.entry(d, c)
                        right = right + C[b][c][d] * G.entry(a, d)
                    yield f"g(d{name(a)}*d{name(b)}, d{name(c)})", left, right

    report.add('metric invariance', **_outcome(_first_failure(invariance_checks(), order)),
               certified_order=order)
    report.add('euler flat', **_outcome(_euler_flat_failure(ring, saito.euler)))
    report.add('euler homogeneity (EF1)',
               **_outcome(_first_failure(_euler_homogeneity_checks(saito, True), order - 1)),
               certified_order=order - 1)

    def metric_checks():
        jacobian = [[saito.euler[gamma].derivative(alpha) for gamma in range(size)] for alpha in range(size)]
        for a in range(size):
            for b in range(a, size):
                left = ring.from_laurent(_lambda_euler_laurent(G.entry(a, b)))
                for gamma in range(size):
                    left = left + jacobian[a][gamma] * G.entry(gamma, b) + jacobian[b][gamma] * G.entry(a, gamma)
                right = ring.from_laurent(G.entry(a, b) * (2 - structure.charge))
                yield f"g(d{name(a)}, d{name(b)})", left, right

    report.add('metric homogeneity (EF2)', **_outcome(_first_failure(metric_checks(), order - 1)),
               certified_order=order - 1)
    return report


def limit_mfs(structure: LocalizedFormalFrobenius) -> FormalMFS:
    """
    The non-equivariant limit λ → 0: a formal MFS with charges D_k = D − k.

    Raises:
        LambdaPoleError: Naming the first structure constant with a pole at λ = 0
    """
    saito = structure.saito
    size, name = saito.size, saito.name
    constants = tuple(
        tuple(
            tuple(saito.structure_constants[a][b][c].at_lambda_zero(
                f"C_{{{name(a)},{name(b)}}}^{name(c)}") for c in range(size))
            for b in range(size))
        for a in range(size)
    )
    limit = FormalSaito(saito.ring, constants, saito.unit, saito.euler)
    filtration = extract_filtration(structure.metric)
    charges = {k: structure.charge - k for k in filtration.jumps}
    logger.debug(f"Limit charges {charges}")
    return FormalMFS(limit, filtration, charges)


# ---------------------------------------------------------------------------
# Potential vector field
# ---------------------------------------------------------------------------

def _integrate_closed_form(ring: SeriesRing, form: Sequence[TruncatedSeries]) -> LogSeries:
    """
    F with D_α F = form_α for a closed 1-form in the flat frame.

    Each q-mode q^d is integrated separately: for d ≠ 0 along a q_j with
    d_j ≠ 0 by inverting q_j∂_{q_j} on L-polynomials; for d = 0 by the radial
    homotopy in the joint (t, L) degree.
    """
    shift = max((f.lam_shift for f in form), default=0)
    polys = [f._raised(shift) for f in form]
    q_indices = ring.q_indices
    lam = ring.lambda_index
    modes: Dict[Tuple[int, ...], List[Dict[Monomial, object]]] = {}
    for alpha, poly in enumerate(polys):
        for monomial, coefficient in poly.items():
            mode = tuple(monomial[i] for i in q_indices)
            modes.setdefault(mode, [dict() for _ in form])[alpha][monomial] = coefficient

    result = ring.poly_ring.zero
    for mode, components in sorted(modes.items()):
        if any(mode):
            position = next(i for i, d in enumerate(mode) if d != 0)
            alpha = q_indices[position]
            degree = mode[position]
            log_generator = ring.gen(ring.log_index(alpha))
            term = ring.poly_ring.from_dict(components[alpha])
            sign = 1
            power = QQ(degree)
            while term:
                result += term * (QQ(sign) / power)
                term = term.diff(log_generator)
                sign = -sign
                power = power * degree
        else:
            for alpha, terms in enumerate(components):
                carrier = alpha if ring.frame[alpha].kind == 't' else ring.log_index(alpha)
                for monomial, coefficient in terms.items():
                    joint = sum(e for i, e in enumerate(monomial) if i != lam)
                    raised = list(monomial)
                    raised[carrier] += 1
                    result += ring.poly_ring.from_dict({tuple(raised): coefficient / QQ(joint + 1)})
    return LogSeries(ring, result, shift)


@dataclass(frozen=True)
class PotentialVectorField:
    """G with ∇_α∇_β G^γ = C_{αβ}^γ, certified to certified_order."""
    components: Tuple[LogSeries, ...]
    certified_order: int

    def verify(self, saito: FormalSaito) -> VerificationReport:
        """
        Records: the double derivative reproduces the structure constants, and
        the Euler homogeneity ∇∇([E, G] − G) = 0, both to the certified order.
        """
        ring, size, name = saito.ring, saito.size, saito.name
        order = self.certified_order
        report = VerificationReport()

        def second_derivative_checks():
            for a in range(size):
                for b in range(a, size):
                    for c in range(size):
                        yield (f"D_{name(a)} D_{name(b)} G^{name(c)}",
                               self.components[c].derivative(b).derivative(a),
                               saito.structure_constants[a][b][c])

        report.add('potential (ddG = C)', **_outcome(_first_failure(second_derivative_checks(), order)),
                   certified_order=order)

        lie = bracket(ring, saito.euler, self.components)
        defect = [lie[c] - self.components[c] for c in range(size)]

        def homogeneity_checks():
            for a in range(size):
                for b in range(a, size):
                    for c in range(size):
                        yield (f"D_{name(a)} D_{name(b)} ([E,G]-G)^{name(c)}",
                               defect[c].derivative(b).derivative(a), ring.zero())

        report.add('potential homogeneity', **_outcome(_first_failure(homogeneity_checks(), order)),
                   certified_order=order)
        return report

    def describe(self, saito: FormalSaito) -> Dict[str, str]:
        return {saito.name(c): str(component) for c, component in enumerate(self.components)}


def potential_vector_field(saito: FormalSaito) -> PotentialVectorField:
    """
    Double antiderivative of the structure constants.

    Raises:
        IntegrabilityError: If D_α C_{βγ}^δ != D_β C_{αγ}^δ below order T − 1
    """
    ring, size, name = saito.ring, saito.size, saito.name
    C = saito.structure_constants
    for a in range(size):
        for b in range(a + 1, size):
            for c in range(size):
                for d in range(size):
                    locus = C[b][c][d].derivative(a).first_difference(C[a][c][d].derivative(b), ring.order - 1)
                    if locus is not None:
                        raise IntegrabilityError(
                            f"D_{name(a)} C_{{{name(b)},{name(c)}}}^{name(d)} != "
                            f"D_{name(b)} C_{{{name(a)},{name(c)}}}^{name(d)} at {locus}")
    first = [
        [_integrate_closed_form(ring, [C[a][b][c] for a in range(size)]) for b in range(size)]
        for c in range(size)
    ]
    components = tuple(_integrate_closed_form(ring, first[c]) for c in range(size))
    logger.debug(f"Potential vector field computed at order {ring.order}")
    return PotentialVectorField(components, ring.order - 2)
