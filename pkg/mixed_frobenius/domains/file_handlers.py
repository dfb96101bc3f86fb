"""
Input file handlers.

One handler per input format, chosen by extension through FileHandlerFactory.
All formats share the line syntax `keyword arg ...` with `#` comments, `|`
separating groups, rationals as `p` or `p/q` and Laurent polynomials in λ as
`exp:coef` tokens. Validation errors carry `path:line`.
"""

import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp
from sympy import Matrix

from .algebra import FiniteAlgebra
from .errors import (
    DatasetValidationError,
    FileFormatError,
    FileReadError,
    UnsupportedFileTypeError,
)
from .exactalg import LaurentPoly, Vector, unit_vector, zero_vector
from .formal import FormalSaito, FrameVariable, SeriesRing
from .geom import BundleData, CohomologyModel, GWDataset
from .mfa import LocalizedMetric, NilpotentData, NondegenerateFiltration

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Line:
    number: int
    keyword: str
    args: Tuple[str, ...]
    text: str

    def groups(self) -> List[List[str]]:
        """Arguments split on `|`."""
        groups: List[List[str]] = [[]]
        for token in self.args:
            if token == '|':
                groups.append([])
            else:
                groups[-1].append(token)
        return groups


@dataclass(frozen=True)
class AlgebraInput:
    algebra: FiniteAlgebra
    metric: Optional[Matrix] = None
    filtration: Optional[NondegenerateFiltration] = None
    charges: Optional[Dict[int, sp.Rational]] = None


@dataclass(frozen=True)
class GeometryInput:
    model: CohomologyModel
    bundle: BundleData


class BaseFileHandler(ABC):
    extension = ''

    @abstractmethod
    def _parse(self, path: str, lines: List[Line], **options):
        """Build the domain object from the tokenized lines."""
        pass

    def load(self, file_path: str, **options):
        try:
            lines = self._read_lines(file_path)
            return self._parse(file_path, lines, **options)
        except FileFormatError as e:
            logger.error(f"Invalid {self.extension} file: {e}")
            raise

    def _validate_file(self, file_path: str) -> None:
        """Validate file existence and readability"""
        if not os.path.exists(file_path):
            raise FileReadError("File not found", file_path)
        if not os.access(file_path, os.R_OK):
            raise FileReadError("No read permission", file_path)

    def _read_lines(self, file_path: str) -> List[Line]:
        self._validate_file(file_path)
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                raw = f.readlines()
        except UnicodeDecodeError as e:
            raise FileReadError(f"Not UTF-8 text: {e}", file_path)
        except OSError as e:
            raise FileReadError(f"Cannot read file: {e}", file_path)
        lines = []
        for number, text in enumerate(raw, start=1):
            content = text.split('#', 1)[0].replace('|', ' | ').split()
            if content:
                lines.append(Line(number, content[0], tuple(content[1:]), text.rstrip('\n')))
        return lines

    # -- token helpers --------------------------------------------------------

    @staticmethod
    def _error(path: str, line: Line, message: str) -> FileFormatError:
        return FileFormatError(message, path, line.number)

    def _rational(self, path: str, line: Line, token: str) -> sp.Rational:
        try:
            return sp.Rational(token)
        except (TypeError, ValueError, sp.SympifyError):
            raise self._error(path, line, f"Not a rational number: {token!r}")

    def _integer(self, path: str, line: Line, token: str) -> int:
        try:
            return int(token)
        except ValueError:
            raise self._error(path, line, f"Not an integer: {token!r}")

    def _rationals(self, path: str, line: Line, tokens: Sequence[str], size: Optional[int] = None) -> Vector:
        values = tuple(self._rational(path, line, t) for t in tokens)
        if size is not None and len(values) != size:
            raise self._error(path, line, f"Expected {size} coordinates, got {len(values)}")
        return values

    def _laurent(self, path: str, line: Line, tokens: Sequence[str]) -> LaurentPoly:
        terms: Dict[int, sp.Rational] = {}
        for token in tokens:
            exponent, sep, coefficient = token.partition(':')
            if not sep:
                raise self._error(path, line, f"Laurent term must be exp:coef, got {token!r}")
            e = self._integer(path, line, exponent)
            terms[e] = terms.get(e, sp.S.Zero) + self._rational(path, line, coefficient)
        return LaurentPoly.from_terms(terms)

    def _index(self, path: str, line: Line, token: str, names: Sequence[str]) -> int:
        """A basis reference by name or 0-based index."""
        if token in names:
            return list(names).index(token)
        try:
            index = int(token)
        except ValueError:
            raise self._error(path, line, f"Unknown basis element {token!r}")
        if not 0 <= index < len(names):
            raise self._error(path, line, f"Basis index {index} out of range 0..{len(names) - 1}")
        return index

    def _single(self, path: str, lines: List[Line], keyword: str, required: bool = True) -> Optional[Line]:
        found = [line for line in lines if line.keyword == keyword]
        if len(found) > 1:
            raise self._error(path, found[1], f"Duplicate '{keyword}' line")
        if not found:
            if required:
                raise FileFormatError(f"Missing '{keyword}' line", path)
            return None
        return found[0]

    def _check_keywords(self, path: str, lines: List[Line], allowed: Sequence[str]) -> None:
        for line in lines:
            if line.keyword not in allowed:
                raise self._error(path, line, f"Unknown keyword {line.keyword!r}")

    def _product_table(self, path: str, lines: List[Line], names: Sequence[str]):
        """`product i j k value` lines, mirrored to (j, i) unless that pair is explicit."""
        size = len(names)
        explicit: Dict[Tuple[int, int], List] = {}
        for line in lines:
            if line.keyword != 'product':
                continue
            if len(line.args) != 4:
                raise self._error(path, line, "Expected 'product i j k value'")
            i, j, k = (self._index(path, line, t, names) for t in line.args[:3])
            value = self._rational(path, line, line.args[3])
            vector = explicit.setdefault((i, j), [sp.S.Zero] * size)
            vector[k] += value
        table = [[list(zero_vector(size)) for _ in range(size)] for _ in range(size)]
        for (i, j), vector in explicit.items():
            table[i][j] = vector
            if (j, i) not in explicit:
                table[j][i] = vector
        return tuple(tuple(tuple(v) for v in row) for row in table)

    def _metric_lines(self, path: str, lines: List[Line], names: Sequence[str]) -> Optional[Matrix]:
        """`metric i j value` lines with symmetric fill."""
        entries = [line for line in lines if line.keyword == 'metric']
        if not entries:
            return None
        gram = sp.zeros(len(names), len(names))
        for line in entries:
            if len(line.args) != 3:
                raise self._error(path, line, "Expected 'metric i j value'")
            i, j = (self._index(path, line, t, names) for t in line.args[:2])
            gram[i, j] = gram[j, i] = self._rational(path, line, line.args[2])
        return gram


class AlgebraFileHandler(BaseFileHandler):
    """`.alg`: basis, unit, grading, products and optionally a metric, filtration layers and charges."""
    extension = '.alg'

    def _parse(self, path: str, lines: List[Line], **options) -> AlgebraInput:
        self._check_keywords(path, lines, ('basis', 'unit', 'grading', 'product', 'metric', 'layer', 'gram', 'charge'))
        names = self._single(path, lines, 'basis').args
        if not names:
            raise self._error(path, self._single(path, lines, 'basis'), "Empty basis")
        size = len(names)
        unit_line = self._single(path, lines, 'unit', required=False)
        unit = self._rationals(path, unit_line, unit_line.args, size) if unit_line else unit_vector(size, 0)
        grading_line = self._single(path, lines, 'grading', required=False)
        grading = None
        if grading_line:
            grading = tuple(self._integer(path, grading_line, t) for t in grading_line.args)
            if len(grading) != size:
                raise self._error(path, grading_line, f"Expected {size} degrees")
        algebra = FiniteAlgebra(tuple(names), self._product_table(path, lines, names), unit, grading)
        return AlgebraInput(
            algebra,
            metric=self._metric_lines(path, lines, names),
            filtration=self._filtration(path, lines, size),
            charges=self._charges(path, lines),
        )

    def _filtration(self, path: str, lines: List[Line], size: int) -> Optional[NondegenerateFiltration]:
        layers: Dict[int, Tuple[Line, List[Vector]]] = {}
        grams: Dict[int, Tuple[Line, Matrix]] = {}
        for line in lines:
            if line.keyword not in ('layer', 'gram'):
                continue
            groups = line.groups()
            if len(groups) < 2 or len(groups[0]) != 1:
                raise self._error(path, line, f"Expected '{line.keyword} k | ... | ...'")
            k = self._integer(path, line, groups[0][0])
            if line.keyword == 'layer':
                if k in layers:
                    raise self._error(path, line, f"Duplicate layer {k}")
                if layers and k <= max(layers):
                    raise self._error(path, line, "Layers must be listed in increasing k")
                layers[k] = (line, [self._rationals(path, line, g, size) for g in groups[1:]])
            else:
                rows = [self._rationals(path, line, g) for g in groups[1:]]
                if any(len(row) != len(rows) for row in rows):
                    raise self._error(path, line, "Gram matrix must be square")
                grams[k] = (line, Matrix(rows))
        if not layers:
            return None
        for k, (line, _) in grams.items():
            if k not in layers:
                raise self._error(path, line, f"Gram for missing layer {k}")
        built = {}
        for k, (line, representatives) in layers.items():
            if k not in grams:
                raise self._error(path, line, f"Layer {k} has no gram line")
            gram = grams[k][1]
            if gram.rows != len(representatives):
                raise self._error(path, grams[k][0], f"Gram of layer {k} must be {len(representatives)}x{len(representatives)}")
            built[k] = (representatives, gram)
        try:
            return NondegenerateFiltration.from_layers(size, built)
        except ValueError as e:
            raise FileFormatError(str(e), path)

    def _charges(self, path: str, lines: List[Line]) -> Optional[Dict[int, sp.Rational]]:
        charges = {}
        for line in lines:
            if line.keyword == 'charge':
                if len(line.args) != 2:
                    raise self._error(path, line, "Expected 'charge k D'")
                charges[self._integer(path, line, line.args[0])] = self._rational(path, line, line.args[1])
        return charges or None


class MetricFileHandler(BaseFileHandler):
    """`.metric`: a localized K[λ]-metric given entry by entry."""
    extension = '.metric'

    def _parse(self, path: str, lines: List[Line], **options) -> LocalizedMetric:
        self._check_keywords(path, lines, ('size', 'entry'))
        size_line = self._single(path, lines, 'size')
        if len(size_line.args) != 1:
            raise self._error(path, size_line, "Expected 'size s'")
        size = self._integer(path, size_line, size_line.args[0])
        if size < 1:
            raise self._error(path, size_line, "Size must be positive")
        entries: Dict[Tuple[int, int], LaurentPoly] = {}
        for line in lines:
            if line.keyword != 'entry':
                continue
            if len(line.args) < 2:
                raise self._error(path, line, "Expected 'entry i j exp:coef ...'")
            i, j = (self._integer(path, line, t) for t in line.args[:2])
            if not (0 <= i < size and 0 <= j < size):
                raise self._error(path, line, f"Entry ({i}, {j}) outside a {size}x{size} matrix")
            value = self._laurent(path, line, line.args[2:])
            for key in {(i, j), (j, i)}:
                if key in entries and entries[key] != value:
                    raise self._error(path, line, f"Entry ({i}, {j}) conflicts with its mirror {entries[key]}")
                entries[key] = value
        rows = [[entries.get((i, j), LaurentPoly()) for j in range(size)] for i in range(size)]
        return LocalizedMetric.from_rows(rows)


class NilpotentFileHandler(BaseFileHandler):
    """`.nilp`: a Frobenius algebra by reference plus nilpotents n_1..n_r."""
    extension = '.nilp'

    def _parse(self, path: str, lines: List[Line], **options) -> NilpotentData:
        self._check_keywords(path, lines, ('algebra', 'metric', 'nilpotent'))
        reference = self._single(path, lines, 'algebra')
        if len(reference.args) != 1:
            raise self._error(path, reference, "Expected 'algebra <path>'")
        algebra_path = os.path.join(os.path.dirname(os.path.abspath(path)), reference.args[0])
        source = AlgebraFileHandler().load(algebra_path)
        algebra = source.algebra
        gram = self._metric_lines(path, lines, algebra.basis_names)
        if gram is None:
            gram = source.metric
        if gram is None:
            raise self._error(path, reference, "No metric in this file or the referenced algebra")
        nilpotents = [
            self._rationals(path, line, line.args, algebra.dim) for line in lines if line.keyword == 'nilpotent']
        if not nilpotents:
            raise FileFormatError("Missing 'nilpotent' line", path)
        return NilpotentData(algebra, gram, tuple(nilpotents))


class GeometryFileHandler(BaseFileHandler):
    """`.geom`: cohomology of X with cup product, ∫, c_1(X) and the Chern classes of V."""
    extension = '.geom'

    def _parse(self, path: str, lines: List[Line], **options) -> GeometryInput:
        self._check_keywords(path, lines, ('dimension', 'basis', 'product', 'integral', 'c1', 'bundle_rank', 'chern'))
        dimension_line = self._single(path, lines, 'dimension')
        dimension = self._integer(path, dimension_line, dimension_line.args[0]) if dimension_line.args else -1
        if dimension < 0:
            raise self._error(path, dimension_line, "Expected 'dimension n' with n >= 0")
        basis_line = self._single(path, lines, 'basis')
        names, degrees = [], []
        for token in basis_line.args:
            name, sep, degree = token.partition(':')
            if not sep or not name:
                raise self._error(path, basis_line, f"Basis entries are name:degree, got {token!r}")
            names.append(name)
            degrees.append(self._integer(path, basis_line, degree))
        if not names:
            raise self._error(path, basis_line, "Empty basis")
        size = len(names)
        integral = [sp.S.Zero] * size
        for line in lines:
            if line.keyword == 'integral':
                if len(line.args) != 2:
                    raise self._error(path, line, "Expected 'integral i value'")
                integral[self._index(path, line, line.args[0], names)] = self._rational(path, line, line.args[1])
        c1_line = self._single(path, lines, 'c1', required=False)
        c1 = self._rationals(path, c1_line, c1_line.args, size) if c1_line else zero_vector(size)
        rank_line = self._single(path, lines, 'bundle_rank')
        rank = self._integer(path, rank_line, rank_line.args[0]) if rank_line.args else -1
        if rank < 0:
            raise self._error(path, rank_line, "Expected 'bundle_rank r' with r >= 0")
        chern: Dict[int, Vector] = {}
        for line in lines:
            if line.keyword == 'chern':
                if not line.args:
                    raise self._error(path, line, "Expected 'chern i coords...'")
                i = self._integer(path, line, line.args[0])
                if not 1 <= i <= rank:
                    raise self._error(path, line, f"Chern class index {i} outside 1..{rank}")
                chern[i] = self._rationals(path, line, line.args[1:], size)
        algebra = FiniteAlgebra(tuple(names), self._product_table(path, lines, names),
                                unit_vector(size, 0), tuple(degrees))
        model = CohomologyModel(algebra, tuple(integral), c1, dimension)
        bundle = BundleData(rank, tuple(chern.get(i, zero_vector(size)) for i in range(1, rank + 1)))
        bundle.validate(model)
        return GeometryInput(model, bundle)


class GWFileHandler(BaseFileHandler):
    """`.gw`: correlator records `record d.. | i1 i2 i3 [more] | laurent`."""
    extension = '.gw'

    def _parse(self, path: str, lines: List[Line], **options) -> GWDataset:
        self._check_keywords(path, lines, ('max_degree', 'lambda_degree', 'record'))
        max_line = self._single(path, lines, 'max_degree')
        max_degree = self._integer(path, max_line, max_line.args[0]) if max_line.args else -1
        if max_degree < 0:
            raise self._error(path, max_line, "Expected 'max_degree m' with m >= 0")
        bound_line = self._single(path, lines, 'lambda_degree', required=False)
        bound = self._integer(path, bound_line, bound_line.args[0]) if bound_line and bound_line.args else None
        seen: Dict[tuple, Tuple[int, LaurentPoly]] = {}
        entries = []
        for line in lines:
            if line.keyword != 'record':
                continue
            groups = line.groups()
            if len(groups) != 3:
                raise self._error(path, line, "Expected 'record d.. | i1 i2 i3 [more] | exp:coef ...'")
            degree = tuple(self._integer(path, line, t) for t in groups[0])
            insertions = tuple(self._integer(path, line, t) for t in groups[1])
            value = self._laurent(path, line, groups[2])
            key = (degree, tuple(sorted(insertions)))
            if key in seen and seen[key][1] != value:
                raise DatasetValidationError(
                    f"{path}:{line.number}: record conflicts with line {seen[key][0]} "
                    f"for the same degree and insertion multiset")
            seen[key] = (line.number, value)
            entries.append((degree, insertions, value))
        return GWDataset.from_records(entries, max_degree, bound)


class SeriesFileHandler(BaseFileHandler):
    """`.series`: a formal Saito structure given by structure-constant and Euler terms."""
    extension = '.series'

    def _parse(self, path: str, lines: List[Line], order: Optional[int] = None, **options) -> FormalSaito:
        self._check_keywords(path, lines, ('frame', 'order', 'unit', 'term', 'euler'))
        frame_line = self._single(path, lines, 'frame')
        frame = []
        for token in frame_line.args:
            kind, sep, name = token.partition(':')
            if not sep or kind not in ('t', 'q') or not name:
                raise self._error(path, frame_line, f"Frame entries are t:name or q:name, got {token!r}")
            frame.append(FrameVariable(kind, name))
        if not frame:
            raise self._error(path, frame_line, "Empty frame")
        names = [v.name for v in frame]
        size = len(frame)
        if order is None:
            order_line = self._single(path, lines, 'order')
            order = self._integer(path, order_line, order_line.args[0]) if order_line.args else -1
            if order < 0:
                raise self._error(path, order_line, "Expected 'order T' with T >= 0")
        try:
            ring = SeriesRing(tuple(frame), order)
        except ValueError as e:
            raise self._error(path, frame_line, str(e))
        unit_line = self._single(path, lines, 'unit')
        unit = self._rationals(path, unit_line, unit_line.args, size)

        terms: Dict[Tuple[int, int, int], Dict[Tuple[Tuple[int, ...], int], sp.Rational]] = {}
        euler_terms: Dict[int, Dict[Tuple[Tuple[int, ...], int], sp.Rational]] = {}
        for line in lines:
            if line.keyword not in ('term', 'euler'):
                continue
            groups = line.groups()
            if line.keyword == 'term':
                if len(groups) != 4 or len(groups[0]) != 3 or len(groups[2]) != 1 or len(groups[3]) != 1:
                    raise self._error(path, line, "Expected 'term a b c | exps... | lamdeg | coef'")
                key = tuple(self._index(path, line, t, names) for t in groups[0])
                lam = self._integer(path, line, groups[2][0])
                target = terms.setdefault(key, {})
            else:
                if len(groups) != 3 or len(groups[0]) != 1 or len(groups[2]) != 1:
                    raise self._error(path, line, "Expected 'euler a | exps... | coef'")
                lam = 0
                target = euler_terms.setdefault(self._index(path, line, groups[0][0], names), {})
            exponents = tuple(self._integer(path, line, t) for t in groups[1])
            if len(exponents) != size or any(e < 0 for e in exponents):
                raise self._error(path, line, f"Expected {size} non-negative exponents")
            coefficient = self._rational(path, line, groups[-1][0])
            target[(exponents, lam)] = target.get((exponents, lam), sp.S.Zero) + coefficient

        explicit_pairs = {key[:2] for key in terms}
        for (a, b, c), found in list(terms.items()):
            if (b, a) not in explicit_pairs:
                terms[(b, a, c)] = found

        def build(found):
            if not found:
                return ring.zero()
            shift = max(0, -min(lam for _, lam in found))
            width = len(ring.poly_ring.gens)
            monomials = {}
            for (exponents, lam), coefficient in found.items():
                monomial = list(exponents) + [0] * (width - size)
                monomial[ring.lambda_index] = lam + shift
                monomials[tuple(monomial)] = coefficient
            return ring.from_terms(monomials, shift)

        constants = tuple(
            tuple(tuple(build(terms.get((a, b, c), {})) for c in range(size)) for b in range(size))
            for a in range(size)
        )
        euler = tuple(build(euler_terms.get(a, {})) for a in range(size))
        return FormalSaito(ring, constants, unit, euler)


class FileHandlerFactory:
    HANDLERS = {
        'algebra': AlgebraFileHandler(),
        'metric': MetricFileHandler(),
        'nilpotent': NilpotentFileHandler(),
        'geometry': GeometryFileHandler(),
        'gw': GWFileHandler(),
        'series': SeriesFileHandler(),
    }

    EXTENSION_MAP = {
        '.alg': 'algebra',
        '.metric': 'metric',
        '.nilp': 'nilpotent',
        '.geom': 'geometry',
        '.gw': 'gw',
        '.series': 'series',
    }

    @classmethod
    def kind_of(cls, file_path: str) -> str:
        ext = os.path.splitext(file_path)[1].lower()
        kind = cls.EXTENSION_MAP.get(ext)
        if not kind:
            logger.error(f"Unsupported file type for {file_path}")
            raise UnsupportedFileTypeError(
                f"Unsupported extension {ext or '(none)'}; expected one of {sorted(cls.EXTENSION_MAP)}", file_path)
        return kind

    @classmethod
    def get_handler(cls, file_path: str) -> BaseFileHandler:
        return cls.HANDLERS[cls.kind_of(file_path)]

    @classmethod
    def load(cls, file_path: str, **options):
        return cls.get_handler(file_path).load(file_path, **options)
