"""
Exception hierarchy shared by the domain modules, the file handlers and the CLI.

Everything derives from FrobeniusError. Subclasses of InputError describe bad
user input (exit code 2 on the command line); checkers never raise on an axiom
failure, they return report records instead.
"""

from typing import Optional


class FrobeniusError(Exception):
    """Base exception for the mixed Frobenius toolkit"""
    pass


class InputError(FrobeniusError):
    """Raised when input data is malformed or violates a precondition"""
    pass


class FileFormatError(InputError):
    """Raised when an input file cannot be parsed; carries the offending location"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        self.reason = message
        location = path or '<input>'
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")


class UnsupportedFileTypeError(FileFormatError):
    """Raised when file type is not supported"""
    pass


class FileReadError(FileFormatError):
    """Raised when file cannot be read"""
    pass


class AlgebraValidationError(InputError):
    """Raised when structure constants are not commutative, associative, unital or graded"""
    pass


class NonUnimodularError(InputError):
    """Raised when a localized metric is not unimodular over K[λ, λ^-1]"""
    pass


class NotNilpotentError(InputError):
    """Raised when an element expected to be nilpotent has a nonzero power"""
    pass


class NonSplitAlgebraError(InputError):
    """Raised when a quotient of nilradical powers has a simple summand of dimension > 1"""
    pass


class InvarianceError(InputError):
    """Raised when a metric is not invariant under a product"""
    pass


class GradingError(InputError):
    """Raised when an ideal or a charge assignment D_k is not compatible with the grading"""
    pass


class DegenerateModelError(InputError):
    """Raised when a cohomology model or bundle does not satisfy its structural conditions"""
    pass


class DatasetValidationError(InputError):
    """Raised when correlator records are asymmetric, out of range or inhomogeneous"""
    pass


class LambdaPoleError(InputError):
    """Raised when a structure constant acquires a negative power of λ"""
    pass


class IntegrabilityError(InputError):
    """Raised when structure constants fail the symmetric-derivative condition a potential needs"""
    pass


class NonMonicDivisorError(FrobeniusError):
    """Raised when polynomial long division is asked to divide by a non-monic divisor"""
    pass
