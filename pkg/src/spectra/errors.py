"""Exception hierarchy.

Every error carries a machine-readable ``reason`` (the class name) and the
CLI exit code it maps to: 1 for invalid input, 2 for numerical failure.
"""


class SpectraError(Exception):
    exit_code = 2

    @property
    def reason(self) -> str:
        return type(self).__name__


class InputError(SpectraError):
    exit_code = 1


class NumericalFailure(SpectraError):
    exit_code = 2


# lattice_core
class SingularBasis(InputError):
    pass


class DimensionMismatch(InputError):
    pass


# potential
class LengthMismatch(InputError):
    pass


class NotPeriodic(InputError):
    pass


# floquet
class NotHermitian(InputError):
    pass


# fermi_real
class EmptySurface(InputError):
    pass


class OutOfRange(InputError):
    pass


class EvenLattice(InputError):
    pass


class TieAtLevel(NumericalFailure):
    pass


class NoGenericPoint(NumericalFailure):
    pass


# fermi_complex
class HypothesisFailed(InputError):
    pass


class DegenerateLeading(NumericalFailure):
    pass


class EdgeNotConverged(NumericalFailure):
    pass


# cli
class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(InputError):
    def __init__(self, field: str, message: str = ""):
        super().__init__(f"{field}: {message}" if message else field)
        self.field = field
