"""
Exception hierarchy for polyred.

Input problems, failed preconditions and theorem-level violations are kept
apart so the CLI can map them onto distinct exit codes.
"""

from typing import Any, Dict


class PolyredError(Exception):
    """Base class for every error raised by the library"""

    exit_code: int = 2

    def to_dict(self) -> Dict[str, Any]:
        return {"type": type(self).__name__, "message": str(self)}


class InputError(PolyredError, ValueError):
    """Malformed or ill-typed input data"""


class DimensionMismatchError(InputError):
    pass


class NotASubspaceError(InputError):
    """Raised when a quotient A/B is requested with B not contained in A"""


class StructureError(InputError):
    """Raised when form data breaks a structural requirement (skewness, shapes)"""


class MissingEtaError(InputError):
    pass


class UnknownVariableError(InputError):
    pass


class UnknownModelError(InputError):
    pass


class PreconditionError(PolyredError):
    """An audited precondition of an operation does not hold"""


class InconsistentSystemError(PreconditionError):
    pass


class ActionDataError(PreconditionError):
    pass


class InvariantViolation(PolyredError, AssertionError):
    """A property that must hold by theorem was observed to fail"""

    exit_code = 1
