"""Exception hierarchy for sg-alg.

Library code raises these; the CLI maps ``exit_code`` to the process exit
status and the HTTP service maps them to status codes.
"""

from __future__ import annotations

from typing import Optional, Tuple


class SgAlgError(Exception):
    exit_code = 4


class UsageError(SgAlgError):
    exit_code = 1


# ───────────────────────────────────────────────────────────────────────────────
# Ingestion
# ───────────────────────────────────────────────────────────────────────────────

class GameFormatError(SgAlgError, ValueError):
    exit_code = 2

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class GameValidationError(SgAlgError, ValueError):
    exit_code = 2

    def __init__(self, message: str, where: Optional[Tuple[int, ...]] = None):
        self.where = where
        super().__init__(message)


# ───────────────────────────────────────────────────────────────────────────────
# Algebra
# ───────────────────────────────────────────────────────────────────────────────

class PolynomialError(SgAlgError, ValueError):
    pass


class DegenerateKernelError(SgAlgError, ValueError):
    pass


class SingularKernelError(SgAlgError, ValueError):
    pass


class ZeroValueError(SgAlgError, ValueError):
    pass


# ───────────────────────────────────────────────────────────────────────────────
# Solver outcomes
# ───────────────────────────────────────────────────────────────────────────────

class AmbiguityError(SgAlgError):
    """The data at the current tolerance does not determine the answer."""

    exit_code = 3


class KernelAmbiguityError(AmbiguityError):
    def __init__(self, message: str, states: Tuple[int, ...] = ()):
        self.states = tuple(states)
        super().__init__(message)


class RootAmbiguityError(AmbiguityError):
    pass


class NoRootNearEstimateError(AmbiguityError):
    pass


class KernelNotStableError(AmbiguityError):
    pass


class DriftEnvelopeError(AmbiguityError):
    pass


class CertificateError(SgAlgError):
    """The kernel selection did not yield a usable elimination certificate."""

    exit_code = 3


class InconsistentSystemError(CertificateError):
    pass


class NoBivariateElementError(CertificateError):
    pass


class CapExceededError(SgAlgError):
    exit_code = 4


class ToleranceNotReachedError(CapExceededError):
    pass


class KernelSearchExhaustedError(CapExceededError):
    pass
