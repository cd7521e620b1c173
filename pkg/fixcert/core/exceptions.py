"""
Custom Exception Classes

Technical Explanation:
- Every error FixCert raises derives from FixCertException
- Each exception carries an HTTP status code (API) and an exit code (CLI)
- Failed hypotheses and condition violations are NOT exceptions: they are
  report entries with witnesses. Exceptions signal unusable input or an
  operation whose preconditions do not hold.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import HTTPException, status


class FixCertException(Exception):
    """
    Base exception for all FixCert errors

    Technical Note: the CLI maps exit_code straight to the process status,
    FastAPI handlers map status_code to the HTTP response.
    """

    def __init__(self, message: str, status_code: int = 500, exit_code: int = 1):
        self.message = message
        self.status_code = status_code
        self.exit_code = exit_code
        super().__init__(self.message)


class InvalidPointException(FixCertException):
    """
    A point handle does not belong to the space that is asked about it

    Usage:
        space.metric(7, 0)  # on a 3-point space
    """

    def __init__(self, message: str = "Point does not belong to the space"):
        super().__init__(message, status_code=status.HTTP_400_BAD_REQUEST)


class InvalidSpaceException(FixCertException):
    """Raised when a space cannot be constructed (e.g. lower >= upper)."""

    def __init__(self, message: str = "Invalid space definition"):
        super().__init__(message, status_code=status.HTTP_400_BAD_REQUEST)


class BudgetExceededException(FixCertException):
    """
    An indexed space was asked for a point past its materialisation budget

    Usage:
        IndexedSequenceSpace(value, budget=50).metric(0, 51)
    """

    def __init__(self, message: str = "Index budget exceeded", index: Optional[int] = None):
        super().__init__(message, status_code=status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.index = index


class PreconditionFailedException(FixCertException):
    def __init__(self, message: str = "Operation precondition failed"):
        super().__init__(message, status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, exit_code=2)


class NoPreimageException(FixCertException):
    """T x_n has no S-preimage, i.e. T(X) is not contained in S(X)."""

    def __init__(self, message: str = "Target has no S-preimage", target: Any = None):
        super().__init__(message, status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, exit_code=2)
        self.target = target


class NoCoincidenceException(FixCertException):
    """
    No coincidence point could be located

    Technical Note: carries the smallest residual d(Sx, Tx) seen and where,
    so callers can tell "no solution" apart from "not converged yet".
    """

    def __init__(
        self,
        message: str = "No coincidence point found",
        min_residual: Optional[float] = None,
        argmin: Any = None,
    ):
        super().__init__(message, status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, exit_code=2)
        self.min_residual = min_residual
        self.argmin = argmin


class MissingCompanionException(FixCertException):
    def __init__(self, message: str = "Condition needs a companion comparison function"):
        super().__init__(message, status_code=status.HTTP_400_BAD_REQUEST)


class InvalidEpsException(FixCertException):
    def __init__(self, message: str = "eps must satisfy 0 < phi(eps) < eps"):
        super().__init__(message, status_code=status.HTTP_400_BAD_REQUEST)


class NotCheckableException(FixCertException):
    def __init__(self, message: str = "Property is not checkable on this space"):
        super().__init__(message, status_code=status.HTTP_422_UNPROCESSABLE_ENTITY)


class DomainErrorException(FixCertException):
    """
    Expression evaluation left its domain (division by zero, overflow, ...)

    Usage:
        Expr.parse("1/x").evaluate({"x": 0.0})  # carries inputs={"x": 0.0}
    """

    def __init__(self, message: str = "Expression evaluation failed", inputs: Optional[dict] = None):
        super().__init__(message, status_code=status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.inputs = dict(inputs or {})


class UnknownContractionException(FixCertException):
    def __init__(self, message: str = "Unknown catalog entry"):
        super().__init__(message, status_code=status.HTTP_404_NOT_FOUND)


class InvalidParameterException(FixCertException):
    def __init__(self, message: str = "Invalid parameter"):
        super().__init__(message, status_code=status.HTTP_400_BAD_REQUEST)


class ConfigException(FixCertException):
    """Base for problem-config errors; position is 1-based when known."""

    def __init__(self, message: str = "Invalid config", line: Optional[int] = None, column: Optional[int] = None):
        self.reason = message
        where = ", ".join(
            part
            for part in (
                f"line {line}" if line is not None else "",
                f"column {column}" if column is not None else "",
            )
            if part
        )
        if where:
            message = f"{where}: {message}"
        super().__init__(message, status_code=status.HTTP_400_BAD_REQUEST)
        self.line = line
        self.column = column


class ConfigSyntaxException(ConfigException):
    pass


class UnknownKeyException(ConfigException):
    pass


class ArityException(ConfigException):
    pass


def exception_to_http_response(exc: FixCertException) -> HTTPException:
    """
    Convert custom exception to FastAPI HTTPException

    Usage in FastAPI exception handler:
        @app.exception_handler(FixCertException)
        async def fixcert_exception_handler(request, exc):
            raise exception_to_http_response(exc)
    """
    return HTTPException(status_code=exc.status_code, detail=exc.message)
