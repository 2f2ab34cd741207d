from django.core.exceptions import (
    ValidationError as DjangoValidationError,
    PermissionDenied,
)
from django.http import Http404

from rest_framework.views import exception_handler
from rest_framework import exceptions, status
from rest_framework.serializers import as_serializer_error


class BoussinesqError(Exception):
    """Base class for every error raised by the simulation toolkit."""

    exit_code = 1


class ConfigError(BoussinesqError):
    exit_code = 2


class GridError(ConfigError):
    pass


class PreconditionError(BoussinesqError, ValueError):
    """An operation was called outside its documented domain."""


class SingularSystemError(BoussinesqError):
    """A banded system could not be factorized; usually the grid is too coarse."""


class NumericalDivergenceError(BoussinesqError):
    exit_code = 3

    def __init__(self, message: str, *, field: str | None = None, t: float | None = None):
        super().__init__(message)
        self.field = field
        self.t = t


class CFLViolationError(NumericalDivergenceError):
    def __init__(self, message: str, *, suggested_dt: float, t: float | None = None):
        super().__init__(message, field="u", t=t)
        self.suggested_dt = suggested_dt


class ResolutionMonitorStop(BoussinesqError):
    exit_code = 4

    def __init__(self, message: str, *, tail: float, t: float | None = None):
        super().__init__(message)
        self.tail = tail
        self.t = t


class CoverageError(BoussinesqError):
    pass


class SchemaError(BoussinesqError):
    exit_code = 2


class CheckpointError(BoussinesqError):
    exit_code = 2


class FieldFileError(BoussinesqError):
    exit_code = 2


class DomainErrorResponse(exceptions.APIException):
    status_code = status.HTTP_422_UNPROCESSABLE_ENTITY
    default_detail = "The simulation request could not be processed."
    default_code = "unprocessable"


def drf_default_with_modifications_exception_handler(exc, ctx):
    if isinstance(exc, DjangoValidationError):
        exc = exceptions.ValidationError(as_serializer_error(exc))

    if isinstance(exc, Http404):
        exc = exceptions.NotFound()

    if isinstance(exc, PermissionDenied):
        exc = exceptions.PermissionDenied()

    if isinstance(exc, ConfigError):
        exc = exceptions.ValidationError(str(exc))
    elif isinstance(exc, BoussinesqError):
        exc = DomainErrorResponse(str(exc))

    response = exception_handler(exc, ctx)

    # Unexpected errors fall through to Django's 500 handling
    if response is None:
        return response

    if isinstance(exc.detail, (list, dict)):
        response.data = {"detail": response.data}

    return response
