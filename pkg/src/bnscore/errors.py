"""Exception hierarchy shared by every module."""


class BnscoreError(Exception):
    """Base class for all errors raised by this package."""

    kind = "error"


class UsageError(BnscoreError, ValueError):
    """Arguments are inconsistent with each other (mismatched variables, bad indices)."""

    kind = "usage"


class StructuralError(BnscoreError, ValueError):
    """A graph is not a DAG."""

    kind = "structural"


class DomainError(BnscoreError, ValueError):
    """A scalar argument is outside its admissible range."""

    kind = "domain"


class PositivityError(DomainError):
    """A probability or Dirichlet hyperparameter is not strictly positive."""

    kind = "positivity"


class NotPositiveDefiniteError(DomainError):
    """A symmetric factorization hit a pivot at or below tolerance."""

    kind = "not_positive_definite"


class CapacityError(BnscoreError, ValueError):
    """A state space or enumeration exceeds the configured cap."""

    kind = "capacity"


class DataError(BnscoreError, ValueError):
    """Input data cannot be ingested."""

    kind = "data"


class IncompleteDataError(DataError):
    kind = "incomplete_data"


class SchemaError(DataError):
    kind = "schema"
