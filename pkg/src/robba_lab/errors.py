"""Exception hierarchy shared by every module.

The CLI maps each class to a fixed exit status, so library code should raise
the most specific one that applies.
"""


class RobbaLabError(Exception):
    exit_code = 4


class SchemaError(RobbaLabError, ValueError):
    """Malformed input document or inconsistent constructor arguments."""

    exit_code = 1


class PreconditionError(RobbaLabError):
    """The operation is not applicable at this truncation or precision."""

    exit_code = 2


class CertificateViolation(RobbaLabError):
    """A bound that the mathematics guarantees was observed to fail.

    This always indicates an implementation bug, never bad input.
    """

    exit_code = 3
