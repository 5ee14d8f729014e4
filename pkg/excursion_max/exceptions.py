"""
Errors raised by excursion_max and the exit codes the command line maps them to
"""


class ExcursionMaxError(Exception):
    """Base class of every error raised by this package"""


class DomainError(ExcursionMaxError, ValueError):
    """An argument lies outside the domain of the operation"""


class PoleError(DomainError):
    """The digamma function was evaluated at one of its poles (0, -1, -2, ...)"""


class EnumerationSizeError(DomainError):
    """Exhaustive path enumeration was requested for a walk that is too long"""


class ConvergenceError(ExcursionMaxError, ArithmeticError):
    """
    A series, root-find or quadrature exhausted its evaluation budget

    Attributes:
        partial_value: Last value computed before giving up, if any.
    """

    def __init__(self, message: str, partial_value: float | complex | None = None):
        super().__init__(message)
        self.partial_value = partial_value


class IntegrandError(ExcursionMaxError, ArithmeticError):
    """The integrand returned NaN or an infinite value"""


class ScoreParseError(ExcursionMaxError, ValueError):
    """
    A score sequence could not be parsed

    Attributes:
        line_number: 1-based line of the offending entry, None when the whole input is at fault.
    """

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyInputError(ScoreParseError):
    """The score sequence holds no values"""


class VerificationError(ExcursionMaxError):
    """At least one identity of the verification suite failed"""


EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_NON_CONVERGENCE = 3
EXIT_VERIFICATION_FAILURE = 4


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to the command line exit code

    Params:
        exc: The exception that stopped a command.

    Returns:
        2 for input or parameter errors, 3 for numeric failures, 4 for failed verifications.
    """
    if isinstance(exc, VerificationError):
        return EXIT_VERIFICATION_FAILURE
    if isinstance(exc, ArithmeticError):
        return EXIT_NON_CONVERGENCE
    if isinstance(exc, ValueError):
        return EXIT_INPUT_ERROR
    raise exc
