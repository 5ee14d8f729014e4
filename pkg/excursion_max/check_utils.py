import math

from excursion_max.exceptions import DomainError


def check_finite(name: str, value: float) -> None:
    """
    Check that value is a finite real number

    Params:
        name: Argument name used in the error message.
        value: The value to be validated.
    """
    if not math.isfinite(value):
        raise DomainError(f"Invalid {name}: {value}. It must be a finite real number")


def check_positive(name: str, value: float) -> None:
    """
    Check that value is finite and strictly positive

    Params:
        name: Argument name used in the error message.
        value: The value to be validated.
    """
    check_finite(name, value)
    if value <= 0:
        raise DomainError(f"Invalid {name}: {value}. It must be strictly positive")


def check_non_negative(name: str, value: float) -> None:
    """
    Check that value is finite and greater or equal than zero

    Params:
        name: Argument name used in the error message.
        value: The value to be validated.
    """
    check_finite(name, value)
    if value < 0:
        raise DomainError(f"Invalid {name}: {value}. It must be greater or equal than 0")


def check_open_unit(name: str, value: float) -> None:
    """
    Check that value lies in the open interval (0, 1)

    Params:
        name: Argument name used in the error message.
        value: The value to be validated, typically a probability level.
    """
    check_finite(name, value)
    if not 0 < value < 1:
        raise DomainError(f"Invalid {name}: {value}. It must lie in the open interval (0, 1)")


def check_positive_int(name: str, value: int) -> None:
    """
    Check that value is an integer greater or equal than 1

    Params:
        name: Argument name used in the error message.
        value: The value to be validated.
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"Invalid {name}: {value!r}. It must be an integer")
    if value < 1:
        raise DomainError(f"Invalid {name}: {value}. It must be greater or equal than 1")
