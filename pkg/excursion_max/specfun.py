"""
Real and complex digamma function, and the constants the p_c formulas rely on

The fast evaluator pushes the argument to the right with the recurrence psi(z + 1) = psi(z) + 1/z and finishes with
the asymptotic expansion psi(z) ~ log(z) - 1/(2z) - sum B_2k / (2k z^2k). The partial-fraction series
psi(z) = -gamma - 1/z + sum_n z / (n (z + n)) is kept in digamma_series() as a slow oracle.
"""

import cmath
import math

import numpy as np

from excursion_max.check_utils import check_finite, check_positive_int
from excursion_max.eval_conf import EvalControl
from excursion_max.exceptions import ConvergenceError, PoleError

EULER_GAMMA = 0.57721566490153286060651209008240243104215933593992

# Real part above which the asymptotic expansion is accurate to double precision
ASYMPTOTIC_THRESHOLD = 10.0

# B_2k / (2k) for k = 1..7
_ASYMPTOTIC_COEFFICIENTS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_SERIES_CHUNK = 1_000_000

DEFAULT_CONTROL = EvalControl()


def _is_pole(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def _asymptotic(z: complex) -> complex:
    inv_z2 = 1.0 / (z * z)
    correction = 0j
    for coefficient in reversed(_ASYMPTOTIC_COEFFICIENTS):
        correction = (correction + coefficient) * inv_z2
    return cmath.log(z) - 0.5 / z - correction


def _digamma(z: complex, ctl: EvalControl) -> complex:
    if _is_pole(z):
        raise PoleError(f"Invalid argument: {z}. Digamma has a pole at non-positive integers")

    if z.real < 0:
        # reflection: psi(z) = psi(1 - z) - pi / tan(pi z)
        return _digamma(1.0 - z, ctl) - math.pi / cmath.tan(math.pi * z)

    shift = 0j
    shifts = 0
    while z.real < ASYMPTOTIC_THRESHOLD:
        if shifts >= ctl.max_terms:
            raise ConvergenceError(f"Digamma recurrence needed more than max_terms={ctl.max_terms} shifts")
        shift -= 1.0 / z
        z += 1.0
        shifts += 1
    return _asymptotic(z) + shift


def digamma_real(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    Digamma function psi(x) = Gamma'(x) / Gamma(x) of a real argument

    Example:
        ```python
        digamma_real(1.0)  # -0.5772156649015329, i.e. minus Euler's constant
        ```

    Params:
        x: Real argument, not a non-positive integer.
        ctl: Evaluation control, max_terms caps the number of recurrence shifts.

    Returns:
        psi(x).
    """
    check_finite("x", x)
    return _digamma(complex(x, 0.0), ctl).real


def digamma_complex(z: complex, ctl: EvalControl = DEFAULT_CONTROL) -> complex:
    """
    Digamma function of a complex argument

    The evaluation is conjugate symmetric: digamma_complex(z.conjugate()) == digamma_complex(z).conjugate().

    Params:
        z: Complex argument, not a non-positive integer.
        ctl: Evaluation control, max_terms caps the number of recurrence shifts.

    Returns:
        psi(z).
    """
    z = complex(z)
    check_finite("Re z", z.real)
    check_finite("Im z", z.imag)
    if z.imag < 0:
        return _digamma(z.conjugate(), ctl).conjugate()
    if z.imag == 0:
        return complex(digamma_real(z.real, ctl), 0.0)
    return _digamma(z, ctl)


def digamma_series(z: complex, terms: int = 1_000_000, tail_correction: bool = True) -> complex:
    """
    Slow reference value of psi(z) from its partial-fraction series

    psi(z) = -gamma - 1/z + sum_{n=1}^{terms} z / (n (z + n)). The omitted tail behaves like z/terms, so with
    tail_correction the midpoint estimate log((terms + z + 1/2) / (terms + 1/2)) of the tail is added.

    Params:
        z: Argument, not a non-positive integer.
        terms: Number of series terms, summed in chunks of 10^6.
        tail_correction: Whether to add the estimate of the omitted tail.

    Returns:
        The truncated series value.
    """
    z = complex(z)
    check_positive_int("terms", terms)
    if _is_pole(z):
        raise PoleError(f"Invalid argument: {z}. Digamma has a pole at non-positive integers")

    total = 0j
    for start in range(1, terms + 1, _SERIES_CHUNK):
        n = np.arange(start, min(start + _SERIES_CHUNK, terms + 1), dtype=np.float64)
        total += complex(np.sum(z / (n * (z + n))))

    value = -EULER_GAMMA - 1.0 / z + total
    if tail_correction:
        value += cmath.log((terms + z + 0.5) / (terms + 0.5))
    return value
