"""
Laws and kernels behind p_c

Arcsine law of the last zero g(1), Kolmogorov-Smirnov law of the bridge maximum b*, meander maximum through the
function F (Gaussian and theta series), kernel A (paired series and digamma form), and the survival function of
b* sqrt(g(1) / (1 - g(1))).

Scalar operations return SeriesValue with their truncation accounting. The *_values / *_quantiles functions are
vectorized numpy counterparts with a fixed number of terms, used by the Monte Carlo samplers.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from excursion_max.check_utils import check_finite, check_non_negative, check_open_unit, check_positive
from excursion_max.eval_conf import EvalControl
from excursion_max.exceptions import ConvergenceError
from excursion_max.quadrature import QuadratureResult, integrate_semi_infinite
from excursion_max.specfun import digamma_complex

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
SQRT_PI_OVER_2 = math.sqrt(math.pi / 2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
LN2 = math.log(2.0)

# below this point the theta forms converge faster than the Gaussian ones
KS_BRANCH = 1.0
F_BRANCH = 1.0

# number of terms of the vectorized kernels, enough for double precision on each side of the branch point
_VECTOR_TERMS = 10

KS_QUANTILE_UPPER = 8.0
MEANDER_QUANTILE_UPPER = 10.0

# theta terms exp(-c / x^2) are below 1e-304 once c > THETA_EXPONENT_LIMIT x^2
THETA_EXPONENT_LIMIT = 700.0

_A_DIRECT_MIN_PAIRS = 4096

# A(u) = sum_m c_m / u^m asymptotically, c_m = (-1)^(m-1) eta(1 - 2m), six terms reach double precision above the
# threshold
A_ASYMPTOTIC_THRESHOLD = 1e4
_A_ASYMPTOTIC_COEFFICIENTS = (1.0 / 4.0, 1.0 / 8.0, 1.0 / 4.0, 17.0 / 16.0, 31.0 / 4.0, 691.0 / 8.0)

# 0 < A(u) <= min(ln 2, 1 / (2u)) gives P(X <= x) <= X_COMPLEMENT_BOUND sqrt(x), X_SURVIVAL_FLOOR keeps x^2 normal
X_COMPLEMENT_BOUND = 1.1
X_SURVIVAL_FLOOR = 1e-150

DEFAULT_CONTROL = EvalControl()


@dataclass(frozen=True)
class SeriesValue:
    """
    Value of a truncated series

    Params:
        value: Series value.
        terms_used: Number of terms that were summed.
        tail_bound: Bound on the truncation error. For alternating series with monotone terms it is the magnitude of
                    the first omitted term.
    """

    value: float
    terms_used: int
    tail_bound: float


def _sum_terms(term: Callable[[int], float], first: int, ctl: EvalControl, label: str) -> tuple[float, int, float]:
    """Sum term(first), term(first + 1), ... until the next term meets the tolerance of ctl"""
    total = 0.0
    k = first
    while True:
        total += term(k)
        next_term = term(k + 1)
        terms_used = k - first + 1
        if abs(next_term) <= ctl.target(total):
            return total, terms_used, abs(next_term)
        if terms_used >= ctl.max_terms:
            raise ConvergenceError(f"{label} did not converge within max_terms={ctl.max_terms}", partial_value=total)
        k += 1


def arcsine_pdf(x: float) -> float:
    """
    Density 1 / (pi sqrt(x (1 - x))) of the arcsine law, the law of the last zero g(1)

    Params:
        x: Point in the open interval (0, 1).

    Returns:
        The density at x.
    """
    check_open_unit("x", x)
    return 1.0 / (math.pi * math.sqrt(x * (1.0 - x)))


def arcsine_cdf(x: float) -> float:
    """
    Distribution function (2 / pi) arcsin(sqrt(x)) of the arcsine law, clamped to 0 below 0 and to 1 above 1

    Params:
        x: Any real number.

    Returns:
        P(g(1) <= x).
    """
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return 2.0 / math.pi * math.asin(math.sqrt(x))


def arcsine_quantile(p: float | np.ndarray) -> float | np.ndarray:
    """
    Inverse of arcsine_cdf: sin(pi p / 2)^2

    Params:
        p: Probability level(s) in [0, 1].

    Returns:
        The quantile(s) of the arcsine law.
    """
    return np.sin(0.5 * np.pi * p) ** 2


def ks_survival(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> SeriesValue:
    """
    Survival function of the Kolmogorov-Smirnov law, P(b* > x) = 2 sum_{k >= 1} (-1)^(k-1) exp(-2 k^2 x^2)

    For x below KS_BRANCH the alternating series converges slowly and the complement is computed with its theta
    transform P(b* <= x) = (sqrt(2 pi) / x) sum_{k >= 1} exp(-(2k - 1)^2 pi^2 / (8 x^2)).

    Params:
        x: Strictly positive level.
        ctl: Evaluation control.

    Returns:
        A SeriesValue with value in [0, 1].
    """
    check_positive("x", x)
    if x >= KS_BRANCH:
        value, terms_used, next_term = _sum_terms(
            lambda k: 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * x * x), 1, ctl, "Kolmogorov-Smirnov series"
        )
        return SeriesValue(value=min(max(value, 0.0), 1.0), terms_used=terms_used, tail_bound=next_term)

    if math.pi**2 / 8.0 > THETA_EXPONENT_LIMIT * x * x:
        return SeriesValue(value=1.0, terms_used=0, tail_bound=0.0)
    prefactor = SQRT_2PI / x
    complement, terms_used, next_term = _sum_terms(
        lambda k: prefactor * math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * x * x)),
        1,
        ctl,
        "Kolmogorov-Smirnov theta series",
    )
    # consecutive terms shrink at least by exp(-pi^2 / x^2)
    tail_bound = next_term / (1.0 - math.exp(-(math.pi**2) / (x * x)))
    return SeriesValue(value=min(max(1.0 - complement, 0.0), 1.0), terms_used=terms_used, tail_bound=tail_bound)


def ks_cdf(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    Distribution function P(b* <= x) of the Kolmogorov-Smirnov law, 0 for x <= 0

    Params:
        x: Any real level.
        ctl: Evaluation control.

    Returns:
        1 - ks_survival(x).
    """
    check_finite("x", x)
    if x <= 0.0:
        return 0.0
    return 1.0 - ks_survival(x, ctl).value


def F_gauss(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> SeriesValue:
    """
    F(x) = sqrt(2 / pi) sum_{k in Z} (exp(-2 k^2 x^2) - exp(-(2k + 1)^2 x^2 / 2))

    The sum is truncated symmetrically: term k >= 1 gathers the contributions of k and -k of the first family and of
    k and -(k + 1) of the second one.

    Params:
        x: Strictly positive level.
        ctl: Evaluation control.

    Returns:
        A SeriesValue with value in [0, sqrt(2 / pi)].
    """
    check_positive("x", x)
    x2 = x * x

    def term(k: int) -> float:
        if k == 0:
            return 1.0 - 2.0 * math.exp(-x2 / 2.0)
        return 2.0 * (math.exp(-2.0 * k * k * x2) - math.exp(-((2 * k + 1) ** 2) * x2 / 2.0))

    value, terms_used, next_term = _sum_terms(term, 0, ctl, "Gaussian series of F")
    tail_bound = SQRT_2_OVER_PI * next_term / (1.0 - math.exp(-2.0 * x2))
    value = min(max(SQRT_2_OVER_PI * value, 0.0), SQRT_2_OVER_PI)
    return SeriesValue(value=value, terms_used=terms_used, tail_bound=tail_bound)


def F_theta(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> SeriesValue:
    """
    F(x) = (4 / x) sum_{k >= 0} exp(-(2k + 1)^2 pi^2 / (2 x^2)), fast for small x

    Params:
        x: Strictly positive level.
        ctl: Evaluation control.

    Returns:
        A SeriesValue.
    """
    check_positive("x", x)
    if math.pi**2 / 2.0 > THETA_EXPONENT_LIMIT * x * x:
        return SeriesValue(value=0.0, terms_used=0, tail_bound=0.0)
    scale = math.pi**2 / (2.0 * x * x)
    value, terms_used, next_term = _sum_terms(
        lambda k: 4.0 / x * math.exp(-((2 * k + 1) ** 2) * scale), 0, ctl, "theta series of F"
    )
    # consecutive terms shrink at least by exp(-8 scale)
    tail_bound = next_term / (1.0 - math.exp(-8.0 * scale))
    return SeriesValue(value=value, terms_used=terms_used, tail_bound=tail_bound)


def F_value(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    F(x) using the theta form below F_BRANCH and the Gaussian form above, 0 for x <= 0

    Params:
        x: Any real level.
        ctl: Evaluation control.

    Returns:
        F(x).
    """
    check_finite("x", x)
    if x <= 0.0:
        return 0.0
    if x < F_BRANCH:
        return F_theta(x, ctl).value
    return F_gauss(x, ctl).value


def F_derivative(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    Term-wise derivative F'(x), theta form below F_BRANCH and Gaussian form above, 0 for x <= 0

    Params:
        x: Any real level.
        ctl: Evaluation control.

    Returns:
        F'(x) >= 0.
    """
    check_finite("x", x)
    if x <= 0.0:
        return 0.0
    x2 = x * x
    if x < F_BRANCH:
        if math.pi**2 / 2.0 > THETA_EXPONENT_LIMIT * x2:
            return 0.0

        def theta_term(k: int) -> float:
            c_k = (2 * k + 1) ** 2 * math.pi**2 / 2.0
            return 4.0 * math.exp(-c_k / x2) * (2.0 * c_k / (x2 * x2) - 1.0 / x2)

        value, _, _ = _sum_terms(theta_term, 0, ctl, "theta series of F'")
        return max(value, 0.0)

    def gauss_term(k: int) -> float:
        if k == 0:
            return 2.0 * x * math.exp(-x2 / 2.0)
        odd = (2 * k + 1) ** 2
        return 2.0 * (odd * x * math.exp(-odd * x2 / 2.0) - 4.0 * k * k * x * math.exp(-2.0 * k * k * x2))

    value, _, _ = _sum_terms(gauss_term, 0, ctl, "Gaussian series of F'")
    return max(SQRT_2_OVER_PI * value, 0.0)


def meander_max_cdf(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    Distribution function of the maximum of the Brownian meander, sqrt(pi / 2) F(x)

    Params:
        x: Any real level, the value is 0 for x <= 0.
        ctl: Evaluation control.

    Returns:
        P(max m <= x) in [0, 1].
    """
    return min(max(SQRT_PI_OVER_2 * F_value(x, ctl), 0.0), 1.0)


def A_direct(u: float, ctl: EvalControl = DEFAULT_CONTROL) -> SeriesValue:
    """
    Kernel A(u) = sum_{k >= 1} (-1)^(k-1) k / (k^2 + u) summed by consecutive pairs

    Pairing terms 2j - 1 and 2j gives an absolutely convergent series whose j-th term decays like 1 / (4 j^2). The
    pairs beyond J are replaced by the integral of the pair function from J + 1/2 to infinity,
    (1/4) log((4a^2 + u) / ((2a - 1)^2 + u)) with a = J + 1/2. J is doubled until two successive estimates agree
    within tolerance, their difference is reported as tail_bound.

    Params:
        u: Non-negative argument.
        ctl: Evaluation control, max_terms caps the number of original terms.

    Returns:
        A SeriesValue, A(0) = ln 2.
    """
    check_non_negative("u", u)

    def estimate(partial_sums: np.ndarray, pairs: int) -> float:
        a = pairs + 0.5
        tail = 0.25 * math.log1p((4.0 * a - 1.0) / ((2.0 * a - 1.0) ** 2 + u))
        return float(partial_sums[pairs - 1]) + tail

    pairs = _A_DIRECT_MIN_PAIRS + int(64.0 * math.sqrt(u))
    while True:
        if 4 * pairs > ctl.max_terms:
            raise ConvergenceError(f"Paired series of A({u}) did not converge within max_terms={ctl.max_terms}")
        odd = np.arange(1, 4 * pairs, 2, dtype=np.float64)
        even = odd + 1.0
        partial_sums = np.cumsum(odd / (odd * odd + u) - even / (even * even + u))
        coarse = estimate(partial_sums, pairs)
        fine = estimate(partial_sums, 2 * pairs)
        if abs(fine - coarse) <= ctl.target(fine):
            return SeriesValue(value=fine, terms_used=4 * pairs, tail_bound=abs(fine - coarse))
        pairs *= 2


def A_digamma(u: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    Kernel A(u) = (1/2) Re[psi(i sqrt(u) / 2) - psi((1 + i sqrt(u)) / 2)]

    The first digamma is evaluated as psi(1 + i sqrt(u) / 2): by the recurrence the two differ by 2 / (i sqrt(u)),
    which is purely imaginary, so the real part is unchanged and the pole at u = 0 is avoided. A(0) itself is taken
    from A_direct.

    From A_ASYMPTOTIC_THRESHOLD on, the two digamma values nearly cancel and the asymptotic series
    1 / (4u) + 1 / (8u^2) + 1 / (4u^3) + ... is summed instead.

    Params:
        u: Non-negative argument.
        ctl: Evaluation control.

    Returns:
        A(u).
    """
    check_non_negative("u", u)
    if u == 0.0:
        return A_direct(0.0, ctl).value
    if u >= A_ASYMPTOTIC_THRESHOLD:
        inv_u = 1.0 / u
        value = 0.0
        for coefficient in reversed(_A_ASYMPTOTIC_COEFFICIENTS):
            value = (value + coefficient) * inv_u
        return value
    half_root = 0.5 * math.sqrt(u)
    shifted = digamma_complex(complex(1.0, half_root), ctl)
    midpoint = digamma_complex(complex(0.5, half_root), ctl)
    return 0.5 * (shifted - midpoint).real


def x_survival(x: float, ctl: EvalControl = DEFAULT_CONTROL) -> QuadratureResult:
    """
    Survival function of X = b* sqrt(g(1) / (1 - g(1))): P(X > x) = (2 / pi) int_0^inf A(u) exp(-2 x^2 u) du / sqrt(u)

    The substitution u = w^2 / x^2 removes the 1 / sqrt(u) singularity and keeps the Gaussian factor at unit scale:
    P(X > x) = (4 / (pi x)) int_0^inf A(w^2 / x^2) exp(-2 w^2) dw.

    Since 0 < A(u) <= min(ln 2, 1 / (2u)), P(X <= x) <= X_COMPLEMENT_BOUND sqrt(x). Levels small enough for this bound
    to meet the tolerance return 1 without integrating.

    Params:
        x: Strictly positive level.
        ctl: Evaluation control.

    Returns:
        A QuadratureResult with value clamped to [0, 1].
    """
    check_positive("x", x)
    complement_bound = X_COMPLEMENT_BOUND * math.sqrt(x)
    if complement_bound <= ctl.target(1.0) or x <= X_SURVIVAL_FLOOR:
        return QuadratureResult(
            value=1.0, err_estimate=complement_bound, evals=0, converged=complement_bound <= ctl.target(1.0)
        )

    prefactor = 4.0 / (math.pi * x)
    inv_x2 = 1.0 / (x * x)

    def integrand(w: float) -> float:
        return prefactor * A_digamma(w * w * inv_x2, ctl) * math.exp(-2.0 * w * w)

    # the first truncation candidate is 1 / sqrt(2), beyond it A(w^2 / x^2) <= x^2
    result = integrate_semi_infinite(
        integrand,
        ctl,
        decay_hint=2.0,
        scale=prefactor * min(LN2, x * x),
        decay_power=2,
        origin_value=prefactor * LN2,
    )
    return QuadratureResult(
        value=min(max(result.value, 0.0), 1.0),
        err_estimate=result.err_estimate,
        evals=result.evals,
        converged=result.converged,
    )


def ks_survival_values(x: np.ndarray) -> np.ndarray:
    """
    Vectorized ks_survival for an array of strictly positive levels

    Params:
        x: Array of levels.

    Returns:
        Array of P(b* > x).
    """
    x = np.asarray(x, dtype=np.float64)
    k = np.arange(1, _VECTOR_TERMS + 1, dtype=np.float64)[:, None]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        signs = np.where(k % 2 == 1, 1.0, -1.0)
        alternating = 2.0 * np.sum(signs * np.exp(-2.0 * k * k * x * x), axis=0)
        complement = SQRT_2PI / x * np.sum(np.exp(-((2.0 * k - 1.0) ** 2) * np.pi**2 / (8.0 * x * x)), axis=0)
    survival = np.where(x >= KS_BRANCH, alternating, 1.0 - complement)
    return np.clip(survival, 0.0, 1.0)


def meander_max_cdf_values(x: np.ndarray) -> np.ndarray:
    """
    Vectorized meander_max_cdf for an array of strictly positive levels

    Params:
        x: Array of levels.

    Returns:
        Array of P(max m <= x).
    """
    x = np.asarray(x, dtype=np.float64)
    k = np.arange(0, _VECTOR_TERMS, dtype=np.float64)[:, None]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        theta = 4.0 / x * np.sum(np.exp(-((2.0 * k + 1.0) ** 2) * np.pi**2 / (2.0 * x * x)), axis=0)
        positive = k[1:]
        gauss = SQRT_2_OVER_PI * (
            1.0
            + 2.0 * np.sum(np.exp(-2.0 * positive * positive * x * x), axis=0)
            - 2.0 * np.sum(np.exp(-((2.0 * k + 1.0) ** 2) * x * x / 2.0), axis=0)
        )
    f_values = np.where(x < F_BRANCH, theta, gauss)
    return np.clip(SQRT_PI_OVER_2 * f_values, 0.0, 1.0)


def _bisect_quantiles(
    cdf: Callable[[np.ndarray], np.ndarray], p: np.ndarray, upper: float, ctl: EvalControl, label: str
) -> np.ndarray:
    """Bisection on arrays down to a bracket of width abs_tol followed by one secant step"""
    p = np.asarray(p, dtype=np.float64)
    lower_x = np.zeros_like(p)
    upper_x = np.full_like(p, upper)
    lower_f = np.zeros_like(p)
    upper_f = np.ones_like(p)

    iterations = math.ceil(math.log2(upper / ctl.abs_tol))
    if iterations > ctl.max_evals:
        raise ConvergenceError(f"{label} quantile needs {iterations} bisections, above max_evals={ctl.max_evals}")
    for _ in range(iterations):
        middle_x = 0.5 * (lower_x + upper_x)
        middle_f = cdf(middle_x)
        below = middle_f < p
        lower_x = np.where(below, middle_x, lower_x)
        lower_f = np.where(below, middle_f, lower_f)
        upper_x = np.where(below, upper_x, middle_x)
        upper_f = np.where(below, upper_f, middle_f)

    span = upper_f - lower_f
    with np.errstate(divide="ignore", invalid="ignore"):
        secant = lower_x + (p - lower_f) * (upper_x - lower_x) / span
    midpoint = 0.5 * (lower_x + upper_x)
    usable = (span > 0) & (secant >= lower_x) & (secant <= upper_x)
    return np.where(usable, secant, midpoint)


def ks_quantiles(p: np.ndarray, ctl: EvalControl = DEFAULT_CONTROL) -> np.ndarray:
    """
    Vectorized inverse of the Kolmogorov-Smirnov distribution function

    Params:
        p: Array of probability levels in [0, 1).
        ctl: Evaluation control, abs_tol sets the bracket width.

    Returns:
        Array of x with P(b* <= x) = p.
    """
    return _bisect_quantiles(lambda x: 1.0 - ks_survival_values(x), p, KS_QUANTILE_UPPER, ctl, "Kolmogorov-Smirnov")


def meander_max_quantiles(p: np.ndarray, ctl: EvalControl = DEFAULT_CONTROL) -> np.ndarray:
    """
    Vectorized inverse of meander_max_cdf

    Params:
        p: Array of probability levels in [0, 1).
        ctl: Evaluation control, abs_tol sets the bracket width.

    Returns:
        Array of x with P(max m <= x) = p.
    """
    return _bisect_quantiles(meander_max_cdf_values, p, MEANDER_QUANTILE_UPPER, ctl, "meander maximum")


def ks_quantile(p: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    Inverse of the Kolmogorov-Smirnov distribution function

    Example:
        ```python
        ks_quantile(0.5)  # 0.8275735551899077, the median of b*
        ```

    Params:
        p: Probability level in (0, 1).
        ctl: Evaluation control.

    Returns:
        x with |ks_survival(x) - (1 - p)| <= abs_tol.
    """
    check_open_unit("p", p)
    return float(ks_quantiles(np.array([p]), ctl)[0])


def meander_max_quantile(p: float, ctl: EvalControl = DEFAULT_CONTROL) -> float:
    """
    Inverse of meander_max_cdf

    Params:
        p: Probability level in (0, 1).
        ctl: Evaluation control.

    Returns:
        x with |meander_max_cdf(x) - p| <= abs_tol.
    """
    check_open_unit("p", p)
    return float(meander_max_quantiles(np.array([p]), ctl)[0])

