"""
Adaptive Gauss-Kronrod quadrature on semi-infinite and whole-line domains

Integrands are expected to decay at least like scale * exp(-c u^p) with known c (decay_hint) and p in {1, 2}. The
domain is truncated where the envelope tail falls below abs_tol / 2 and the tail bound is added to the reported
error, the truncated interval is handled by globally adaptive bisection with a 7/15 point Gauss-Kronrod pair.
"""

import heapq
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

from excursion_max.check_utils import check_positive
from excursion_max.eval_conf import EvalControl
from excursion_max.exceptions import ConvergenceError, DomainError, IntegrandError

logger = logging.getLogger(__name__)

Integrand = Callable[[float], float]

# Kronrod abscissae on [0, 1], the odd positions are the 7-point Gauss abscissae
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

EVALS_PER_PANEL = 15
INITIAL_PANELS = 8
MAX_TRUNCATION_DOUBLINGS = 200


@dataclass(frozen=True)
class QuadratureResult:
    """
    Value of one integral with its error accounting

    Params:
        value: Integral estimate.
        err_estimate: Error estimate, Kronrod-Gauss differences of every panel plus the truncated tail bound.
        evals: Number of integrand evaluations.
        converged: Whether err_estimate meets max(abs_tol, rel_tol * |value|).
    """

    value: float
    err_estimate: float
    evals: int
    converged: bool

    def raise_if_unconverged(self, label: str = "integral") -> "QuadratureResult":
        """
        Raise ConvergenceError unless the result converged

        Params:
            label: Name of the integral used in the error message.

        Returns:
            The result itself, so the call can be chained.
        """
        if not self.converged:
            raise ConvergenceError(
                f"Quadrature of {label} did not converge after {self.evals} evaluations: "
                f"value={self.value}, err_estimate={self.err_estimate}",
                partial_value=self.value,
            )
        return self


def envelope_tail(cutoff: float, decay_hint: float, scale: float = 1.0, decay_power: int = 1) -> float:
    """
    Integral over [cutoff, inf) of the envelope scale * exp(-decay_hint * u^decay_power)

    Params:
        cutoff: Non-negative truncation point.
        decay_hint: Strictly positive decay rate c.
        scale: Envelope amplitude.
        decay_power: 1 for exponential envelopes, 2 for Gaussian ones.

    Returns:
        The tail mass of the envelope.
    """
    if decay_power == 1:
        return scale * math.exp(-decay_hint * cutoff) / decay_hint
    if decay_power == 2:
        root_c = math.sqrt(decay_hint)
        return scale * math.sqrt(math.pi) / (2.0 * root_c) * math.erfc(root_c * cutoff)
    raise DomainError(f"Invalid decay_power: {decay_power}. Valid powers are: [1, 2]")


def truncation_point(ctl: EvalControl, decay_hint: float, scale: float = 1.0, decay_power: int = 1) -> float:
    """
    Smallest cutoff of the form 2^k / decay_hint^(1/decay_power) whose envelope tail is below abs_tol / 2

    Params:
        ctl: Evaluation control.
        decay_hint: Strictly positive decay rate c.
        scale: Envelope amplitude.
        decay_power: 1 for exponential envelopes, 2 for Gaussian ones.

    Returns:
        The truncation point T.
    """
    cutoff = decay_hint ** (-1.0 / decay_power)
    for _ in range(MAX_TRUNCATION_DOUBLINGS):
        if envelope_tail(cutoff, decay_hint, scale, decay_power) < ctl.abs_tol / 2.0:
            return cutoff
        cutoff *= 2.0
    raise ConvergenceError(f"No truncation point found for decay_hint={decay_hint}, scale={scale}")


def _checked(f: Integrand, origin_value: float | None) -> Integrand:
    def wrapped(u: float) -> float:
        if u == 0.0 and origin_value is not None:
            return origin_value
        value = f(u)
        if not math.isfinite(value):
            raise IntegrandError(f"Integrand returned {value} at u={u}")
        return value

    return wrapped


def gauss_kronrod_panel(f: Integrand, a: float, b: float) -> tuple[float, float]:
    """
    Apply the 7/15 point Gauss-Kronrod pair on [a, b]

    Params:
        f: Integrand.
        a: Lower bound.
        b: Upper bound.

    Returns:
        The Kronrod estimate and the absolute Kronrod-Gauss difference.
    """
    center = 0.5 * (a + b)
    half_width = 0.5 * (b - a)
    f_center = f(center)
    kronrod = _WGK[7] * f_center
    gauss = _WG[3] * f_center
    for j in range(7):
        offset = half_width * _XGK[j]
        pair_sum = f(center - offset) + f(center + offset)
        kronrod += _WGK[j] * pair_sum
        if j % 2 == 1:
            gauss += _WG[j // 2] * pair_sum
    return kronrod * half_width, abs(kronrod - gauss) * half_width


def integrate_interval(f: Integrand, a: float, b: float, ctl: EvalControl, tail_error: float = 0.0) -> QuadratureResult:
    """
    Globally adaptive integration of f over the finite interval [a, b]

    The panel with the largest error is bisected until the summed error (plus tail_error) meets the tolerance of
    ctl, or until max_evals would be exceeded.

    Params:
        f: Integrand, finite on (a, b).
        a: Lower bound.
        b: Upper bound, greater than a.
        ctl: Evaluation control.
        tail_error: Error already committed outside [a, b], added to the reported error.

    Returns:
        A QuadratureResult, with converged=False when max_evals was exhausted.
    """
    if not b > a:
        raise DomainError(f"Invalid interval [{a}, {b}]. Upper bound must be greater than lower bound")

    if ctl.max_evals < EVALS_PER_PANEL:
        logger.debug("Quadrature on [%g, %g] skipped, max_evals=%d is below one panel", a, b, ctl.max_evals)
        return QuadratureResult(value=0.0, err_estimate=math.inf, evals=0, converged=False)

    initial_panels = min(INITIAL_PANELS, ctl.max_evals // EVALS_PER_PANEL)
    panel_width = (b - a) / initial_panels
    heap = []
    for idx in range(initial_panels):
        left = a + idx * panel_width
        right = b if idx == initial_panels - 1 else left + panel_width
        value, error = gauss_kronrod_panel(f, left, right)
        heap.append((-error, left, right, value))
    heapq.heapify(heap)
    evals = initial_panels * EVALS_PER_PANEL

    while True:
        total = math.fsum(item[3] for item in heap)
        err_estimate = math.fsum(-item[0] for item in heap) + tail_error
        if err_estimate <= ctl.target(total):
            logger.debug("Quadrature on [%g, %g] converged with %d panels, %d evals", a, b, len(heap), evals)
            return QuadratureResult(value=total, err_estimate=err_estimate, evals=evals, converged=True)
        if evals + 2 * EVALS_PER_PANEL > ctl.max_evals:
            logger.debug("Quadrature on [%g, %g] stopped at max_evals=%d", a, b, ctl.max_evals)
            return QuadratureResult(value=total, err_estimate=err_estimate, evals=evals, converged=False)

        _, left, right, _ = heapq.heappop(heap)
        middle = 0.5 * (left + right)
        for sub_left, sub_right in ((left, middle), (middle, right)):
            value, error = gauss_kronrod_panel(f, sub_left, sub_right)
            heapq.heappush(heap, (-error, sub_left, sub_right, value))
        evals += 2 * EVALS_PER_PANEL


def integrate_semi_infinite(
    f: Integrand,
    ctl: EvalControl,
    decay_hint: float,
    *,
    scale: float = 1.0,
    decay_power: int = 1,
    origin_value: float | None = None,
) -> QuadratureResult:
    """
    Integrate f over (0, inf)

    Example:
        ```python
        result = integrate_semi_infinite(lambda u: math.exp(-u), EvalControl(), decay_hint=1.0)
        result.value  # 1.0
        ```

    Params:
        f: Integrand, finite on (0, inf) and bounded by scale * exp(-decay_hint * u^decay_power) far from 0.
        ctl: Evaluation control.
        decay_hint: Decay rate c of the envelope.
        scale: Amplitude of the envelope.
        decay_power: 1 for exponential envelopes, 2 for Gaussian ones.
        origin_value: Guard value returned if f is ever called at u = 0. Gauss-Kronrod nodes are interior to every
            panel, so integrands with a removable singularity at 0 are never evaluated there.

    Returns:
        A QuadratureResult whose err_estimate includes the truncated tail bound.
    """
    check_positive("decay_hint", decay_hint)
    check_positive("scale", scale)
    cutoff = truncation_point(ctl, decay_hint, scale, decay_power)
    tail_error = envelope_tail(cutoff, decay_hint, scale, decay_power)
    return integrate_interval(_checked(f, origin_value), 0.0, cutoff, ctl, tail_error=tail_error)


def integrate_real_line(
    f: Integrand,
    ctl: EvalControl,
    decay_hint: float,
    *,
    scale: float = 1.0,
    decay_power: int = 1,
    origin_value: float | None = None,
) -> QuadratureResult:
    """
    Integrate f over the whole real line

    Both half-lines are integrated separately with the same symmetric truncation, each half receiving half of the
    evaluation budget and of the absolute tolerance.

    Params:
        f: Integrand, bounded by scale * exp(-decay_hint * |x|^decay_power) far from 0.
        ctl: Evaluation control.
        decay_hint: Decay rate c of the envelope.
        scale: Amplitude of the envelope.
        decay_power: 1 for exponential envelopes, 2 for Gaussian ones.
        origin_value: Guard value returned if f is ever called at x = 0, see integrate_semi_infinite.

    Returns:
        A QuadratureResult whose err_estimate includes both tail bounds.
    """
    half_ctl = ctl.replace(abs_tol=ctl.abs_tol / 2.0, max_evals=max(1, ctl.max_evals // 2))
    right = integrate_semi_infinite(
        f, half_ctl, decay_hint, scale=scale, decay_power=decay_power, origin_value=origin_value
    )
    left = integrate_semi_infinite(
        lambda x: f(-x), half_ctl, decay_hint, scale=scale, decay_power=decay_power, origin_value=origin_value
    )
    value = left.value + right.value
    err_estimate = left.err_estimate + right.err_estimate
    return QuadratureResult(
        value=value,
        err_estimate=err_estimate,
        evals=left.evals + right.evals,
        converged=err_estimate <= ctl.target(value),
    )
