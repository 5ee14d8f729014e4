"""
Routes to p_c, the probability that the maximum of reflected Brownian motion is reached on a complete excursion

    r1  closed form            psi(1/4) - psi(1/2) + 1 + pi/2
    r2  single integral        8 int_0^inf u A(u^2) / sinh(2 pi u) du
    r3  expectation            sqrt(pi/2) E[F(b* sqrt(g / (1 - g)))] = sqrt(pi/2) int_0^inf F'(x) P(X > x) dx
    r4  discrete Monte Carlo   p_c^(n) for a long random walk
    r5  continuous Monte Carlo exact laws of (g(1), b*, max m)
    r6  split integrals        I_2 - I_1 with I_k = 2 int_0^inf v F_k(v) / sinh(2 pi v) dv

The endpoint value alpha(0+) = (i / 2 pi)(pi/2 - 1) is checked through its real integral and recombined as
psi(1/4) - psi(1/2) + 2 + 2 pi alpha.
"""

import logging
import math
import time
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from typing import Any

from excursion_max.distributions import LN2, SQRT_PI_OVER_2, A_digamma, F_derivative, x_survival
from excursion_max.eval_conf import EvalControl, WalkConfig
from excursion_max.exceptions import ExcursionMaxError
from excursion_max.path_engine import SAMPLING_CONTROL, McEstimate, estimate_pc_n, sample_continuous_event
from excursion_max.quadrature import QuadratureResult, integrate_real_line, integrate_semi_infinite
from excursion_max.specfun import EULER_GAMMA, digamma_complex, digamma_real

logger = logging.getLogger(__name__)

ANALYTIC_CONTROL = EvalControl(rel_tol=1e-10)

SINH_DECAY = 2.0 * math.pi
# Envelopes of the sinh kernels use half the 2 pi rate so the linear factor u is absorbed in the amplitude,
# they hold from the first candidate truncation point 1 / pi on.
LEMMA_ENVELOPE = (math.pi, 1.35)
SPLIT_ENVELOPE = (math.pi, 4.0)
# tanh(pi x) / sinh(4 pi x) <= 2.32 exp(-4 pi |x|) for |x| >= 1 / (4 pi)
ALPHA_ENVELOPE = (4.0 * math.pi, 2.32)
# sqrt(pi/2) F'(x) <= 1.8 exp(-x^2 / 4)
EXPECTATION_ENVELOPE = (0.25, 1.8)

ALPHA_EXPECTED = (math.pi / 2.0 - 1.0) / (2.0 * math.pi)


def pc_closed_form(ctl: EvalControl = ANALYTIC_CONTROL) -> float:
    """
    p_c = psi(1/4) - psi(1/2) + 1 + pi/2

    The expression simplifies to 1 - ln 2, that identity is only used as a cross-check of the digamma evaluator.

    Params:
        ctl: Evaluation control of the digamma evaluations.

    Returns:
        p_c, approximately 0.3069.
    """
    return digamma_real(0.25, ctl) - digamma_real(0.5, ctl) + 1.0 + math.pi / 2.0


def lemma_integrand(u: float, ctl: EvalControl = ANALYTIC_CONTROL) -> float:
    """8 u A(u^2) / sinh(2 pi u) for u > 0, its limit at 0 is 4 ln 2 / pi"""
    if u == 0.0:
        return 4.0 * LN2 / math.pi
    return 8.0 * u * A_digamma(u * u, ctl) / math.sinh(SINH_DECAY * u)


def pc_lemma_integral(ctl: EvalControl = ANALYTIC_CONTROL) -> QuadratureResult:
    """
    p_c = 8 int_0^inf u A(u^2) / sinh(2 pi u) du

    Params:
        ctl: Evaluation control of the quadrature and of the digamma evaluations.

    Returns:
        A QuadratureResult.
    """
    decay, scale = LEMMA_ENVELOPE
    return integrate_semi_infinite(
        lambda u: lemma_integrand(u, ctl),
        ctl,
        decay_hint=decay,
        scale=scale,
        origin_value=4.0 * LN2 / math.pi,
    )


def pc_expectation(
    ctl: EvalControl = ANALYTIC_CONTROL, survival: Callable[[float], float] | None = None
) -> QuadratureResult:
    """
    p_c = sqrt(pi/2) E[F(X)] with X = b* sqrt(g(1) / (1 - g(1)))

    Since F(0+) = 0 and F is bounded, E[F(X)] = int_0^inf F'(x) P(X > x) dx. The survival function is itself an
    integral (see x_survival), so the route is a nested pair of one-dimensional quadratures.

    Params:
        ctl: Evaluation control of both quadrature levels.
        survival: Replacement of x -> P(X > x). By default, x_survival is used.

    Returns:
        A QuadratureResult.
    """
    if survival is None:

        def survival(x: float) -> float:
            return x_survival(x, ctl).raise_if_unconverged(f"P(X > {x})").value

    def integrand(x: float) -> float:
        slope = F_derivative(x, ctl)
        if slope == 0.0:
            return 0.0
        return SQRT_PI_OVER_2 * slope * survival(x)

    decay, scale = EXPECTATION_ENVELOPE
    return integrate_semi_infinite(
        integrand, ctl, decay_hint=decay, scale=scale, decay_power=2, origin_value=0.0
    )


def alpha_integrand(x: float) -> float:
    """tanh(pi x) / sinh(4 pi x), its limit at 0 is 1/4"""
    if x == 0.0:
        return 0.25
    if abs(x) > 50.0:
        return 0.0
    return math.tanh(math.pi * x) / math.sinh(4.0 * math.pi * x)


def alpha_check(ctl: EvalControl = ANALYTIC_CONTROL) -> QuadratureResult:
    """
    Real value of alpha(0+) / i = int_R tanh(pi x) / sinh(4 pi x) dx, expected to be (pi/2 - 1) / (2 pi)

    Params:
        ctl: Evaluation control of the quadrature.

    Returns:
        A QuadratureResult.
    """
    decay, scale = ALPHA_ENVELOPE
    return integrate_real_line(alpha_integrand, ctl, decay_hint=decay, scale=scale, origin_value=0.25)


def alpha_reconstruction(alpha_real: float, ctl: EvalControl = ANALYTIC_CONTROL) -> float:
    """
    p_c = psi(1/4) - psi(1/2) + 2 - 2 pi i alpha(0+) = psi(1/4) - psi(1/2) + 2 + 2 pi alpha_real

    Params:
        alpha_real: Real value of alpha(0+) / i, as returned by alpha_check.
        ctl: Evaluation control of the digamma evaluations.

    Returns:
        The reconstructed p_c.
    """
    return digamma_real(0.25, ctl) - digamma_real(0.5, ctl) + 2.0 + 2.0 * math.pi * alpha_real


def _split_integral(weight: Callable[[float], float], origin_value: float, ctl: EvalControl) -> QuadratureResult:
    decay, scale = SPLIT_ENVELOPE
    return integrate_semi_infinite(
        lambda v: 2.0 * v * weight(v) / math.sinh(SINH_DECAY * v),
        ctl,
        decay_hint=decay,
        scale=scale,
        origin_value=origin_value,
    )


def pc_split_integrals(ctl: EvalControl = ANALYTIC_CONTROL) -> QuadratureResult:
    """
    p_c = I_2 - I_1 with I_k = 2 int_0^inf v F_k(v) / sinh(2 pi v) dv

    F_1(v) = psi((1 + iv) / 2) + psi((1 - iv) / 2) = 2 Re psi((1 + iv) / 2) and
    F_2(v) = psi(iv / 2) + psi(-iv / 2) = 2 Re psi(1 + iv / 2), whose value at 0 is -2 gamma.

    Params:
        ctl: Evaluation control of the quadratures and of the digamma evaluations.

    Returns:
        A QuadratureResult combining both integrals.
    """
    # both parts are larger than their difference, they get a tighter tolerance
    part_ctl = ctl.tightened(10.0)
    i_1 = _split_integral(
        lambda v: 2.0 * digamma_complex(complex(0.5, 0.5 * v), ctl).real,
        2.0 * digamma_real(0.5, ctl) / math.pi,
        part_ctl,
    )
    i_2 = _split_integral(
        lambda v: 2.0 * digamma_complex(complex(1.0, 0.5 * v), ctl).real,
        -2.0 * EULER_GAMMA / math.pi,
        part_ctl,
    )
    value = i_2.value - i_1.value
    err_estimate = i_1.err_estimate + i_2.err_estimate
    return QuadratureResult(
        value=value,
        err_estimate=err_estimate,
        evals=i_1.evals + i_2.evals,
        converged=i_1.converged and i_2.converged and err_estimate <= ctl.target(value),
    )


@dataclass
class PcReport:
    """
    Cross-validation report of the routes to p_c

    Routes that failed are left to None and listed in failures with their error message.

    Params:
        r1_closed_form: Closed form value.
        r2_lemma_integral: Single integral route.
        r3_expectation: Expectation route.
        r4_monte_carlo: Discrete random walk estimate of p_c^(n), None when Monte Carlo was not requested.
        r5_continuous_mc: Continuous law estimate, None when Monte Carlo was not requested.
        r6_split_integrals: I_2 - I_1 route.
        alpha_check: Real value of alpha(0+) / i.
        alpha_reconstruction: psi(1/4) - psi(1/2) + 2 + 2 pi alpha.
        max_analytic_discrepancy: max(|r1 - r2|, |r1 - r3|) over the available routes.
        failures: Route name to error message.
    """

    r1_closed_form: float | None = None
    r2_lemma_integral: QuadratureResult | None = None
    r3_expectation: QuadratureResult | None = None
    r4_monte_carlo: McEstimate | None = None
    r5_continuous_mc: McEstimate | None = None
    r6_split_integrals: QuadratureResult | None = None
    alpha_check: QuadratureResult | None = None
    alpha_reconstruction: float | None = None
    max_analytic_discrepancy: float | None = None
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    def to_dict(self) -> dict[str, Any]:
        """
        Plain dictionary of the report, nested results included

        Returns:
            A JSON compatible dictionary.
        """
        report_dict = asdict(self)
        report_dict["partial"] = self.partial
        return report_dict


def _run_route(report: PcReport, name: str, route: Callable[[], Any]) -> Any:
    started = time.perf_counter()
    try:
        value = route()
    except ExcursionMaxError as exc:
        logger.warning("Route %s failed: %s", name, exc)
        report.failures[name] = str(exc)
        return None
    if isinstance(value, QuadratureResult) and not value.converged:
        logger.warning("Route %s did not converge: err_estimate=%g", name, value.err_estimate)
        report.failures[name] = f"quadrature did not converge, err_estimate={value.err_estimate}"
    logger.info("Route %s done in %.2fs", name, time.perf_counter() - started)
    return value


def build_report(
    cfg: WalkConfig | None = None, mc_paths: int | None = None, ctl: EvalControl = ANALYTIC_CONTROL
) -> PcReport:
    """
    Run every route to p_c and gather them in a PcReport

    Analytic routes run first, Monte Carlo routes are skipped when one of them failed.

    Params:
        cfg: Configuration of the discrete walk route. None skips both Monte Carlo routes.
        mc_paths: Number of samples of the continuous law route. By default, cfg.paths.
        ctl: Evaluation control of the analytic routes.

    Returns:
        A PcReport, partial when a route failed.
    """
    report = PcReport()
    report.r1_closed_form = _run_route(report, "r1_closed_form", lambda: pc_closed_form(ctl))
    report.r2_lemma_integral = _run_route(report, "r2_lemma_integral", lambda: pc_lemma_integral(ctl))
    report.r3_expectation = _run_route(report, "r3_expectation", lambda: pc_expectation(ctl))
    report.r6_split_integrals = _run_route(report, "r6_split_integrals", lambda: pc_split_integrals(ctl))
    report.alpha_check = _run_route(report, "alpha_check", lambda: alpha_check(ctl))
    if report.alpha_check is not None:
        report.alpha_reconstruction = _run_route(
            report, "alpha_reconstruction", lambda: alpha_reconstruction(report.alpha_check.value, ctl)
        )

    if report.r1_closed_form is not None:
        discrepancies = [
            abs(report.r1_closed_form - route.value)
            for route in (report.r2_lemma_integral, report.r3_expectation)
            if route is not None
        ]
        if discrepancies:
            report.max_analytic_discrepancy = max(discrepancies)

    if cfg is None:
        return report
    if report.partial:
        logger.warning("Skipping Monte Carlo routes after analytic failures: %s", sorted(report.failures))
        return report

    report.r4_monte_carlo = _run_route(report, "r4_monte_carlo", lambda: estimate_pc_n(cfg))
    samples = cfg.paths if mc_paths is None else mc_paths
    report.r5_continuous_mc = _run_route(
        report,
        "r5_continuous_mc",
        lambda: sample_continuous_event(samples, cfg.seed, SAMPLING_CONTROL, cfg.workers),
    )
    return report
