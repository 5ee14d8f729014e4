"""
Identity suites run by `excursion-max verify`

Each suite compares two independent evaluations of the same quantity and returns one IdentityCheck per identity.
"""

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from excursion_max.distributions import LN2, A_digamma, A_direct, F_gauss, F_theta, x_survival
from excursion_max.eval_conf import EvalControl
from excursion_max.exceptions import VerificationError
from excursion_max.path_engine import ORACLE_STREAM, SAMPLING_CONTROL, block_generator, draw_excursion_triples
from excursion_max.pc_routes import (
    ALPHA_EXPECTED,
    ANALYTIC_CONTROL,
    alpha_check,
    alpha_reconstruction,
    pc_closed_form,
    pc_expectation,
    pc_lemma_integral,
    pc_split_integrals,
)
from excursion_max.specfun import digamma_complex, digamma_real, digamma_series

logger = logging.getLogger(__name__)

F_GRID = (0.3, 5.0)
A_GRID = (1e-3, 1e3)
GRID_POINTS = 200
F_TOLERANCE = 1e-12
A_TOLERANCE = 1e-10
FAULT_PERTURBATION = 1e-6

ORACLE_ARGUMENTS = (0.25, 0.5, 1.0, 3.7, complex(0.5, 2.0), complex(1.0, 0.5), complex(10.0, 5.0))
ORACLE_TERMS = 1_000_000
ORACLE_TOLERANCE = 1e-8

SURVIVAL_LEVELS = (0.25, 0.5, 1.0, 1.5, 2.5)
SURVIVAL_SAMPLES = 100_000


@dataclass(frozen=True)
class IdentityCheck:
    """
    Outcome of one identity

    Params:
        name: Identity name.
        tolerance: Largest deviation accepted.
        deviation: Largest deviation observed.
        passed: Whether deviation <= tolerance.
    """

    name: str
    tolerance: float
    deviation: float
    passed: bool

    @classmethod
    def compare(cls, name: str, deviation: float, tolerance: float) -> "IdentityCheck":
        # numpy scalars from the grids are not serializable
        deviation = float(deviation)
        tolerance = float(tolerance)
        passed = bool(math.isfinite(deviation) and deviation <= tolerance)
        log = logger.info if passed else logger.warning
        log("%s: deviation=%.3e tolerance=%.1e %s", name, deviation, tolerance, "passed" if passed else "FAILED")
        return cls(name=name, tolerance=tolerance, deviation=deviation, passed=passed)


def check_F_identity(ctl: EvalControl = ANALYTIC_CONTROL, points: int = GRID_POINTS) -> IdentityCheck:
    """Gaussian and theta series of F on log-spaced x in [0.3, 5]"""
    ctl = ctl.replace(rel_tol=min(ctl.rel_tol, 1e-14), abs_tol=min(ctl.abs_tol, 1e-16))
    grid = np.geomspace(*F_GRID, points)
    deviation = max(abs(F_gauss(x, ctl).value - F_theta(x, ctl).value) for x in grid)
    return IdentityCheck.compare("F gaussian vs theta series", deviation, F_TOLERANCE)


def check_A_identity(
    ctl: EvalControl = ANALYTIC_CONTROL, points: int = GRID_POINTS, a_perturbation: float = 0.0
) -> IdentityCheck:
    """
    Paired series and digamma forms of A on log-spaced u in [1e-3, 1e3]

    Params:
        ctl: Evaluation control of both forms.
        points: Number of grid points.
        a_perturbation: Offset added to the digamma form, a negative control for the suite.

    Returns:
        An IdentityCheck.
    """
    series_ctl = ctl.tightened(100.0)
    grid = np.geomspace(*A_GRID, points)
    deviation = max(abs(A_direct(u, series_ctl).value - (A_digamma(u, ctl) + a_perturbation)) for u in grid)
    return IdentityCheck.compare("A paired series vs digamma", deviation, A_TOLERANCE)


def check_digamma_recurrence(ctl: EvalControl = ANALYTIC_CONTROL, samples: int = 1000, seed: int = 0) -> IdentityCheck:
    """
    psi(z + 1) - psi(z) = 1/z on random real x in (0.1, 50) and complex z with |Im z| in (0.1, 50)

    The deviation is the worst ratio of the residual to ctl.target(psi(z + 1)), the tolerance is 10.
    """
    rng = block_generator(seed, ORACLE_STREAM, 1)
    reals = rng.uniform(0.1, 50.0, samples)
    imags = rng.uniform(0.1, 50.0, samples) * rng.choice((-1.0, 1.0), samples)
    ratio = 0.0
    for x in reals:
        upper = digamma_real(x + 1.0, ctl)
        ratio = max(ratio, abs(upper - digamma_real(x, ctl) - 1.0 / x) / ctl.target(upper))
    for x, y in zip(reals, imags, strict=True):
        z = complex(x, y)
        upper = digamma_complex(z + 1.0, ctl)
        ratio = max(ratio, abs(upper - digamma_complex(z, ctl) - 1.0 / z) / ctl.target(abs(upper)))
    return IdentityCheck.compare("digamma recurrence", ratio, 10.0)


def check_digamma_reflection(ctl: EvalControl = ANALYTIC_CONTROL, samples: int = 1000, seed: int = 0) -> IdentityCheck:
    """
    psi(1/2 + z) - psi(1/2 - z) = pi tan(pi z) on random z with |Re z| < 1/4 and |Im z| < 5

    The deviation is the worst ratio of the residual to ctl.target(pi tan(pi z)), the tolerance is 10.
    """
    rng = block_generator(seed, ORACLE_STREAM, 2)
    reals = rng.uniform(-0.25, 0.25, samples)
    imags = rng.uniform(-5.0, 5.0, samples)
    ratio = 0.0
    for x, y in zip(reals, imags, strict=True):
        z = complex(x, y)
        expected = math.pi * cmath.tan(math.pi * z)
        residual = digamma_complex(0.5 + z, ctl) - digamma_complex(0.5 - z, ctl) - expected
        ratio = max(ratio, abs(residual) / ctl.target(abs(expected)))
    return IdentityCheck.compare("digamma reflection", ratio, 10.0)


def check_digamma_oracle(ctl: EvalControl = ANALYTIC_CONTROL, terms: int = ORACLE_TERMS) -> IdentityCheck:
    """Fast digamma against the partial-fraction series with a tail correction"""
    deviation = max(abs(digamma_complex(z, ctl) - digamma_series(z, terms)) for z in ORACLE_ARGUMENTS)
    return IdentityCheck.compare("digamma vs partial-fraction series", deviation, ORACLE_TOLERANCE)


def check_x_survival_mc(
    ctl: EvalControl = ANALYTIC_CONTROL, samples: int = SURVIVAL_SAMPLES, seed: int = 0
) -> IdentityCheck:
    """
    Survival of X = b* sqrt(g / (1 - g)) by quadrature against the empirical survival of sampled triples

    The tolerance 2 / sqrt(samples) is four binomial standard errors at p = 1/2.
    """
    rng = block_generator(seed, ORACLE_STREAM, 0)
    g, b_star, _ = draw_excursion_triples(rng, samples, SAMPLING_CONTROL)
    with np.errstate(divide="ignore"):
        x_samples = b_star * np.sqrt(g / (1.0 - g))
    deviation = 0.0
    for x in SURVIVAL_LEVELS:
        analytic = x_survival(x, ctl).raise_if_unconverged(f"P(X > {x})").value
        empirical = np.count_nonzero(x_samples > x) / samples
        deviation = max(deviation, abs(analytic - empirical))
    return IdentityCheck.compare("X survival vs Monte Carlo", deviation, 2.0 / math.sqrt(samples))


def check_alpha(ctl: EvalControl = ANALYTIC_CONTROL) -> list[IdentityCheck]:
    """alpha(0+) against (pi/2 - 1) / (2 pi), and p_c rebuilt from it against the closed form"""
    alpha = alpha_check(ctl).raise_if_unconverged("alpha(0+)").value
    closed_form = pc_closed_form(ctl)
    return [
        IdentityCheck.compare("alpha(0+) value", abs(alpha - ALPHA_EXPECTED), 1e-10),
        IdentityCheck.compare("p_c from alpha(0+)", abs(alpha_reconstruction(alpha, ctl) - closed_form), 1e-10),
    ]


def check_route_agreement(ctl: EvalControl = ANALYTIC_CONTROL) -> list[IdentityCheck]:
    """Analytic routes to p_c against the closed form, and the closed form against 1 - ln 2"""
    closed_form = pc_closed_form(ctl)
    lemma = pc_lemma_integral(ctl).raise_if_unconverged("single integral route").value
    split = pc_split_integrals(ctl).raise_if_unconverged("split integral route").value
    expectation = pc_expectation(ctl).raise_if_unconverged("expectation route").value
    return [
        IdentityCheck.compare("closed form vs 1 - ln 2", abs(closed_form - (1.0 - LN2)), 1e-10),
        IdentityCheck.compare("single integral route", abs(lemma - closed_form), 1e-8),
        IdentityCheck.compare("split integral route", abs(split - closed_form), 1e-8),
        IdentityCheck.compare("expectation route", abs(expectation - closed_form), 1e-6),
    ]


def run_identity_suites(
    ctl: EvalControl = ANALYTIC_CONTROL, seed: int = 0, inject_fault: bool = False
) -> list[IdentityCheck]:
    """
    Run every identity suite

    Params:
        ctl: Evaluation control of the analytic evaluations.
        seed: Seed of the random arguments and of the Monte Carlo oracle.
        inject_fault: Whether to perturb A by 1e-6 in the kernel identity, which must then fail.

    Returns:
        The list of IdentityCheck, in a stable order.
    """
    checks = [
        check_digamma_recurrence(ctl, seed=seed),
        check_digamma_reflection(ctl, seed=seed),
        check_digamma_oracle(ctl),
        check_F_identity(ctl),
        check_A_identity(ctl, a_perturbation=FAULT_PERTURBATION if inject_fault else 0.0),
        check_x_survival_mc(ctl, seed=seed),
    ]
    checks.extend(check_alpha(ctl))
    checks.extend(check_route_agreement(ctl))
    return checks


def raise_on_failure(checks: list[IdentityCheck]) -> None:
    """Raise VerificationError naming every failed identity"""
    failed = [check.name for check in checks if not check.passed]
    if failed:
        raise VerificationError(f"Identities failed: {failed}")
