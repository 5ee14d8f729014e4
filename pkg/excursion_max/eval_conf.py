import enum
import os
from dataclasses import dataclass, replace
from typing import Any, Self

from excursion_max.check_utils import check_positive, check_positive_int
from excursion_max.exceptions import DomainError

THREADS_ENV_VAR = "EXCURSION_MAX_THREADS"
MAX_SEED = 2**64 - 1


def default_workers() -> int:
    """
    Default worker count, read from the EXCURSION_MAX_THREADS environment variable

    Returns:
        The integer value of the variable, or 1 when it is unset or empty.
    """
    raw_value = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw_value:
        return 1
    try:
        workers = int(raw_value)
    except ValueError:
        raise DomainError(f"Invalid {THREADS_ENV_VAR}: '{raw_value}'. It must be a positive integer") from None
    check_positive_int(THREADS_ENV_VAR, workers)
    return workers


@dataclass(frozen=True)
class EvalControl:
    """
    EvalControl sets the tolerances and budgets of every series, root-find and quadrature evaluation

    An evaluator receiving an EvalControl either meets the tolerance or reports failure, it never returns an
    unconverged value silently.

    Params:
        rel_tol: Relative tolerance, dimensionless.
        abs_tol: Absolute tolerance, dimensionless.
        max_terms: Maximum number of series terms (or recurrence shifts) an evaluator may use.
        max_evals: Maximum number of function evaluations for root-finding and quadrature.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_terms: int = 10_000_000
    max_evals: int = 200_000

    def __post_init__(self):
        check_positive("rel_tol", self.rel_tol)
        check_positive("abs_tol", self.abs_tol)
        check_positive_int("max_terms", self.max_terms)
        check_positive_int("max_evals", self.max_evals)

    def replace(self, **kwargs: Any) -> Self:
        """
        Creates a copy of the current object replacing attributes with the given keyword arguments

        Params:
            **kwargs: Attributes (parameters) to be replaced

        Returns:
            A validated copy of the object with the attributes replaced
        """
        return replace(self, **kwargs)

    def tightened(self, factor: float = 10.0) -> Self:
        """
        Creates a copy with both tolerances divided by factor

        Params:
            factor: Strictly positive tightening factor.

        Returns:
            A copy of the object with tighter tolerances
        """
        check_positive("factor", factor)
        return self.replace(rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)

    def target(self, value: float) -> float:
        """Error allowed for a result of magnitude |value|"""
        return max(self.abs_tol, self.rel_tol * abs(value))


class StepLaw(enum.StrEnum):
    """
    Centered, unit variance laws of the walk steps

    Attributes:
        RADEMACHER: +1 or -1 with probability 1/2 each. Paths stay on the integer lattice.
        GAUSSIAN: Standard normal steps.
    """

    RADEMACHER = "rademacher"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class WalkConfig:
    """
    WalkConfig describes one random walk experiment

    Identical (seed, n, step_law, paths) reproduce identical estimates bit for bit, whatever the number of workers.

    Params:
        n: Number of steps of each path.
        step_law: Law of the steps, see StepLaw.
        seed: Unsigned 64-bit seed.
        paths: Number of simulated paths.
        workers: Number of worker processes. By default, it is read from EXCURSION_MAX_THREADS.
    """

    n: int = 10_000
    step_law: StepLaw = StepLaw.RADEMACHER
    seed: int = 0
    paths: int = 200_000
    workers: int = -1

    def __post_init__(self):
        check_positive_int("n", self.n)
        check_positive_int("paths", self.paths)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise DomainError(f"Invalid seed: {self.seed!r}. It must be an integer in [0, 2**64 - 1]")
        # a plain string such as "gaussian" is accepted and normalized
        try:
            object.__setattr__(self, "step_law", StepLaw(self.step_law))
        except ValueError:
            valid_laws = [law.value for law in StepLaw]
            raise DomainError(f"Invalid step_law: '{self.step_law}'. Valid laws are: {valid_laws}") from None
        if self.workers == -1:
            object.__setattr__(self, "workers", default_workers())
        check_positive_int("workers", self.workers)

    def replace(self, **kwargs: Any) -> Self:
        """
        Creates a copy of the current object replacing attributes with the given keyword arguments

        Params:
            **kwargs: Attributes (parameters) to be replaced

        Returns:
            A validated copy of the object with the attributes replaced
        """
        return replace(self, **kwargs)
