"""
Random walk simulation, excursion decomposition of the local score, and Monte Carlo estimators

The local score of the steps eps_1, ..., eps_n is U_k = S_k - min_{i <= k} S_i with S_k = eps_1 + ... + eps_k. Its
last zero is g_n, the maximum over complete excursions is u_star = max_{k <= g_n} U_k and the maximum over the final
(incomplete) excursion is u_dstar = max_{k >= g_n} U_k. A path is complete when its overall maximum u_bar equals
u_star.

Simulated paths are grouped in blocks whose size only depends on n. Block b draws from a Philox generator keyed by
SeedSequence(seed, spawn_key=(stream, b)), so estimates are bit-identical for any number of workers.
"""

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from excursion_max.check_utils import check_positive, check_positive_int
from excursion_max.distributions import arcsine_quantile, ks_quantiles, meander_max_quantiles
from excursion_max.eval_conf import EvalControl, StepLaw, WalkConfig
from excursion_max.exceptions import DomainError, EnumerationSizeError

logger = logging.getLogger(__name__)

WALK_STREAM = 0
CONTINUOUS_STREAM = 1
ORACLE_STREAM = 2

# Elements (paths x steps) simulated per block of the discrete walk
BLOCK_ELEMENTS = 2**22
MIN_BLOCK_PATHS = 256
MAX_BLOCK_PATHS = 2**16
CONTINUOUS_BLOCK_PATHS = 2**16

MAX_ENUMERATION_STEPS = 24
_ENUMERATION_CHUNK = 2**16

# quantile brackets of width 1e-12 are far below the sampling noise
SAMPLING_CONTROL = EvalControl(rel_tol=1e-10, abs_tol=1e-12)


@dataclass(frozen=True)
class LocalScoreSummary:
    """
    Statistics of the local score of one sequence

    Params:
        u_bar: Overall maximum max_{0 <= k <= n} U_k.
        g_n: Last zero max{k <= n, U_k = 0}.
        u_star: Maximum over complete excursions, max_{0 <= k <= g_n} U_k.
        u_dstar: Maximum over the final excursion, max_{g_n <= k <= n} U_k.
        theta_star: First index k <= g_n with U_k = u_star.
        complete: Whether the overall maximum is reached on a complete excursion (u_bar == u_star).
    """

    u_bar: float
    g_n: int
    u_star: float
    u_dstar: float
    theta_star: int
    complete: bool


@dataclass(frozen=True)
class LocalScoreBatch:
    """
    Vectorized LocalScoreSummary fields for a batch of paths, one array entry per path
    """

    u_bar: np.ndarray
    g_n: np.ndarray
    u_star: np.ndarray
    u_dstar: np.ndarray
    complete: np.ndarray


@dataclass(frozen=True)
class McEstimate:
    """
    Monte Carlo estimate of a probability

    Params:
        p_hat: Fraction of successful replications.
        std_err: Binomial standard error sqrt(p_hat (1 - p_hat) / paths).
        paths: Number of replications.
        n: Walk length, 0 for samples of the continuous limit.
    """

    p_hat: float
    std_err: float
    paths: int
    n: int

    @classmethod
    def from_counts(cls, successes: int, paths: int, n: int) -> "McEstimate":
        p_hat = successes / paths
        return cls(p_hat=p_hat, std_err=math.sqrt(p_hat * (1.0 - p_hat) / paths), paths=paths, n=n)


def local_score_stats(steps: Sequence[float]) -> LocalScoreSummary:
    """
    Local score statistics of a sequence of steps in a single pass

    Example:
        ```python
        summary = local_score_stats([1, -1, 1, 1])  # U = (0, 1, 0, 1, 2)
        summary.g_n, summary.u_star, summary.u_dstar, summary.complete  # (2, 1, 2, False)
        ```

    Params:
        steps: Non-empty sequence of finite steps eps_1, ..., eps_n.

    Returns:
        A LocalScoreSummary. Comparisons are exact, so lattice walks need no tolerance.
    """
    if len(steps) == 0:
        raise DomainError("Invalid steps: the sequence is empty")

    partial_sum = 0.0
    running_min = 0.0
    u_bar, argmax_first = 0.0, 0
    g_n, u_star, theta_star = 0, 0.0, 0
    u_dstar = 0.0
    for k, step in enumerate(steps, start=1):
        if not math.isfinite(step):
            raise DomainError(f"Invalid step {k}: {step}. Steps must be finite real numbers")
        partial_sum += step
        running_min = min(running_min, partial_sum)
        u_k = partial_sum - running_min
        if u_k > u_bar:
            u_bar, argmax_first = u_k, k
        if u_k == 0:
            # every excursion so far is complete
            g_n, u_star, theta_star = k, u_bar, argmax_first
            u_dstar = 0.0
        else:
            u_dstar = max(u_dstar, u_k)

    return LocalScoreSummary(
        u_bar=u_bar,
        g_n=g_n,
        u_star=u_star,
        u_dstar=u_dstar,
        theta_star=theta_star,
        complete=u_bar == u_star,
    )


def local_score_batch(steps: np.ndarray) -> LocalScoreBatch:
    """
    Vectorized local score statistics of a batch of paths

    Params:
        steps: Array of shape (paths, n). Integer arrays keep exact lattice arithmetic.

    Returns:
        A LocalScoreBatch, each field holding one value per path.
    """
    steps = np.asarray(steps)
    if steps.ndim != 2 or steps.shape[1] == 0:
        raise DomainError(f"Invalid steps shape: {steps.shape}. Expected (paths, n) with n >= 1")
    paths, n = steps.shape
    accumulator = np.int32 if np.issubdtype(steps.dtype, np.integer) else np.float64

    walk = np.zeros((paths, n + 1), dtype=accumulator)
    np.cumsum(steps, axis=1, dtype=accumulator, out=walk[:, 1:])
    score = walk - np.minimum.accumulate(walk, axis=1)

    # U_0 = 0, so every row has a zero
    g_n = n - np.argmax(score[:, ::-1] == 0, axis=1)
    rows = np.arange(paths)
    running_max = np.maximum.accumulate(score, axis=1)
    u_star = running_max[rows, g_n]
    u_bar = running_max[:, -1]
    u_dstar = np.maximum.accumulate(score[:, ::-1], axis=1)[:, ::-1][rows, g_n]
    return LocalScoreBatch(u_bar=u_bar, g_n=g_n, u_star=u_star, u_dstar=u_dstar, complete=u_bar == u_star)


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    """
    Independent generator of one block of replications

    Params:
        seed: Experiment seed.
        stream: Stream identifier separating the discrete walk and the continuous samplers.
        block: Block index.

    Returns:
        A Philox based generator derived from (seed, stream, block).
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, block))))


def block_paths(n: int) -> int:
    """Number of paths per block of walks of length n, independent of the worker count"""
    return max(MIN_BLOCK_PATHS, min(MAX_BLOCK_PATHS, BLOCK_ELEMENTS // (n + 1)))


def block_layout(paths: int, per_block: int) -> list[tuple[int, int]]:
    """
    Split replications into blocks

    Params:
        paths: Total number of replications.
        per_block: Replications per full block.

    Returns:
        List of (block index, block size), the last block holding the remainder.
    """
    full_blocks, remainder = divmod(paths, per_block)
    layout = [(block, per_block) for block in range(full_blocks)]
    if remainder:
        layout.append((full_blocks, remainder))
    return layout


class WalkSampler:
    """
    WalkSampler simulates blocks of random walks for one WalkConfig

    Each call to count_complete() owns the generator of its block, so samplers can be shipped to worker processes.

    Attributes:
        cfg: The experiment configuration.
    """

    def __init__(self, cfg: WalkConfig):
        self.cfg = cfg

    def draw_steps(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """
        Draw a (size, n) array of centered unit variance steps

        Params:
            rng: Generator of the block.
            size: Number of paths.

        Returns:
            int8 steps for the Rademacher law, float64 steps for the Gaussian law.
        """
        shape = (size, self.cfg.n)
        if self.cfg.step_law is StepLaw.RADEMACHER:
            return 2 * rng.integers(0, 2, size=shape, dtype=np.int8) - 1
        return rng.standard_normal(size=shape)

    def count_complete(self, block: tuple[int, int]) -> int:
        """
        Number of complete paths in one block

        Params:
            block: (block index, block size) as returned by block_layout.

        Returns:
            The number of simulated paths whose maximum is reached on a complete excursion.
        """
        index, size = block
        rng = block_generator(self.cfg.seed, WALK_STREAM, index)
        batch = local_score_batch(self.draw_steps(rng, size))
        return int(np.count_nonzero(batch.complete))


def _run_blocks(task: Callable[[tuple[int, int]], int], blocks: list[tuple[int, int]], workers: int) -> int:
    """Sum task(block) over blocks, in worker processes when workers > 1"""
    if workers == 1 or len(blocks) == 1:
        return sum(task(block) for block in blocks)
    chunksize = max(1, len(blocks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return sum(executor.map(task, blocks, chunksize=chunksize))


def estimate_pc_n(cfg: WalkConfig) -> McEstimate:
    """
    Monte Carlo estimate of p_c^(n), the probability that max_k U_k is reached on a complete excursion

    Params:
        cfg: Walk configuration.

    Returns:
        An McEstimate, identical for identical cfg whatever cfg.workers.
    """
    blocks = block_layout(cfg.paths, block_paths(cfg.n))
    logger.info(
        "Simulating %d %s walks of length %d in %d blocks on %d workers",
        cfg.paths,
        cfg.step_law.value,
        cfg.n,
        len(blocks),
        cfg.workers,
    )
    complete = _run_blocks(WalkSampler(cfg).count_complete, blocks, cfg.workers)
    estimate = McEstimate.from_counts(complete, cfg.paths, cfg.n)
    logger.info("p_c^(%d) ~ %.6f +/- %.6f", cfg.n, estimate.p_hat, estimate.std_err)
    return estimate


def estimate_pc_n_sweep(cfg: WalkConfig, ns: Iterable[int]) -> list[McEstimate]:
    """
    Estimate p_c^(n) for several walk lengths with the same seed and replication count

    Params:
        cfg: Base walk configuration, its n is replaced by each value of ns.
        ns: Walk lengths.

    Returns:
        One McEstimate per walk length, in the order of ns.
    """
    return [estimate_pc_n(cfg.replace(n=n)) for n in ns]


def enumerate_pc_n_exact(n: int) -> float:
    """
    Exact p_c^(n) for Rademacher steps by enumerating the 2^n paths

    Params:
        n: Walk length, 1 <= n <= 24.

    Returns:
        The dyadic rational p_c^(n) converted to float.
    """
    check_positive_int("n", n)
    if n > MAX_ENUMERATION_STEPS:
        raise EnumerationSizeError(f"Invalid n: {n}. Exhaustive enumeration supports n <= {MAX_ENUMERATION_STEPS}")

    total_paths = 2**n
    bit_positions = np.arange(n, dtype=np.int64)
    complete = 0
    for start in range(0, total_paths, _ENUMERATION_CHUNK):
        path_ids = np.arange(start, min(start + _ENUMERATION_CHUNK, total_paths), dtype=np.int64)
        bits = (path_ids[:, None] >> bit_positions[None, :]) & 1
        steps = (2 * bits - 1).astype(np.int8)
        complete += int(np.count_nonzero(local_score_batch(steps).complete))
    return float(Fraction(complete, total_paths))


def continuous_event_indicator(
    g: np.ndarray, b_star: np.ndarray, m_max: np.ndarray, t: float = 1.0
) -> np.ndarray:
    """
    Indicator of U*(t) > U**(t) from the law identity (U*(t), U**(t)) = (sqrt(t g) b*, sqrt(t (1 - g)) max m)

    Params:
        g: Last zero samples, arcsine distributed.
        b_star: Bridge maximum samples, Kolmogorov-Smirnov distributed.
        m_max: Meander maximum samples.
        t: Time horizon, the indicator does not depend on it.

    Returns:
        Boolean array, True where the maximum is reached on a complete excursion.
    """
    check_positive("t", t)
    with np.errstate(invalid="ignore"):
        return np.sqrt(t * g) * b_star > np.sqrt(t * (1.0 - g)) * m_max


def draw_excursion_triples(
    rng: np.random.Generator, size: int, ctl: EvalControl
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Draw independent (g(1), b*, max m) by inverse transform sampling

    Params:
        rng: Generator owned by the caller.
        size: Number of triples.
        ctl: Evaluation control of the quantile root-finds.

    Returns:
        Arrays g, b_star and m_max of length size.
    """
    uniforms = rng.random((3, size))
    g = arcsine_quantile(uniforms[0])
    b_star = ks_quantiles(uniforms[1], ctl)
    m_max = meander_max_quantiles(uniforms[2], ctl)
    return g, b_star, m_max


class ContinuousEventSampler:
    """
    ContinuousEventSampler samples the complete-excursion event of reflected Brownian motion through exact laws

    Attributes:
        seed: Experiment seed.
        ctl: Evaluation control of the quantile root-finds.
    """

    def __init__(self, seed: int, ctl: EvalControl):
        self.seed = seed
        self.ctl = ctl

    def count_events(self, block: tuple[int, int]) -> int:
        """
        Number of samples of one block where sqrt(g) b* > sqrt(1 - g) max m

        Params:
            block: (block index, block size) as returned by block_layout.

        Returns:
            The event count of the block.
        """
        index, size = block
        rng = block_generator(self.seed, CONTINUOUS_STREAM, index)
        g, b_star, m_max = draw_excursion_triples(rng, size, self.ctl)
        return int(np.count_nonzero(continuous_event_indicator(g, b_star, m_max)))


def sample_continuous_event(
    paths: int, seed: int, ctl: EvalControl = SAMPLING_CONTROL, workers: int = 1
) -> McEstimate:
    """
    Monte Carlo estimate of p_c from the law identity of (U*(t), U**(t)), without path discretization

    Params:
        paths: Number of samples.
        seed: Experiment seed.
        ctl: Evaluation control of the quantile root-finds.
        workers: Number of worker processes.

    Returns:
        An McEstimate with n = 0.
    """
    check_positive_int("paths", paths)
    check_positive_int("workers", workers)
    blocks = block_layout(paths, CONTINUOUS_BLOCK_PATHS)
    logger.info("Sampling %d continuous excursion triples in %d blocks", paths, len(blocks))
    events = _run_blocks(ContinuousEventSampler(seed, ctl).count_events, blocks, workers)
    return McEstimate.from_counts(events, paths, 0)
