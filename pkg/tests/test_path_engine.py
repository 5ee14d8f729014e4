import itertools
import math
import os
import unittest

import numpy as np

from excursion_max.distributions import arcsine_cdf
from excursion_max.eval_conf import EvalControl, StepLaw, WalkConfig
from excursion_max.examples import traced_sequences
from excursion_max.exceptions import DomainError, EnumerationSizeError
from excursion_max.path_engine import (
    CONTINUOUS_STREAM,
    McEstimate,
    block_generator,
    block_layout,
    block_paths,
    continuous_event_indicator,
    draw_excursion_triples,
    enumerate_pc_n_exact,
    estimate_pc_n,
    estimate_pc_n_sweep,
    local_score_batch,
    local_score_stats,
    sample_continuous_event,
)

SLOW_TESTS = os.environ.get("EXCURSION_MAX_SLOW_TESTS")
P_C = 1.0 - math.log(2.0)


class LocalScoreTests(unittest.TestCase):
    def test_traced_sequences(self):
        for name, trace in traced_sequences.items():
            with self.subTest(name=name):
                summary = local_score_stats(trace["steps"])
                self.assertEqual(trace["u_bar"], summary.u_bar)
                self.assertEqual(trace["g_n"], summary.g_n)
                self.assertEqual(trace["u_star"], summary.u_star)
                self.assertEqual(trace["u_dstar"], summary.u_dstar)
                self.assertEqual(trace["theta_star"], summary.theta_star)
                self.assertEqual(trace["complete"], summary.complete)

    def test_invalid_steps(self):
        with self.assertRaises(DomainError) as cm:
            local_score_stats([])
        self.assertIn("the sequence is empty", str(cm.exception))
        with self.assertRaises(DomainError) as cm:
            local_score_stats([1.0, math.nan])
        self.assertIn("Invalid step 2: nan", str(cm.exception))
        with self.assertRaises(DomainError):
            local_score_batch(np.zeros((3, 0)))

    def test_batch_agrees_with_single_pass(self):
        rng = block_generator(3, 7, 0)
        for steps in (rng.integers(-1, 2, size=(200, 40)).astype(np.int8), rng.standard_normal((200, 40))):
            batch = local_score_batch(steps)
            for row, path in enumerate(steps):
                summary = local_score_stats(path.tolist())
                self.assertEqual(summary.u_bar, batch.u_bar[row])
                self.assertEqual(summary.g_n, batch.g_n[row])
                self.assertEqual(summary.u_star, batch.u_star[row])
                self.assertEqual(summary.u_dstar, batch.u_dstar[row])
                self.assertEqual(summary.complete, batch.complete[row])
            # complete if and only if the final excursion does not exceed the complete ones
            np.testing.assert_array_equal(batch.complete, batch.u_dstar <= batch.u_star)


class EnumerationTests(unittest.TestCase):
    def test_short_walks(self):
        for n in (1, 2, 3):
            self.assertEqual(0.5, enumerate_pc_n_exact(n))

    def test_brute_force(self):
        for n in range(4, 9):
            complete = sum(local_score_stats(steps).complete for steps in itertools.product((1, -1), repeat=n))
            self.assertEqual(complete / 2**n, enumerate_pc_n_exact(n))

    def test_limits(self):
        with self.assertRaises(EnumerationSizeError) as cm:
            enumerate_pc_n_exact(25)
        self.assertIn("Exhaustive enumeration supports n <= 24", str(cm.exception))
        with self.assertRaises(DomainError):
            enumerate_pc_n_exact(0)


class BlockTests(unittest.TestCase):
    def test_layout(self):
        self.assertEqual([(0, 4), (1, 4), (2, 2)], block_layout(10, 4))
        self.assertEqual([(0, 8)], block_layout(8, 8))
        self.assertEqual(2**16, block_paths(10))
        self.assertEqual(256, block_paths(10**6))
        self.assertEqual(2**22 // 10_001, block_paths(10_000))

    def test_generators(self):
        first = block_generator(1, 0, 0).random(5)
        np.testing.assert_array_equal(first, block_generator(1, 0, 0).random(5))
        self.assertFalse(np.array_equal(first, block_generator(1, 0, 1).random(5)))
        self.assertFalse(np.array_equal(first, block_generator(1, 1, 0).random(5)))
        self.assertFalse(np.array_equal(first, block_generator(2, 0, 0).random(5)))


class WalkEstimateTests(unittest.TestCase):
    def test_estimate(self):
        cfg = WalkConfig(n=50, paths=5_000, seed=1, workers=1)
        estimate = estimate_pc_n(cfg)
        self.assertEqual(5_000, estimate.paths)
        self.assertEqual(50, estimate.n)
        self.assertAlmostEqual(math.sqrt(estimate.p_hat * (1.0 - estimate.p_hat) / 5_000), estimate.std_err)
        self.assertEqual(estimate, estimate_pc_n(cfg))

    def test_workers_do_not_change_estimates(self):
        cfg = WalkConfig(n=30, paths=3 * 2**16 + 5, seed=42, workers=1)
        self.assertEqual(estimate_pc_n(cfg), estimate_pc_n(cfg.replace(workers=3)))

    def test_enumeration_agreement(self):
        for n in (4, 9, 12):
            with self.subTest(n=n):
                estimate = estimate_pc_n(WalkConfig(n=n, paths=200_000, seed=n, workers=1))
                self.assertLessEqual(abs(estimate.p_hat - enumerate_pc_n_exact(n)), 4.0 * estimate.std_err)

    def test_sweep(self):
        cfg = WalkConfig(n=10, paths=2_000, seed=5, workers=1)
        sweep = estimate_pc_n_sweep(cfg, [10, 20])
        self.assertEqual([10, 20], [estimate.n for estimate in sweep])
        self.assertEqual(estimate_pc_n(cfg), sweep[0])

    def test_gaussian_steps(self):
        estimate = estimate_pc_n(WalkConfig(n=2_000, step_law=StepLaw.GAUSSIAN, paths=20_000, seed=3, workers=1))
        self.assertGreater(estimate.p_hat, 0.22)
        self.assertLess(estimate.p_hat, 0.40)

    def test_from_counts(self):
        estimate = McEstimate.from_counts(25, 100, 7)
        self.assertEqual(0.25, estimate.p_hat)
        self.assertAlmostEqual(math.sqrt(0.25 * 0.75 / 100), estimate.std_err, delta=1e-15)

    @unittest.skipUnless(SLOW_TESTS, "set EXCURSION_MAX_SLOW_TESTS to run acceptance-size simulations")
    def test_long_walks(self):
        estimate = estimate_pc_n(WalkConfig(n=10_000, paths=200_000, seed=7, workers=4))
        self.assertLessEqual(abs(estimate.p_hat - P_C), 0.01)

    @unittest.skipUnless(SLOW_TESTS, "set EXCURSION_MAX_SLOW_TESTS to run acceptance-size simulations")
    def test_enumeration_agreement_all_lengths(self):
        for n in range(1, 13):
            with self.subTest(n=n):
                estimate = estimate_pc_n(WalkConfig(n=n, paths=10**6, seed=n, workers=4))
                self.assertLessEqual(abs(estimate.p_hat - enumerate_pc_n_exact(n)), 4.0 * estimate.std_err)


class ContinuousTests(unittest.TestCase):
    def test_scaling_invariance(self):
        rng = block_generator(0, CONTINUOUS_STREAM, 99)
        g, b_star, m_max = draw_excursion_triples(rng, 5_000, EvalControl(abs_tol=1e-12))
        np.testing.assert_array_equal(
            continuous_event_indicator(g, b_star, m_max, t=1.0), continuous_event_indicator(g, b_star, m_max, t=7.0)
        )

    def test_arcsine_samples(self):
        size = 20_000
        g, _, _ = draw_excursion_triples(block_generator(4, CONTINUOUS_STREAM, 0), size, EvalControl(abs_tol=1e-12))
        ordered = np.sort(g)
        model = np.array([arcsine_cdf(x) for x in ordered])
        distance = max(
            (np.arange(1, size + 1) / size - model).max(), (model - np.arange(0, size) / size).max()
        )
        self.assertLessEqual(distance, 1.95 / math.sqrt(size))

    def test_continuous_event(self):
        ctl = EvalControl(abs_tol=1e-12)
        estimate = sample_continuous_event(40_000, seed=2, ctl=ctl)
        self.assertEqual(0, estimate.n)
        self.assertLessEqual(abs(estimate.p_hat - P_C), 4.0 * estimate.std_err)
        self.assertEqual(estimate, sample_continuous_event(40_000, seed=2, ctl=ctl, workers=2))

    @unittest.skipUnless(SLOW_TESTS, "set EXCURSION_MAX_SLOW_TESTS to run acceptance-size simulations")
    def test_continuous_event_acceptance(self):
        estimate = sample_continuous_event(10**6, seed=0, ctl=EvalControl(abs_tol=1e-12), workers=4)
        self.assertLessEqual(abs(estimate.p_hat - P_C), 4.0 * estimate.std_err)
