import math
import unittest

from excursion_max.distributions import LN2
from excursion_max.eval_conf import EvalControl, WalkConfig
from excursion_max.exceptions import ConvergenceError
from excursion_max.pc_routes import (
    ALPHA_EXPECTED,
    ANALYTIC_CONTROL,
    PcReport,
    alpha_check,
    alpha_integrand,
    alpha_reconstruction,
    build_report,
    lemma_integrand,
    pc_closed_form,
    pc_expectation,
    pc_lemma_integral,
    pc_split_integrals,
)
from excursion_max.specfun import digamma_series

P_C = 1.0 - LN2


class ClosedFormTests(unittest.TestCase):
    def test_value(self):
        value = pc_closed_form()
        self.assertAlmostEqual(0.3069, value, delta=5e-5)
        self.assertAlmostEqual(0.3068528194, value, delta=1e-10)
        self.assertAlmostEqual(P_C, value, delta=1e-12)

    def test_series_oracle(self):
        oracle = (digamma_series(0.25, terms=10**7) - digamma_series(0.5, terms=10**7)).real + 1.0 + math.pi / 2.0
        self.assertAlmostEqual(oracle, pc_closed_form(), delta=1e-10)

    def test_tolerance_scaling(self):
        loose = pc_closed_form(ANALYTIC_CONTROL)
        tight = pc_closed_form(ANALYTIC_CONTROL.tightened(10.0))
        self.assertAlmostEqual(loose, tight, delta=1e-10)


class PcLemmaIntegralTests(unittest.TestCase):
    def test_integrand(self):
        self.assertAlmostEqual(4.0 * LN2 / math.pi, lemma_integrand(0.0), delta=1e-15)
        self.assertAlmostEqual(4.0 * LN2 / math.pi, lemma_integrand(1e-7), delta=1e-6)
        for u in (0.01, 0.1, 0.5, 1.0, 3.0, 10.0):
            value = lemma_integrand(u)
            self.assertGreater(value, 0.0)
            self.assertLessEqual(value, 8.0 * u * LN2 / math.sinh(2.0 * math.pi * u))

    def test_route(self):
        result = pc_lemma_integral()
        self.assertTrue(result.converged)
        self.assertAlmostEqual(pc_closed_form(), result.value, delta=1e-8)

    def test_split_integrals(self):
        result = pc_split_integrals()
        self.assertTrue(result.converged)
        self.assertAlmostEqual(pc_closed_form(), result.value, delta=1e-8)


class AlphaTests(unittest.TestCase):
    def test_integrand(self):
        self.assertEqual(0.25, alpha_integrand(0.0))
        self.assertAlmostEqual(0.25, alpha_integrand(1e-6), delta=1e-9)
        self.assertEqual(alpha_integrand(0.3), alpha_integrand(-0.3))

    def test_value(self):
        result = alpha_check()
        self.assertTrue(result.converged)
        self.assertAlmostEqual(0.0908450569, result.value, delta=1e-10)
        self.assertAlmostEqual(ALPHA_EXPECTED, result.value, delta=1e-10)

    def test_symmetry(self):
        from excursion_max.quadrature import integrate_semi_infinite

        half = integrate_semi_infinite(alpha_integrand, EvalControl(), 4.0 * math.pi, scale=2.32, origin_value=0.25)
        self.assertAlmostEqual(2.0 * half.value, alpha_check(EvalControl()).value, delta=1e-12)

    def test_reconstruction(self):
        self.assertAlmostEqual(pc_closed_form(), alpha_reconstruction(alpha_check().value), delta=1e-10)
        self.assertAlmostEqual(pc_closed_form(), alpha_reconstruction(ALPHA_EXPECTED), delta=1e-12)


class ExpectationTests(unittest.TestCase):
    def test_normalization(self):
        result = pc_expectation(survival=lambda x: 1.0)
        self.assertTrue(result.converged)
        self.assertAlmostEqual(1.0, result.value, delta=1e-9)

    def test_route(self):
        result = pc_expectation()
        self.assertTrue(result.converged)
        self.assertAlmostEqual(pc_closed_form(), result.value, delta=1e-6)

    def test_unconverged_survival(self):
        ctl = ANALYTIC_CONTROL.replace(max_evals=30)
        with self.assertRaises(ConvergenceError):
            pc_expectation(ctl)


class ReportTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.report = build_report(WalkConfig(n=1_000, paths=20_000, seed=7, workers=1), mc_paths=20_000)

    def test_routes(self):
        report = self.report
        self.assertFalse(report.partial)
        self.assertEqual({}, report.failures)
        self.assertAlmostEqual(P_C, report.r1_closed_form, delta=1e-12)
        self.assertLessEqual(report.max_analytic_discrepancy, 1e-6)
        self.assertEqual(
            max(abs(report.r1_closed_form - report.r2_lemma_integral.value),
                abs(report.r1_closed_form - report.r3_expectation.value)),
            report.max_analytic_discrepancy,
        )
        self.assertAlmostEqual(report.r1_closed_form, report.alpha_reconstruction, delta=1e-10)
        for value in (report.r2_lemma_integral.value, report.r3_expectation.value, report.r6_split_integrals.value):
            self.assertGreater(value, 0.0)
            self.assertLess(value, 1.0)

    def test_monte_carlo_routes(self):
        report = self.report
        self.assertEqual(1_000, report.r4_monte_carlo.n)
        self.assertEqual(20_000, report.r5_continuous_mc.paths)
        self.assertLessEqual(abs(report.r5_continuous_mc.p_hat - P_C), 4.0 * report.r5_continuous_mc.std_err)

    def test_to_dict(self):
        report_dict = self.report.to_dict()
        self.assertFalse(report_dict["partial"])
        self.assertIn("value", report_dict["r2_lemma_integral"])
        self.assertIn("p_hat", report_dict["r4_monte_carlo"])

    def test_partial_report(self):
        report = build_report(None, ctl=ANALYTIC_CONTROL.replace(max_evals=30))
        self.assertTrue(report.partial)
        self.assertIn("r3_expectation", report.failures)
        self.assertIsNotNone(report.r1_closed_form)
        self.assertIsNone(report.r4_monte_carlo)
        self.assertIsInstance(report, PcReport)
