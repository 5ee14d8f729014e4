import contextlib
import io
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from excursion_max.cli import main, parse_sweep
from excursion_max.pc_routes import PcReport
from excursion_max.verification import IdentityCheck, check_A_identity, check_F_identity

SLOW_TESTS = os.environ.get("EXCURSION_MAX_SLOW_TESTS")


def run_cli(*argv: str) -> tuple[int, str]:
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
        exit_code = main(list(argv))
    return exit_code, stdout.getvalue()


class ScoreCommandTests(unittest.TestCase):
    def run_score(self, content: str, *extra: str) -> tuple[int, str]:
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = Path(tmp_dir) / "scores.txt"
            path.write_text(content, encoding="utf-8")
            return run_cli("score", "--input", str(path), *extra)

    def test_final_excursion(self):
        exit_code, output = self.run_score("1\n-1\n1\n1\n")
        self.assertEqual(0, exit_code)
        results = json.loads(output)["results"]
        self.assertFalse(results["complete"])
        self.assertEqual(2.0, results["u_bar"])
        self.assertEqual(2, results["g_n"])

    def test_complete(self):
        exit_code, output = self.run_score("1\n-1\n")
        self.assertEqual(0, exit_code)
        self.assertTrue(json.loads(output)["results"]["complete"])

    def test_text_format(self):
        exit_code, output = self.run_score("1\n-1\n", "--format", "text")
        self.assertEqual(0, exit_code)
        self.assertIn("results.complete", output)

    def test_input_errors(self):
        exit_code, output = self.run_score("")
        self.assertEqual(2, exit_code)
        self.assertEqual("", output)
        exit_code, _ = self.run_score("1\nx\n")
        self.assertEqual(2, exit_code)


class SimulateCommandTests(unittest.TestCase):
    def test_deterministic(self):
        argv = ("simulate", "--n", "200", "--paths", "3000", "--seed", "7", "--workers", "1")
        exit_code, first = run_cli(*argv)
        self.assertEqual(0, exit_code)
        _, second = run_cli(*argv)
        self.assertEqual(first, second)
        _, parallel = run_cli(*argv[:-1], "2")
        self.assertEqual(first, parallel)

        payload = json.loads(first)
        self.assertEqual(7, payload["seed"])
        self.assertEqual(200, payload["results"]["n"])
        self.assertEqual({"n": 200, "paths": 3000, "step_law": "rademacher"}, payload["inputs"])

    def test_sweep(self):
        exit_code, output = run_cli("simulate", "--paths", "1000", "--sweep", "10,20", "--workers", "1")
        self.assertEqual(0, exit_code)
        sweep = json.loads(output)["results"]["sweep"]
        self.assertEqual([10, 20], [estimate["n"] for estimate in sweep])
        self.assertEqual([10, 20], parse_sweep("10, 20,"))

    def test_invalid_parameters(self):
        exit_code, _ = run_cli("simulate", "--n", "0", "--workers", "1")
        self.assertEqual(2, exit_code)
        exit_code, _ = run_cli("simulate", "--seed", "-1", "--workers", "1")
        self.assertEqual(2, exit_code)
        with contextlib.redirect_stderr(io.StringIO()), self.assertRaises(SystemExit) as cm:
            main(["simulate", "--step-law", "cauchy"])
        self.assertEqual(2, cm.exception.code)

    @unittest.skipUnless(SLOW_TESTS, "set EXCURSION_MAX_SLOW_TESTS to run acceptance-size simulations")
    def test_reference_size(self):
        argv = ("simulate", "--n", "10000", "--paths", "200000", "--seed", "7")
        exit_code, output = run_cli(*argv, "--workers", "8")
        self.assertEqual(0, exit_code)
        p_hat = json.loads(output)["results"]["p_hat"]
        self.assertGreater(p_hat, 0.28)
        self.assertLess(p_hat, 0.33)
        self.assertEqual(output, run_cli(*argv, "--workers", "1")[1])


class AnalyticCommandTests(unittest.TestCase):
    def test_default_run(self):
        exit_code, output = run_cli("analytic")
        self.assertEqual(0, exit_code)
        payload = json.loads(output)
        self.assertEqual("analytic", payload["command"])
        self.assertIn('"r1_closed_form": 0.30685281944', output)
        results = payload["results"]
        self.assertFalse(results["partial"])
        self.assertLessEqual(results["max_analytic_discrepancy"], 1e-6)
        self.assertEqual(1_000, results["r4_monte_carlo"]["n"])
        self.assertEqual(20_000, results["r5_continuous_mc"]["paths"])
        self.assertTrue(payload["inputs"]["with_mc"])
        self.assertEqual(0, payload["seed"])

    def test_without_monte_carlo(self):
        exit_code, output = run_cli("analytic", "--no-mc")
        self.assertEqual(0, exit_code)
        payload = json.loads(output)
        self.assertIsNone(payload["results"]["r4_monte_carlo"])
        self.assertIsNone(payload["results"]["r5_continuous_mc"])
        self.assertFalse(payload["inputs"]["with_mc"])
        self.assertIsNone(payload["seed"])

    def test_failed_route(self):
        report = PcReport(r1_closed_form=0.3, failures={"r2_lemma_integral": "quadrature did not converge"})
        with mock.patch("excursion_max.cli.build_report", return_value=report):
            exit_code, output = run_cli("analytic", "--tol", "1e-6")
        self.assertEqual(3, exit_code)
        self.assertTrue(json.loads(output)["results"]["partial"])


class VerifyCommandTests(unittest.TestCase):
    def test_exit_codes(self):
        passed = [IdentityCheck.compare("a", 0.0, 1.0)]
        failed = passed + [IdentityCheck.compare("b", 2.0, 1.0)]
        with mock.patch("excursion_max.cli.run_identity_suites", return_value=passed) as suites:
            exit_code, output = run_cli("verify", "--seed", "3")
        self.assertEqual(0, exit_code)
        suites.assert_called_once()
        self.assertEqual(3, suites.call_args.kwargs["seed"])
        self.assertFalse(suites.call_args.kwargs["inject_fault"])
        self.assertTrue(json.loads(output)["results"]["passed"])

        with mock.patch("excursion_max.cli.run_identity_suites", return_value=failed) as suites:
            exit_code, output = run_cli("verify", "--inject-fault")
        self.assertEqual(4, exit_code)
        self.assertTrue(suites.call_args.kwargs["inject_fault"])
        identities = json.loads(output)["results"]["identities"]
        self.assertEqual(["a", "b"], [identity["name"] for identity in identities])
        self.assertEqual({"name", "tolerance", "deviation", "passed"}, set(identities[1]))

    def test_grid_suites_report(self):
        def grid_suites(ctl, seed, inject_fault):
            return [
                check_F_identity(ctl, points=5),
                check_A_identity(ctl, points=5, a_perturbation=1e-6 if inject_fault else 0.0),
            ]

        with mock.patch("excursion_max.cli.run_identity_suites", side_effect=grid_suites):
            exit_code, output = run_cli("verify")
            self.assertEqual(0, exit_code)
            identities = json.loads(output)["results"]["identities"]
            self.assertEqual([True, True], [identity["passed"] for identity in identities])
            self.assertTrue(all(isinstance(identity["deviation"], float) for identity in identities))

            exit_code, output = run_cli("verify", "--inject-fault")
            self.assertEqual(4, exit_code)
            self.assertFalse(json.loads(output)["results"]["passed"])

    @unittest.skipUnless(SLOW_TESTS, "set EXCURSION_MAX_SLOW_TESTS to run the full identity suites")
    def test_full_suites(self):
        exit_code, output = run_cli("verify")
        self.assertEqual(0, exit_code)
        self.assertTrue(json.loads(output)["results"]["passed"])
        exit_code, output = run_cli("verify", "--inject-fault")
        self.assertEqual(4, exit_code)
        failed = [i["name"] for i in json.loads(output)["results"]["identities"] if not i["passed"]]
        self.assertEqual(["A paired series vs digamma"], failed)


class SchemaCommandTests(unittest.TestCase):
    def test_schema(self):
        exit_code, output = run_cli("schema")
        self.assertEqual(0, exit_code)
        self.assertEqual("ReportDocument", json.loads(output)["title"])
