import io
import unittest
from contextlib import redirect_stdout
from unittest.mock import MagicMock, patch

from main import main_cli, parse_arguments
from src.core.exceptions import ConditioningError


def fake_report(experiment, summary):
    return {"provenance": {"experiment": experiment}, "rows": [], "warnings": ["src.x: coarse"], "summary": summary}


@patch("src.utils.config_loader.load_dotenv")
class TestMainCli(unittest.TestCase):

    def run_cli(self, argv):
        out = io.StringIO()
        with redirect_stdout(out):
            code = main_cli(argv)
        return code, out.getvalue()

    def test_parse_arguments(self, _load_dotenv):
        args = parse_arguments(["norm-sweep", "--seed", "3", "--threads", "2"])
        self.assertEqual(args.experiment, "norm-sweep")
        self.assertEqual(args.seed, 3)
        self.assertIsNone(args.config)

    @patch("main.ReportWriter")
    @patch("main.ExperimentRunner")
    def test_successful_run(self, runner_cls, writer_cls, _load_dotenv):
        runner_cls.return_value.run.return_value = fake_report("compose", {"max_rel_diff": 1e-9})
        writer_cls.return_value.write.return_value = {"csv": "out/compose.csv", "json": "out/compose.json"}
        code, output = self.run_cli(["compose", "--out", "out", "--skip-estimate"])
        self.assertEqual(code, 0)
        self.assertIn("--- compose Summary ---", output)
        self.assertIn("INFO: CSV written to out/compose.csv", output)
        self.assertIn("1 warning(s) recorded", output)
        writer_cls.assert_called_once_with("out")

    @patch("main.ReportWriter")
    @patch("main.ExperimentRunner")
    def test_failed_invariants_exit_one(self, runner_cls, writer_cls, _load_dotenv):
        runner_cls.return_value.run.return_value = fake_report("verify", {"failed_checks": ["unitary"]})
        writer_cls.return_value.write.return_value = {"csv": "a", "json": "b"}
        code, output = self.run_cli(["verify", "--skip-estimate"])
        self.assertEqual(code, 1)
        self.assertIn("Error: 1 invariant check(s) failed: unitary", output)

    @patch("main.ExperimentRunner")
    def test_bad_config_exits_two(self, runner_cls, _load_dotenv):
        code, output = self.run_cli(["verify", "--config", "/nonexistent/lab.cfg"])
        self.assertEqual(code, 2)
        self.assertIn("Error: config file not found", output)
        runner_cls.assert_not_called()

    @patch("main.ExperimentRunner")
    def test_numerical_failure_exits_three(self, runner_cls, _load_dotenv):
        runner_cls.return_value.run.side_effect = ConditioningError("Gram condition too large")
        code, output = self.run_cli(["norm-sweep", "--skip-estimate"])
        self.assertEqual(code, 3)
        self.assertIn("--- norm-sweep Failed ---", output)

    @patch("main.ReportWriter", MagicMock())
    @patch("main.ExperimentRunner")
    def test_estimate_is_printed(self, runner_cls, _load_dotenv):
        runner_cls.return_value.run.return_value = fake_report("compose", {})
        code, output = self.run_cli(["compose"])
        self.assertEqual(code, 0)
        self.assertIn("--- Workload Estimate ---", output)


if __name__ == '__main__':
    unittest.main()
