import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from src.core.exceptions import ConfigError
from src.utils.config_loader import (
    ENV_LOG_LEVEL,
    ENV_OUT_DIR,
    ENV_THREADS,
    ExperimentConfig,
    build_config,
    environment_defaults,
    load_config,
    parse_config_text,
)

SAMPLE = """
# comment line
[experiment]
experiment = norm-sweep
h_grid = 0.2, 0.1   # trailing comment
s = 3

[basis]
N = 8

[symbol]
symbol = bump
compose_points = 0, 0.3+0.2i

[output]
out_dir = results/sample
"""


class TestParseConfigText(unittest.TestCase):

    def test_sections_and_lists(self):
        values = parse_config_text(SAMPLE)
        self.assertEqual(values["experiment"], "norm-sweep")
        self.assertEqual(values["h_grid"], ["0.2", "0.1"])
        self.assertEqual(values["N"], "8")
        self.assertEqual(values["compose_points"], ["0", "0.3+0.2i"])

    def test_validated_types(self):
        config = build_config(parse_config_text(SAMPLE), use_environment=False)
        self.assertEqual(config.h_grid, [0.2, 0.1])
        self.assertEqual(config.N, 8)
        self.assertEqual(config.s, 3.0)
        self.assertEqual(config.points, [0j, 0.3 + 0.2j])

    def test_unknown_section(self):
        with self.assertRaisesRegex(ConfigError, "unknown section"):
            parse_config_text("[plotting]\nN = 3\n")

    def test_unknown_key(self):
        with self.assertRaisesRegex(ConfigError, "unknown key 'chapters'"):
            parse_config_text("[experiment]\nchapters = 3\n")

    def test_key_in_wrong_section(self):
        with self.assertRaisesRegex(ConfigError, r"belongs in \[basis\]"):
            parse_config_text("[quadrature]\nN = 3\n")

    def test_key_outside_section(self):
        with self.assertRaises(ConfigError):
            parse_config_text("N = 3\n")

    def test_duplicate_key(self):
        with self.assertRaisesRegex(ConfigError, "duplicate"):
            parse_config_text("[basis]\nN = 3\nN = 4\n")

    def test_missing_equals(self):
        with self.assertRaisesRegex(ConfigError, ":2:"):
            parse_config_text("[basis]\nN 3\n")


class TestExperimentConfig(unittest.TestCase):

    def test_defaults(self):
        config = ExperimentConfig()
        self.assertEqual(config.experiment, "verify")
        self.assertEqual(config.h_grid, [0.2, 0.1, 0.05])
        self.assertEqual(config.weight, "bargmann")
        self.assertEqual(config.log_level, "INFO")

    def test_invalid_values(self):
        bad = [
            {"h_grid": [0.1, 1.5]},
            {"h_grid": []},
            {"s": 1.0},
            {"N": -1},
            {"M": 0},
            {"weight": "gaussian"},
            {"symbols": ["wave"]},
            {"compose_points": ["nowhere"]},
            {"radius_min": 10.0, "radius_max": 5.0},
            {"log_level": "LOUD"},
            {"chapters": 3},
        ]
        for values in bad:
            with self.subTest(values=values):
                with self.assertRaises(ConfigError):
                    build_config(values, use_environment=False)

    def test_log_level_is_upper_cased(self):
        self.assertEqual(build_config({"log_level": "debug"}, use_environment=False).log_level, "DEBUG")

    def test_echo_is_plain(self):
        echo = ExperimentConfig().echo()
        self.assertEqual(echo["N"], 12)
        self.assertIsInstance(echo["compose_points"], list)


@patch("src.utils.config_loader.load_dotenv")
class TestPrecedence(unittest.TestCase):

    def test_environment_defaults(self, _load_dotenv):
        env = {ENV_OUT_DIR: "/tmp/env-out", ENV_THREADS: "4", ENV_LOG_LEVEL: "warning"}
        with patch.dict(os.environ, env, clear=False):
            self.assertEqual(environment_defaults(), {"out_dir": "/tmp/env-out", "threads": "4", "log_level": "warning"})
            config = build_config()
        self.assertEqual(config.out_dir, "/tmp/env-out")
        self.assertEqual(config.threads, 4)
        self.assertEqual(config.log_level, "WARNING")

    def test_file_beats_environment_and_flag_beats_file(self, _load_dotenv):
        with patch.dict(os.environ, {ENV_OUT_DIR: "/tmp/env-out", ENV_THREADS: "4"}, clear=False):
            config = build_config({"out_dir": "from-file", "threads": "2"}, {"out_dir": "from-flag", "threads": None})
        self.assertEqual(config.out_dir, "from-flag")
        self.assertEqual(config.threads, 2)

    def test_environment_can_be_ignored(self, _load_dotenv):
        with patch.dict(os.environ, {ENV_THREADS: "4"}, clear=False):
            self.assertEqual(build_config(use_environment=False).threads, 1)


class TestLoadConfig(unittest.TestCase):

    def test_missing_file(self):
        with self.assertRaisesRegex(ConfigError, "not found"):
            load_config("/nonexistent/lab.cfg", use_environment=False)

    def test_reads_file_with_overrides(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "sweep.cfg"
            path.write_text(SAMPLE, encoding="utf-8")
            config = load_config(path, {"seed": 7}, use_environment=False)
        self.assertEqual(config.experiment, "norm-sweep")
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.out_dir, "results/sample")

    def test_shipped_configs_are_valid(self):
        configs = Path(__file__).resolve().parents[2] / "configs"
        for path in sorted(configs.glob("*.cfg")):
            with self.subTest(config=path.name):
                load_config(path, use_environment=False)


if __name__ == '__main__':
    unittest.main()
