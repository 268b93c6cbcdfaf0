""" Test files for Run_Config_Functions """

### Load in test module
import NACS.src.front_interface.Run_Config_Functions as tm

### Load in needed libraries
import os
import tempfile
import unittest

import yaml

from NACS.src.back_end.General_Utility.Errors import ConfigError


class Test_Run_Config(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as handle:
            handle.write(text)
        return path

    """
    ---------------------------------------------------------------------------
    TESTING FOR RunConfig defaults
    ---------------------------------------------------------------------------
    """

    def test_defaults(self):
        config = tm.RunConfig()
        self.assertEqual((config.a_star, config.epsilon), (9.5, 0.1))
        self.assertEqual((config.mu_h, config.mu_v, config.mu), (0.615, 0.615, 0.618))
        self.assertEqual(config.n_window, (-100, 100))
        self.assertEqual(config.grid, 256)
        self.assertEqual(config.depth, 8)
        self.assertIs(tm.validate_config(config), config)

    def test_to_dict_lists_formats(self):
        self.assertEqual(tm.RunConfig().to_dict()["formats"], ["csv", "json", "svg"])

    """
    ---------------------------------------------------------------------------
    TESTING FOR validate_config() and config_from_dict()
    ---------------------------------------------------------------------------
    """

    def test_rejects_bad_values(self):
        for values in (
            {"epsilon": -0.1},
            {"mu": 0.0},
            {"n_min": 5, "n_max": 4},
            {"grid": 1},
            {"depth": 0},
            {"oracle_grid": 16},
            {"oracle_refine": 0},
            {"threads": 0},
            {"formats": "csv,png"},
            {"formats": ""},
            {"a_star": float("nan")},
        ):
            with self.assertRaises(ConfigError, msg=values):
                tm.validate_config(tm.config_from_dict(values))

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            tm.config_from_dict({"colour": "red"})

    def test_coerces_types(self):
        config = tm.config_from_dict({"grid": "64", "a_star": 10})
        self.assertEqual(config.grid, 64)
        self.assertIsInstance(config.a_star, float)

    def test_uncoercible_value(self):
        with self.assertRaises(ConfigError):
            tm.config_from_dict({"grid": "many"})

    def test_parse_formats(self):
        self.assertEqual(tm.parse_formats("CSV, json,csv"), ("csv", "json"))
        self.assertEqual(tm.parse_formats(["svg"]), ("svg",))

    """
    ---------------------------------------------------------------------------
    TESTING FOR control files
    ---------------------------------------------------------------------------
    """

    def test_load_missing_file(self):
        with self.assertRaises(ConfigError):
            tm.load_config_file(os.path.join(self.tmp.name, "nope.yml"))

    def test_load_empty_file(self):
        self.assertEqual(tm.load_config_file(self.write("e.yml", "")), {})

    def test_load_non_mapping(self):
        with self.assertRaises(ConfigError):
            tm.load_config_file(self.write("l.yml", "- 1\n- 2\n"))

    def test_load_invalid_yaml(self):
        with self.assertRaises(ConfigError):
            tm.load_config_file(self.write("b.yml", "grid: [1, 2\n"))

    def test_written_file_reloads(self):
        config = tm.config_from_dict({"a_star": 10.0, "formats": "json"})
        path = tm.write_config_file(config, os.path.join(self.tmp.name, tm.CONFIG_FILE_NAME))
        with open(path) as handle:
            self.assertTrue(handle.readline().startswith("#"))
        again = tm.config_from_dict(tm.load_config_file(path))
        self.assertEqual(again, config)
        self.assertIsInstance(yaml.safe_load(open(path)), dict)

    """
    ---------------------------------------------------------------------------
    TESTING FOR resolve_config()
    ---------------------------------------------------------------------------
    """

    def test_resolve_defaults(self):
        verb, config = tm.resolve_config(["verify"])
        self.assertEqual(verb, "verify")
        self.assertEqual(config, tm.RunConfig())

    def test_flags_override_file(self):
        path = self.write("c.yml", "a_star: 10.0\ngrid: 32\n")
        verb, config = tm.resolve_config(
            ["lambda", "--config", path, "--grid", "16", "--n", "3", "--quiet"]
        )
        self.assertEqual(verb, "lambda")
        self.assertEqual((config.a_star, config.grid), (10.0, 16))
        self.assertEqual(config.lambda_n, 3)
        self.assertTrue(config.quiet)

    def test_oracle_flags(self):
        _, config = tm.resolve_config(
            ["oracle", "--k", "4", "--oracle-grid", "512", "--oracle-refine", "2"]
        )
        self.assertEqual((config.oracle_k, config.oracle_grid, config.oracle_refine), (4, 512, 2))

    def test_usage_errors(self):
        for argv in (
            [],
            ["fly"],
            ["verify", "--grid", "many"],
            ["verify", "--bogus"],
            ["verify", "--n-min", "3", "--n-max", "2"],
        ):
            with self.assertRaises(ConfigError, msg=argv):
                tm.resolve_config(argv)


if __name__ == "__main__":
    unittest.main()
