import atrclab
from atrclab import cli, constants
from atrclab.archive import read_rows
from atrclab.cli import ConfigError, ExperimentConfig
import unittest
import json
import os
import shutil
import tempfile
import warnings

SMALL_VERIFY = {
    "pairs": [[0.2, 0.5], [0.3, 0.2]],
    "coupling_domains": ["star"],
    "cycle_domains": ["diamond"],
    "small_domains": ["path3"],
    "sd_J": [0.2],
    "q": [9.],
    "betas": [1.],
}


class TestConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, content):
        path = os.path.join(self.tmp, "config.json")
        with open(path, "w") as f:
            f.write(content if isinstance(content, str) else json.dumps(content))
        return path

    def test_defaults(self):
        cfg = ExperimentConfig.load("verify")
        self.assertEqual(cfg["cap"], constants.ENUMERATION_CAP)
        self.assertIsNone(cfg["tolerance"])
        self.assertEqual(cfg["workers"], 1)

    def test_flat_and_section(self):
        path = self.write({"cap": 1000, "verify": {"q": [5.]}})
        cfg = ExperimentConfig.load("verify", path)
        self.assertEqual(cfg["cap"], 1000)
        self.assertEqual(cfg["q"], [5.])

    def test_overrides(self):
        cfg = ExperimentConfig.load("decay", None, {"seed": 4, "out": self.tmp, "workers": None})
        self.assertEqual(cfg["seed"], 4)
        self.assertEqual(cfg["out"], self.tmp)
        self.assertEqual(cfg["workers"], 1)

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("verify", self.write({"colour": "red"}))

    def test_unreadable(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("verify", self.write("{not json"))
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("verify", os.path.join(self.tmp, "missing.json"))
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("verify", self.write("[1, 2]"))

    def test_seed_required(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("phase-scan")
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("decay", None, {"seed": -1})
        cfg = ExperimentConfig.load("phi")
        self.assertIsNone(cfg["seed"])
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("phi", self.write({"sizes": [0, 1, 2]}))

    def test_invalid_values(self):
        for bad in ({"sweeps": 0}, {"sweeps": 10, "burn_in": 10}, {"sizes": []}, {"sizes": [2.5]},
                    {"beta": [-1.]}, {"J": 0.}, {"workers": 0}, {"J": 0.3}):
            with self.assertRaises(ConfigError, msg=str(bad)):
                ExperimentConfig.load("decay" if "beta" not in bad else "phase-scan", self.write(bad), {"seed": 1})

    def test_invalid_verify(self):
        for bad in ({"pairs": []}, {"pairs": [[0.2]]}, {"pairs": [[0.2, -0.5]]}, {"cycle_domains": ["hexagon"]},
                    {"q": [4.]}, {"cap": 0}, {"cap": 1.5}, {"tolerance": -1.}):
            with self.assertRaises(ConfigError, msg=str(bad)):
                ExperimentConfig.load("verify", self.write(bad))

    def test_unknown_command(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.load("anneal")

    def test_json(self):
        cfg = ExperimentConfig.load("phi")
        data = json.loads(cfg.to_json())
        self.assertEqual(data["command"], "phi")
        self.assertEqual(data["phi"]["sizes"], [0, 1])


class TestVerify(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def config(self, **extra):
        values = dict(SMALL_VERIFY)
        values.update(extra)
        path = os.path.join(self.tmp, "verify.json")
        with open(path, "w") as f:
            json.dump(values, f)
        return path

    def run_main(self, argv):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return cli.main(argv)

    def test_pass(self):
        status = self.run_main(["verify", "--config", self.config(), "--out", self.tmp])
        self.assertEqual(status, constants.EXIT_PASS)
        rows = read_rows(os.path.join(self.tmp, "verify.csv"))
        self.assertGreater(len(rows), 10)
        self.assertTrue(all(row["status"] == "pass" for row in rows))
        names = set(row["check"] for row in rows)
        for name in ("coupling", "spins_to_edges", "modified_boundary", "bkw", "duality", "gks", "cbc", "mon",
                     "holley", "derivative", "derivative_identity", "euler"):
            self.assertIn(name, names)
        self.assertTrue(os.path.exists(os.path.join(self.tmp, "verify_report.txt")))
        self.assertTrue(os.path.exists(os.path.join(self.tmp, "config.json")))

    def test_all_skipped(self):
        status = self.run_main(["verify", "--config", self.config(cap=10), "--out", self.tmp])
        self.assertEqual(status, constants.EXIT_CONFIG)
        rows = read_rows(os.path.join(self.tmp, "verify.csv"))
        self.assertTrue(all(row["status"] == "skipped" for row in rows))

    def test_tolerance_override(self):
        cfg = ExperimentConfig.load("verify", self.config(tolerance=1.e-3), {"out": self.tmp})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            status, report = cli.cmd_verify(cfg)
        self.assertEqual(status, constants.EXIT_PASS)
        rows = read_rows(os.path.join(self.tmp, "verify.csv"))
        self.assertTrue(all(float(row["tolerance"]) == 1.e-3 for row in rows))
        self.assertIn("passed", report)

    def test_cases(self):
        cfg = ExperimentConfig.load("verify", self.config())
        cases = cli.verify_cases(cfg)
        names = [c[0] for c in cases]
        self.assertEqual(names.count("cbc"), 1)
        self.assertEqual(names.count("derivative"), 2)
        self.assertEqual(names.count("derivative_identity"), 2)

    def test_bad_config_exit(self):
        path = os.path.join(self.tmp, "bad.json")
        with open(path, "w") as f:
            f.write("{")
        self.assertEqual(self.run_main(["verify", "--config", path, "--out", self.tmp]), constants.EXIT_CONFIG)

    def test_print_config(self):
        self.assertEqual(self.run_main(["phi", "--print-config"]), constants.EXIT_PASS)

    def test_workers_env(self):
        old = os.environ.get(cli.WORKERS_ENV)
        os.environ[cli.WORKERS_ENV] = "many"
        try:
            self.assertEqual(self.run_main(["phi", "--out", self.tmp]), constants.EXIT_CONFIG)
        finally:
            if old is None:
                del os.environ[cli.WORKERS_ENV]
            else:
                os.environ[cli.WORKERS_ENV] = old


class TestExperiments(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def run_main(self, command, values, seed=1, out=None, workers=None):
        path = os.path.join(self.tmp, command + ".json")
        with open(path, "w") as f:
            json.dump(values, f)
        argv = [command, "--config", path, "--seed", str(seed), "--out", out or self.tmp]
        if workers is not None:
            argv += ["--workers", str(workers)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return cli.main(argv)

    def test_phase_scan(self):
        values = {"J": [0.2], "beta": [1.], "sizes": [1], "sweeps": 40, "burn_in": 8}
        self.assertEqual(self.run_main("phase-scan", values), constants.EXIT_PASS)
        rows = read_rows(os.path.join(self.tmp, "phase_scan.csv"))
        self.assertEqual([row["layer"] for row in rows], ["tau", "tautau"])
        for row in rows:
            self.assertGreaterEqual(float(row["estimate"]), 0.)
            self.assertLessEqual(float(row["estimate"]), 1.)

    def test_reproducible(self):
        values = {"J": [0.2, 0.3], "beta": [1.], "sizes": [1], "sweeps": 30, "burn_in": 5}
        outs = []
        for name, workers in (("a", 1), ("b", 2)):
            out = os.path.join(self.tmp, name)
            self.run_main("phase-scan", values, seed=12, out=out, workers=workers)
            with open(os.path.join(out, "phase_scan.csv")) as f:
                outs.append(f.read())
        self.assertEqual(outs[0], outs[1])

    def test_decay(self):
        values = {"J": 0.2, "sizes": [1, 2, 3], "sweeps": 40, "burn_in": 8}
        self.assertEqual(self.run_main("decay", values), constants.EXIT_PASS)
        rows = read_rows(os.path.join(self.tmp, "decay.csv"))
        self.assertEqual([int(row["n"]) for row in rows], [1, 2, 3])
        for row in rows:
            self.assertGreater(float(row["estimate"]), 0.)
        with open(os.path.join(self.tmp, "decay_fit.txt")) as f:
            self.assertIn("rate = ", f.read())

    def test_phi_exact(self):
        values = {"J": 0.2, "beta": [0.5, 1.], "sizes": [0, 1]}
        self.assertEqual(self.run_main("phi", values), constants.EXIT_PASS)
        rows = read_rows(os.path.join(self.tmp, "phi.csv"))
        self.assertEqual(len(rows), 4)
        self.assertEqual(float(rows[0]["phi"]), 1.)
        self.assertEqual(rows[0]["below_one"], "0")
        self.assertTrue(all(row["method"] == "exact" for row in rows))


if __name__ == "__main__":
    unittest.main()
