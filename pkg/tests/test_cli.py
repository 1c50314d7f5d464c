"""
Unit-Tests für die Kommandozeile.
"""

import io
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch


class TestRunConfig(unittest.TestCase):
    """Tests für RunConfig.validate."""

    def test_defaults_valid(self):
        """Test: Standardkonfiguration ist gültig."""
        from src.main import DEFAULT_K, RunConfig

        config = RunConfig(command="study")
        config.validate()
        self.assertEqual(config.degree, DEFAULT_K)
        self.assertEqual(DEFAULT_K, 1)

    def test_invalid_values(self):
        """Test: Ungültige Werte ergeben ValueError."""
        from src.main import RunConfig

        for kwargs in (
            {"command": "solve"},
            {"command": "study", "problem": 9},
            {"command": "study", "k": 4},
            {"command": "study", "levels": 0},
            {"command": "study", "mesh": "hex"},
            {"command": "study", "start_level": -1},
            {"command": "study", "k": 2, "exactness": 3},
            {"command": "study", "formats": ("csv", "pdf")},
        ):
            with self.subTest(**{key: str(value) for key, value in kwargs.items()}):
                with self.assertRaises(ValueError):
                    RunConfig(**kwargs).validate()


class TestMain(unittest.TestCase):
    """Tests für main() und run()."""

    def setUp(self):
        """Test-Setup."""
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def _main(self, argv):
        from src.main import main

        stdout, stderr = io.StringIO(), io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            code = main(argv)
        return code, stdout.getvalue(), stderr.getvalue()

    def test_unknown_problem_exit_code(self):
        """Test: Unbekanntes Testproblem ergibt Exit-Code 2."""
        code, _, _ = self._main(["study", "--problem", "9"])
        self.assertEqual(code, 2)

    def test_invalid_exactness_exit_code(self):
        """Test: Zu kleine Quadraturexaktheit ergibt Exit-Code 2."""
        code, _, stderr = self._main(["study", "--k", "2", "--exactness", "3"])
        self.assertEqual(code, 2)
        self.assertIn("Quadraturexaktheit", stderr)

    def test_only_long_options(self):
        """Test: Kurzformen -o, -f und -v werden abgelehnt (Exit-Code 2)."""
        for argv in (
            ["study", "-o", str(self.out / "x.csv")],
            ["study", "-f", "csv"],
            ["-v", "patch"],
            ["check", "-v"],
        ):
            with self.subTest(argv=" ".join(argv)):
                code, _, stderr = self._main(argv)
                self.assertEqual(code, 2)
                self.assertIn("unrecognized arguments", stderr)

    def test_package_exposes_main_module(self):
        """Test: src.main bleibt das Modul, damit mock.patch("src.main.…") greift."""
        import inspect

        import src
        import src.main

        self.assertTrue(inspect.ismodule(src.main))
        self.assertNotIn("main", src.__all__)

    def test_study_writes_csv(self):
        """Test: Studie schreibt CSV mit festem Kopf und %.4e-Werten."""
        target = self.out / "study.csv"
        code, stdout, _ = self._main([
            "study", "--problem", "1", "--k", "1", "--levels", "2", "--start-level", "1",
            "--output", str(target),
        ])
        self.assertEqual(code, 0)
        self.assertIn("Testproblem 1", stdout)
        lines = target.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "n,h,energy_err,energy_order,l2u_err,l2u_order,l2p_err,l2p_order")
        self.assertEqual(len(lines), 3)
        first = lines[1].split(",")
        self.assertEqual(first[0], "1")
        self.assertEqual(first[3], "")
        self.assertRegex(first[1], r"^\d\.\d{4}e[+-]\d{2}$")
        second = lines[2].split(",")
        self.assertRegex(second[3], r"^-?\d\.\d{4}e[+-]\d{2}$")

    def test_mesh_dump(self):
        """Test: mesh-dump schreibt eine WGMESH-Datei, Matrix und Quadratur."""
        target = self.out / "gitter.wgmesh"
        matrix = self.out / "A.txt"
        quadrature = self.out / "quad.csv"
        code, stdout, _ = self._main([
            "mesh-dump", "--problem", "1", "--k", "1", "--start-level", "1", "--output", str(target),
            "--matrix", str(matrix), "--quadrature", str(quadrature),
        ])
        self.assertEqual(code, 0)
        self.assertTrue(target.read_text(encoding="utf-8").startswith("WGMESH 1"))
        self.assertEqual(len(matrix.read_text(encoding="utf-8").splitlines()[0].split()), 3)
        self.assertTrue(quadrature.read_text(encoding="utf-8").startswith("x,y,w"))
        self.assertIn("Gitter geschrieben", stdout)

    def test_patch_command(self):
        """Test: Patch-Befehl meldet PASS."""
        code, stdout, _ = self._main(["patch", "--k", "1", "--start-level", "0"])
        self.assertEqual(code, 0)
        self.assertTrue(stdout.startswith("PASS Patch-Test k=1"))

    def test_numerical_error_exit_code(self):
        """Test: WGError im Befehl ergibt Exit-Code 1."""
        from src.exceptions import SingularSystem
        from src.main import RunConfig, run

        error = SingularSystem("Faktorisierung fehlgeschlagen", cause="unbekannt")
        with patch("src.main.ConvergenceStudy", side_effect=error):
            with redirect_stderr(io.StringIO()) as stderr:
                code = run(RunConfig(command="study", k=1, levels=1))
        self.assertEqual(code, 1)
        self.assertIn("SingularSystem", stderr.getvalue())

    def test_check_failure_exit_code(self):
        """Test: Fehlgeschlagene Prüfung ergibt Exit-Code 1."""
        from src.main import RunConfig, run
        from src.verify.properties import CheckResult

        results = [CheckResult("a", True, 0.0, 1.0), CheckResult("b", False, 2.0, 1.0)]
        with patch("src.main.PropertySuite") as suite:
            suite.return_value.run.return_value = results
            with redirect_stdout(io.StringIO()) as stdout:
                code = run(RunConfig(command="check"))
        self.assertEqual(code, 1)
        self.assertIn("1/2 Prüfungen bestanden", stdout.getvalue())


if __name__ == "__main__":
    unittest.main()
