"""
Unit-Tests für den direkten Sattelpunktlöser.
"""

import unittest
from unittest.mock import patch

import numpy as np


def _rotational_data():
    from src.assembly.problem_data import homogeneous_data
    from src.mesh.curve import SIDE_1, SIDE_2

    def force(points):
        return np.column_stack([-points[:, 1], points[:, 0]])

    data = homogeneous_data()
    data.f = {SIDE_1: force, SIDE_2: force}
    return data


class TestSaddlePointSolver(unittest.TestCase):
    """Tests für SaddlePointSolver."""

    def setUp(self):
        """Test-Setup."""
        from src.assembly.assembler import SystemAssembler
        from src.assembly.constraints import apply_constraints
        from src.mesh.mesh import build_background_mesh

        self.mesh = build_background_mesh(n=0)
        self.data = _rotational_data()
        system = SystemAssembler(1, workers=1).assemble(self.mesh, self.data)
        self.constrained = apply_constraints(system, self.mesh, self.data)

    def test_residuals_small(self):
        """Test: Gesamtresiduum und Divergenzresiduum liegen unter 1e-10."""
        from src.solver.solver import SaddlePointSolver

        solution = SaddlePointSolver().solve(self.constrained)
        self.assertLess(solution.report["system"], 1e-10)
        self.assertLess(solution.report["divergence_rel"], 1e-10)
        self.assertGreater(np.linalg.norm(solution.u), 0.0)

    def test_pressure_mean_zero(self):
        """Test: Eichung erzwingt mittelwertfreien Druck."""
        from src.solver.solver import solve

        solution = solve(self.constrained)
        self.assertLess(abs(solution.pressure_mean()), 1e-10)
        self.assertLess(abs(solution.multiplier), 1e-8)

    def test_boundary_values(self):
        """Test: Randwerte sind exakt eingehalten."""
        from src.solver.solver import solve

        solution = solve(self.constrained)
        mask = self.constrained.system.dofmap.constrained_mask()
        np.testing.assert_array_equal(solution.u[mask], 0.0)

    def test_zero_rhs(self):
        """Test: Verschwindende rechte Seite ergibt die Nulllösung ohne Faktorisierung."""
        from src.assembly.assembler import SystemAssembler
        from src.assembly.constraints import apply_constraints
        from src.assembly.problem_data import homogeneous_data
        from src.solver.solver import solve

        data = homogeneous_data()
        system = SystemAssembler(1, workers=1).assemble(self.mesh, data)
        solution = solve(apply_constraints(system, self.mesh, data))
        self.assertEqual(solution.report["factorized"], 0.0)
        np.testing.assert_array_equal(solution.u, 0.0)
        np.testing.assert_array_equal(solution.p, 0.0)

    def test_cell_function(self):
        """Test: Zelllokale Sicht hat das lokale Layout."""
        from src.solver.solver import solve

        solution = solve(self.constrained)
        space = solution.discretization.cell_spaces[5]
        wg = solution.cell_function(5)
        self.assertEqual(wg.v0.shape, (2, space.nk))
        self.assertEqual(len(wg.vb), len(space.edges))
        self.assertEqual(solution.cell_pressure(5).shape, (space.n1,))

    def test_factorization_failure(self):
        """Test: Zusammenbruch der LU-Zerlegung ergibt SingularSystem mit Ursache."""
        from src.exceptions import SingularSystem
        from src.solver.solver import SaddlePointSolver

        with patch("src.solver.solver.splu", side_effect=RuntimeError("Factor is exactly singular")):
            with self.assertRaises(SingularSystem) as ctx:
                SaddlePointSolver().solve(self.constrained)
        self.assertIn("vermutete Ursache", str(ctx.exception))

    def test_diagnose_missing_gauge(self):
        """Test: Ohne Eichung wird die fehlende Eichung als Ursache genannt."""
        from src.assembly.constraints import apply_constraints
        from src.solver.solver import diagnose

        ungauged = apply_constraints(self.constrained.system, self.mesh, self.data, gauge=False)
        self.assertFalse(ungauged.has_gauge)
        self.assertIn("Eichung", diagnose(ungauged))
        self.assertIn("unbekannt", diagnose(self.constrained))


if __name__ == "__main__":
    unittest.main()
