"""
Unit-Tests für DofMap, lokale Formen, Assemblierung und Nebenbedingungen.
"""

import os
import unittest
from unittest.mock import patch

import numpy as np


def _constant_velocity(dofmap, component=0):
    """DOF-Vektor der konstanten Geschwindigkeit e_component (beide Interface-Slots)."""
    u = np.zeros(dofmap.n_velocity)
    shift = component * dofmap.n_scalar
    u[dofmap.cell_offsets + shift] = 1.0
    for slots in dofmap.edge_offsets:
        for start in slots:
            u[start + shift] = 1.0
    return u


class TestDofMap(unittest.TestCase):
    """Tests für DofMap."""

    def test_counts_background(self):
        """Test: Zählung auf dem Hintergrundgitter (k=1)."""
        from src.assembly.dofmap import DofMap
        from src.mesh.mesh import build_background_mesh

        mesh = build_background_mesh(n=0)
        dofmap = DofMap(mesh, 1)
        self.assertEqual(dofmap.n_scalar, 32 * 3 + 56 * 1)
        self.assertEqual(dofmap.n_velocity, 2 * dofmap.n_scalar)
        self.assertEqual(dofmap.n_pressure, 32)
        self.assertEqual(int(dofmap.constrained_mask().sum()), 2 * 16)
        self.assertFalse(dofmap.eliminated_mask().any())
        dofmap.check_ranges()

    def test_counts_fitted(self):
        """Test: Interface-Kanten tragen zwei Slots der Dimension k+1."""
        from src.assembly.dofmap import DofMap
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        k = 2
        dofmap = DofMap(mesh, k)
        expected = mesh.num_cells * 6 + sum(
            (k + 1) * 2 if e.is_interface else k for e in mesh.edges
        )
        self.assertEqual(dofmap.n_scalar, expected)
        n_interface = len(mesh.interface_edges())
        self.assertEqual(int(dofmap.eliminated_mask().sum()), 2 * n_interface * (k + 1))
        dofmap.check_ranges()

    def test_slot_of(self):
        """Test: Seite 1 sieht Slot 0, Seite 2 Slot 1."""
        from src.assembly.dofmap import DofMap
        from src.mesh.curve import SIDE_1, InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        dofmap = DofMap(mesh, 1)
        edge = mesh.interface_edges()[0]
        for owner in edge.owners:
            expected = 0 if mesh.cells[owner].subdomain == SIDE_1 else 1
            self.assertEqual(dofmap.slot_of(owner, edge.id), expected)

    def test_invalid_degree(self):
        """Test: Grad 0 wird abgelehnt."""
        from src.assembly.dofmap import DofMap
        from src.mesh.mesh import build_background_mesh

        with self.assertRaises(ValueError):
            DofMap(build_background_mesh(n=0), 0)


class TestProblemData(unittest.TestCase):
    """Tests für ProblemData."""

    def test_missing_side(self):
        """Test: Fehlendes Teilgebiet wird abgelehnt."""
        from src.assembly.problem_data import ProblemData, zero_vector
        from src.mesh.curve import SIDE_1

        with self.assertRaises(ValueError):
            ProblemData(A={SIDE_1: np.eye(2)}, f={SIDE_1: zero_vector})

    def test_check_rejects_indefinite(self):
        """Test: Indefinites A wird abgelehnt."""
        from src.assembly.problem_data import homogeneous_data

        data = homogeneous_data(A2=np.diag([1.0, -1.0]))
        with self.assertRaises(ValueError):
            data.check()

    def test_check_rejects_nonsymmetric(self):
        """Test: Nicht-symmetrisches A wird abgelehnt."""
        from src.assembly.problem_data import homogeneous_data

        with self.assertRaises(ValueError):
            homogeneous_data(A1=np.array([[1.0, 0.5], [0.0, 1.0]])).check()

    def test_bounds(self):
        """Test: Elliptizitätsschranken sind die Eigenwerte."""
        from src.assembly.problem_data import homogeneous_data
        from src.mesh.curve import SIDE_2

        bounds = homogeneous_data(A2=10.0 * np.eye(2)).check()
        self.assertEqual(bounds[SIDE_2], (10.0, 10.0))

    def test_scaled(self):
        """Test: scaled() skaliert die Daten."""
        from src.assembly.problem_data import ProblemData
        from src.mesh.curve import SIDE_1, SIDE_2

        def force(points):
            return np.ones((len(points), 2))

        data = ProblemData(A={SIDE_1: np.eye(2), SIDE_2: np.eye(2)}, f={SIDE_1: force, SIDE_2: force})
        scaled = data.scaled(2.5)
        np.testing.assert_allclose(scaled.f[SIDE_1](np.zeros((3, 2))), 2.5)
        np.testing.assert_allclose(scaled.g(np.zeros((3, 2))), 0.0)


class TestAssembly(unittest.TestCase):
    """Tests für SystemAssembler."""

    @classmethod
    def setUpClass(cls):
        from src.assembly.assembler import SystemAssembler
        from src.assembly.problem_data import homogeneous_data
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        cls.data = homogeneous_data()
        cls.background = build_background_mesh(n=0)
        cls.fitted = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        cls.plain = SystemAssembler(1, workers=1).assemble(cls.background, cls.data)
        cls.curved = SystemAssembler(2, workers=1).assemble(cls.fitted, cls.data)

    def test_dimensions(self):
        """Test: Matrixdimensionen entsprechen der DofMap."""
        for system in (self.plain, self.curved):
            n_u, n_p = system.dofmap.n_velocity, system.dofmap.n_pressure
            self.assertEqual(system.A.shape, (n_u, n_u))
            self.assertEqual(system.S.shape, (n_u, n_u))
            self.assertEqual(system.B.shape, (n_p, n_u))
            self.assertEqual(system.F.shape, (n_u,))

    def test_symmetry(self):
        """Test: A und S sind symmetrisch."""
        for system in (self.plain, self.curved):
            for matrix in (system.A, system.S):
                self.assertLess(abs(matrix - matrix.T).max(), 1e-12)

    def test_constants_in_kernel(self):
        """Test: Konstante Geschwindigkeiten liegen im Kern von A_s und B."""
        for system, tol in ((self.plain, 1e-11), (self.curved, 1e-8)):
            for c in range(2):
                u = _constant_velocity(system.dofmap, c)
                self.assertLess(np.abs(system.A_s @ u).max(), tol)
                self.assertLess(np.abs(system.B @ u).max(), tol)

    def test_stabilizer_positive_semidefinite(self):
        """Test: A_s ist positiv semidefinit."""
        dense = self.plain.A_s.toarray()
        self.assertGreater(np.linalg.eigvalsh(dense).min(), -1e-10)

    def test_pressure_constant_only_sees_boundary(self):
        """Test: Bᵀ1 verschwindet auf Innen- und inneren Kanten-DOFs."""
        system = self.plain
        dofmap = system.dofmap
        ones = np.zeros(dofmap.n_pressure)
        ones[::dofmap.n1] = 1.0
        response = system.B.T @ ones
        boundary = dofmap.constrained_mask()
        self.assertLess(np.abs(response[~boundary]).max(), 1e-12)
        self.assertGreater(np.abs(response[boundary]).max(), 1e-3)

    def test_zero_data_zero_load(self):
        """Test: Homogene Daten ergeben verschwindende Last."""
        np.testing.assert_array_equal(self.curved.F, 0.0)
        np.testing.assert_array_equal(self.curved.G, 0.0)

    def test_deterministic(self):
        """Test: Wiederholte und parallele Assemblierung sind bitgleich."""
        from src.assembly.assembler import SystemAssembler

        again = SystemAssembler(2, workers=4).assemble(self.fitted, self.data)
        for name in ("A", "S", "B"):
            first, second = getattr(self.curved, name), getattr(again, name)
            self.assertEqual((first != second).nnz, 0)
        np.testing.assert_array_equal(self.curved.F, again.F)

    def test_invalid_degree(self):
        """Test: Grad 0 wird abgelehnt."""
        from src.assembly.assembler import SystemAssembler

        with self.assertRaises(ValueError):
            SystemAssembler(0)


class TestWorkers(unittest.TestCase):
    """Tests für resolve_workers."""

    def test_explicit_value(self):
        """Test: Explizites Argument hat Vorrang."""
        from src.assembly.assembler import resolve_workers

        with patch.dict(os.environ, {"WG_THREADS": "7"}):
            self.assertEqual(resolve_workers(3), 3)

    def test_environment(self):
        """Test: WG_THREADS begrenzt die Worker-Anzahl."""
        from src.assembly.assembler import resolve_workers

        with patch.dict(os.environ, {"WG_THREADS": "2"}):
            self.assertEqual(resolve_workers(), 2)

    def test_invalid_environment(self):
        """Test: Ungültiger Wert ergibt einen Worker."""
        from src.assembly.assembler import resolve_workers

        with patch.dict(os.environ, {"WG_THREADS": "viele"}):
            with self.assertLogs("src.assembly.assembler", level="WARNING"):
                self.assertEqual(resolve_workers(), 1)


class TestConstraints(unittest.TestCase):
    """Tests für ConstraintSet und apply_constraints."""

    def test_conflicting_fix(self):
        """Test: Zweimal verschieden fixierter DOF ergibt InconsistentConstraint."""
        from src.assembly.constraints import ConstraintSet
        from src.exceptions import InconsistentConstraint

        cs = ConstraintSet(4)
        cs.fix(1, 0.5)
        cs.fix(1, 0.5)
        with self.assertRaises(InconsistentConstraint):
            cs.fix(1, 0.6)

    def test_alias_of_fixed_dof(self):
        """Test: Fixierter DOF kann kein Alias werden."""
        from src.assembly.constraints import ConstraintSet
        from src.exceptions import InconsistentConstraint

        cs = ConstraintSet(4)
        cs.fix(2, 1.0)
        with self.assertRaises(InconsistentConstraint):
            cs.alias(2, 0, 0.0)

    def test_reduction(self):
        """Test: u = T ū + u_c setzt feste Werte und Aliase."""
        from src.assembly.constraints import ConstraintSet

        cs = ConstraintSet(5)
        cs.fix(0, 2.0)
        cs.alias(3, 1, -0.5)
        cs.alias(4, 0, 1.0)
        T, u_c, free = cs.reduction()
        np.testing.assert_array_equal(free, [1, 2])
        self.assertEqual(T.shape, (5, 2))
        u = T @ np.array([10.0, 20.0]) + u_c
        np.testing.assert_allclose(u, [2.0, 10.0, 20.0, 9.5, 3.0])

    def test_other_mesh_rejected(self):
        """Test: System und Gitter müssen zusammenpassen."""
        from src.assembly.assembler import SystemAssembler
        from src.assembly.constraints import apply_constraints
        from src.assembly.problem_data import homogeneous_data
        from src.mesh.mesh import build_background_mesh

        data = homogeneous_data()
        system = SystemAssembler(1, workers=1).assemble(build_background_mesh(n=0), data)
        with self.assertRaises(ValueError):
            apply_constraints(system, build_background_mesh(n=0), data)

    def test_constrained_system_nonsingular(self):
        """Test: Das eingeschränkte System ist symmetrisch und regulär."""
        from src.assembly.assembler import SystemAssembler
        from src.assembly.constraints import apply_constraints
        from src.assembly.problem_data import homogeneous_data
        from src.mesh.mesh import build_background_mesh

        mesh = build_background_mesh(n=0)
        data = homogeneous_data()
        system = SystemAssembler(1, workers=1).assemble(mesh, data)
        constrained = apply_constraints(system, mesh, data)
        dense = constrained.matrix.toarray()
        n_free = system.dofmap.n_velocity - int(system.dofmap.constrained_mask().sum())
        self.assertEqual(constrained.n_free, n_free)
        self.assertEqual(dense.shape[0], n_free + system.dofmap.n_pressure + 1)
        np.testing.assert_allclose(dense, dense.T, atol=1e-12)
        self.assertGreater(np.linalg.svd(dense, compute_uv=False).min(), 1e-8)

    def test_interface_aliases(self):
        """Test: Slot-2-DOFs sind Aliase von Slot 1 mit Versatz −Q_b φ."""
        from src.assembly.assembler import SystemAssembler
        from src.assembly.constraints import apply_constraints
        from src.assembly.problem_data import homogeneous_data
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        data = homogeneous_data()
        data.phi = lambda points: np.tile([1.0, -2.0], (len(points), 1))
        system = SystemAssembler(1, workers=1).assemble(mesh, data)
        constrained = apply_constraints(system, mesh, data)
        dofmap = system.dofmap
        full = constrained.expand(np.zeros(constrained.n_free))
        for edge in mesh.interface_edges():
            for c, jump in enumerate((1.0, -2.0)):
                side1 = full[dofmap.vector_dofs(dofmap.edge_dofs(edge.id, 0), c)]
                side2 = full[dofmap.vector_dofs(dofmap.edge_dofs(edge.id, 1), c)]
                np.testing.assert_allclose(side1 - side2, [jump, 0.0], atol=1e-12)


if __name__ == "__main__":
    unittest.main()
