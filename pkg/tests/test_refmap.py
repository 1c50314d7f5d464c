"""
Unit-Tests für Referenzabbildungen und Quadratur auf geraden und gekrümmten Zellen.
"""

import math
import unittest

import numpy as np


class TestReferenceRules(unittest.TestCase):
    """Tests für die Referenzregeln."""

    def test_triangle_exactness(self):
        """Test: Dreiecksregel integriert alle Monome bis Grad m exakt."""
        from src.refmap.reference import audit_rule, reference_rule

        for m in range(1, 11):
            points, weights = reference_rule("tri", m)
            self.assertLess(audit_rule("tri", points, weights, m), 1e-14)
            self.assertTrue(np.all(weights > 0.0))

    def test_square_exactness(self):
        """Test: Quadratregel integriert alle Monome bis Grad m exakt."""
        from src.refmap.reference import audit_rule, reference_rule

        for m in range(1, 11):
            points, weights = reference_rule("square", m)
            self.assertLess(audit_rule("square", points, weights, m), 1e-14)

    def test_unknown_shape(self):
        """Test: Unbekanntes Referenzelement wird abgelehnt."""
        from src.refmap.reference import reference_rule

        with self.assertRaises(ValueError):
            reference_rule("hex", 2)


class TestCellQuadrature(unittest.TestCase):
    """Tests für Zellregeln auf dem angepassten Kreisgitter."""

    @classmethod
    def setUpClass(cls):
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh
        from src.refmap.quadrature import QuadratureCache

        cls.meshes = {
            kind: fit_interface(build_background_mesh(n=1, kind=kind), InterfaceCurve.circle(0.5))
            for kind in ("tri", "quad")
        }
        cls.caches = {kind: QuadratureCache(mesh) for kind, mesh in cls.meshes.items()}

    def test_measure_matches_area(self):
        """Test: Summe der Gewichte gleich Zellfläche."""
        for kind, mesh in self.meshes.items():
            cache = self.caches[kind]
            for cell in mesh.cells:
                self.assertAlmostEqual(cache.cell_rule(cell.id, 4).measure, cell.area, places=9)

    def test_weights_positive(self):
        """Test: Alle Gewichte positiv."""
        mesh, cache = self.meshes["tri"], self.caches["tri"]
        for cell in mesh.cells:
            self.assertTrue(np.all(cache.cell_rule(cell.id, 6).weights > 0.0))

    def test_inner_disc_area(self):
        """Test: Quadratur über Ω1 ergibt π r²."""
        from src.mesh.curve import SIDE_1

        for kind, mesh in self.meshes.items():
            cache = self.caches[kind]
            area = sum(cache.cell_rule(c.id, 4).measure for c in mesh.cells if c.subdomain == SIDE_1)
            self.assertAlmostEqual(area, math.pi / 4.0, places=9)

    def test_second_moment(self):
        """Test: ∫ x² über das Gebiet ergibt 4/3."""
        for kind, mesh in self.meshes.items():
            cache = self.caches[kind]
            total = 0.0
            for cell in mesh.cells:
                rule = cache.cell_rule(cell.id, 4)
                total += float(rule.integrate(rule.points[:, 0] ** 2))
            self.assertAlmostEqual(total, 4.0 / 3.0, places=9)

    def test_disc_second_moment(self):
        """Test: ∫ (x² + y²) über Ω1 ergibt π r⁴ / 2."""
        from src.mesh.curve import SIDE_1

        mesh, cache = self.meshes["tri"], self.caches["tri"]
        total = 0.0
        for cell in mesh.cells:
            if cell.subdomain != SIDE_1:
                continue
            rule = cache.cell_rule(cell.id, 6)
            total += float(rule.integrate(np.sum(rule.points ** 2, axis=1)))
        self.assertAlmostEqual(total, math.pi * 0.5 ** 4 / 2.0, places=9)

    def test_cache_reuses_rules(self):
        """Test: Wiederholte Anfragen liefern dieselbe Regel."""
        cache = self.caches["tri"]
        self.assertIs(cache.cell_rule(0, 4), cache.cell_rule(0, 4))
        self.assertIs(cache.edge_rule(0, 4), cache.edge_rule(0, 4))


class TestEdgeQuadrature(unittest.TestCase):
    """Tests für Kantenregeln."""

    @classmethod
    def setUpClass(cls):
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh
        from src.refmap.quadrature import QuadratureCache

        cls.mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        cls.cache = QuadratureCache(cls.mesh)

    def test_interface_length(self):
        """Test: Interface-Kanten ergeben zusammen den Kreisumfang."""
        total = sum(self.cache.edge_rule(e.id, 4).measure for e in self.mesh.interface_edges())
        self.assertAlmostEqual(total, math.pi, places=9)

    def test_straight_edge_length(self):
        """Test: Gerade Kanten haben die Sehnenlänge."""
        for edge in self.mesh.edges:
            if edge.curved:
                continue
            self.assertAlmostEqual(
                self.cache.edge_rule(edge.id, 4).measure, self.mesh.chord_length(edge.id), places=12
            )

    def test_params_normalized(self):
        """Test: Bogenlängenparameter liegen in [0, 1] und steigen monoton."""
        for edge in self.mesh.interface_edges():
            params = self.cache.edge_rule(edge.id, 4).params
            self.assertTrue(np.all(params > 0.0) and np.all(params < 1.0))
            self.assertTrue(np.all(np.diff(params) > 0.0))

    def test_closed_boundary_normals(self):
        """Test: ∮ n ds verschwindet auf jedem Zellrand."""
        for cell in self.mesh.cells:
            total = np.zeros(2)
            for edge_id, orient in zip(cell.edges, cell.orientations):
                rule = self.cache.edge_rule(edge_id, 4)
                total += rule.integrate(rule.normals(orient))
            np.testing.assert_allclose(total, 0.0, atol=1e-11)

    def test_interface_normals_point_outward(self):
        """Test: Die Normale der Ω1-Zelle zeigt auf Γ radial nach außen."""
        from src.mesh.curve import SIDE_1

        for edge in self.mesh.interface_edges():
            owner = next(c for c in edge.owners if self.mesh.cells[c].subdomain == SIDE_1)
            cell = self.mesh.cells[owner]
            orient = cell.orientations[cell.edges.index(edge.id)]
            rule = self.cache.edge_rule(edge.id, 4)
            radial = rule.points / np.linalg.norm(rule.points, axis=1)[:, None]
            np.testing.assert_allclose(rule.normals(orient), radial, atol=1e-10)


if __name__ == "__main__":
    unittest.main()
