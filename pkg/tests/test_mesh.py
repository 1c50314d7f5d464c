"""
Unit-Tests für Interface-Kurven, Hintergrundgitter und Interface-Anpassung.
"""

import math
import tempfile
import unittest
from pathlib import Path

import numpy as np


class TestInterfaceCurve(unittest.TestCase):
    """Tests für InterfaceCurve."""

    def test_circle_points_on_radius(self):
        """Test: Kreispunkte liegen auf dem Radius."""
        from src.mesh.curve import InterfaceCurve

        curve = InterfaceCurve.circle(0.5)
        points = curve.point(np.linspace(0.0, 1.0, 17))
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 0.5, atol=1e-14)

    def test_circle_length(self):
        """Test: Bogenlänge des Kreises ist 2πr."""
        from src.mesh.curve import InterfaceCurve

        curve = InterfaceCurve.circle(0.5)
        self.assertAlmostEqual(curve.length(), math.pi, places=10)

    def test_classify_inside_outside(self):
        """Test: Innenpunkte gehören zu Seite 1, Außenpunkte zu Seite 2."""
        from src.mesh.curve import SIDE_1, SIDE_2, InterfaceCurve

        curve = InterfaceCurve.circle(0.5)
        sides = curve.classify(np.array([[0.0, 0.0], [0.9, 0.9]]))
        self.assertEqual(list(sides), [SIDE_1, SIDE_2])

    def test_star_reaching_center_not_simple(self):
        """Test: r = (1 + sin 5θ)/7 erreicht das Zentrum und ist nicht einfach."""
        from src.mesh.curve import InterfaceCurve

        self.assertFalse(InterfaceCurve.polar_star(1.0 / 7.0, 1.0 / 7.0, 5).is_simple)
        self.assertTrue(InterfaceCurve.polar_star(0.5, 0.25, 2).is_simple)

    def test_invalid_radius(self):
        """Test: Nicht-positiver Radius wird abgelehnt."""
        from src.mesh.curve import InterfaceCurve

        with self.assertRaises(ValueError):
            InterfaceCurve.circle(-1.0)

    def test_wrong_parameter_count(self):
        """Test: Falsche Parameteranzahl wird abgelehnt."""
        from src.mesh.curve import InterfaceCurve

        with self.assertRaises(ValueError):
            InterfaceCurve("polar_star", (0.5, 0.1))


class TestBackgroundMesh(unittest.TestCase):
    """Tests für build_background_mesh."""

    def test_triangle_counts(self):
        """Test: Level 0 hat 32 Dreiecke und 56 Kanten."""
        from src.mesh.mesh import build_background_mesh

        mesh = build_background_mesh(n=0, kind="tri")
        self.assertEqual(mesh.num_cells, 32)
        self.assertEqual(mesh.num_edges, 56)
        self.assertEqual(len(mesh.boundary_edges()), 16)
        self.assertEqual(mesh.interface_edges(), [])

    def test_quad_counts(self):
        """Test: Level 0 hat 16 Vierecke und 40 Kanten."""
        from src.mesh.mesh import build_background_mesh

        mesh = build_background_mesh(n=0, kind="quad")
        self.assertEqual(mesh.num_cells, 16)
        self.assertEqual(mesh.num_edges, 40)
        self.assertTrue(all(c.kind == "quad" for c in mesh.cells))

    def test_mesh_size_halves(self):
        """Test: Jedes Level halbiert h."""
        from src.mesh.mesh import build_background_mesh

        h0 = build_background_mesh(n=0).h
        h1 = build_background_mesh(n=1).h
        self.assertAlmostEqual(h0, 0.5 * math.sqrt(2.0))
        self.assertAlmostEqual(h1, 0.5 * h0)

    def test_consistency(self):
        """Test: Adjazenz, Orientierungen und Flächensumme stimmen."""
        from src.mesh.mesh import build_background_mesh

        for kind in ("tri", "quad"):
            mesh = build_background_mesh(n=1, kind=kind)
            self.assertEqual(mesh.check_consistency(), [])
            self.assertAlmostEqual(sum(c.area for c in mesh.cells), 4.0)

    def test_invalid_arguments(self):
        """Test: Negatives Level und unbekannter Typ werden abgelehnt."""
        from src.mesh.mesh import build_background_mesh

        with self.assertRaises(ValueError):
            build_background_mesh(n=-1)
        with self.assertRaises(ValueError):
            build_background_mesh(kind="hex")
        with self.assertRaises(ValueError):
            build_background_mesh(domain=(1.0, -1.0, 0.0, 1.0))


class TestInterfaceFitting(unittest.TestCase):
    """Tests für fit_interface und polygonal_approximation."""

    @classmethod
    def setUpClass(cls):
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        cls.curve = InterfaceCurve.circle(0.5)
        cls.meshes = {
            kind: fit_interface(build_background_mesh(n=1, kind=kind), cls.curve)
            for kind in ("tri", "quad")
        }

    def test_fitted_mesh_consistent(self):
        """Test: Angepasstes Gitter ist konsistent."""
        for mesh in self.meshes.values():
            self.assertEqual(mesh.check_consistency(), [])
            self.assertGreater(len(mesh.interface_edges()), 0)

    def test_interface_covered_once(self):
        """Test: Die Interface-Bögen überdecken den Parameterbereich genau einmal."""
        for mesh in self.meshes.values():
            covered = sum(abs(e.arc[1] - e.arc[0]) for e in mesh.interface_edges())
            self.assertAlmostEqual(covered, 1.0, places=9)

    def test_inner_area_exact(self):
        """Test: Gekrümmte Zellen bilden die Kreisfläche exakt ab."""
        from src.mesh.curve import SIDE_1

        for mesh in self.meshes.values():
            inner = sum(c.area for c in mesh.cells if c.subdomain == SIDE_1)
            self.assertAlmostEqual(inner, math.pi / 4.0, places=8)

    def test_interface_edges_separate_sides(self):
        """Test: Jede Interface-Kante trennt Seite 1 und Seite 2."""
        from src.mesh.curve import SIDE_1, SIDE_2

        for mesh in self.meshes.values():
            for edge in mesh.interface_edges():
                sides = {mesh.cells[c].subdomain for c in edge.owners}
                self.assertEqual(sides, {SIDE_1, SIDE_2})
                self.assertEqual(edge.num_slots, 2)

    def test_polygonal_approximation(self):
        """Test: Sehnenapproximation ist gerade und verliert Fläche innen."""
        from src.mesh.curve import SIDE_1
        from src.mesh.fitting import polygonal_approximation

        mesh = polygonal_approximation(self.meshes["tri"])
        self.assertTrue(mesh.chordal)
        self.assertFalse(any(e.curved for e in mesh.edges))
        self.assertEqual(len(mesh.interface_edges()), len(self.meshes["tri"].interface_edges()))
        inner = sum(c.area for c in mesh.cells if c.subdomain == SIDE_1)
        self.assertLess(inner, math.pi / 4.0)
        self.assertAlmostEqual(sum(c.area for c in mesh.cells), 4.0)

    def test_statistics_pass(self):
        """Test: Regularitätsschranken sind erfüllt."""
        from src.mesh.statistics import mesh_statistics

        stats = mesh_statistics(self.meshes["tri"])
        self.assertTrue(stats.passed)
        self.assertGreater(stats.num_curved, 0)
        self.assertAlmostEqual(stats.h, self.meshes["tri"].h)

    def test_non_simple_curve_rejected(self):
        """Test: Nicht einfach geschlossene Kurve ergibt DegenerateCut."""
        from src.exceptions import DegenerateCut
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        with self.assertRaises(DegenerateCut):
            fit_interface(build_background_mesh(n=1), InterfaceCurve.polar_star(1.0 / 7.0, 1.0 / 7.0, 5))

    def test_curve_outside_domain(self):
        """Test: Kurve außerhalb des Gebiets wird abgelehnt."""
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        with self.assertRaises(ValueError):
            fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(2.0))

    def test_refit_rejected(self):
        """Test: Ein bereits angepasstes Gitter wird nicht erneut angepasst."""
        from src.mesh.fitting import fit_interface

        with self.assertRaises(ValueError):
            fit_interface(self.meshes["tri"], self.curve)


class TestFittedGeometry(unittest.TestCase):
    """Tests: Angepasste Gitter sind überall mit detJ > 0 abbildbar."""

    CURVES = {
        "Kreis": ("circle", (0.5,)),
        "Polarstern": ("polar_star", (0.5, 0.25, 2.0)),
    }

    def _curve(self, name):
        from src.mesh.curve import InterfaceCurve

        kind, params = self.CURVES[name]
        return InterfaceCurve(kind, params)

    def _assert_mappable(self, mesh):
        from src.mesh.statistics import MIN_ANGLE_DEG, mesh_statistics
        from src.refmap.cell_map import build_cell_map

        for cell in mesh.cells:
            self.assertGreater(build_cell_map(mesh, cell.id).det_range[0], 0.0, f"Zelle {cell.id}")
        stats = mesh_statistics(mesh)
        self.assertTrue(stats.passed)
        self.assertGreaterEqual(stats.min_angle, MIN_ANGLE_DEG)
        self.assertLessEqual(stats.max_angle, 180.0 - MIN_ANGLE_DEG)

    def test_positive_jacobian_levels_1_2(self):
        """Test: Kreis und Polarstern, Dreiecke und Vierecke, Level 1 und 2: alle Zellen mit detJ > 0."""
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        for name in self.CURVES:
            for kind in ("tri", "quad"):
                for level in (1, 2):
                    with self.subTest(curve=name, kind=kind, level=level):
                        mesh = fit_interface(build_background_mesh(n=level, kind=kind), self._curve(name))
                        self._assert_mappable(mesh)

    def test_level_0_mappable_or_refine_hint(self):
        """Test: Level 0 ist abbildbar oder meldet Level und Verfeinerungshinweis."""
        from src.exceptions import MeshError
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        for name in self.CURVES:
            for kind in ("tri", "quad"):
                with self.subTest(curve=name, kind=kind):
                    try:
                        mesh = fit_interface(build_background_mesh(n=0, kind=kind), self._curve(name))
                    except MeshError as e:
                        self.assertEqual(e.level, 0)
                        self.assertIn("(Level 0)", str(e))
                        self.assertIn("Gitter verfeinern", str(e))
                        continue
                    self._assert_mappable(mesh)

    def test_tangent_vertex_released(self):
        """Test: Die Ecke (0, −0.5), an der die Gitterlinie y = −0.5 den Kreis berührt, wird von Γ gelöst."""
        from src.mesh.fitting import RELEASE_FACTOR, fit_interface
        from src.mesh.mesh import build_background_mesh

        background = build_background_mesh(n=1, kind="tri")
        v = int(np.argmin(np.linalg.norm(background.vertices - np.array([0.0, -0.5]), axis=1)))
        mesh = fit_interface(background, self._curve("Kreis"))
        moved = mesh.vertices[v]
        self.assertAlmostEqual(moved[0], 0.0, places=6)
        self.assertAlmostEqual(abs(np.linalg.norm(moved) - 0.5), RELEASE_FACTOR * 0.25, places=6)

    def test_straight_edges_stay_in_subdomain(self):
        """Test: Gerade Kanten verlassen das Teilgebiet ihrer Zellen nicht (keine Diagonale durch Γ)."""
        from src.mesh.curve import SIDE_ON
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        tau = np.linspace(0.0, 1.0, 41)[1:-1]
        for kind in ("tri", "quad"):
            curve = self._curve("Kreis")
            mesh = fit_interface(build_background_mesh(n=1, kind=kind), curve)
            for edge in mesh.edges:
                if edge.curved:
                    continue
                side = mesh.cells[edge.owners[0]].subdomain
                labels = curve.classify(mesh.edge_points(edge.id, tau))
                self.assertTrue(np.all((labels == side) | (labels == SIDE_ON)), f"Kante {edge.id}")

    def test_background_corner_angles(self):
        """Test: Innenwinkel des Hintergrundgitters sind 90° bzw. 45°/90°."""
        from src.mesh.mesh import build_background_mesh
        from src.mesh.statistics import corner_angles

        quad = build_background_mesh(n=0, kind="quad")
        np.testing.assert_allclose(corner_angles(quad, 0), [90.0] * 4, atol=1e-12)
        tri = build_background_mesh(n=0, kind="tri")
        self.assertAlmostEqual(float(np.sum(corner_angles(tri, 0))), 180.0, places=10)
        self.assertAlmostEqual(float(np.max(corner_angles(tri, 0))), 90.0, places=10)

    def test_cusp_cell_fails_statistics(self):
        """Test: Eine Zelle mit Innenwinkel 0 (Bogen tangential an gerader Kante) besteht die Prüfung nicht."""
        from src.mesh.curve import SIDE_2, InterfaceCurve
        from src.mesh.mesh import MeshBuilder
        from src.mesh.statistics import mesh_statistics

        curve = InterfaceCurve.circle(0.5)
        s = np.array([0.25, -math.sqrt(0.25 - 0.0625)])
        builder = MeshBuilder(np.array([[0.0, -0.5], [0.25, -0.5], s]), curve=curve)
        t_s = math.atan2(s[1], s[0]) / (2.0 * math.pi) + 1.0
        builder.add_cell([0, 1, 2], [None, None, ("arc", t_s, 0.75)], SIDE_2)
        stats = mesh_statistics(builder.build(level=1, kind="tri"))
        self.assertFalse(stats.passed)
        self.assertEqual(stats.offending_cells, (0,))
        self.assertTrue(stats.min_angle < 1e-6 or stats.max_angle > 360.0 - 1e-6)

    def test_fit_errors_name_level(self):
        """Test: Anpassungsfehler nennen Level und Verfeinerungshinweis genau einmal."""
        from src.exceptions import CellCutTwice
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        small = InterfaceCurve.circle(0.1, center=(0.25, 0.25))
        for kind in ("tri", "quad"):
            with self.subTest(kind=kind):
                with self.assertRaises(CellCutTwice) as ctx:
                    fit_interface(build_background_mesh(n=0, kind=kind), small)
                self.assertEqual(ctx.exception.level, 0)
                self.assertIn("(Level 0)", str(ctx.exception))
                self.assertEqual(str(ctx.exception).count("Gitter verfeinern"), 1)


class TestMeshIO(unittest.TestCase):
    """Tests für das WGMESH-Format."""

    def setUp(self):
        """Test-Setup."""
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        self.mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / "circle.wgmesh"

    def tearDown(self):
        self.tmp.cleanup()

    def test_header(self):
        """Test: Datei beginnt mit der Kopfzeile WGMESH 1."""
        from src.mesh.mesh_io import save_mesh

        path = save_mesh(self.mesh, self.path)
        self.assertEqual(path.read_text(encoding="utf-8").splitlines()[0], "WGMESH 1")

    def test_reload_preserves_geometry(self):
        """Test: Gelesenes Gitter hat dieselbe Topologie und Geometrie."""
        from src.mesh.mesh_io import load_mesh, save_mesh

        loaded = load_mesh(save_mesh(self.mesh, self.path))
        self.assertEqual(loaded.num_cells, self.mesh.num_cells)
        self.assertEqual(loaded.num_edges, self.mesh.num_edges)
        np.testing.assert_allclose(loaded.vertices, self.mesh.vertices, atol=1e-15)
        self.assertEqual(len(loaded.interface_edges()), len(self.mesh.interface_edges()))
        for a, b in zip(loaded.cells, self.mesh.cells):
            self.assertEqual(a.subdomain, b.subdomain)
            self.assertAlmostEqual(a.area, b.area, places=12)
        self.assertEqual(loaded.check_consistency(), [])

    def test_bad_header(self):
        """Test: Fehlende Kopfzeile ergibt ValueError."""
        from src.mesh.mesh_io import load_mesh

        self.path.write_text("MESH 2\n", encoding="utf-8")
        with self.assertRaises(ValueError):
            load_mesh(self.path)

    def test_missing_file(self):
        """Test: Nicht vorhandene Datei ergibt FileNotFoundError."""
        from src.mesh.mesh_io import load_mesh

        with self.assertRaises(FileNotFoundError):
            load_mesh(Path(self.tmp.name) / "fehlt.wgmesh")


if __name__ == "__main__":
    unittest.main()
