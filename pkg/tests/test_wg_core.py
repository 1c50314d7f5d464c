"""
Unit-Tests für Basen, L²-Projektionen und schwache Operatoren.
"""

import unittest

import numpy as np


def _cubic_field(points):
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([x ** 3 + x * y ** 2 - y, x ** 2 * y - 2.0 * y ** 3 + x])


def _cubic_gradient(points):
    x, y = points[:, 0], points[:, 1]
    grad = np.empty((len(points), 2, 2))
    grad[:, 0, 0] = 3.0 * x ** 2 + y ** 2
    grad[:, 0, 1] = 2.0 * x * y - 1.0
    grad[:, 1, 0] = 2.0 * x * y + 1.0
    grad[:, 1, 1] = x ** 2 - 6.0 * y ** 2
    return grad


class TestBasis(unittest.TestCase):
    """Tests für CellBasis und EdgeBasis."""

    def test_dimensions(self):
        """Test: dim P_k = (k+1)(k+2)/2."""
        from src.wg_core.basis import monomial_exponents, scalar_dimension

        for k in range(5):
            self.assertEqual(scalar_dimension(k), (k + 1) * (k + 2) // 2)
            self.assertEqual(len(monomial_exponents(k)), scalar_dimension(k))
        self.assertEqual(scalar_dimension(-1), 0)

    def test_gradients_match_finite_differences(self):
        """Test: Basisgradienten stimmen mit zentralen Differenzen überein."""
        from src.wg_core.basis import CellBasis

        basis = CellBasis((0.1, -0.2), 0.5, 3)
        points = np.array([[0.2, 0.1], [-0.1, -0.3]])
        step = 1e-6
        grads = basis.gradients(points)
        for j in range(2):
            shift = np.zeros(2)
            shift[j] = step
            fd = (basis.values(points + shift) - basis.values(points - shift)) / (2.0 * step)
            np.testing.assert_allclose(grads[:, :, j], fd, atol=1e-7)

    def test_edge_basis_orthogonal(self):
        """Test: Legendre-Basis ist auf [0, 1] orthogonal."""
        from src.refmap.reference import gauss_legendre
        from src.wg_core.basis import EdgeBasis

        s, w = gauss_legendre(6)
        values = EdgeBasis(3).values(s)
        gram = (values * w[:, None]).T @ values
        np.testing.assert_allclose(gram, np.diag(1.0 / (2.0 * np.arange(4) + 1.0)), atol=1e-14)


class TestCellSpaces(unittest.TestCase):
    """Tests für die lokalen Räume auf dem angepassten Kreisgitter."""

    @classmethod
    def setUpClass(cls):
        from src.assembly.assembler import Discretization
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        cls.mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        cls.disc = Discretization(cls.mesh, 2, workers=1)
        cls.straight = [s for s in cls.disc.cell_spaces if not cls.mesh.cells[s.cell_id].curved]
        cls.curved = [s for s in cls.disc.cell_spaces if cls.mesh.cells[s.cell_id].curved]

    def test_mass_spd(self):
        """Test: Massenmatrizen sind symmetrisch positiv definit."""
        for space in self.disc.cell_spaces:
            np.testing.assert_allclose(space.mass, space.mass.T, atol=1e-15)
            self.assertGreater(np.linalg.eigvalsh(space.mass).min(), 0.0)
            self.assertLess(space.mass_condition, 1e12)

    def test_edge_dimensions(self):
        """Test: Spurraum P_{k−1} auf geraden Kanten, P_k auf dem Interface."""
        for es in self.disc.edge_spaces:
            self.assertEqual(es.dim, 3 if es.is_interface else 2)

    def test_interface_slots(self):
        """Test: Ω1-Zellen nutzen Slot 0, Ω2-Zellen Slot 1 der Interface-Kante."""
        from src.mesh.curve import SIDE_1

        for space in self.curved:
            for ce in space.edges:
                if ce.space.is_interface:
                    self.assertEqual(ce.slot, 0 if space.subdomain == SIDE_1 else 1)

    def test_invalid_degree(self):
        """Test: Grad 0 wird abgelehnt."""
        from src.wg_core.spaces import CellSpace

        with self.assertRaises(ValueError):
            CellSpace(self.mesh, 0, 0, self.disc.edge_spaces, self.disc.cache)

    def test_local_layout_mismatch(self):
        """Test: Falsche Koeffizientenzahl ergibt ValueError."""
        from src.wg_core.spaces import WGFunction

        space = self.disc.cell_spaces[0]
        with self.assertRaises(ValueError):
            WGFunction(v0=np.zeros((2, space.nk + 1)), vb=[]).to_local(space)


class TestProjections(unittest.TestCase):
    """Tests für Q_0, Q_b, 𝒬_h und ℚ_h."""

    @classmethod
    def setUpClass(cls):
        from src.assembly.assembler import Discretization
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        cls.mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        cls.disc = Discretization(cls.mesh, 2, workers=1)

    def test_q0_reproduces_polynomials(self):
        """Test: Q_0 reproduziert Polynome vom Grad k, auch auf gekrümmten Zellen."""
        from src.wg_core.projection import project_Q0

        def field(points):
            x, y = points[:, 0], points[:, 1]
            return np.column_stack([1.0 + x - 2.0 * x * y, y ** 2 - 3.0 * x])

        for space in self.disc.cell_spaces:
            coeffs = project_Q0(field, space)
            self.assertEqual(coeffs.shape, (2, space.nk))
            np.testing.assert_allclose(space.phi @ coeffs.T, field(space.rule.points), atol=1e-11)

    def test_q0_scalar_shape(self):
        """Test: Skalare Funktionen liefern (dim P_k,)."""
        from src.wg_core.projection import project_Q0

        space = self.disc.cell_spaces[0]
        coeffs = project_Q0(lambda p: p[:, 0] + 2.0, space)
        self.assertEqual(coeffs.shape, (space.nk,))

    def test_qb_reproduces_linear_on_straight_edges(self):
        """Test: Q_b reproduziert lineare Funktionen auf geraden Kanten."""
        from src.wg_core.projection import project_Qb

        def field(points):
            return 2.0 - points[:, 0] + 0.5 * points[:, 1]

        for es in self.disc.edge_spaces:
            if es.is_interface:
                continue
            np.testing.assert_allclose(es.evaluate(project_Qb(field, es)), field(es.rule.points), atol=1e-12)

    def test_qb_side_selection(self):
        """Test: Bei Seitenzuordnungen wird die Funktion der gewählten Seite projiziert."""
        from src.mesh.curve import SIDE_1, SIDE_2
        from src.wg_core.projection import project_Qb

        fields = {SIDE_1: lambda p: np.ones(len(p)), SIDE_2: lambda p: 3.0 * np.ones(len(p))}
        es = next(s for s in self.disc.edge_spaces if s.is_interface)
        np.testing.assert_allclose(es.evaluate(project_Qb(fields, es, side=SIDE_2)), 3.0, atol=1e-12)
        np.testing.assert_allclose(es.evaluate(project_Qb(fields, es, side=SIDE_1)), 1.0, atol=1e-12)

    def test_pressure_projection_mean(self):
        """Test: 𝒬_h erhält Zellmittelwerte."""
        from src.wg_core.projection import project_pressure_Qh

        def pressure(points):
            return np.sin(points[:, 0]) * np.cos(points[:, 1])

        for space in self.disc.cell_spaces:
            coeffs = project_pressure_Qh(pressure, space)
            projected = space.rule.integrate(space.psi @ coeffs)
            exact = space.rule.integrate(pressure(space.rule.points))
            self.assertAlmostEqual(float(projected), float(exact), places=12)


class TestWeakOperators(unittest.TestCase):
    """Tests für schwachen Gradienten und schwache Divergenz."""

    @classmethod
    def setUpClass(cls):
        from src.assembly.assembler import Discretization
        from src.mesh.curve import InterfaceCurve
        from src.mesh.fitting import fit_interface
        from src.mesh.mesh import build_background_mesh

        cls.mesh = fit_interface(build_background_mesh(n=1), InterfaceCurve.circle(0.5))
        cls.disc = Discretization(cls.mesh, 2, workers=1)
        cls.rng = np.random.default_rng(3)

    def _projected(self, space, field):
        from src.wg_core.projection import project_Q0, project_Qb
        from src.wg_core.spaces import WGFunction

        return WGFunction(
            v0=project_Q0(field, space),
            vb=[project_Qb(field, ce.space) for ce in space.edges],
        )

    def test_commutes_on_straight_cells(self):
        """Test: ∇_w Q_h u = ℚ_h ∇u auf geraden Zellen."""
        from src.wg_core.projection import project_tensor_Qh
        from src.wg_core.weak_operators import weak_gradient

        for space in self.disc.cell_spaces:
            if self.mesh.cells[space.cell_id].curved:
                continue
            lhs = weak_gradient(space, self._projected(space, _cubic_field))
            rhs = project_tensor_Qh(_cubic_gradient, space)
            np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_constant_has_zero_gradient(self):
        """Test: Konstante Funktionen haben verschwindenden schwachen Gradienten."""
        from src.wg_core.weak_operators import weak_gradient

        def constant(points):
            return np.tile([1.5, -0.5], (len(points), 1))

        for space in self.disc.cell_spaces:
            grad = weak_gradient(space, self._projected(space, constant))
            np.testing.assert_allclose(grad, 0.0, atol=1e-9)

    def test_matrix_form_matches_direct(self):
        """Test: Matrixform und direkte Auswertung stimmen überein."""
        from src.wg_core.spaces import WGFunction
        from src.wg_core.weak_operators import gradient_matrix, weak_gradient

        for space in self.disc.cell_spaces[:12]:
            local = self.rng.standard_normal(space.n_local)
            direct = weak_gradient(space, WGFunction.from_local(space, local))
            matrix = gradient_matrix(space) @ local
            scale = max(1.0, float(np.abs(direct).max()))
            np.testing.assert_allclose(matrix, direct, atol=1e-12 * scale)

    def test_divergence_is_trace(self):
        """Test: Schwache Divergenz ist die Spur des schwachen Gradienten."""
        from src.wg_core.spaces import WGFunction
        from src.wg_core.weak_operators import divergence_matrix, weak_divergence, weak_gradient

        for space in self.disc.cell_spaces[:12]:
            local = self.rng.standard_normal(space.n_local)
            wg = WGFunction.from_local(space, local)
            grad = weak_gradient(space, wg)
            div = weak_divergence(space, wg)
            scale = max(1.0, float(np.abs(div).max()))
            np.testing.assert_allclose(div, grad[0, 0] + grad[1, 1], atol=1e-12 * scale)
            np.testing.assert_allclose(divergence_matrix(space) @ local, div, atol=1e-12 * scale)

    def test_local_round_trip(self):
        """Test: from_local und to_local sind zueinander invers."""
        from src.wg_core.spaces import WGFunction

        space = self.disc.cell_spaces[0]
        local = self.rng.standard_normal(space.n_local)
        np.testing.assert_array_equal(WGFunction.from_local(space, local).to_local(space), local)


if __name__ == "__main__":
    unittest.main()
