"""
Lokale WG-Räume je Zelle und je Kante.

Lokales skalares Layout einer Zelle: [v0 (dim P_k), Spur auf Kante 0,
Spur auf Kante 1, ...] in Durchlaufreihenfolge der Zellkanten. Vektorwertige
Funktionen stapeln zwei skalare Layouts: [Komponente x, Komponente y].
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..exceptions import SingularMass
from ..mesh.curve import SIDE_1
from ..mesh.mesh import InterfaceMesh
from ..refmap.quadrature import EdgeQuadratureRule, QuadratureCache, QuadratureRule
from .basis import CellBasis, EdgeBasis

logger = logging.getLogger(__name__)


def _factor(mass: np.ndarray, what: str, cell_id: Optional[int] = None, edge_id: Optional[int] = None):
    try:
        return cho_factor(mass)
    except LinAlgError as e:
        raise SingularMass(f"Massenmatrix {what} nicht positiv definit: {e}", cell_id, edge_id) from e


class EdgeSpace:
    """
    Spurraum einer Kante: P_{k−1} auf geraden Kanten, P_k auf dem Interface.

    Beide Slots einer Interface-Kante teilen Regel und Basis.
    """

    def __init__(self, mesh: InterfaceMesh, edge_id: int, degree: int, rule: EdgeQuadratureRule) -> None:
        edge = mesh.edges[edge_id]
        self.edge_id = edge_id
        self.is_interface = edge.is_interface
        self.degree = degree if edge.is_interface else degree - 1
        self.rule = rule
        self.basis = EdgeBasis(self.degree)
        self.values = self.basis.values(rule.params)
        self.mass = (self.values * rule.weights[:, None]).T @ self.values
        self._factor = _factor(self.mass, f"auf Kante {edge_id}", edge_id=edge_id)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def length(self) -> float:
        return self.rule.measure

    def moments(self, values: np.ndarray) -> np.ndarray:
        """∫_e f τ_b für Werte f an den Regelpunkten, Form (N,) oder (N, c)."""
        return (self.values * self.rule.weights[:, None]).T @ np.asarray(values)

    def solve_mass(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(self._factor, rhs)

    def evaluate(self, coefficients: np.ndarray) -> np.ndarray:
        """Spurwerte an den Regelpunkten; Koeffizienten (dim,) oder (c, dim)."""
        return self.values @ np.asarray(coefficients).T


@dataclass
class CellEdge:
    """
    Sicht einer Zelle auf eine ihrer Kanten.

    Attributes:
        space: Spurraum der Kante
        orientation: +1/−1 relativ zur gespeicherten Kantenrichtung
        normals: äußere Einheitsnormalen an den Regelpunkten
        phi: Zellbasis P_k an den Kantenpunkten
        psi: Zellbasis P_{k−1} an den Kantenpunkten
        offset: Anfang des Spurblocks im skalaren Layout
        slot: 0 (Seite 1 bzw. einzige Spur) oder 1 (Seite 2)
    """
    space: EdgeSpace
    orientation: int
    normals: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    offset: int
    slot: int = 0

    @property
    def rule(self) -> EdgeQuadratureRule:
        return self.space.rule

    @property
    def edge_id(self) -> int:
        return self.space.edge_id


class CellSpace:
    """
    Lokaler WG-Raum einer Zelle mit Massenmatrizen und schwachen Operatoren.

    Die Matrizen grad_ops[j] (dim P_{k−1} × skalares Layout) liefern die
    Koeffizienten der j-ten Ableitungsrichtung des schwachen Gradienten einer
    Komponente.
    """

    def __init__(
        self,
        mesh: InterfaceMesh,
        cell_id: int,
        degree: int,
        edge_spaces: List[EdgeSpace],
        cache: QuadratureCache,
        exactness: Optional[int] = None,
    ) -> None:
        if degree < 1:
            raise ValueError(f"Polynomgrad muss >= 1 sein: {degree}")
        cell = mesh.cells[cell_id]
        self.cell_id = cell_id
        self.degree = degree
        self.subdomain = cell.subdomain
        self.diameter = cell.diameter
        self.exactness = exactness if exactness is not None else 2 * degree + 2
        self.rule: QuadratureRule = cache.cell_rule(cell_id, self.exactness)

        self.basis = CellBasis(cell.centroid, cell.diameter, degree)
        self.basis_low = CellBasis(cell.centroid, cell.diameter, degree - 1)
        points, weights = self.rule.points, self.rule.weights
        self.phi = self.basis.values(points)
        self.phi_grad = self.basis.gradients(points)
        self.psi = self.basis_low.values(points)
        self.psi_grad = self.basis_low.gradients(points)

        self.mass = (self.phi * weights[:, None]).T @ self.phi
        self.mass_low = (self.psi * weights[:, None]).T @ self.psi
        self._mass_factor = _factor(self.mass, f"P_{degree} in Zelle {cell_id}", cell_id=cell_id)
        self._mass_low_factor = _factor(self.mass_low, f"P_{degree - 1} in Zelle {cell_id}", cell_id=cell_id)
        self.mass_condition = float(np.linalg.cond(self.mass))

        self.edges: List[CellEdge] = []
        offset = self.basis.dim
        for edge_id, orient in zip(cell.edges, cell.orientations):
            space = edge_spaces[edge_id]
            pts = space.rule.points
            slot = 0
            if space.is_interface and self.subdomain != SIDE_1:
                slot = 1
            self.edges.append(CellEdge(
                space=space,
                orientation=orient,
                normals=space.rule.normals(orient),
                phi=self.basis.values(pts),
                psi=self.basis_low.values(pts),
                offset=offset,
                slot=slot,
            ))
            offset += space.dim
        self.n_scalar = offset
        self.grad_ops = self._weak_gradient_operators()

    @property
    def nk(self) -> int:
        return self.basis.dim

    @property
    def n1(self) -> int:
        return self.basis_low.dim

    @property
    def n_local(self) -> int:
        return 2 * self.n_scalar

    def edge_slice(self, index: int) -> slice:
        ce = self.edges[index]
        return slice(ce.offset, ce.offset + ce.space.dim)

    def solve_mass(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(self._mass_factor, rhs)

    def solve_mass_low(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(self._mass_low_factor, rhs)

    def _weak_gradient_operators(self) -> np.ndarray:
        """R_j = M_{k−1}^{-1} [−(v0, ∂_j ψ) | ⟨τ_e, ψ n_j⟩_e ...]."""
        weights = self.rule.weights
        ops = np.zeros((2, self.n1, self.n_scalar))
        for j in range(2):
            ops[j, :, :self.nk] = -(self.psi_grad[:, :, j] * weights[:, None]).T @ self.phi
            for ce in self.edges:
                w = ce.rule.weights * ce.normals[:, j]
                ops[j, :, ce.offset:ce.offset + ce.space.dim] = (ce.psi * w[:, None]).T @ ce.space.values
            ops[j] = self.solve_mass_low(ops[j])
        return ops


@dataclass
class WGFunction:
    """
    Zelllokale Sicht einer schwachen Funktion.

    Attributes:
        v0: Innenkoeffizienten, Form (2, dim P_k)
        vb: Spurkoeffizienten je Zellkante, Form (2, dim Spur)
    """
    v0: np.ndarray
    vb: List[np.ndarray] = field(default_factory=list)

    def to_local(self, space: CellSpace) -> np.ndarray:
        if self.v0.shape != (2, space.nk) or len(self.vb) != len(space.edges):
            raise ValueError("Koeffizientenzahl passt nicht zum Zellraum")
        local = np.zeros((2, space.n_scalar))
        local[:, :space.nk] = self.v0
        for i, values in enumerate(self.vb):
            local[:, space.edge_slice(i)] = values
        return local.ravel()

    @classmethod
    def from_local(cls, space: CellSpace, local: np.ndarray) -> "WGFunction":
        local = np.asarray(local).reshape(2, space.n_scalar)
        return cls(
            v0=local[:, :space.nk].copy(),
            vb=[local[:, space.edge_slice(i)].copy() for i in range(len(space.edges))],
        )
