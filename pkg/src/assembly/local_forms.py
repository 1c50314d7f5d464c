"""
Lokale Formen einer Zelle.

A_loc: (A∇_w v, ∇_w w)_T
S_loc: h_T^{-1}⟨Q_b v0 − v_b, Q_b w0 − w_b⟩ auf geraden Kanten,
       h_T^{-1}⟨v0 − v_b, w0 − w_b⟩ auf Interface-Kanten
B_loc: −(∇_w·v, q)_T
F_loc: (f, v0)_T
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from ..mesh.curve import SIDE_1
from ..mesh.mesh import InterfaceMesh
from ..wg_core.spaces import CellSpace, EdgeSpace
from ..wg_core.weak_operators import divergence_matrix
from .problem_data import NormalField, ProblemData

logger = logging.getLogger(__name__)


@dataclass
class LocalForms:
    """Lokale Matrizen im Vektorlayout der Zelle."""
    cell_id: int
    A: np.ndarray
    S: np.ndarray
    B: np.ndarray
    F: np.ndarray

    @property
    def A_s(self) -> np.ndarray:
        return self.A + self.S


def stiffness_block(space: CellSpace, coefficient: np.ndarray) -> np.ndarray:
    """Skalarer Block Σ_jl A_jl R_jᵀ M R_l einer Komponente."""
    R, M = space.grad_ops, space.mass_low
    block = np.zeros((space.n_scalar, space.n_scalar))
    for j in range(2):
        for l in range(2):
            if coefficient[j, l] != 0.0:
                block += coefficient[j, l] * (R[j].T @ M @ R[l])
    return 0.5 * (block + block.T)


def stabilizer_block(space: CellSpace) -> np.ndarray:
    """Skalarer Stabilisierungsblock, Summe über alle Zellkanten."""
    block = np.zeros((space.n_scalar, space.n_scalar))
    scale = 1.0 / space.diameter
    nk = space.nk
    for index, ce in enumerate(space.edges):
        cols = np.r_[0:nk, space.edge_slice(index)]
        es = ce.space
        if es.is_interface:
            L = np.hstack([ce.phi, -es.values])
            local = L.T @ (L * ce.rule.weights[:, None])
        else:
            coupling = (es.values * ce.rule.weights[:, None]).T @ ce.phi
            L = np.hstack([es.solve_mass(coupling), -np.eye(es.dim)])
            local = L.T @ es.mass @ L
        block[np.ix_(cols, cols)] += scale * local
    return 0.5 * (block + block.T)


def local_forms(space: CellSpace, data: ProblemData) -> LocalForms:
    """
    Berechnet A_loc, S_loc, B_loc und F_loc einer Zelle.

    Args:
        space: lokaler WG-Raum der Zelle (Grad k, Quadratur)
        data: Problemdaten; Koeffizient und Last des Zell-Teilgebiets

    Returns:
        LocalForms im lokalen Vektorlayout
    """
    coefficient = data.coefficient(space.subdomain)
    K = stiffness_block(space, coefficient)
    S = stabilizer_block(space)

    B = -space.mass_low @ divergence_matrix(space)

    F = np.zeros(space.n_local)
    load = np.asarray(data.f[space.subdomain](space.rule.points), dtype=float)
    moments = (space.phi * space.rule.weights[:, None]).T @ load
    F[:space.nk] = moments[:, 0]
    F[space.n_scalar:space.n_scalar + space.nk] = moments[:, 1]

    return LocalForms(cell_id=space.cell_id, A=block_diag(K, K), S=block_diag(S, S), B=B, F=F)


def side1_normals(mesh: InterfaceMesh, edge_space: EdgeSpace) -> np.ndarray:
    """Normale n_1 (aus Ω1 heraus) an den Regelpunkten einer Interface-Kante."""
    edge = mesh.edges[edge_space.edge_id]
    for owner in edge.owners:
        cell = mesh.cells[owner]
        if cell.subdomain == SIDE_1:
            orient = cell.orientations[cell.edges.index(edge.id)]
            return edge_space.rule.normals(orient)
    raise ValueError(f"Interface-Kante {edge.id} hat keinen Besitzer in Ω1")


def interface_load(mesh: InterfaceMesh, edge_space: EdgeSpace, psi: NormalField) -> np.ndarray:
    """
    ⟨ψ, τ⟩_e für alle Spurbasisfunktionen τ einer Interface-Kante.

    Returns:
        Form (2, dim): Beitrag je Komponente zum Slot der Seite 1
    """
    normals = side1_normals(mesh, edge_space)
    values = np.asarray(psi(edge_space.rule.points, normals), dtype=float)
    return edge_space.moments(values).T
