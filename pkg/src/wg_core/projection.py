"""
L²-Projektionen Q_0, Q_b, 𝒬_h und ℚ_h.

Funktionen werden als Callables übergeben, die ein Punktfeld (N, 2)
auswerten und (N,), (N, 2) oder (N, 2, 2) liefern.
"""

import logging
from typing import Callable, Mapping, Optional, Union

import numpy as np

from ..exceptions import SingularMass
from .spaces import CellSpace, EdgeSpace

logger = logging.getLogger(__name__)

Field = Callable[[np.ndarray], np.ndarray]

_RESIDUAL_TOL = 1e-10


def _check(mass: np.ndarray, coeffs: np.ndarray, rhs: np.ndarray, cell_id=None, edge_id=None) -> None:
    residual = np.linalg.norm(mass @ coeffs - rhs)
    scale = np.linalg.norm(mass) * np.linalg.norm(coeffs) + np.linalg.norm(rhs)
    if scale > 0.0 and residual > _RESIDUAL_TOL * scale:
        raise SingularMass(
            f"Normalgleichungen der Projektion nicht gelöst (Residuum {residual / scale:.2e})",
            cell_id=cell_id,
            edge_id=edge_id,
        )


def _project_cell(values: np.ndarray, basis_values: np.ndarray, weights: np.ndarray,
                  mass: np.ndarray, solve: Callable, cell_id: int) -> np.ndarray:
    flat = values.reshape(len(weights), -1)
    rhs = (basis_values * weights[:, None]).T @ flat
    coeffs = solve(rhs)
    _check(mass, coeffs, rhs, cell_id=cell_id)
    return coeffs


def project_Q0(f: Field, space: CellSpace) -> np.ndarray:
    """
    L²-Projektion auf P_k(T) (skalar) bzw. [P_k(T)]² (vektoriell).

    Returns:
        (dim P_k,) für skalare f, sonst (2, dim P_k)
    """
    values = np.asarray(f(space.rule.points), dtype=float)
    coeffs = _project_cell(values, space.phi, space.rule.weights, space.mass, space.solve_mass, space.cell_id)
    return coeffs[:, 0] if values.ndim == 1 else coeffs.T


def project_Qb(f: Union[Field, Mapping[int, Field]], edge_space: EdgeSpace, side: Optional[int] = None) -> np.ndarray:
    """
    L²-Projektion auf den Spurraum einer Kante (Bogenlängenmaß).

    Args:
        f: Funktion oder Zuordnung Seite → Funktion
        edge_space: Spurraum der Kante
        side: Teilgebiet, dessen Funktion projiziert wird (bei Zuordnungen)

    Returns:
        (dim,) für skalare f, sonst (2, dim)
    """
    func = f[side] if isinstance(f, Mapping) else f
    values = np.asarray(func(edge_space.rule.points), dtype=float)
    flat = values.reshape(len(edge_space.rule.weights), -1)
    rhs = edge_space.moments(flat)
    coeffs = edge_space.solve_mass(rhs)
    _check(edge_space.mass, coeffs, rhs, edge_id=edge_space.edge_id)
    return coeffs[:, 0] if values.ndim == 1 else coeffs.T


def project_pressure_Qh(f: Field, space: CellSpace) -> np.ndarray:
    """𝒬_h: L²-Projektion auf P_{k−1}(T), Form (dim P_{k−1},)."""
    values = np.asarray(f(space.rule.points), dtype=float)
    coeffs = _project_cell(values, space.psi, space.rule.weights, space.mass_low, space.solve_mass_low, space.cell_id)
    return coeffs[:, 0]


def project_tensor_Qh(G: Field, space: CellSpace) -> np.ndarray:
    """ℚ_h: L²-Projektion auf [P_{k−1}(T)]^{2×2}, Form (2, 2, dim P_{k−1})."""
    values = np.asarray(G(space.rule.points), dtype=float)
    coeffs = _project_cell(values, space.psi, space.rule.weights, space.mass_low, space.solve_mass_low, space.cell_id)
    return coeffs.T.reshape(2, 2, space.n1)
