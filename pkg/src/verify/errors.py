"""
Fehlermaße der WG-Lösung gegenüber der projizierten exakten Lösung.

e_h = Q_h u − u_h (DOF-weise), ε_h = 𝒬_h p − p_h.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..assembly.assembler import Discretization
from ..assembly.problem_data import ProblemData
from ..mesh.mesh import InterfaceMesh
from ..solver.solver import WGSolution
from ..wg_core.projection import project_pressure_Qh, project_Q0, project_Qb

logger = logging.getLogger(__name__)


@dataclass
class L2Errors:
    """
    Attributes:
        velocity: ‖Q_0 u − u_0‖
        pressure: ‖𝒬_h p − p_h‖ (roh)
        pressure_shifted: ‖(𝒬_h p − p̄) − p_h‖ mit dem Mittelwert p̄ der exakten Lösung
        pressure_mean: p̄
    """
    velocity: float
    pressure: float
    pressure_shifted: float
    pressure_mean: float


def project_exact_solution(disc: Discretization, data: ProblemData) -> Tuple[np.ndarray, np.ndarray]:
    """
    Q_h u und 𝒬_h p als globale DOF-Vektoren.

    Interface-Kanten erhalten Q_b u_1 im Slot 0 und Q_b u_2 im Slot 1, alle
    übrigen Kanten die Projektion der Lösung ihres (einzigen) Teilgebiets.
    """
    if not data.has_exact:
        raise ValueError(f"{data.name}: keine exakte Lösung hinterlegt")
    mesh, dofmap = disc.mesh, disc.dofmap
    u = np.zeros(dofmap.n_velocity)
    p = np.zeros(dofmap.n_pressure)

    for space in disc.cell_spaces:
        v0 = project_Q0(data.u[space.subdomain], space)
        for c in range(2):
            u[dofmap.vector_dofs(dofmap.cell_dofs(space.cell_id), c)] = v0[c]
        p[dofmap.pressure_dofs(space.cell_id)] = project_pressure_Qh(data.p[space.subdomain], space)

    for edge in mesh.edges:
        es = disc.edge_spaces[edge.id]
        for owner in edge.owners:
            slot = dofmap.slot_of(owner, edge.id)
            side = mesh.cells[owner].subdomain
            trace = project_Qb(data.u, es, side=side)
            for c in range(2):
                u[dofmap.vector_dofs(dofmap.edge_dofs(edge.id, slot), c)] = trace[c]
    return u, p


def _check_mesh(solution: WGSolution, mesh: Optional[InterfaceMesh]) -> None:
    if mesh is not None and mesh is not solution.discretization.mesh:
        raise ValueError("Lösung gehört zu einem anderen Gitter")


def energy_error(solution: WGSolution, data: ProblemData, mesh: Optional[InterfaceMesh] = None) -> float:
    """|||Q_h u − u_h||| = sqrt(a_s(e_h, e_h)) mit der Quadratur des Verfahrens."""
    _check_mesh(solution, mesh)
    exact_u, _ = project_exact_solution(solution.discretization, data)
    e = exact_u - solution.u
    value = float(e @ (solution.constrained.system.A_s @ e))
    return float(np.sqrt(max(value, 0.0)))


def l2_errors(solution: WGSolution, data: ProblemData, mesh: Optional[InterfaceMesh] = None) -> L2Errors:
    """L²-Fehler von Geschwindigkeit (Innenanteil) und Druck."""
    _check_mesh(solution, mesh)
    disc = solution.discretization
    dofmap = disc.dofmap
    exact_u, exact_p = project_exact_solution(disc, data)

    integral, area = 0.0, 0.0
    for space in disc.cell_spaces:
        integral += float(space.mass_low[:, 0] @ exact_p[dofmap.pressure_dofs(space.cell_id)])
        area += float(space.mass_low[0, 0])
    mean = integral / area

    vel, raw, shifted = 0.0, 0.0, 0.0
    for space in disc.cell_spaces:
        cell_id = space.cell_id
        for c in range(2):
            dofs = dofmap.vector_dofs(dofmap.cell_dofs(cell_id), c)
            e0 = exact_u[dofs] - solution.u[dofs]
            vel += float(e0 @ space.mass @ e0)
        pd = dofmap.pressure_dofs(cell_id)
        eps = exact_p[pd] - solution.p[pd]
        raw += float(eps @ space.mass_low @ eps)
        eps[0] -= mean
        shifted += float(eps @ space.mass_low @ eps)

    return L2Errors(
        velocity=float(np.sqrt(max(vel, 0.0))),
        pressure=float(np.sqrt(max(raw, 0.0))),
        pressure_shifted=float(np.sqrt(max(shifted, 0.0))),
        pressure_mean=mean,
    )
