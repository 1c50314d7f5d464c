"""
Solver - direkte Lösung des gebundenen Sattelpunktsystems.

Pivotisierte dünne LU-Zerlegung (SuperLU) mit bis zu zwei Schritten
iterativer Nachverbesserung.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from ..assembly.constraints import ConstrainedSystem
from ..exceptions import SingularSystem
from ..mesh.mesh import InterfaceMesh
from ..wg_core.spaces import WGFunction

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


@dataclass
class WGSolution:
    """
    Diskrete Lösung (u_h, p_h).

    Attributes:
        u: alle Geschwindigkeits-DOFs, beide Interface-Slots belegt
        p: Druckkoeffizienten, je Zelle dim P_{k−1}
        multiplier: Lagrange-Multiplikator der Eichung
        constrained: zugehöriges gebundenes System
        report: Residuen und Faktorisierungsdaten
    """
    u: np.ndarray
    p: np.ndarray
    multiplier: float
    constrained: ConstrainedSystem
    report: Dict[str, float] = field(default_factory=dict)

    @property
    def discretization(self):
        return self.constrained.system.discretization

    @property
    def u_free(self) -> np.ndarray:
        return self.constrained.restrict(self.u)

    def cell_function(self, cell_id: int) -> WGFunction:
        """Zelllokale Sicht von u_h (Spuren im Slot der Zelle)."""
        disc = self.discretization
        local = self.u[disc.dofmap.local_dofs(cell_id)]
        return WGFunction.from_local(disc.cell_spaces[cell_id], local)

    def cell_pressure(self, cell_id: int) -> np.ndarray:
        return self.p[self.discretization.dofmap.pressure_dofs(cell_id)]

    def pressure_mean(self) -> float:
        """∫_Ω p_h / Σ|T|."""
        disc = self.discretization
        total = sum(float(s.mass_low[:, 0] @ self.cell_pressure(s.cell_id)) for s in disc.cell_spaces)
        area = sum(float(s.mass_low[0, 0]) for s in disc.cell_spaces)
        return total / area


def _mesh_components(mesh: InterfaceMesh) -> int:
    rows, cols = [], []
    for edge in mesh.edges:
        if len(edge.owners) == 2:
            rows.append(edge.owners[0])
            cols.append(edge.owners[1])
    adjacency = sparse.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(mesh.num_cells, mesh.num_cells))
    count, _ = connected_components(adjacency, directed=False)
    return count


def diagnose(constrained: ConstrainedSystem) -> str:
    """Vermutete Ursache einer singulären Systemmatrix."""
    if not constrained.has_gauge:
        return "Druck-Eichung fehlt (konstanter Druck im Kern)"
    mesh = constrained.system.discretization.mesh
    components = _mesh_components(mesh)
    if components > 1:
        return f"unzusammenhängendes Gitter ({components} Komponenten)"
    if constrained.n_free == 0:
        return "keine freien Geschwindigkeits-DOFs"
    return "unbekannt (Quadratur oder Stabilisierung prüfen)"


class SaddlePointSolver:
    """
    Direkter Löser für ConstrainedSystem.

    Attributes:
        refinement_steps: maximale Anzahl Nachverbesserungsschritte
        tol: geforderte relative Residuumsnorm
    """

    def __init__(self, refinement_steps: int = 2, tol: float = RESIDUAL_TOL) -> None:
        self.refinement_steps = refinement_steps
        self.tol = tol
        logger.info("SaddlePointSolver initialisiert")

    def solve(self, constrained: ConstrainedSystem) -> WGSolution:
        matrix, rhs = constrained.matrix, constrained.rhs
        n_free, n_p = constrained.n_free, constrained.n_pressure
        rhs_norm = float(np.linalg.norm(rhs))

        if rhs_norm == 0.0:
            x = np.zeros(matrix.shape[0])
            stats = {"factorized": 0.0}
        else:
            try:
                lu = splu(matrix.tocsc())
            except RuntimeError as e:
                cause = diagnose(constrained)
                raise SingularSystem(f"Faktorisierung fehlgeschlagen: {e}", cause=cause) from e

            x = lu.solve(rhs)
            steps = 0
            relative = self._relative_residual(matrix, x, rhs, rhs_norm)
            while relative > 0.1 * self.tol and steps < self.refinement_steps and np.isfinite(relative):
                x = x + lu.solve(rhs - matrix @ x)
                steps += 1
                relative = self._relative_residual(matrix, x, rhs, rhs_norm)
            if steps:
                logger.warning(f"Iterative Nachverbesserung: {steps} Schritt(e), Residuum {relative:.2e}")
            if not np.isfinite(relative) or relative > self.tol:
                raise SingularSystem(
                    f"Relatives Residuum {relative:.3e} über Toleranz {self.tol:.1e}",
                    cause=diagnose(constrained),
                )
            stats = {
                "factorized": 1.0,
                "nnz_L": float(lu.L.nnz),
                "nnz_U": float(lu.U.nnz),
                "refinement_steps": float(steps),
            }

        u_free = x[:n_free]
        p = x[n_free:n_free + n_p]
        multiplier = float(x[n_free + n_p]) if constrained.has_gauge else 0.0
        solution = WGSolution(
            u=constrained.expand(u_free),
            p=p.copy(),
            multiplier=multiplier,
            constrained=constrained,
        )
        solution.report = {**stats, **residual_report(constrained, solution)}
        logger.info(
            f"Lösung berechnet: Größe {matrix.shape[0]}, "
            f"Residuum {solution.report['system']:.2e}, Divergenz {solution.report['divergence_rel']:.2e}"
        )
        return solution

    @staticmethod
    def _relative_residual(matrix, x, rhs, rhs_norm) -> float:
        return float(np.linalg.norm(matrix @ x - rhs) / rhs_norm)


def solve(constrained: ConstrainedSystem) -> WGSolution:
    """Kurzform für SaddlePointSolver().solve(constrained)."""
    return SaddlePointSolver().solve(constrained)


def residual_report(constrained: ConstrainedSystem, solution: WGSolution) -> Dict[str, float]:
    """
    Residuen der reduzierten Gleichungen.

    Returns:
        momentum: ‖Ā ū + B̄ᵀ p − F̄‖
        divergence: ‖B̄ ū + g λ − Ḡ‖
        gauge: |gᵀ p|
        *_rel: auf ‖F̄‖, ‖ū‖ bzw. ‖p‖ bezogene Werte
        system: relatives Residuum des Gesamtsystems
    """
    u = constrained.restrict(solution.u)
    p = solution.p
    momentum = constrained.A @ u + constrained.B.T @ p - constrained.F
    divergence = constrained.B @ u - constrained.G
    gauge = 0.0
    if constrained.has_gauge:
        divergence = divergence + constrained.gauge * solution.multiplier
        gauge = abs(float(constrained.gauge @ p))

    def rel(value: float, scale: float) -> float:
        return value / scale if scale > 0.0 else value

    momentum_norm = float(np.linalg.norm(momentum))
    divergence_norm = float(np.linalg.norm(divergence))
    x = np.concatenate([u, p, [solution.multiplier]] if constrained.has_gauge else [u, p])
    rhs_norm = float(np.linalg.norm(constrained.rhs))
    system = float(np.linalg.norm(constrained.matrix @ x - constrained.rhs))
    return {
        "momentum": momentum_norm,
        "divergence": divergence_norm,
        "gauge": gauge,
        "momentum_rel": rel(momentum_norm, float(np.linalg.norm(constrained.F))),
        "divergence_rel": rel(divergence_norm, float(np.linalg.norm(u))),
        "gauge_rel": rel(gauge, float(np.linalg.norm(p))),
        "system": rel(system, rhs_norm),
    }
