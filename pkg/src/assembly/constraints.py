"""
Randbedingungen, Interface-Sprung und Druck-Eichung.

Die volle Geschwindigkeit wird als u = T ū + u_c geschrieben:
- Rand-DOFs sind fest (u_c = Q_b g),
- Spur-DOFs der Seite 2 sind Aliase der Seite 1 mit Versatz −Q_b φ,
- alle übrigen DOFs sind frei (Spalten von T).
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy import sparse

from ..exceptions import InconsistentConstraint
from ..mesh.mesh import InterfaceMesh
from ..wg_core.projection import project_Qb
from .problem_data import ProblemData

logger = logging.getLogger(__name__)

CONSTRAINT_TOL = 1e-10


class ConstraintSet:
    """Sammlung fester und verknüpfter Geschwindigkeits-DOFs."""

    def __init__(self, n_dofs: int, tol: float = CONSTRAINT_TOL) -> None:
        self.n_dofs = n_dofs
        self.tol = tol
        self.fixed: Dict[int, float] = {}
        self.aliases: Dict[int, Tuple[int, float]] = {}

    def fix(self, dof: int, value: float) -> None:
        dof, value = int(dof), float(value)
        if dof in self.aliases:
            raise InconsistentConstraint(dof, self.aliases[dof][1], value)
        previous = self.fixed.get(dof)
        if previous is not None and abs(previous - value) > self.tol:
            raise InconsistentConstraint(dof, previous, value)
        self.fixed[dof] = value

    def fix_many(self, dofs: np.ndarray, values: np.ndarray) -> None:
        for dof, value in zip(np.asarray(dofs).ravel(), np.asarray(values).ravel()):
            self.fix(dof, value)

    def alias(self, dof: int, master: int, offset: float = 0.0) -> None:
        """u[dof] = u[master] + offset."""
        dof, master, offset = int(dof), int(master), float(offset)
        if dof in self.fixed:
            raise InconsistentConstraint(dof, self.fixed[dof], offset)
        previous = self.aliases.get(dof)
        if previous is not None and (previous[0] != master or abs(previous[1] - offset) > self.tol):
            raise InconsistentConstraint(dof, previous[1], offset)
        self.aliases[dof] = (master, offset)

    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[list(self.fixed)] = False
        mask[list(self.aliases)] = False
        return np.flatnonzero(mask)

    def reduction(self) -> Tuple[sparse.csr_matrix, np.ndarray, np.ndarray]:
        """
        Affine Reduktion u = T ū + u_c.

        Returns:
            (T, u_c, freie DOFs)
        """
        free = self.free_dofs()
        column = np.full(self.n_dofs, -1, dtype=np.int64)
        column[free] = np.arange(len(free))
        u_c = np.zeros(self.n_dofs)
        for dof, value in self.fixed.items():
            u_c[dof] = value

        rows, cols = list(free), list(range(len(free)))
        for dof in sorted(self.aliases):
            master, offset = self.aliases[dof]
            if master in self.aliases:
                raise ValueError(f"Verkettete Aliase bei DOF {dof} werden nicht unterstützt")
            if column[master] >= 0:
                rows.append(dof)
                cols.append(int(column[master]))
            u_c[dof] = u_c[master] + offset if master in self.fixed else offset

        T = sparse.csr_matrix(
            (np.ones(len(rows)), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(self.n_dofs, len(free)),
        )
        return T, u_c, free


@dataclass
class ConstrainedSystem:
    """
    Reduziertes Sattelpunktsystem

        [[Ā, B̄ᵀ, 0], [B̄, 0, g], [0, gᵀ, 0]] [ū; p; λ] = [F̄; Ḡ; 0]

    Attributes:
        system: ungebundenes System
        T, u_c: affine Reduktion der Geschwindigkeit
        A, B, F, G: reduzierte Blöcke
        gauge: Eichvektor g_j = ∫_Ω φ_j (None ohne Eichung)
        compatibility_defect: entfernter Anteil c1ᵀḠ
    """
    system: object
    constraints: ConstraintSet
    T: sparse.csr_matrix
    u_c: np.ndarray
    free: np.ndarray
    A: sparse.csr_matrix
    B: sparse.csr_matrix
    F: np.ndarray
    G: np.ndarray
    gauge: np.ndarray
    compatibility_defect: float
    matrix: sparse.csc_matrix
    rhs: np.ndarray

    @property
    def n_free(self) -> int:
        return len(self.free)

    @property
    def n_pressure(self) -> int:
        return self.B.shape[0]

    @property
    def has_gauge(self) -> bool:
        return self.gauge is not None

    def expand(self, reduced: np.ndarray) -> np.ndarray:
        return self.T @ reduced + self.u_c

    def restrict(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full)[self.free]


def gauge_vector(system) -> np.ndarray:
    """g_j = ∫_T φ_j für alle Druckbasisfunktionen."""
    disc = system.discretization
    return np.concatenate([space.mass_low[:, 0] for space in disc.cell_spaces])


def constant_pressure(system) -> np.ndarray:
    """Koeffizienten der globalen Konstante 1 (erste Basisfunktion je Zelle)."""
    disc = system.discretization
    c1 = np.zeros(system.B.shape[0])
    c1[::disc.dofmap.n1] = 1.0
    return c1


def build_constraints(system, data: ProblemData) -> ConstraintSet:
    """Randwerte Q_b g und Sprungbedingung u_2b = u_1b − Q_b φ."""
    disc = system.discretization
    dofmap = disc.dofmap
    cs = ConstraintSet(dofmap.n_velocity)
    for edge in disc.mesh.boundary_edges():
        values = project_Qb(data.g, disc.edge_spaces[edge.id])
        for c in range(2):
            cs.fix_many(dofmap.vector_dofs(dofmap.edge_dofs(edge.id), c), values[c])
    for edge in disc.mesh.interface_edges():
        jump = project_Qb(data.phi, disc.edge_spaces[edge.id])
        for c in range(2):
            side1 = dofmap.vector_dofs(dofmap.edge_dofs(edge.id, 0), c)
            side2 = dofmap.vector_dofs(dofmap.edge_dofs(edge.id, 1), c)
            for d2, d1, offset in zip(side2, side1, jump[c]):
                cs.alias(d2, d1, -offset)
    return cs


def apply_constraints(system, mesh: InterfaceMesh, data: ProblemData, gauge: bool = True) -> ConstrainedSystem:
    """
    Bindet Randwerte, Interface-Sprung und Eichung in das System ein.

    Args:
        system: SaddlePointSystem aus assemble()
        mesh: Gitter des Systems
        data: Problemdaten mit g und φ
        gauge: Mittelwertfreiheit des Drucks per Lagrange-Multiplikator

    Returns:
        ConstrainedSystem

    Raises:
        InconsistentConstraint: DOF zweimal mit verschiedenen Werten fixiert
    """
    if mesh is not system.discretization.mesh:
        raise ValueError("System wurde auf einem anderen Gitter assembliert")
    cs = build_constraints(system, data)
    T, u_c, free = cs.reduction()

    A_s = system.A_s
    A = (T.T @ A_s @ T).tocsr()
    B = (system.B @ T).tocsr()
    F = T.T @ (system.F - A_s @ u_c)
    G = system.G - system.B @ u_c

    defect = 0.0
    g_vec = None
    if gauge:
        g_vec = gauge_vector(system)
        c1 = constant_pressure(system)
        defect = float(c1 @ G)
        area = float(c1 @ g_vec)
        G = G - g_vec * (defect / area)
        scale = np.abs(system.B @ u_c).sum() + 1e-300
        if abs(defect) > 1e-12 * scale:
            logger.warning(f"Kompatibilitätsdefekt der Rand- und Sprungdaten entfernt: δ={defect:.3e}")
        else:
            logger.debug(f"Kompatibilitätsdefekt δ={defect:.3e}")

    n_p = B.shape[0]
    if gauge:
        column = sparse.csr_matrix(g_vec.reshape(-1, 1))
        matrix = sparse.bmat([[A, B.T, None], [B, None, column], [None, column.T, None]], format="csc")
        rhs = np.concatenate([F, G, [0.0]])
    else:
        matrix = sparse.bmat([[A, B.T], [B, sparse.csr_matrix((n_p, n_p))]], format="csc")
        rhs = np.concatenate([F, G])

    logger.info(
        f"Randbedingungen eingebunden: {len(free)} freie Geschwindigkeits-DOFs, "
        f"{len(cs.fixed)} fest, {len(cs.aliases)} Aliase, Systemgröße {matrix.shape[0]}"
    )
    return ConstrainedSystem(
        system=system,
        constraints=cs,
        T=T,
        u_c=u_c,
        free=free,
        A=A,
        B=B,
        F=F,
        G=G,
        gauge=g_vec,
        compatibility_defect=defect,
        matrix=matrix,
        rhs=rhs,
    )
