"""
Assembler - globales Sattelpunktsystem.

Dieses Modul enthält:
- Discretization: Quadratur, Kanten- und Zellräume und DofMap eines Gitters
- SaddlePointSystem: A (= a), S (= s), B, F, G vor dem Einbinden der Nebenbedingungen
- SystemAssembler / assemble: Streuen der lokalen Formen in dünne Matrizen
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import sparse

from ..mesh.mesh import InterfaceMesh
from ..refmap.quadrature import QuadratureCache
from ..wg_core.spaces import CellSpace, EdgeSpace
from .dofmap import DofMap
from .local_forms import LocalForms, interface_load, local_forms
from .problem_data import ProblemData

logger = logging.getLogger(__name__)

THREADS_ENV = "WG_THREADS"


def resolve_workers(workers: Optional[int] = None) -> int:
    """Anzahl paralleler Worker: Argument, sonst WG_THREADS, sonst CPU-Anzahl."""
    if workers is not None:
        return max(1, int(workers))
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
        if value < 1:
            raise ValueError(raw)
        return value
    except ValueError:
        logger.warning(f"Ungültiger Wert {THREADS_ENV}={raw!r}, verwende 1 Worker")
        return 1


class Discretization:
    """
    WG-Diskretisierung eines Gitters für Grad k.

    Attributes:
        mesh: angepasstes Gitter
        degree: Polynomgrad k
        exactness: Quadraturexaktheit m (Standard 2k+2)
        cache: Quadraturregeln
        edge_spaces: Spurraum je Kante
        cell_spaces: lokaler WG-Raum je Zelle
        dofmap: globale Nummerierung
    """

    def __init__(
        self,
        mesh: InterfaceMesh,
        degree: int,
        exactness: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> None:
        if degree < 1:
            raise ValueError(f"Polynomgrad muss >= 1 sein: {degree}")
        self.mesh = mesh
        self.degree = degree
        self.exactness = exactness if exactness is not None else 2 * degree + 2
        self.workers = resolve_workers(workers)
        self.cache = QuadratureCache(mesh)
        self.dofmap = DofMap(mesh, degree)

        self.edge_spaces: List[EdgeSpace] = [
            EdgeSpace(mesh, e.id, degree, self.cache.edge_rule(e.id, self.exactness)) for e in mesh.edges
        ]
        self.cell_spaces: List[CellSpace] = self._map_cells(self._build_space)
        logger.info(
            f"Diskretisierung initialisiert: k={degree}, m={self.exactness}, "
            f"{mesh.num_cells} Zellen, {self.dofmap.n_velocity} + {self.dofmap.n_pressure} DOFs, "
            f"{self.workers} Worker"
        )

    def _build_space(self, cell_id: int) -> CellSpace:
        return CellSpace(self.mesh, cell_id, self.degree, self.edge_spaces, self.cache, self.exactness)

    def _map_cells(self, func) -> list:
        """Wendet func auf alle Zellen an; Ergebnis in Zellreihenfolge."""
        cell_ids = range(self.mesh.num_cells)
        if self.workers <= 1 or self.mesh.num_cells < 2:
            return [func(c) for c in cell_ids]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(func, cell_ids))

    def max_mass_condition(self) -> float:
        return max((s.mass_condition for s in self.cell_spaces), default=0.0)


@dataclass
class SaddlePointSystem:
    """
    Ungebundenes System auf allen Geschwindigkeits-DOFs (beide Interface-Slots).

    Attributes:
        discretization: zugrundeliegende Diskretisierung
        data: Problemdaten
        A: Steifigkeitsform a(·,·), N_u × N_u
        S: Stabilisierung s(·,·), N_u × N_u
        B: b(·,·), N_p × N_u
        F: Last (f, v0) + ⟨ψ, v_b⟩_Γ
        G: Divergenzlast (vor Nebenbedingungen null)
    """
    discretization: Discretization
    data: ProblemData
    A: sparse.csr_matrix
    S: sparse.csr_matrix
    B: sparse.csr_matrix
    F: np.ndarray
    G: np.ndarray

    @property
    def A_s(self) -> sparse.csr_matrix:
        return (self.A + self.S).tocsr()

    @property
    def mesh(self) -> InterfaceMesh:
        return self.discretization.mesh

    @property
    def dofmap(self) -> DofMap:
        return self.discretization.dofmap


class SystemAssembler:
    """
    Assembliert das WG-System für Grad k.

    Lokale Formen werden parallel berechnet, das Streuen erfolgt sequentiell
    in Zellreihenfolge, sodass das Ergebnis nicht von der Worker-Anzahl abhängt.
    """

    def __init__(self, degree: int, exactness: Optional[int] = None, workers: Optional[int] = None) -> None:
        if degree < 1:
            raise ValueError(f"Polynomgrad muss >= 1 sein: {degree}")
        self.degree = degree
        self.exactness = exactness
        self.workers = workers
        logger.info(f"SystemAssembler initialisiert (k={degree})")

    def discretize(self, mesh: InterfaceMesh) -> Discretization:
        return Discretization(mesh, self.degree, self.exactness, self.workers)

    def assemble(self, mesh: InterfaceMesh, data: ProblemData,
                 discretization: Optional[Discretization] = None) -> SaddlePointSystem:
        disc = discretization if discretization is not None else self.discretize(mesh)
        dofmap = disc.dofmap
        data.check()

        forms: List[LocalForms] = disc._map_cells(lambda c: local_forms(disc.cell_spaces[c], data))

        n_u, n_p = dofmap.n_velocity, dofmap.n_pressure
        rows_u, cols_u, vals_a, vals_s = [], [], [], []
        rows_b, cols_b, vals_b = [], [], []
        F = np.zeros(n_u)
        for form in forms:
            dofs = dofmap.local_dofs(form.cell_id)
            pdofs = dofmap.pressure_dofs(form.cell_id)
            r, c = np.meshgrid(dofs, dofs, indexing="ij")
            rows_u.append(r.ravel())
            cols_u.append(c.ravel())
            vals_a.append(form.A.ravel())
            vals_s.append(form.S.ravel())
            rb, cb = np.meshgrid(pdofs, dofs, indexing="ij")
            rows_b.append(rb.ravel())
            cols_b.append(cb.ravel())
            vals_b.append(form.B.ravel())
            np.add.at(F, dofs, form.F)

        for edge in disc.mesh.interface_edges():
            load = interface_load(disc.mesh, disc.edge_spaces[edge.id], data.psi)
            for c in range(2):
                F[dofmap.vector_dofs(dofmap.edge_dofs(edge.id, 0), c)] += load[c]

        rows, cols = np.concatenate(rows_u), np.concatenate(cols_u)
        A = sparse.coo_matrix((np.concatenate(vals_a), (rows, cols)), shape=(n_u, n_u)).tocsr()
        S = sparse.coo_matrix((np.concatenate(vals_s), (rows, cols)), shape=(n_u, n_u)).tocsr()
        B = sparse.coo_matrix(
            (np.concatenate(vals_b), (np.concatenate(rows_b), np.concatenate(cols_b))), shape=(n_p, n_u)
        ).tocsr()

        logger.info(f"System assembliert: A {A.shape} nnz={A.nnz + S.nnz}, B {B.shape} nnz={B.nnz}")
        return SaddlePointSystem(
            discretization=disc, data=data, A=A, S=S, B=B, F=F, G=np.zeros(n_p)
        )


def assemble(
    mesh: InterfaceMesh,
    k: int,
    data: ProblemData,
    exactness: Optional[int] = None,
    workers: Optional[int] = None,
) -> SaddlePointSystem:
    """Kurzform für SystemAssembler(k, exactness, workers).assemble(mesh, data)."""
    return SystemAssembler(k, exactness, workers).assemble(mesh, data)
