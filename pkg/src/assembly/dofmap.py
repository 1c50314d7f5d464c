"""
DofMap - Nummerierung der Freiheitsgrade.

Skalare Nummerierung: zuerst die Innen-DOFs aller Zellen (je dim P_k), dann
die Spur-DOFs aller Kanten in ID-Reihenfolge. Interface-Kanten tragen zwei
Blöcke (Slot 0 = Seite 1, Slot 1 = Seite 2). Die Geschwindigkeit verwendet
zwei Kopien dieser Nummerierung: DOF i der Komponente c liegt bei c·N_s + i.
"""

import logging
from typing import List, Tuple

import numpy as np

from ..mesh.curve import SIDE_1
from ..mesh.mesh import InterfaceMesh
from ..wg_core.basis import scalar_dimension

logger = logging.getLogger(__name__)


class DofMap:
    """
    Globale Freiheitsgrade von Geschwindigkeit und Druck.

    Attributes:
        cell_offsets: Anfang des Innenblocks je Zelle (skalar)
        edge_offsets: Anfang des Spurblocks je Kante und Slot (skalar)
        edge_dims: Spurdimension je Kante
        n_scalar: N_s, Anzahl skalarer Geschwindigkeits-DOFs
    """

    def __init__(self, mesh: InterfaceMesh, degree: int) -> None:
        if degree < 1:
            raise ValueError(f"Polynomgrad muss >= 1 sein: {degree}")
        self.mesh = mesh
        self.degree = degree
        self.nk = scalar_dimension(degree)
        self.n1 = scalar_dimension(degree - 1)

        self.cell_offsets = np.arange(mesh.num_cells, dtype=np.int64) * self.nk
        offset = mesh.num_cells * self.nk
        self.edge_dims = np.zeros(mesh.num_edges, dtype=np.int64)
        self.edge_offsets: List[Tuple[int, ...]] = []
        for edge in mesh.edges:
            dim = degree + 1 if edge.is_interface else degree
            self.edge_dims[edge.id] = dim
            slots = tuple(offset + s * dim for s in range(edge.num_slots))
            self.edge_offsets.append(slots)
            offset += dim * edge.num_slots
        self.n_scalar = int(offset)

        logger.debug(f"DofMap: N_u={self.n_velocity}, N_p={self.n_pressure}")

    @property
    def n_velocity(self) -> int:
        return 2 * self.n_scalar

    @property
    def n_pressure(self) -> int:
        return self.mesh.num_cells * self.n1

    def cell_dofs(self, cell_id: int) -> np.ndarray:
        """Skalare Innen-DOFs einer Zelle."""
        start = self.cell_offsets[cell_id]
        return np.arange(start, start + self.nk, dtype=np.int64)

    def edge_dofs(self, edge_id: int, slot: int = 0) -> np.ndarray:
        """Skalare Spur-DOFs einer Kante im angegebenen Slot."""
        start = self.edge_offsets[edge_id][slot]
        return np.arange(start, start + self.edge_dims[edge_id], dtype=np.int64)

    def slot_of(self, cell_id: int, edge_id: int) -> int:
        """Slot, den eine Zelle auf einer Kante sieht."""
        if not self.mesh.edges[edge_id].is_interface:
            return 0
        return 0 if self.mesh.cells[cell_id].subdomain == SIDE_1 else 1

    def local_scalar_dofs(self, cell_id: int) -> np.ndarray:
        """Globale skalare DOFs im lokalen Layout [v0, Kante 0, Kante 1, ...]."""
        cell = self.mesh.cells[cell_id]
        parts = [self.cell_dofs(cell_id)]
        parts.extend(self.edge_dofs(e, self.slot_of(cell_id, e)) for e in cell.edges)
        return np.concatenate(parts)

    def local_dofs(self, cell_id: int) -> np.ndarray:
        """Globale Geschwindigkeits-DOFs im lokalen Vektorlayout."""
        scalar = self.local_scalar_dofs(cell_id)
        return np.concatenate([scalar, scalar + self.n_scalar])

    def pressure_dofs(self, cell_id: int) -> np.ndarray:
        start = cell_id * self.n1
        return np.arange(start, start + self.n1, dtype=np.int64)

    def vector_dofs(self, scalar: np.ndarray, component: int) -> np.ndarray:
        return np.asarray(scalar, dtype=np.int64) + component * self.n_scalar

    def constrained_mask(self) -> np.ndarray:
        """True für Geschwindigkeits-DOFs auf dem Gebietsrand."""
        mask = np.zeros(self.n_velocity, dtype=bool)
        for edge in self.mesh.boundary_edges():
            for c in range(2):
                mask[self.vector_dofs(self.edge_dofs(edge.id), c)] = True
        return mask

    def eliminated_mask(self) -> np.ndarray:
        """True für Spur-DOFs der Seite 2 auf dem Interface."""
        mask = np.zeros(self.n_velocity, dtype=bool)
        for edge in self.mesh.interface_edges():
            for c in range(2):
                mask[self.vector_dofs(self.edge_dofs(edge.id, 1), c)] = True
        return mask

    def check_ranges(self) -> None:
        """Prüft, dass alle Blöcke disjunkt sind und [0, N_s) überdecken."""
        covered = np.zeros(self.n_scalar, dtype=np.int64)
        for cell_id in range(self.mesh.num_cells):
            covered[self.cell_dofs(cell_id)] += 1
        for edge in self.mesh.edges:
            for slot in range(edge.num_slots):
                covered[self.edge_dofs(edge.id, slot)] += 1
        if not np.all(covered == 1):
            raise ValueError("DOF-Bereiche überlappen oder lassen Lücken")
