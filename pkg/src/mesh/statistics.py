"""
Gitterstatistik und Regularitätsprüfung (Formregularität, Kantenverhältnis,
einbeschriebene Kugel, Innenwinkel).

Der Innenwinkel an jeder Ecke wird aus den Kantentangenten berechnet, bei
gekrümmten Kanten aus der Kurvenableitung. Spitzen (Winkel 0) und
überschlagene Zellen (Winkel nahe 180° oder darüber) haben keine
Referenzabbildung mit positiver Jacobi-Determinante.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .mesh import InterfaceMesh, points_in_polygon

logger = logging.getLogger(__name__)

# Deklarierte Regularitätskonstanten
MIN_AREA_RATIO = 0.005       # |T| >= C1·h_T²
MIN_EDGE_RATIO = 0.02        # h_e >= κ·h_T
MAX_EDGE_RATIO = 2.0         # |e| <= C3·h_T
MIN_INSCRIBED_RATIO = 0.01   # Radius der einbeschriebenen Kugel >= ρ·h_T
MIN_ANGLE_DEG = 1.0          # Innenwinkel in [α, 180° − α]

_BOUNDARY_SAMPLES = 33


@dataclass
class MeshStats:
    """
    Kennzahlen eines Gitters.

    Attributes:
        h: Gitterweite max h_T
        min_h: kleinster Zelldurchmesser
        min_area_ratio: min |T|/h_T²
        min_edge_ratio: min h_e/h_T
        max_edge_ratio: max |e|/h_T
        min_inscribed_ratio: min ρ_T/h_T
        min_angle, max_angle: kleinster und größter Innenwinkel in Grad
        passed: alle Schranken erfüllt
        offending_cells: Zellen, die eine Schranke verletzen
    """
    h: float = 0.0
    min_h: float = 0.0
    min_area_ratio: float = float("inf")
    min_edge_ratio: float = float("inf")
    max_edge_ratio: float = 0.0
    min_inscribed_ratio: float = float("inf")
    min_angle: float = 180.0
    max_angle: float = 0.0
    num_cells: int = 0
    num_curved: int = 0
    passed: bool = True
    offending_cells: Tuple[int, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "min_h": self.min_h,
            "min_area_ratio": self.min_area_ratio,
            "min_edge_ratio": self.min_edge_ratio,
            "max_edge_ratio": self.max_edge_ratio,
            "min_inscribed_ratio": self.min_inscribed_ratio,
            "min_angle": self.min_angle,
            "max_angle": self.max_angle,
            "num_cells": self.num_cells,
            "num_curved": self.num_curved,
            "passed": self.passed,
            "offending_cells": list(self.offending_cells),
        }


def _boundary_polyline(mesh: InterfaceMesh, cell_id: int) -> List[np.ndarray]:
    """Randstücke einer Zelle als Punktfolgen in Durchlaufrichtung."""
    cell = mesh.cells[cell_id]
    tau = np.linspace(0.0, 1.0, _BOUNDARY_SAMPLES)
    pieces = []
    for edge_id, orient in zip(cell.edges, cell.orientations):
        if mesh.edges[edge_id].curved:
            pts = mesh.edge_points(edge_id, tau)
        else:
            pts = mesh.edge_points(edge_id, np.array([0.0, 1.0]))
        pieces.append(pts if orient > 0 else pts[::-1])
    return pieces


def _segment_distance(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = np.maximum(np.sum(ab * ab, axis=-1), 1e-300)
    s = np.clip(np.sum((point - a) * ab, axis=-1) / denom, 0.0, 1.0)
    return np.linalg.norm(a + s[..., None] * ab - point, axis=-1)


def inscribed_radius(mesh: InterfaceMesh, cell_id: int) -> float:
    """Radius der größten Kugel um den Schwerpunkt, die in der Zelle liegt."""
    centroid = np.array(mesh.cells[cell_id].centroid)
    pieces = _boundary_polyline(mesh, cell_id)
    polygon = np.vstack([p[:-1] for p in pieces])
    if not points_in_polygon(polygon, centroid[None, :])[0]:
        return 0.0
    dist = min(float(np.min(_segment_distance(centroid, p[:-1], p[1:]))) for p in pieces)
    return dist


def corner_angles(mesh: InterfaceMesh, cell_id: int) -> np.ndarray:
    """Innenwinkel (Grad) an den Ecken einer Zelle, in Eckenreihenfolge."""
    cell = mesh.cells[cell_id]
    starts, ends = [], []
    for edge_id, orient in zip(cell.edges, cell.orientations):
        d = mesh.edge_derivative(edge_id, np.array([0.0, 1.0]))
        if orient > 0:
            starts.append(d[0])
            ends.append(d[1])
        else:
            starts.append(-d[1])
            ends.append(-d[0])
    d_out = np.array(starts)
    d_in = np.roll(np.array(ends), 1, axis=0)
    cross = d_in[:, 0] * d_out[:, 1] - d_in[:, 1] * d_out[:, 0]
    dot = np.sum(d_in * d_out, axis=1)
    return np.degrees(np.pi - np.arctan2(cross, dot))


def mesh_statistics(mesh: InterfaceMesh) -> MeshStats:
    """
    Berechnet Gitterweite und Regularitätskennzahlen.

    Args:
        mesh: (angepasstes) Gitter

    Returns:
        MeshStats; ein leeres Gitter besteht die Prüfung trivial mit h = 0
    """
    stats = MeshStats(num_cells=mesh.num_cells)
    if not mesh.cells:
        return stats

    diameters = np.array([c.diameter for c in mesh.cells])
    stats.h = float(diameters.max())
    stats.min_h = float(diameters.min())
    stats.num_curved = sum(1 for c in mesh.cells if c.curved)

    offending = []
    for cell in mesh.cells:
        h_t = cell.diameter
        area_ratio = cell.area / h_t ** 2
        chords = [mesh.chord_length(e) / h_t for e in cell.edges]
        lengths = [mesh.edge_length(e) / h_t if mesh.edges[e].curved else c for e, c in zip(cell.edges, chords)]
        inscribed = inscribed_radius(mesh, cell.id) / h_t
        angles = corner_angles(mesh, cell.id)

        stats.min_area_ratio = min(stats.min_area_ratio, area_ratio)
        stats.min_edge_ratio = min(stats.min_edge_ratio, min(chords))
        stats.max_edge_ratio = max(stats.max_edge_ratio, max(lengths))
        stats.min_inscribed_ratio = min(stats.min_inscribed_ratio, inscribed)
        stats.min_angle = min(stats.min_angle, float(angles.min()))
        stats.max_angle = max(stats.max_angle, float(angles.max()))

        if (
            area_ratio < MIN_AREA_RATIO
            or min(chords) < MIN_EDGE_RATIO
            or max(lengths) > MAX_EDGE_RATIO
            or inscribed < MIN_INSCRIBED_RATIO
            or angles.min() < MIN_ANGLE_DEG
            or angles.max() > 180.0 - MIN_ANGLE_DEG
        ):
            offending.append(cell.id)

    stats.offending_cells = tuple(offending)
    stats.passed = not offending
    if offending:
        logger.warning(f"Regularität verletzt in {len(offending)} Zellen, z.B. {offending[:5]}")
    logger.debug(
        f"Gitterstatistik: h={stats.h:.4e}, min |T|/h_T²={stats.min_area_ratio:.4f}, "
        f"min h_e/h_T={stats.min_edge_ratio:.4f}, Innenwinkel {stats.min_angle:.1f}°–{stats.max_angle:.1f}°"
    )
    return stats
