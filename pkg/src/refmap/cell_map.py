"""
Referenzabbildungen für gerade und gekrümmte Zellen.

- AffineTriangleMap: affines Dreieck
- BilinearQuadMap: bilineares Viereck
- CurvedTriangleMap / CurvedQuadMap: transfinite Interpolation mit exaktem
  Kurvenbogen auf einer Seite, gerade auf allen übrigen Seiten
- CellMap: Zusammenfassung der Teilabbildungen einer Zelle; polygonale
  Zellen werden in ein gekrümmtes Dreieck am Bogen und einen geraden
  Fächer zerlegt
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import NonPositiveJacobian
from ..mesh.curve import InterfaceCurve
from ..mesh.mesh import InterfaceMesh
from .reference import SHAPE_SQUARE, SHAPE_TRIANGLE, reference_rule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArcSegment:
    """Kurvenbogen, linear im Kurvenparameter auf s ∈ [0, 1] umparametrisiert."""
    curve: InterfaceCurve
    t_start: float
    t_end: float

    def point(self, s: np.ndarray) -> np.ndarray:
        return self.curve.point(self.t_start + np.asarray(s) * (self.t_end - self.t_start))

    def derivative(self, s: np.ndarray) -> np.ndarray:
        t = self.t_start + np.asarray(s) * (self.t_end - self.t_start)
        return (self.t_end - self.t_start) * self.curve.derivative(t)


class ElementMap:
    """Abbildung Referenzelement → physikalisches (Teil-)Element."""

    shape: str = SHAPE_TRIANGLE
    curved: bool = False

    def map(self, ref: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, ref: np.ndarray) -> np.ndarray:
        """J[:, i, j] = ∂x_i/∂ξ_j."""
        raise NotImplementedError

    def det(self, ref: np.ndarray) -> np.ndarray:
        jac = self.jacobian(ref)
        return jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]

    def reference_vertices(self) -> np.ndarray:
        if self.shape == SHAPE_TRIANGLE:
            return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        return np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class AffineTriangleMap(ElementMap):
    shape = SHAPE_TRIANGLE

    def __init__(self, v0: np.ndarray, v1: np.ndarray, v2: np.ndarray) -> None:
        self.v0 = np.asarray(v0, dtype=float)
        self.matrix = np.column_stack([np.asarray(v1) - self.v0, np.asarray(v2) - self.v0])

    def map(self, ref: np.ndarray) -> np.ndarray:
        return self.v0 + np.asarray(ref) @ self.matrix.T

    def jacobian(self, ref: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.matrix, (len(ref), 2, 2)).copy()


class BilinearQuadMap(ElementMap):
    shape = SHAPE_SQUARE

    def __init__(self, vertices: Sequence[np.ndarray]) -> None:
        self.v = np.asarray(vertices, dtype=float)

    def map(self, ref: np.ndarray) -> np.ndarray:
        xi, eta = ref[:, 0:1], ref[:, 1:2]
        v0, v1, v2, v3 = self.v
        return (1 - xi) * (1 - eta) * v0 + xi * (1 - eta) * v1 + xi * eta * v2 + (1 - xi) * eta * v3

    def jacobian(self, ref: np.ndarray) -> np.ndarray:
        xi, eta = ref[:, 0:1], ref[:, 1:2]
        v0, v1, v2, v3 = self.v
        d_xi = (1 - eta) * (v1 - v0) + eta * (v2 - v3)
        d_eta = (1 - xi) * (v3 - v0) + xi * (v2 - v1)
        return np.stack([d_xi, d_eta], axis=-1)


class CurvedTriangleMap(ElementMap):
    """
    Dreieck mit gekrümmter Seite V1 → V2 (Hypotenuse ξ + η = 1).

    x(ξ, η) = V0 + λ·(γ(s) − V0) mit λ = ξ + η, s = η/λ.
    Die Seiten V0V1 und V0V2 bleiben gerade; detJ = (γ(s) − V0) × γ'(s).
    """
    shape = SHAPE_TRIANGLE
    curved = True

    def __init__(self, v0: np.ndarray, arc: ArcSegment) -> None:
        self.v0 = np.asarray(v0, dtype=float)
        self.arc = arc

    @staticmethod
    def _collapse(ref: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        lam = ref[:, 0] + ref[:, 1]
        safe = np.where(lam > 0.0, lam, 1.0)
        s = np.where(lam > 0.0, ref[:, 1] / safe, 0.0)
        return lam, s

    def map(self, ref: np.ndarray) -> np.ndarray:
        lam, s = self._collapse(np.asarray(ref, dtype=float))
        return self.v0 + lam[:, None] * (self.arc.point(s) - self.v0)

    def jacobian(self, ref: np.ndarray) -> np.ndarray:
        _, s = self._collapse(np.asarray(ref, dtype=float))
        g = self.arc.point(s) - self.v0
        dg = self.arc.derivative(s)
        d_xi = g - s[:, None] * dg
        d_eta = g + (1.0 - s)[:, None] * dg
        return np.stack([d_xi, d_eta], axis=-1)


class CurvedQuadMap(ElementMap):
    """
    Viereck mit gekrümmter Seite V2 → V3 (η = 1), Gordon-Hall-Interpolation.

    x(ξ, η) = bilinear(ξ, η) + η·(c(ξ) − [(1−ξ)V3 + ξV2]) mit c(ξ) = γ(1 − ξ).
    """
    shape = SHAPE_SQUARE
    curved = True

    def __init__(self, v0: np.ndarray, v1: np.ndarray, arc: ArcSegment) -> None:
        self.arc = arc
        self.v2 = arc.point(np.array(0.0))
        self.v3 = arc.point(np.array(1.0))
        self.bilinear = BilinearQuadMap([v0, v1, self.v2, self.v3])

    def _bubble(self, xi: np.ndarray) -> np.ndarray:
        chord = (1.0 - xi)[:, None] * self.v3 + xi[:, None] * self.v2
        return self.arc.point(1.0 - xi) - chord

    def map(self, ref: np.ndarray) -> np.ndarray:
        ref = np.asarray(ref, dtype=float)
        return self.bilinear.map(ref) + ref[:, 1:2] * self._bubble(ref[:, 0])

    def jacobian(self, ref: np.ndarray) -> np.ndarray:
        ref = np.asarray(ref, dtype=float)
        xi, eta = ref[:, 0], ref[:, 1]
        jac = self.bilinear.jacobian(ref)
        d_bubble = -self.arc.derivative(1.0 - xi) - (self.v2 - self.v3)
        jac[:, :, 0] += eta[:, None] * d_bubble
        jac[:, :, 1] += self._bubble(xi)
        return jac


@dataclass
class CellMap:
    """
    Referenzabbildung einer Zelle, ggf. aus mehreren Teilabbildungen.

    Attributes:
        cell_id: Zellen-ID
        pieces: Teilabbildungen; einfache Zellen haben genau eine
        det_range: (min, max) von detJ/h_T² an den Prüfpunkten
    """
    cell_id: int
    pieces: List[ElementMap]
    det_range: Tuple[float, float] = (0.0, 0.0)

    @property
    def curved(self) -> bool:
        return any(p.curved for p in self.pieces)

    def map(self, ref: np.ndarray, piece: int = 0) -> np.ndarray:
        return self.pieces[piece].map(np.atleast_2d(ref))

    def jacobian(self, ref: np.ndarray, piece: int = 0) -> np.ndarray:
        return self.pieces[piece].jacobian(np.atleast_2d(ref))

    def det(self, ref: np.ndarray, piece: int = 0) -> np.ndarray:
        return self.pieces[piece].det(np.atleast_2d(ref))


def _traversal_arcs(mesh: InterfaceMesh, cell_id: int) -> List[Optional[Tuple[float, float]]]:
    cell = mesh.cells[cell_id]
    arcs = []
    for edge_id, orient in zip(cell.edges, cell.orientations):
        arc = mesh.edges[edge_id].arc
        arcs.append(None if arc is None else (arc if orient > 0 else (arc[1], arc[0])))
    return arcs


def _straight_pieces(points: np.ndarray) -> List[ElementMap]:
    if len(points) == 3:
        return [AffineTriangleMap(*points)]
    if len(points) == 4:
        return [BilinearQuadMap(points)]
    return [AffineTriangleMap(points[0], points[i], points[i + 1]) for i in range(1, len(points) - 1)]


def _fan_pieces(points: np.ndarray, arc: ArcSegment, i: int, apex: int) -> List[ElementMap]:
    """Gekrümmtes Dreieck (Spitze, Bogen auf Kante i) plus gerader Fächer ab der Spitze."""
    nv = len(points)
    pieces: List[ElementMap] = [CurvedTriangleMap(points[apex], arc)]
    for j in range(nv):
        if j in (i, apex) or (j + 1) % nv == apex:
            continue
        pieces.append(AffineTriangleMap(points[apex], points[j], points[(j + 1) % nv]))
    return pieces


def _det_extremes(pieces: Sequence[ElementMap], check_exactness: int) -> Tuple[float, float, np.ndarray]:
    """(min detJ, max detJ, Referenzpunkt des Minimums) über alle Teilabbildungen."""
    det_min, det_max, worst_point = np.inf, -np.inf, np.zeros(2)
    for piece in pieces:
        ref, _ = reference_rule(piece.shape, check_exactness)
        samples = np.vstack([ref, piece.reference_vertices()])
        det = piece.det(samples)
        worst = int(np.argmin(det))
        if det[worst] < det_min:
            det_min, worst_point = float(det[worst]), samples[worst]
        det_max = max(det_max, float(det.max()))
    return det_min, det_max, worst_point


def build_cell_map(mesh: InterfaceMesh, cell_id: int, check_exactness: int = 4) -> CellMap:
    """
    Erzeugt die Referenzabbildung einer Zelle.

    Gekrümmte Vierecke verwenden die Gordon-Hall-Abbildung, solange sie an
    allen Prüfpunkten detJ > 0 hat. Sonst, und für Zellen mit mehr als vier
    Ecken, wird die Zelle in ein gekrümmtes Dreieck am Bogen und einen
    geraden Fächer zerlegt; als Spitze dient die Ecke mit dem größten
    minimalen detJ.

    Args:
        mesh: Gitter (liefert Ecken und Interface-Kurve)
        cell_id: Zellen-ID
        check_exactness: Grad der Prüfpunkte für detJ > 0 (typisch 2k+2)

    Raises:
        NonPositiveJacobian: detJ <= 0 an einem Prüfpunkt
    """
    cell = mesh.cells[cell_id]
    points = mesh.cell_coordinates(cell_id)
    arcs = _traversal_arcs(mesh, cell_id)
    curved_at = [i for i, arc in enumerate(arcs) if arc is not None]
    nv = len(points)

    if not curved_at:
        candidates = [_straight_pieces(points)]
    elif len(curved_at) > 1:
        raise ValueError(f"Zelle {cell_id} hat {len(curved_at)} gekrümmte Kanten")
    else:
        i = curved_at[0]
        arc = ArcSegment(mesh.curve, *arcs[i])
        if nv == 3:
            candidates = [[CurvedTriangleMap(points[(i - 1) % 3], arc)]]
        else:
            candidates = [[CurvedQuadMap(points[(i - 2) % 4], points[(i - 1) % 4], arc)]] if nv == 4 else []
            candidates += [
                _fan_pieces(points, arc, i, apex) for apex in range(nv) if apex not in (i, (i + 1) % nv)
            ]

    evaluated = [(pieces, _det_extremes(pieces, check_exactness)) for pieces in candidates]
    pieces, (det_min, det_max, worst_point) = evaluated[0]
    if det_min <= 0.0 or nv > 4:
        pieces, (det_min, det_max, worst_point) = max(evaluated, key=lambda item: item[1][0])
    if det_min <= 0.0:
        raise NonPositiveJacobian(cell_id, worst_point, det_min)

    cell_map = CellMap(cell_id=cell_id, pieces=pieces)
    h2 = cell.diameter ** 2
    cell_map.det_range = (det_min / h2, det_max / h2)
    return cell_map
