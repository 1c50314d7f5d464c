"""
Quadraturregeln auf physikalischen Zellen und Kanten.

Zellregeln entstehen durch Abbilden einer Referenzregel (Gewicht · detJ),
Kantenregeln durch Gauß-Quadratur im Kantenparameter mit |p'(t)| als
Bogenlängenfaktor. Gekrümmte Richtungen verwenden mindestens
CURVED_POINTS Gauß-Punkte.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..exceptions import NonPositiveJacobian
from ..mesh.mesh import InterfaceMesh
from .cell_map import CellMap, build_cell_map
from .reference import (
    SHAPE_TRIANGLE,
    gauss_legendre,
    points_for_exactness,
    square_rule,
    triangle_rule,
)

logger = logging.getLogger(__name__)

CURVED_POINTS = 16


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """
    Quadraturregel mit physikalischen Punkten.

    Attributes:
        points: Punkte, Form (N, 2)
        weights: positive Gewichte (Flächen- oder Bogenlängenmaß)
        declared_exactness: zugesicherter Polynomgrad m
    """
    points: np.ndarray
    weights: np.ndarray
    declared_exactness: int

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integral von Werten an den Punkten, erste Achse = Punkte."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


@dataclass(frozen=True, eq=False)
class EdgeQuadratureRule(QuadratureRule):
    """
    Kantenregel in Richtung v0 → v1.

    Attributes:
        params: normierter Bogenlängenparameter s ∈ [0, 1] ab v0
        tangents: Einheitstangenten in Richtung v0 → v1
    """
    params: np.ndarray = None
    tangents: np.ndarray = None

    def normals(self, orientation: int) -> np.ndarray:
        """Äußere Normale der Zelle, die die Kante mit dieser Orientierung durchläuft."""
        t = self.tangents
        return orientation * np.column_stack([t[:, 1], -t[:, 0]])


def _clamp(m: int) -> int:
    if m < 1:
        logger.warning(f"Quadraturgrad {m} angefordert, verwende 1")
        return 1
    return int(m)


def cell_quadrature(cell_map: CellMap, m: int, curved_points: int = CURVED_POINTS) -> QuadratureRule:
    """
    Zellregel vom Grad >= m über alle Teilabbildungen.

    Raises:
        NonPositiveJacobian: detJ <= 0 an einem Quadraturpunkt
    """
    m = _clamp(m)
    n = points_for_exactness(m)
    n_curved = max(n, curved_points)
    all_points, all_weights = [], []
    for piece in cell_map.pieces:
        if piece.shape == SHAPE_TRIANGLE:
            ref, w = triangle_rule(n, n_curved if piece.curved else n)
        else:
            ref, w = square_rule(n_curved if piece.curved else n, n)
        det = piece.det(ref)
        if np.any(det <= 0.0):
            worst = int(np.argmin(det))
            raise NonPositiveJacobian(cell_map.cell_id, ref[worst], float(det[worst]))
        all_points.append(piece.map(ref))
        all_weights.append(w * det)
    return QuadratureRule(
        points=np.vstack(all_points),
        weights=np.concatenate(all_weights),
        declared_exactness=m,
    )


def edge_quadrature(
    mesh: InterfaceMesh, edge_id: int, m: int, curved_points: int = CURVED_POINTS
) -> EdgeQuadratureRule:
    """Gauß-Regel auf einer geraden oder gekrümmten Kante."""
    m = _clamp(m)
    edge = mesh.edges[edge_id]
    n = m // 2 + 1
    if edge.curved:
        n = max(n, curved_points)
    tau, w = gauss_legendre(n)
    points = mesh.edge_points(edge_id, tau)
    deriv = mesh.edge_derivative(edge_id, tau)
    speed = np.linalg.norm(deriv, axis=1)
    weights = w * speed

    if edge.curved:
        # kumulative Bogenlänge je Knoten, Gauß-Regel auf [0, tau_i]
        sub_x, sub_w = gauss_legendre(n)
        nodes = np.outer(tau, sub_x)
        sub_speed = np.linalg.norm(mesh.edge_derivative(edge_id, nodes.ravel()), axis=1).reshape(nodes.shape)
        partial = tau * (sub_speed @ sub_w)
        params = partial / np.sum(weights)
    else:
        params = tau.copy()

    return EdgeQuadratureRule(
        points=points,
        weights=weights,
        declared_exactness=m,
        params=params,
        tangents=deriv / speed[:, None],
    )


class QuadratureCache:
    """Thread-sichere Ablage von Zell- und Kantenregeln eines Gitters."""

    def __init__(self, mesh: InterfaceMesh, curved_points: int = CURVED_POINTS) -> None:
        self.mesh = mesh
        self.curved_points = curved_points
        self._lock = threading.Lock()
        self._cells: Dict[Tuple[int, int], QuadratureRule] = {}
        self._edges: Dict[Tuple[int, int], EdgeQuadratureRule] = {}
        self._maps: Dict[int, CellMap] = {}

    def cell_map(self, cell_id: int, check_exactness: int = 4) -> CellMap:
        with self._lock:
            cached = self._maps.get(cell_id)
        if cached is None:
            cached = build_cell_map(self.mesh, cell_id, check_exactness)
            with self._lock:
                self._maps.setdefault(cell_id, cached)
        return cached

    def cell_rule(self, cell_id: int, m: int) -> QuadratureRule:
        key = (cell_id, m)
        with self._lock:
            rule = self._cells.get(key)
        if rule is None:
            rule = cell_quadrature(self.cell_map(cell_id, m), m, self.curved_points)
            with self._lock:
                rule = self._cells.setdefault(key, rule)
        return rule

    def edge_rule(self, edge_id: int, m: int) -> EdgeQuadratureRule:
        key = (edge_id, m)
        with self._lock:
            rule = self._edges.get(key)
        if rule is None:
            rule = edge_quadrature(self.mesh, edge_id, m, self.curved_points)
            with self._lock:
                rule = self._edges.setdefault(key, rule)
        return rule
