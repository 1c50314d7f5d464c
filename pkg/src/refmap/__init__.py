"""Referenzabbildungen und Quadraturregeln für gerade und gekrümmte Zellen."""

from .cell_map import (
    AffineTriangleMap,
    ArcSegment,
    BilinearQuadMap,
    CellMap,
    CurvedQuadMap,
    CurvedTriangleMap,
    build_cell_map,
)
from .quadrature import (
    CURVED_POINTS,
    EdgeQuadratureRule,
    QuadratureCache,
    QuadratureRule,
    cell_quadrature,
    edge_quadrature,
)
from .reference import audit_rule, monomial_integral, reference_rule

__all__ = [
    "AffineTriangleMap",
    "ArcSegment",
    "BilinearQuadMap",
    "CellMap",
    "CurvedQuadMap",
    "CurvedTriangleMap",
    "build_cell_map",
    "CURVED_POINTS",
    "EdgeQuadratureRule",
    "QuadratureCache",
    "QuadratureRule",
    "cell_quadrature",
    "edge_quadrature",
    "audit_rule",
    "monomial_integral",
    "reference_rule",
]
