"""
Quadraturregeln auf den Referenzelementen.

Referenzdreieck: {(ξ, η): ξ, η >= 0, ξ + η <= 1}, Ecken (0,0), (1,0), (0,1).
Referenzquadrat: [0, 1]².
Das Dreieck wird über die kollabierte Abbildung (ξ, η) = (u(1−v), uv)
aus einer Tensor-Gauß-Regel gewonnen; alle Gewichte sind positiv.
"""

from functools import lru_cache
from math import factorial
from typing import Tuple

import numpy as np

SHAPE_TRIANGLE = "tri"
SHAPE_SQUARE = "square"


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauß-Legendre-Punkte und -Gewichte auf [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def points_for_exactness(m: int) -> int:
    """Punktzahl je Richtung für polynomialen Grad m (inkl. Jacobi-Faktor)."""
    return max(m, 1) // 2 + 2


def triangle_rule(n_u: int, n_v: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Kollabierte Tensorregel auf dem Referenzdreieck.

    Args:
        n_u: Punkte in radialer Richtung u = ξ + η
        n_v: Punkte entlang der Hypotenuse v = η / (ξ + η)
    """
    u, wu = gauss_legendre(n_u)
    v, wv = gauss_legendre(n_v)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    weights = np.outer(wu * u, wv).ravel()
    points = np.column_stack([(uu * (1.0 - vv)).ravel(), (uu * vv).ravel()])
    return points, weights


def square_rule(n_x: int, n_y: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor-Gauß-Regel auf [0, 1]²."""
    x, wx = gauss_legendre(n_x)
    y, wy = gauss_legendre(n_y)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()]), np.outer(wx, wy).ravel()


def reference_rule(shape: str, m: int) -> Tuple[np.ndarray, np.ndarray]:
    n = points_for_exactness(m)
    if shape == SHAPE_TRIANGLE:
        return triangle_rule(n, n)
    if shape == SHAPE_SQUARE:
        return square_rule(n, n)
    raise ValueError(f"Unbekanntes Referenzelement: {shape}")


def monomial_integral(shape: str, a: int, b: int) -> float:
    """Exaktes Integral von ξ^a η^b über das Referenzelement."""
    if shape == SHAPE_TRIANGLE:
        return factorial(a) * factorial(b) / factorial(a + b + 2)
    return 1.0 / ((a + 1) * (b + 1))


def audit_rule(shape: str, points: np.ndarray, weights: np.ndarray, m: int) -> float:
    """Maximaler Fehler über alle Monome vom Totalgrad <= m."""
    worst = 0.0
    for total in range(m + 1):
        for a in range(total + 1):
            b = total - a
            approx = float(np.sum(weights * points[:, 0] ** a * points[:, 1] ** b))
            worst = max(worst, abs(approx - monomial_integral(shape, a, b)))
    return worst
