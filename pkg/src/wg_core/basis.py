"""
Polynombasen: skalierte Monome auf Zellen, Legendre-Polynome auf Kanten.
"""

from typing import List, Tuple

import numpy as np


def monomial_exponents(degree: int) -> List[Tuple[int, int]]:
    """Exponenten (a, b) mit a + b <= degree, nach Totalgrad geordnet."""
    return [(d - b, b) for d in range(degree + 1) for b in range(d + 1)]


def scalar_dimension(degree: int) -> int:
    return (degree + 1) * (degree + 2) // 2 if degree >= 0 else 0


class CellBasis:
    """
    Skalierte Monome ((x − x_c)/h_T)^a ((y − y_c)/h_T)^b, a + b <= degree.

    Attributes:
        centroid: Zellschwerpunkt x_c
        scale: Zelldurchmesser h_T
        degree: Polynomgrad
    """

    def __init__(self, centroid: Tuple[float, float], scale: float, degree: int) -> None:
        self.centroid = np.asarray(centroid, dtype=float)
        self.scale = float(scale)
        self.degree = degree
        self.exponents = np.array(monomial_exponents(degree), dtype=int).reshape(-1, 2)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def _scaled(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        local = (np.atleast_2d(points) - self.centroid) / self.scale
        return local[:, 0:1], local[:, 1:2]

    def values(self, points: np.ndarray) -> np.ndarray:
        """Basiswerte, Form (N, dim)."""
        x, y = self._scaled(points)
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        return x ** a * y ** b

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Basisgradienten, Form (N, dim, 2)."""
        x, y = self._scaled(points)
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        dx = np.where(a > 0, a * x ** np.maximum(a - 1, 0) * y ** b, 0.0)
        dy = np.where(b > 0, b * x ** a * y ** np.maximum(b - 1, 0), 0.0)
        return np.stack([dx, dy], axis=-1) / self.scale

    def evaluate(self, coefficients: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Wert eines Polynoms; Koeffizienten (dim,) oder (c, dim)."""
        return self.values(points) @ np.asarray(coefficients).T


class EdgeBasis:
    """Legendre-Polynome P_j(2s − 1) im normierten Bogenlängenparameter s."""

    def __init__(self, degree: int) -> None:
        self.degree = degree

    @property
    def dim(self) -> int:
        return self.degree + 1

    def values(self, params: np.ndarray) -> np.ndarray:
        return np.polynomial.legendre.legvander(2.0 * np.asarray(params, dtype=float) - 1.0, self.degree)
