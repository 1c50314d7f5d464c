"""
InterfaceCurve - Geschlossene, sternförmige Interface-Kurve Γ.

Alle unterstützten Kurven sind in Polarkoordinaten um ein Zentrum gegeben,
r = r(θ), und werden über t ∈ [0, 1) mit θ = 2πt gegen den Uhrzeigersinn
parametrisiert. Ω1 ist das Innere der Kurve, Ω2 das Äußere.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

logger = logging.getLogger(__name__)

SIDE_ON = 0
SIDE_1 = 1
SIDE_2 = 2

TOL_GEOM = 1e-12

CURVE_KINDS = ("circle", "polar_star", "parametric")

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class InterfaceCurve:
    """
    Parametrische Interface-Kurve.

    Attributes:
        kind: "circle" (params = radius), "polar_star" (params = r0, a, m für
            r = r0 + a·sin(mθ)) oder "parametric" (Fourier-Radius
            a0, a1, b1, a2, b2, ...)
        params: Kurvenparameter
        center: Zentrum der Polardarstellung
        tol_geom: Geometrietoleranz für die Seitenklassifikation
    """
    kind: str
    params: Tuple[float, ...]
    center: Tuple[float, float] = (0.0, 0.0)
    tol_geom: float = TOL_GEOM

    def __post_init__(self) -> None:
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"Unbekannter Kurventyp: {self.kind}")
        params = tuple(float(p) for p in self.params)
        expected = {"circle": 1, "polar_star": 3}
        if self.kind in expected and len(params) != expected[self.kind]:
            raise ValueError(
                f"Kurventyp {self.kind} erwartet {expected[self.kind]} Parameter, "
                f"erhalten: {len(params)}"
            )
        if self.kind == "parametric" and len(params) % 2 == 0:
            raise ValueError("Fourier-Radius erwartet a0 und Paare (a_j, b_j)")
        if self.kind == "circle" and params[0] <= 0:
            raise ValueError(f"Radius muss positiv sein: {params[0]}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @classmethod
    def circle(cls, radius: float, center: Tuple[float, float] = (0.0, 0.0)) -> "InterfaceCurve":
        return cls("circle", (radius,), center)

    @classmethod
    def polar_star(
        cls, r0: float, amplitude: float, frequency: int, center: Tuple[float, float] = (0.0, 0.0)
    ) -> "InterfaceCurve":
        return cls("polar_star", (r0, amplitude, float(frequency)), center)

    def radius(self, theta: ArrayLike, order: int = 0) -> np.ndarray:
        """
        Radius r(θ) oder seine Ableitungen nach θ.

        Args:
            theta: Winkel
            order: Ableitungsordnung 0, 1 oder 2
        """
        theta = np.asarray(theta, dtype=float)
        if self.kind == "circle":
            value = self.params[0] if order == 0 else 0.0
            return np.full_like(theta, value)
        if self.kind == "polar_star":
            r0, a, m = self.params
            if order == 0:
                return r0 + a * np.sin(m * theta)
            if order == 1:
                return a * m * np.cos(m * theta)
            return -a * m * m * np.sin(m * theta)

        coeffs = self.params
        result = np.full_like(theta, coeffs[0] if order == 0 else 0.0)
        for j in range(1, (len(coeffs) - 1) // 2 + 1):
            a_j, b_j = coeffs[2 * j - 1], coeffs[2 * j]
            c, s = np.cos(j * theta), np.sin(j * theta)
            if order == 0:
                result = result + a_j * c + b_j * s
            elif order == 1:
                result = result + j * (-a_j * s + b_j * c)
            else:
                result = result - j * j * (a_j * c + b_j * s)
        return result

    def point(self, t: ArrayLike) -> np.ndarray:
        """Kurvenpunkt p(t), Form (..., 2)."""
        theta = 2.0 * np.pi * np.asarray(t, dtype=float)
        r = self.radius(theta)
        return np.stack(
            [self.center[0] + r * np.cos(theta), self.center[1] + r * np.sin(theta)], axis=-1
        )

    def derivative(self, t: ArrayLike) -> np.ndarray:
        """Tangentenvektor dp/dt, Form (..., 2)."""
        theta = 2.0 * np.pi * np.asarray(t, dtype=float)
        r = self.radius(theta)
        dr = self.radius(theta, order=1)
        c, s = np.cos(theta), np.sin(theta)
        return 2.0 * np.pi * np.stack([dr * c - r * s, dr * s + r * c], axis=-1)

    def normal(self, t: ArrayLike) -> np.ndarray:
        """Einheitsnormale n1, aus Ω1 heraus zeigend."""
        d = self.derivative(t)
        n = np.stack([d[..., 1], -d[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def curvature(self, t: ArrayLike) -> np.ndarray:
        """Vorzeichenbehaftete Krümmung (positiv für konvexe Abschnitte)."""
        theta = 2.0 * np.pi * np.asarray(t, dtype=float)
        r = self.radius(theta)
        dr = self.radius(theta, order=1)
        ddr = self.radius(theta, order=2)
        return (r * r + 2.0 * dr * dr - r * ddr) / np.power(r * r + dr * dr, 1.5)

    def level(self, points: np.ndarray) -> np.ndarray:
        """
        Niveaufunktion ρ − r(θ): negativ in Ω1, positiv in Ω2, null auf Γ.

        Args:
            points: Punkte, Form (..., 2)
        """
        points = np.asarray(points, dtype=float)
        dx = points[..., 0] - self.center[0]
        dy = points[..., 1] - self.center[1]
        return np.hypot(dx, dy) - self.radius(np.arctan2(dy, dx))

    def classify(self, points: np.ndarray) -> np.ndarray:
        """Seitenzuordnung SIDE_1, SIDE_2 oder SIDE_ON je Punkt."""
        lvl = np.atleast_1d(self.level(points))
        sides = np.where(lvl < 0.0, SIDE_1, SIDE_2)
        sides[np.abs(lvl) <= self.tol_geom] = SIDE_ON
        return sides

    def parameter_of(self, points: np.ndarray) -> np.ndarray:
        """Parameter t des Strahls durch den Punkt (exakt für Punkte auf Γ)."""
        points = np.asarray(points, dtype=float)
        theta = np.arctan2(points[..., 1] - self.center[1], points[..., 0] - self.center[0])
        return np.mod(theta / (2.0 * np.pi), 1.0)

    def closest_parameter(self, point: np.ndarray, samples: int = 720) -> float:
        """
        Parameter des nächstgelegenen Kurvenpunkts.

        Grobe Abtastung über die ganze Kurve, danach Brent-Minimierung im
        Nachbarintervall.
        """
        point = np.asarray(point, dtype=float)
        grid = np.arange(samples) / samples
        dist2 = np.sum((self.point(grid) - point) ** 2, axis=-1)
        t0 = grid[int(np.argmin(dist2))]
        step = 1.0 / samples
        res = minimize_scalar(
            lambda t: float(np.sum((self.point(t) - point) ** 2)),
            bounds=(t0 - step, t0 + step),
            method="bounded",
            options={"xatol": 1e-14},
        )
        return float(np.mod(res.x, 1.0))

    def distance(self, point: np.ndarray) -> Tuple[float, float]:
        """Abstand zur Kurve und Parameter des Fußpunkts."""
        t = self.closest_parameter(point)
        return float(np.linalg.norm(self.point(t) - np.asarray(point, dtype=float))), t

    def arc_length(self, t_start: float, t_end: float, panels: int = 16, order: int = 24) -> float:
        """Bogenlänge zwischen zwei Parametern (zusammengesetzte Gauß-Quadratur)."""
        nodes, weights = np.polynomial.legendre.leggauss(order)
        bounds = np.linspace(t_start, t_end, panels + 1)
        total = 0.0
        for a, b in zip(bounds[:-1], bounds[1:]):
            t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            total += 0.5 * (b - a) * np.sum(weights * np.linalg.norm(self.derivative(t), axis=-1))
        return float(abs(total))

    def length(self) -> float:
        """Gesamtlänge der Kurve."""
        return self.arc_length(0.0, 1.0, panels=64)

    def min_radius(self, samples: int = 4096) -> float:
        return float(np.min(self.radius(2.0 * np.pi * np.arange(samples) / samples)))

    def max_radius(self, samples: int = 4096) -> float:
        return float(np.max(self.radius(2.0 * np.pi * np.arange(samples) / samples)))

    @property
    def is_simple(self) -> bool:
        """Einfach geschlossen genau dann, wenn r(θ) überall positiv ist."""
        return self.min_radius() > 10.0 * self.tol_geom

    def describe(self) -> str:
        params = ", ".join(f"{p:g}" for p in self.params)
        return f"{self.kind}({params}) um ({self.center[0]:g}, {self.center[1]:g})"
