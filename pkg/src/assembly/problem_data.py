"""
ProblemData - Daten eines Stokes-Interface-Problems.

Alle Felder sind Callables auf Punktfeldern (N, 2):
- f[side], u[side]: (N, 2)
- grad_u[side]: (N, 2, 2) mit G[:, i, j] = ∂_j u_i
- p[side]: (N,)
- g: Randgeschwindigkeit (N, 2)
- phi: Geschwindigkeitssprung u_1 − u_2 auf Γ, (N, 2)
- psi(points, normals): Spannungssprung bei gegebener Normale n_1 (aus Ω1 heraus), (N, 2)
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional

import numpy as np

from ..mesh.curve import SIDE_1, SIDE_2

logger = logging.getLogger(__name__)

Field = Callable[[np.ndarray], np.ndarray]
NormalField = Callable[[np.ndarray, np.ndarray], np.ndarray]


def zero_vector(points: np.ndarray) -> np.ndarray:
    return np.zeros((len(points), 2))


def zero_scalar(points: np.ndarray) -> np.ndarray:
    return np.zeros(len(points))


def zero_flux(points: np.ndarray, normals: np.ndarray) -> np.ndarray:
    return np.zeros((len(points), 2))


def _scaled(func: Optional[Callable], factor: float) -> Optional[Callable]:
    if func is None:
        return None

    def wrapped(*args):
        return factor * np.asarray(func(*args))
    return wrapped


@dataclass
class ProblemData:
    """
    Koeffizienten, Lasten und (optional) exakte Lösung.

    Attributes:
        A: konstante SPD-Matrix je Teilgebiet
        f: Volumenkraft je Teilgebiet
        g: Randwerte der Geschwindigkeit
        phi: Sprung u_1 − u_2 auf Γ
        psi: Sprung der Normalspannung auf Γ
        u, grad_u, p: exakte Lösung je Teilgebiet (für Fehlermessungen)
        name: Bezeichnung für Logs und Berichte
    """
    A: Dict[int, np.ndarray]
    f: Dict[int, Field]
    g: Field = zero_vector
    phi: Field = zero_vector
    psi: NormalField = zero_flux
    u: Optional[Dict[int, Field]] = None
    grad_u: Optional[Dict[int, Field]] = None
    p: Optional[Dict[int, Field]] = None
    name: str = "problem"
    bounds: Dict[int, tuple] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.A = {side: np.asarray(a, dtype=float).reshape(2, 2) for side, a in self.A.items()}
        for side in (SIDE_1, SIDE_2):
            if side not in self.A:
                raise ValueError(f"Koeffizient A für Teilgebiet {side} fehlt")
            if side not in self.f:
                raise ValueError(f"Volumenkraft f für Teilgebiet {side} fehlt")

    @property
    def has_exact(self) -> bool:
        return self.u is not None and self.p is not None

    def coefficient(self, side: int) -> np.ndarray:
        return self.A[side]

    def check(self, samples: int = 100, seed: int = 0) -> Dict[int, tuple]:
        """
        Prüft A_i auf Symmetrie und Elliptizität an zufälligen Richtungen.

        Returns:
            (k1, k2) je Teilgebiet mit k1·|α|² <= αᵀAα <= k2·|α|²

        Raises:
            ValueError: wenn A_i nicht symmetrisch positiv definit ist
        """
        rng = np.random.default_rng(seed)
        for side, a in self.A.items():
            if not np.allclose(a, a.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(a).max())):
                raise ValueError(f"A in Teilgebiet {side} ist nicht symmetrisch")
            alpha = rng.standard_normal((samples, 2))
            ratios = np.einsum("ni,ij,nj->n", alpha, a, alpha) / np.sum(alpha ** 2, axis=1)
            eig = np.linalg.eigvalsh(a)
            if eig[0] <= 0.0 or ratios.min() <= 0.0:
                raise ValueError(f"A in Teilgebiet {side} ist nicht positiv definit (λ_min={eig[0]:.3e})")
            self.bounds[side] = (float(eig[0]), float(eig[1]))
        logger.debug(f"{self.name}: Elliptizitätsschranken {self.bounds}")
        return dict(self.bounds)

    def scaled(self, factor: float) -> "ProblemData":
        """Daten f, g, φ, ψ (und exakte Lösung) mit einem Faktor skaliert."""
        def scale_dict(fields):
            return None if fields is None else {s: _scaled(fn, factor) for s, fn in fields.items()}

        return replace(
            self,
            f=scale_dict(self.f),
            g=_scaled(self.g, factor),
            phi=_scaled(self.phi, factor),
            psi=_scaled(self.psi, factor),
            u=scale_dict(self.u),
            grad_u=scale_dict(self.grad_u),
            p=scale_dict(self.p),
            name=f"{self.name}×{factor:g}",
            bounds={},
        )


def homogeneous_data(A1=np.eye(2), A2=np.eye(2)) -> ProblemData:
    """Problem mit verschwindenden Lasten und Sprüngen."""
    return ProblemData(
        A={SIDE_1: A1, SIDE_2: A2},
        f={SIDE_1: zero_vector, SIDE_2: zero_vector},
        u={SIDE_1: zero_vector, SIDE_2: zero_vector},
        grad_u={SIDE_1: lambda x: np.zeros((len(x), 2, 2)), SIDE_2: lambda x: np.zeros((len(x), 2, 2))},
        p={SIDE_1: zero_scalar, SIDE_2: zero_scalar},
        name="homogen",
    )
