"""
Testprobleme mit hergestellten Lösungen.

Die exakten Felder u_i, p_i werden symbolisch (sympy) angegeben; f, ∇u, φ,
ψ und g werden daraus abgeleitet und gegen zentrale Differenzenquotienten
geprüft.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import sympy as sp

from ..assembly.problem_data import ProblemData
from ..exceptions import DerivativeMismatch
from ..mesh.curve import SIDE_1, SIDE_2, InterfaceCurve
from ..mesh.mesh import DEFAULT_DOMAIN, Domain

logger = logging.getLogger(__name__)

X, Y = sp.symbols("x y", real=True)

FD_STEP = 1e-5
FD_TOL = 1e-6
FD_SAMPLES = 100

PROBLEM_IDS = (1, 2, 3)


@dataclass(frozen=True)
class ManufacturedProblem:
    """
    Hergestellte Lösung eines Stokes-Interface-Problems.

    Attributes:
        id: Problemnummer (0 für Patch-Probleme)
        name: Bezeichnung
        curve: Interface-Kurve (None ohne Interface)
        A: Koeffizientenmatrix je Teilgebiet
        u: Geschwindigkeitskomponenten je Teilgebiet (sympy)
        p: Druck je Teilgebiet (sympy)
        domain: Rechengebiet
    """
    id: int
    name: str
    curve: Optional[InterfaceCurve]
    A: Dict[int, Tuple[Tuple[float, float], Tuple[float, float]]]
    u: Dict[int, Tuple[sp.Expr, sp.Expr]]
    p: Dict[int, sp.Expr]
    domain: Domain = DEFAULT_DOMAIN

    def coefficient(self, side: int) -> np.ndarray:
        return np.array(self.A[side], dtype=float)


def _numeric(expr: sp.Expr) -> Callable[[np.ndarray], np.ndarray]:
    """Skalarer Ausdruck → Funktion auf Punktfeldern (N, 2) → (N,)."""
    func = sp.lambdify((X, Y), expr, modules="numpy")

    def evaluate(points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        value = np.asarray(func(pts[:, 0], pts[:, 1]), dtype=float)
        return np.broadcast_to(value, (len(pts),)).copy()
    return evaluate


def _stack(funcs) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(points: np.ndarray) -> np.ndarray:
        return np.stack([fn(points) for fn in funcs], axis=-1)
    return evaluate


def _tensor(funcs) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(points: np.ndarray) -> np.ndarray:
        rows = [np.stack([fn(points) for fn in row], axis=-1) for row in funcs]
        return np.stack(rows, axis=-2)
    return evaluate


def stress_flux(grad: np.ndarray, pressure: np.ndarray, A: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """(A∇u − pI)n je Punkt: Komponente r ist (A∇u_r)·n − p n_r."""
    return np.einsum("nrl,jl,nj->nr", grad, A, normals) - pressure[:, None] * normals


class _SideFields:
    """Symbolische Ableitungen eines Teilgebiets und ihre numerischen Formen."""

    def __init__(self, u: Tuple[sp.Expr, sp.Expr], p: sp.Expr, A: np.ndarray) -> None:
        self.u_expr = [sp.sympify(c) for c in u]
        self.p_expr = sp.sympify(p)
        A_sym = sp.Matrix(A.tolist())
        self.grad_expr = [[sp.diff(c, X), sp.diff(c, Y)] for c in self.u_expr]
        self.f_expr = []
        for i, c in enumerate(self.u_expr):
            grad = [sp.diff(c, X), sp.diff(c, Y)]
            flux = [A_sym[j, 0] * grad[0] + A_sym[j, 1] * grad[1] for j in range(2)]
            div = sp.diff(flux[0], X) + sp.diff(flux[1], Y)
            self.f_expr.append(sp.simplify(-div + sp.diff(self.p_expr, (X, Y)[i])))
        self.div_expr = sp.diff(self.u_expr[0], X) + sp.diff(self.u_expr[1], Y)

        self.u = _stack([_numeric(c) for c in self.u_expr])
        self.p = _numeric(self.p_expr)
        self.grad = _tensor([[_numeric(d) for d in row] for row in self.grad_expr])
        self.f = _stack([_numeric(c) for c in self.f_expr])
        self.div = _numeric(self.div_expr)


def _central(func: Callable[[np.ndarray], np.ndarray], points: np.ndarray, direction: int) -> np.ndarray:
    shift = np.zeros(2)
    shift[direction] = FD_STEP
    return (func(points + shift) - func(points - shift)) / (2.0 * FD_STEP)


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1.0))


def _check_side(problem_id: int, side: int, fields: _SideFields, A: np.ndarray, points: np.ndarray) -> None:
    grad_fd = np.stack([_central(fields.u, points, j) for j in range(2)], axis=-1)
    rel = _relative(fields.grad(points), grad_fd)
    if rel > FD_TOL:
        raise DerivativeMismatch(problem_id, f"∇u in Teilgebiet {side}", rel)

    # −Σ_jl A_jl ∂_j ∂_l u_i aus Differenzen des symbolischen Gradienten
    f_fd = np.zeros((len(points), 2))
    for j in range(2):
        d_grad = _central(fields.grad, points, j)
        f_fd -= np.einsum("l,nil->ni", A[j], d_grad)
    f_fd += np.stack([_central(fields.p, points, i) for i in range(2)], axis=-1)
    rel = _relative(fields.f(points), f_fd)
    if rel > FD_TOL:
        raise DerivativeMismatch(problem_id, f"f in Teilgebiet {side}", rel)

    div = fields.div(points)
    scale = max(float(np.max(np.abs(grad_fd))), 1.0)
    if np.max(np.abs(div)) > 1e-10 * scale:
        raise DerivativeMismatch(problem_id, f"∇·u in Teilgebiet {side}", float(np.max(np.abs(div)) / scale))


def derive_data(problem: ManufacturedProblem, check: bool = True, seed: int = 0) -> ProblemData:
    """
    Leitet f, g, φ und ψ aus den exakten Feldern ab.

    Args:
        problem: hergestelltes Problem
        check: Ableitungen gegen zentrale Differenzen prüfen
        seed: Startwert der Zufallspunkte

    Returns:
        ProblemData mit exakter Lösung

    Raises:
        DerivativeMismatch: symbolische und numerische Ableitung weichen ab
    """
    fields = {side: _SideFields(problem.u[side], problem.p[side], problem.coefficient(side))
              for side in (SIDE_1, SIDE_2)}

    if check:
        rng = np.random.default_rng(seed)
        x0, x1, y0, y1 = problem.domain
        points = np.column_stack([rng.uniform(x0, x1, FD_SAMPLES), rng.uniform(y0, y1, FD_SAMPLES)])
        for side, side_fields in fields.items():
            _check_side(problem.id, side, side_fields, problem.coefficient(side), points)
        logger.debug(f"{problem.name}: Ableitungen an {FD_SAMPLES} Punkten bestätigt")

    A1, A2 = problem.coefficient(SIDE_1), problem.coefficient(SIDE_2)
    side1, side2 = fields[SIDE_1], fields[SIDE_2]

    def phi(points: np.ndarray) -> np.ndarray:
        return side1.u(points) - side2.u(points)

    def psi(points: np.ndarray, normals: np.ndarray) -> np.ndarray:
        sigma1 = stress_flux(side1.grad(points), side1.p(points), A1, normals)
        sigma2 = stress_flux(side2.grad(points), side2.p(points), A2, normals)
        return sigma1 - sigma2

    return ProblemData(
        A={SIDE_1: A1, SIDE_2: A2},
        f={side: fields[side].f for side in fields},
        g=side2.u,
        phi=phi,
        psi=psi,
        u={side: fields[side].u for side in fields},
        grad_u={side: fields[side].grad for side in fields},
        p={side: fields[side].p for side in fields},
        name=problem.name,
    )


def _problem_1() -> ManufacturedProblem:
    pi = sp.pi
    u1 = (2 * sp.sin(Y) * sp.cos(Y) * sp.cos(X), (sp.sin(Y) ** 2 - 2) * sp.sin(X))
    u2 = (-sp.cos(pi * X) * sp.sin(pi * Y), sp.sin(pi * X) * sp.cos(pi * Y))
    return ManufacturedProblem(
        id=1,
        name="Testproblem 1",
        curve=InterfaceCurve.circle(0.5),
        A={SIDE_1: ((1.0, 0.0), (0.0, 1.0)), SIDE_2: ((1.0, 0.0), (0.0, 1.0))},
        u={SIDE_1: u1, SIDE_2: u2},
        p={SIDE_1: sp.Integer(1), SIDE_2: pi / (16 - pi)},
    )


def _problem_2_fields():
    pi = sp.pi
    u1 = (
        2 * pi * sp.sin(pi * X) ** 2 * sp.cos(pi * Y) * sp.sin(pi * Y),
        -2 * pi * sp.sin(pi * X) * sp.cos(pi * X) * sp.sin(pi * Y) ** 2,
    )
    u2 = (
        X ** 2 * Y ** 2 + sp.exp(-Y),
        -sp.Rational(2, 3) * X * Y ** 3 + 2 - pi * sp.sin(pi * X),
    )
    return u1, u2


def _problem_2() -> ManufacturedProblem:
    u1, u2 = _problem_2_fields()
    return ManufacturedProblem(
        id=2,
        name="Testproblem 2",
        curve=InterfaceCurve.polar_star(1.0 / 7.0, 1.0 / 7.0, 5),
        A={SIDE_1: ((1.0, 0.0), (0.0, 1.0)), SIDE_2: ((1.0, 0.0), (0.0, 1.0))},
        u={SIDE_1: u1, SIDE_2: u2},
        p={SIDE_1: sp.Integer(0), SIDE_2: sp.Integer(0)},
    )


def _problem_3() -> ManufacturedProblem:
    u1, u2 = _problem_2_fields()
    return ManufacturedProblem(
        id=3,
        name="Testproblem 3",
        curve=InterfaceCurve.polar_star(0.5, 0.25, 2),
        A={SIDE_1: ((1.0, 0.0), (0.0, 1.0)), SIDE_2: ((10.0, 0.0), (0.0, 10.0))},
        u={SIDE_1: u1, SIDE_2: u2},
        p={SIDE_1: sp.Integer(0), SIDE_2: sp.Integer(0)},
    )


_FACTORIES = {1: _problem_1, 2: _problem_2, 3: _problem_3}


def get_problem(problem_id: int) -> ManufacturedProblem:
    """Testproblem 1, 2 oder 3."""
    if problem_id not in _FACTORIES:
        raise ValueError(f"Unbekanntes Testproblem: {problem_id} (erlaubt: {PROBLEM_IDS})")
    return _FACTORIES[problem_id]()


_PATCH_FIELDS = {
    1: ((Y, X), sp.Integer(1)),
    2: ((X ** 2, -2 * X * Y), X),
    3: ((X ** 3 - 3 * X * Y ** 2, -3 * X ** 2 * Y + Y ** 3), X ** 2 - Y ** 2),
}


def patch_problem(k: int) -> ManufacturedProblem:
    """
    Polynomiales Stokes-Problem ohne Interface: u ∈ [P_k]² divergenzfrei, p ∈ P_{k−1}, A = I.
    """
    if k not in _PATCH_FIELDS:
        raise ValueError(f"Patch-Test nur für k = 1, 2, 3 definiert: {k}")
    u, p = _PATCH_FIELDS[k]
    identity = ((1.0, 0.0), (0.0, 1.0))
    return ManufacturedProblem(
        id=0,
        name=f"Patch-Test k={k}",
        curve=None,
        A={SIDE_1: identity, SIDE_2: identity},
        u={SIDE_1: u, SIDE_2: u},
        p={SIDE_1: p, SIDE_2: p},
    )


def zero_problem() -> ManufacturedProblem:
    identity = ((1.0, 0.0), (0.0, 1.0))
    zero = (sp.Integer(0), sp.Integer(0))
    return ManufacturedProblem(
        id=0,
        name="Nullproblem",
        curve=None,
        A={SIDE_1: identity, SIDE_2: identity},
        u={SIDE_1: zero, SIDE_2: zero},
        p={SIDE_1: sp.Integer(0), SIDE_2: sp.Integer(0)},
    )
