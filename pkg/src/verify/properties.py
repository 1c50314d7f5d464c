"""
Eigenschaftsprüfungen der Diskretisierung.

Dieses Modul enthält:
- Kommutation ∇_w Q_h = ℚ_h ∇ und ∇_w· Q_h = 𝒬_h ∇· auf geraden Zellen
- Defekt der Kommutation auf gekrümmten Zellen gegen ⟨Q_b u − u, τ·n⟩_Γ
- Divergenzsatz je Zelle
- Fehlergleichung mit den Funktionalen ℓ_1 … ℓ_4
- Normeigenschaft von a_s auf V_h^0, Patch-Test und Inf-sup-Schätzung
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy import sparse
from scipy.linalg import cho_factor, cho_solve, eigh, null_space
from scipy.sparse.linalg import LinearOperator, eigsh, splu, spsolve

from ..assembly.assembler import Discretization, SystemAssembler
from ..assembly.constraints import ConstrainedSystem, apply_constraints
from ..assembly.problem_data import ProblemData, homogeneous_data
from ..exceptions import WGError
from ..mesh.mesh import InterfaceMesh, build_background_mesh
from ..solver.solver import SaddlePointSolver, WGSolution
from ..wg_core.basis import monomial_exponents
from ..wg_core.projection import project_pressure_Qh, project_Q0, project_Qb, project_tensor_Qh
from ..wg_core.spaces import CellSpace, WGFunction
from ..wg_core.weak_operators import weak_divergence, weak_gradient
from .errors import energy_error, l2_errors, project_exact_solution
from .problems import derive_data, get_problem, patch_problem
from .study import build_problem_mesh, run_pipeline

logger = logging.getLogger(__name__)

COMMUTATION_TOL = 1e-11
CURVED_DEFECT_TOL = 1e-10
DIVERGENCE_TOL = 1e-10
PATCH_TOL = 1e-9
CONSISTENCY_TOL = 1e-9
RESIDUAL_TOL = 1e-10
CONSISTENCY_EXACTNESS = 24
DENSE_LIMIT = 1500


@dataclass
class CheckResult:
    """Ergebnis einer Prüfung."""
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: {self.value:.3e} (Toleranz {self.tolerance:.1e})"
        return f"{text} {self.detail}" if self.detail else text


class RandomPolynomialField:
    """Zufälliges Vektorfeld in [P_m]² mit Gradient und Divergenz."""

    def __init__(self, degree: int, rng: np.random.Generator) -> None:
        self.exponents = np.array(monomial_exponents(degree), dtype=int)
        self.coeffs = rng.uniform(-1.0, 1.0, size=(2, len(self.exponents)))

    def _monomials(self, points: np.ndarray, da: int = 0, db: int = 0) -> np.ndarray:
        x, y = points[:, 0:1], points[:, 1:2]
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        factor = np.ones(len(a))
        for _ in range(da):
            factor = factor * a
            a = a - 1
        for _ in range(db):
            factor = factor * b
            b = b - 1
        values = x ** np.maximum(a, 0) * y ** np.maximum(b, 0)
        return np.where((a >= 0) & (b >= 0), factor * values, 0.0)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self._monomials(points) @ self.coeffs.T

    def gradient(self, points: np.ndarray) -> np.ndarray:
        dx = self._monomials(points, da=1) @ self.coeffs.T
        dy = self._monomials(points, db=1) @ self.coeffs.T
        return np.stack([dx, dy], axis=-1)

    def divergence(self, points: np.ndarray) -> np.ndarray:
        grad = self.gradient(points)
        return grad[:, 0, 0] + grad[:, 1, 1]


def project_cell_function(space: CellSpace, field: Callable[[np.ndarray], np.ndarray]) -> WGFunction:
    """Q_h u = {Q_0 u, Q_b u} auf einer Zelle."""
    return WGFunction(
        v0=project_Q0(field, space),
        vb=[project_Qb(field, ce.space) for ce in space.edges],
    )


def _edge_values(ce, coeffs: np.ndarray) -> np.ndarray:
    """Spur (2, dim) an den Kantenpunkten, Form (N, 2)."""
    return ce.space.values @ np.asarray(coeffs).T


def _tensor_at(psi: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Tensorkoeffizienten (2, 2, n1) an Punkten mit Basiswerten psi, Form (N, 2, 2)."""
    return np.einsum("nm,ijm->nij", psi, coeffs)


def commutation_check(disc: Discretization, samples: int = 100, seed: int = 0) -> CheckResult:
    """Maximaler Koeffizientendefekt auf geraden Zellen für zufällige u ∈ [P_{k+1}]²."""
    rng = np.random.default_rng(seed)
    straight = [s for s in disc.cell_spaces if not disc.mesh.cells[s.cell_id].curved]
    if not straight:
        return CheckResult("Kommutation (gerade Zellen)", True, 0.0, COMMUTATION_TOL, "keine geraden Zellen")
    worst = 0.0
    for _ in range(samples):
        space = straight[int(rng.integers(len(straight)))]
        field = RandomPolynomialField(disc.degree + 1, rng)
        wg = project_cell_function(space, field)
        grad_defect = weak_gradient(space, wg) - project_tensor_Qh(field.gradient, space)
        div_defect = weak_divergence(space, wg) - project_pressure_Qh(field.divergence, space)
        scale = max(1.0, float(np.abs(project_tensor_Qh(field.gradient, space)).max()))
        worst = max(worst, float(np.abs(grad_defect).max()) / scale, float(np.abs(div_defect).max()) / scale)
    return CheckResult("Kommutation (gerade Zellen)", worst < COMMUTATION_TOL, worst, COMMUTATION_TOL)


def curved_defect_check(disc: Discretization, samples: int = 20, tests: int = 5, seed: int = 0) -> CheckResult:
    """
    (∇_w Q_h u − ℚ_h ∇u, τ)_T gegen ⟨Q_b u − u, τ·n⟩_{∂T∩Γ} auf gekrümmten Zellen,
    analog für die Divergenz.
    """
    rng = np.random.default_rng(seed)
    curved = [s for s in disc.cell_spaces if disc.mesh.cells[s.cell_id].curved]
    if not curved:
        return CheckResult("Kommutationsdefekt (gekrümmte Zellen)", True, 0.0, CURVED_DEFECT_TOL, "keine gekrümmten Zellen")
    worst = 0.0
    for _ in range(samples):
        space = curved[int(rng.integers(len(curved)))]
        field = RandomPolynomialField(disc.degree + 1, rng)
        wg = project_cell_function(space, field)
        grad_defect = weak_gradient(space, wg) - project_tensor_Qh(field.gradient, space)
        div_defect = weak_divergence(space, wg) - project_pressure_Qh(field.divergence, space)
        for _ in range(tests):
            tau = rng.uniform(-1.0, 1.0, size=(2, 2, space.n1))
            tau_s = rng.uniform(-1.0, 1.0, size=space.n1)
            lhs = float(np.einsum("ijm,mn,ijn->", tau, space.mass_low, grad_defect))
            lhs_div = float(tau_s @ space.mass_low @ div_defect)
            rhs, rhs_div, scale = 0.0, 0.0, 0.0
            for index, ce in enumerate(space.edges):
                if not ce.space.is_interface:
                    continue
                w = ce.rule.weights
                diff = _edge_values(ce, wg.vb[index]) - field(ce.rule.points)
                tau_n = np.einsum("nij,nj->ni", _tensor_at(ce.psi, tau), ce.normals)
                rhs += float(np.sum(w[:, None] * diff * tau_n))
                rhs_div += float(np.sum(w[:, None] * diff * (ce.psi @ tau_s)[:, None] * ce.normals))
                scale += float(np.sum(w[:, None] * np.abs(field(ce.rule.points) * tau_n)))
            scale = max(scale, 1.0)
            worst = max(worst, abs(lhs - rhs) / scale, abs(lhs_div - rhs_div) / scale)
    return CheckResult("Kommutationsdefekt (gekrümmte Zellen)", worst < CURVED_DEFECT_TOL, worst, CURVED_DEFECT_TOL)


def _divergence_field(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([np.sin(x) + y ** 2, x * y + np.cos(y)])


def _divergence_of_field(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return np.cos(x) + x - np.sin(y)


def divergence_theorem_check(disc: Discretization) -> CheckResult:
    """∫_T ∇·F = ∮_∂T F·n auf jeder Zelle (Zell- und Kantenquadratur)."""
    worst = 0.0
    for space in disc.cell_spaces:
        volume = float(space.rule.integrate(_divergence_of_field(space.rule.points)))
        boundary, scale = 0.0, 0.0
        for ce in space.edges:
            flux = np.sum(_divergence_field(ce.rule.points) * ce.normals, axis=1)
            boundary += float(ce.rule.integrate(flux))
            scale += float(ce.rule.integrate(np.abs(flux)))
        worst = max(worst, abs(volume - boundary) / max(scale, space.rule.measure))
    return CheckResult("Divergenzsatz", worst < DIVERGENCE_TOL, worst, DIVERGENCE_TOL)


class ErrorFunctionals:
    """
    Auswertung der Konsistenzfunktionale für eine exakte Lösung (u, p).

    ℓ_1(u, v) = Σ_T ⟨v_0 − v_b, A∇u·n − Aℚ_h(∇u)·n⟩_∂T
    ℓ_2(p, v) = Σ_T ⟨v_0 − v_b, (p − 𝒬_h p) n⟩_∂T
    ℓ_3(u, v) = Σ_i Σ_{e⊂Γ} ⟨Q_b u_i − u_i, A_i ∇_w v_i · n_i⟩_e
    ℓ_4(u, q) = Σ_i Σ_{e⊂Γ} ⟨Q_b u_i − u_i, q_i n_i⟩_e
    """

    def __init__(self, disc: Discretization, data: ProblemData) -> None:
        self.disc = disc
        self.data = data
        self.grad_projection = [project_tensor_Qh(data.grad_u[s.subdomain], s) for s in disc.cell_spaces]
        self.pressure_projection = [project_pressure_Qh(data.p[s.subdomain], s) for s in disc.cell_spaces]
        self.trace_projection = [
            [project_Qb(data.u[s.subdomain], ce.space) for ce in s.edges] for s in disc.cell_spaces
        ]

    def _cell_function(self, v: np.ndarray, cell_id: int) -> WGFunction:
        dofmap = self.disc.dofmap
        return WGFunction.from_local(self.disc.cell_spaces[cell_id], v[dofmap.local_dofs(cell_id)])

    def l1_l2(self, v: np.ndarray):
        l1, l2 = 0.0, 0.0
        for space in self.disc.cell_spaces:
            wg = self._cell_function(v, space.cell_id)
            side = space.subdomain
            A = self.data.coefficient(side)
            for index, ce in enumerate(space.edges):
                pts, w, n = ce.rule.points, ce.rule.weights, ce.normals
                jump = ce.phi @ wg.v0.T - _edge_values(ce, wg.vb[index])
                grad_diff = self.data.grad_u[side](pts) - _tensor_at(ce.psi, self.grad_projection[space.cell_id])
                flux = np.einsum("nrl,jl,nj->nr", grad_diff, A, n)
                l1 += float(np.sum(w[:, None] * jump * flux))
                p_diff = self.data.p[side](pts) - ce.psi @ self.pressure_projection[space.cell_id]
                l2 += float(np.sum(w[:, None] * jump * p_diff[:, None] * n))
        return l1, l2

    def _interface_terms(self, space: CellSpace):
        for index, ce in enumerate(space.edges):
            if ce.space.is_interface:
                side = space.subdomain
                diff = _edge_values(ce, self.trace_projection[space.cell_id][index]) - self.data.u[side](ce.rule.points)
                yield ce, diff

    def l3(self, v: np.ndarray) -> float:
        total = 0.0
        for space in self.disc.cell_spaces:
            wg = None
            A = self.data.coefficient(space.subdomain)
            for ce, diff in self._interface_terms(space):
                if wg is None:
                    wg = self._cell_function(v, space.cell_id)
                    grad_w = weak_gradient(space, wg)
                flux = np.einsum("nrl,jl,nj->nr", _tensor_at(ce.psi, grad_w), A, ce.normals)
                total += float(np.sum(ce.rule.weights[:, None] * diff * flux))
        return total

    def l4(self, q: np.ndarray) -> float:
        total = 0.0
        dofmap = self.disc.dofmap
        for space in self.disc.cell_spaces:
            qc = q[dofmap.pressure_dofs(space.cell_id)]
            for ce, diff in self._interface_terms(space):
                values = ce.psi @ qc
                total += float(np.sum(ce.rule.weights[:, None] * diff * values[:, None] * ce.normals))
        return total


def error_equation_check(
    solution: WGSolution, data: ProblemData, tests: int = 3, seed: int = 0
) -> CheckResult:
    """
    a_s(e_h, v) + b(v, ε_h) = ℓ_1 − ℓ_2 + ℓ_3 + s(Q_h u, v) für zufällige v ∈ V_h^0
    und b(e_h, q) = −ℓ_4(u, q) für zufällige mittelwertfreie q.
    """
    rng = np.random.default_rng(seed)
    constrained = solution.constrained
    system = constrained.system
    disc = system.discretization
    exact_u, exact_p = project_exact_solution(disc, data)
    e_h = exact_u - solution.u
    eps_h = exact_p - solution.p
    functionals = ErrorFunctionals(disc, data)
    A_s = system.A_s

    worst = 0.0
    for _ in range(tests):
        v = constrained.T @ rng.uniform(-1.0, 1.0, constrained.n_free)
        lhs_a = float(v @ (A_s @ e_h))
        lhs_b = float(eps_h @ (system.B @ v))
        l1, l2 = functionals.l1_l2(v)
        l3 = functionals.l3(v)
        stab = float(v @ (system.S @ exact_u))
        lhs, rhs = lhs_a + lhs_b, l1 - l2 + l3 + stab
        scale = max(abs(lhs_a) + abs(lhs_b) + abs(l1) + abs(l2) + abs(l3) + abs(stab), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)

        q = rng.uniform(-1.0, 1.0, constrained.n_pressure)
        if constrained.has_gauge:
            q -= constrained.gauge * (constrained.gauge @ q) / (constrained.gauge @ constrained.gauge)
        b_err = float(q @ (system.B @ e_h))
        l4 = functionals.l4(q)
        scale = max(abs(b_err) + abs(l4), 1e-300)
        worst = max(worst, abs(b_err + l4) / scale)
        logger.debug(f"Fehlergleichung: lhs={lhs:.6e}, rhs={rhs:.6e}, b={b_err:.6e}, ℓ4={l4:.6e}")
    return CheckResult("Fehlergleichung", worst < CONSISTENCY_TOL, worst, CONSISTENCY_TOL)


def min_ritz_value(constrained: ConstrainedSystem) -> float:
    """Kleinster Eigenwert des gebundenen A_s (relativ zur Matrixnorm)."""
    A = constrained.A
    norm = float(abs(A).sum(axis=1).max())
    if A.shape[0] <= DENSE_LIMIT:
        value = float(eigh(A.toarray(), eigvals_only=True, subset_by_index=[0, 0])[0])
    else:
        value = float(eigsh(A.tocsc(), k=1, sigma=0.0, which="LM", return_eigenvectors=False)[0])
    return value / norm


def norm_positivity_check(constrained: ConstrainedSystem) -> CheckResult:
    value = min_ritz_value(constrained)
    return CheckResult("Normeigenschaft (min. Ritz-Wert)", value > 0.0, value, 0.0)


def divergence_residual_check(solution: WGSolution) -> CheckResult:
    value = solution.report["divergence_rel"]
    return CheckResult("Divergenzresiduum", value < RESIDUAL_TOL, value, RESIDUAL_TOL)


@dataclass
class PatchResult:
    k: int
    energy: float
    l2u: float
    l2p: float

    @property
    def passed(self) -> bool:
        return max(self.energy, self.l2u, self.l2p) < PATCH_TOL


def patch_test(k: int, level: int = 0, kind: str = "tri", workers: Optional[int] = None) -> PatchResult:
    """Löst das polynomiale Patch-Problem auf einem geraden Gitter ohne Interface."""
    problem = patch_problem(k)
    data = derive_data(problem)
    mesh = build_background_mesh(problem.domain, level, kind)
    result = run_pipeline(mesh, k, data, workers=workers)
    l2 = l2_errors(result.solution, data, mesh)
    outcome = PatchResult(k=k, energy=energy_error(result.solution, data, mesh), l2u=l2.velocity,
                          l2p=l2.pressure_shifted)
    logger.info(
        f"Patch-Test k={k}: |||e|||={outcome.energy:.2e}, ‖e0‖={outcome.l2u:.2e}, ‖ε‖={outcome.l2p:.2e}"
    )
    return outcome


def _pressure_mass(constrained: ConstrainedSystem) -> sparse.csr_matrix:
    disc = constrained.system.discretization
    return sparse.block_diag([s.mass_low for s in disc.cell_spaces], format="csr")


def infsup_probe(constrained: ConstrainedSystem) -> float:
    """
    Diskrete Inf-sup-Konstante β_h.

    β_h² ist der kleinste Eigenwert von B̄ Ā⁻¹ B̄ᵀ q = λ M_p q auf dem Raum der
    mittelwertfreien Drücke (gᵀq = 0); ohne Eichung auf dem vollen Druckraum.
    """
    A, B = constrained.A, constrained.B
    Mp = _pressure_mass(constrained)
    n_p = B.shape[0]

    if n_p <= DENSE_LIMIT:
        factor = cho_factor(A.toarray())
        Bd = B.toarray()
        S = Bd @ cho_solve(factor, Bd.T)
        S = 0.5 * (S + S.T)
        if constrained.has_gauge:
            Z = null_space(constrained.gauge.reshape(1, -1))
            S, M = Z.T @ S @ Z, Z.T @ Mp.toarray() @ Z
        else:
            M = Mp.toarray()
        value = float(eigh(S, M, eigvals_only=True, subset_by_index=[0, 0])[0])
        return float(np.sqrt(max(value, 0.0)))

    # M_p = L Lᵀ blockweise; C = L⁻¹ S L⁻ᵀ, Konstante per Rang-1-Verschiebung abgetrennt
    disc = constrained.system.discretization
    L_inv = sparse.block_diag(
        [np.linalg.inv(np.linalg.cholesky(s.mass_low)) for s in disc.cell_spaces], format="csr"
    )
    lu = splu(A.tocsc())

    def apply_s(x: np.ndarray) -> np.ndarray:
        return L_inv @ (B @ lu.solve(B.T @ (L_inv.T @ x)))

    shift = np.zeros(n_p)
    kernel = np.zeros(n_p)
    if constrained.has_gauge:
        c1 = np.zeros(n_p)
        c1[::disc.dofmap.n1] = 1.0
        kernel = spsolve(L_inv.T.tocsc(), c1)
        kernel /= np.linalg.norm(kernel)
        shift = kernel
    trial = apply_s(np.ones(n_p) / np.sqrt(n_p))
    alpha = 2.0 * max(float(np.linalg.norm(trial)), 1.0)

    def matvec(x: np.ndarray) -> np.ndarray:
        return apply_s(x) + alpha * shift * (shift @ x)

    operator = LinearOperator((n_p, n_p), matvec=matvec, dtype=float)
    value = float(eigsh(operator, k=1, which="SA", tol=1e-8, return_eigenvectors=False)[0])
    return float(np.sqrt(max(value, 0.0)))


def infsup_study(problem_id: int, k: int, levels: int, kind: str = "tri",
                 start_level: int = 0, workers: Optional[int] = None) -> List[float]:
    """β_h auf aufeinanderfolgenden Gittern eines Testproblems."""
    problem = get_problem(problem_id)
    data = homogeneous_data()
    values = []
    for n in range(levels):
        level = start_level + n
        try:
            mesh = build_problem_mesh(problem, level, kind)
            system = SystemAssembler(k, workers=workers).assemble(mesh, data)
            beta = infsup_probe(apply_constraints(system, mesh, data))
        except WGError as e:
            raise e.with_level(level)
        logger.info(f"Inf-sup Level {level}: β_h={beta:.4e}")
        values.append(beta)
    return values


class PropertySuite:
    """
    Führt alle Eigenschaftsprüfungen auf kleinen Testgittern aus.

    Attributes:
        k: Polynomgrad
        seed: Startwert der Zufallszahlen
        level: Hintergrundlevel der Testgitter
    """

    def __init__(self, k: int = 1, seed: int = 0, level: int = 1, workers: Optional[int] = None,
                 exactness: Optional[int] = None) -> None:
        self.k = k
        self.seed = seed
        self.level = level
        self.workers = workers
        self.exactness = exactness if exactness is not None else CONSISTENCY_EXACTNESS
        logger.info(f"PropertySuite initialisiert (k={k}, Seed {seed})")

    def _meshes(self) -> List[InterfaceMesh]:
        problem = get_problem(1)
        return [build_problem_mesh(problem, self.level, kind) for kind in ("tri", "quad")]

    def run(self) -> List[CheckResult]:
        results: List[CheckResult] = []
        problem = get_problem(1)
        data = derive_data(problem, seed=self.seed)
        for mesh in self._meshes():
            disc = Discretization(mesh, self.k, self.exactness, self.workers)
            tag = f"[{mesh.kind}]"
            for check in (
                commutation_check(disc, seed=self.seed),
                curved_defect_check(disc, seed=self.seed),
                divergence_theorem_check(disc),
            ):
                check.name = f"{check.name} {tag}"
                results.append(check)

            system = SystemAssembler(self.k, self.exactness, self.workers).assemble(mesh, data, disc)
            constrained = apply_constraints(system, mesh, data)
            solution = SaddlePointSolver().solve(constrained)
            for check in (
                norm_positivity_check(constrained),
                divergence_residual_check(solution),
                error_equation_check(solution, data, seed=self.seed),
            ):
                check.name = f"{check.name} {tag}"
                results.append(check)

        for k in (1, 2, 3):
            patch = patch_test(k, level=0, workers=self.workers)
            value = max(patch.energy, patch.l2u, patch.l2p)
            results.append(CheckResult(f"Patch-Test k={k}", patch.passed, value, PATCH_TOL))

        failed = [r for r in results if not r.passed]
        logger.info(f"PropertySuite: {len(results) - len(failed)}/{len(results)} Prüfungen bestanden")
        return results
