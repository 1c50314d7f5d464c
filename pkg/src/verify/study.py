"""
Konvergenzstudien.

Für jedes Level: Hintergrundgitter, Interface-Anpassung (optional
Sehnenapproximation), Assemblierung, Lösung und Fehlermessung.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import pandas as pd

from ..assembly.assembler import SaddlePointSystem, SystemAssembler
from ..assembly.constraints import ConstrainedSystem, apply_constraints
from ..assembly.problem_data import ProblemData
from ..exceptions import WGError
from ..mesh.fitting import fit_interface, polygonal_approximation
from ..mesh.mesh import InterfaceMesh, build_background_mesh
from ..solver.solver import SaddlePointSolver, WGSolution
from .errors import energy_error, l2_errors
from .problems import ManufacturedProblem, derive_data

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["n", "h", "energy_err", "energy_order", "l2u_err", "l2u_order", "l2p_err", "l2p_order"]


@dataclass
class ErrorRow:
    """Eine Zeile der Fehlertabelle."""
    n: int
    h: float
    energy_err: float
    l2u_err: float
    l2p_err: float
    l2p_raw: float
    dofs: int
    divergence_residual: float
    energy_order: Optional[float] = None
    l2u_order: Optional[float] = None
    l2p_order: Optional[float] = None


def observed_order(e_coarse: float, e_fine: float, h_coarse: float, h_fine: float) -> Optional[float]:
    """log(e_n/e_{n+1}) / log(h_n/h_{n+1}); None, wenn nicht definiert."""
    if e_coarse <= 0.0 or e_fine <= 0.0 or h_coarse <= h_fine:
        return None
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


@dataclass
class ErrorReport:
    """
    Fehlertabelle einer Studie.

    Attributes:
        problem_id, problem_name: Testproblem
        k: Polynomgrad
        mesh_kind: "tri" oder "quad"
        straight: Interface durch Sehnen approximiert
        rows: Zeilen in Levelreihenfolge
    """
    problem_id: int
    problem_name: str
    k: int
    mesh_kind: str
    straight: bool = False
    rows: List[ErrorRow] = field(default_factory=list)

    def compute_orders(self) -> None:
        for previous, row in zip(self.rows[:-1], self.rows[1:]):
            row.energy_order = observed_order(previous.energy_err, row.energy_err, previous.h, row.h)
            row.l2u_order = observed_order(previous.l2u_err, row.l2u_err, previous.h, row.h)
            row.l2p_order = observed_order(previous.l2p_err, row.l2p_err, previous.h, row.h)
        if self.rows:
            first = self.rows[0]
            first.energy_order = first.l2u_order = first.l2p_order = None

    def finest_orders(self) -> Tuple[Optional[float], Optional[float], Optional[float]]:
        if len(self.rows) < 2:
            return None, None, None
        last = self.rows[-1]
        return last.energy_order, last.l2u_order, last.l2p_order

    def to_frame(self, full: bool = False) -> pd.DataFrame:
        """Tabelle mit den CSV-Spalten (full=True: zusätzlich roher Druckfehler und DOFs)."""
        frame = pd.DataFrame([asdict(r) for r in self.rows])
        if frame.empty:
            frame = pd.DataFrame(columns=CSV_COLUMNS + ["l2p_raw", "dofs", "divergence_residual"])
        columns = CSV_COLUMNS + (["l2p_raw", "dofs", "divergence_residual"] if full else [])
        return frame[columns]

    @property
    def label(self) -> str:
        """Dateiname-Stamm, z. B. problem1_k2_tri_curved."""
        shape = "straight" if self.straight else "curved"
        return f"problem{self.problem_id}_k{self.k}_{self.mesh_kind}_{shape}"

    def format_table(self) -> str:
        """Lesbare Tabelle im Stil der Konvergenztabellen."""
        kind = "Dreiecksgitter" if self.mesh_kind == "tri" else "Vierecksgitter"
        shape = "gerades" if self.straight else "gekrümmtes"
        lines = [
            f"{self.problem_name}: {shape} {kind}, k={self.k}",
            f"{'n':>3} {'h':>11} {'|||e_h|||':>11} {'Ordnung':>8} {'‖e_0‖':>11} {'Ordnung':>8} "
            f"{'‖ε_h‖':>11} {'Ordnung':>8}",
        ]

        def order(value: Optional[float]) -> str:
            return f"{value:8.3f}" if value is not None else " " * 8

        for r in self.rows:
            lines.append(
                f"{r.n:>3} {r.h:11.4e} {r.energy_err:11.4e} {order(r.energy_order)} "
                f"{r.l2u_err:11.4e} {order(r.l2u_order)} {r.l2p_err:11.4e} {order(r.l2p_order)}"
            )
        return "\n".join(lines)


@dataclass
class PipelineResult:
    mesh: InterfaceMesh
    system: SaddlePointSystem
    constrained: ConstrainedSystem
    solution: WGSolution


def run_pipeline(
    mesh: InterfaceMesh,
    k: int,
    data: ProblemData,
    exactness: Optional[int] = None,
    workers: Optional[int] = None,
) -> PipelineResult:
    """Assemblieren, Nebenbedingungen einbinden und lösen."""
    system = SystemAssembler(k, exactness, workers).assemble(mesh, data)
    constrained = apply_constraints(system, mesh, data)
    solution = SaddlePointSolver().solve(constrained)
    return PipelineResult(mesh=mesh, system=system, constrained=constrained, solution=solution)


def build_problem_mesh(
    problem: ManufacturedProblem, level: int, kind: str = "tri", straight: bool = False
) -> InterfaceMesh:
    """Hintergrundgitter auf Level n, an Γ angepasst (bzw. Sehnenapproximation)."""
    mesh = build_background_mesh(problem.domain, level, kind)
    if problem.curve is None:
        return mesh
    fitted = fit_interface(mesh, problem.curve)
    return polygonal_approximation(fitted) if straight else fitted


class ConvergenceStudy:
    """
    Konvergenzstudie eines Testproblems.

    Zeile n = 1..levels verwendet das Hintergrundlevel start_level + n − 1;
    jedes Level halbiert h. Gehalten wird nur die Lösung des letzten Levels
    (last_solution); keep_solutions=True sammelt alle in solutions.
    """

    def __init__(
        self,
        problem: ManufacturedProblem,
        k: int,
        levels: int,
        kind: str = "tri",
        straight: bool = False,
        start_level: int = 0,
        exactness: Optional[int] = None,
        workers: Optional[int] = None,
        keep_solutions: bool = False,
    ) -> None:
        if k < 1:
            raise ValueError(f"Polynomgrad muss >= 1 sein: {k}")
        if levels < 1:
            raise ValueError(f"Anzahl Level muss >= 1 sein: {levels}")
        if start_level < 0:
            raise ValueError(f"Startlevel muss >= 0 sein: {start_level}")
        self.problem = problem
        self.k = k
        self.levels = levels
        self.kind = kind
        self.straight = straight
        self.start_level = start_level
        self.exactness = exactness
        self.workers = workers
        self.data = derive_data(problem)
        self.keep_solutions = keep_solutions
        self.solutions: List[WGSolution] = []
        self.last_solution: Optional[WGSolution] = None
        logger.info(
            f"Konvergenzstudie initialisiert: {problem.name}, k={k}, {levels} Level, "
            f"Gitter {kind}{' (Sehnen)' if straight else ''}"
        )

    def run_level(self, n: int) -> ErrorRow:
        level = self.start_level + n - 1
        mesh = build_problem_mesh(self.problem, level, self.kind, self.straight)
        result = run_pipeline(mesh, self.k, self.data, self.exactness, self.workers)
        solution = result.solution
        self.last_solution = solution
        if self.keep_solutions:
            self.solutions.append(solution)

        energy = energy_error(solution, self.data, mesh)
        l2 = l2_errors(solution, self.data, mesh)
        if abs(l2.pressure_mean) > 1e-8:
            logger.warning(
                f"{self.problem.name}: exakter Druck nicht mittelwertfrei (p̄={l2.pressure_mean:.6e}), "
                f"verwende verschobenen Druckfehler"
            )
        row = ErrorRow(
            n=n,
            h=mesh.h,
            energy_err=energy,
            l2u_err=l2.velocity,
            l2p_err=l2.pressure_shifted,
            l2p_raw=l2.pressure,
            dofs=result.constrained.matrix.shape[0],
            divergence_residual=solution.report["divergence_rel"],
        )
        logger.info(
            f"Level {n}: h={row.h:.4e}, |||e|||={energy:.4e}, ‖e0‖={l2.velocity:.4e}, "
            f"‖ε‖={l2.pressure_shifted:.4e}"
        )
        return row

    def run(self) -> ErrorReport:
        report = ErrorReport(
            problem_id=self.problem.id,
            problem_name=self.problem.name,
            k=self.k,
            mesh_kind=self.kind,
            straight=self.straight,
        )
        for n in range(1, self.levels + 1):
            try:
                report.rows.append(self.run_level(n))
            except WGError as e:
                raise e.with_level(self.start_level + n - 1)
        report.compute_orders()
        return report


def convergence_study(
    problem: ManufacturedProblem, k: int, levels: int, kind: str = "tri", **options
) -> ErrorReport:
    """Kurzform für ConvergenceStudy(problem, k, levels, kind, ...).run()."""
    return ConvergenceStudy(problem, k, levels, kind, **options).run()


def compare_curved_straight(
    problem: ManufacturedProblem, k: int, levels: int, kind: str = "tri", **options
) -> Tuple[ErrorReport, ErrorReport, Optional[float]]:
    """
    Studie auf gekrümmtem und auf Sehnengitter.

    Returns:
        (gekrümmt, gerade, Differenz der L²-Geschwindigkeitsordnung am feinsten Paar)
    """
    curved = ConvergenceStudy(problem, k, levels, kind, straight=False, **options).run()
    straight = ConvergenceStudy(problem, k, levels, kind, straight=True, **options).run()
    c_order, s_order = curved.finest_orders()[1], straight.finest_orders()[1]
    gap = None if c_order is None or s_order is None else c_order - s_order
    if gap is not None:
        logger.info(f"L²-Ordnung gekrümmt {c_order:.3f}, gerade {s_order:.3f}, Differenz {gap:.3f}")
    return curved, straight, gap
