"""
Kommandozeile des WG-Stokes-Interface-Lösers.

Befehle:
    study      Konvergenzstudie eines Testproblems (CSV + Tabelle)
    patch      Patch-Tests mit polynomialen Lösungen
    infsup     Diskrete Inf-sup-Konstante auf einer Gitterfolge
    mesh-dump  Angepasstes Gitter als WGMESH-Datei schreiben
    check      Alle Eigenschaftsprüfungen (PASS/FAIL je Zeile)

Exit-Codes: 0 Erfolg, 1 numerischer Fehler oder fehlgeschlagene Prüfung,
2 Konfigurationsfehler.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .assembly.assembler import SystemAssembler
from .assembly.constraints import apply_constraints
from .exceptions import WGError
from .export.exporter import EXPORT_FORMATS, Exporter
from .mesh.mesh_io import save_mesh
from .mesh.statistics import mesh_statistics
from .refmap.quadrature import QuadratureCache
from .verify.problems import PROBLEM_IDS, derive_data, get_problem
from .verify.properties import PropertySuite, infsup_study, patch_test
from .verify.study import ConvergenceStudy, build_problem_mesh

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

COMMANDS = ("study", "patch", "infsup", "mesh-dump", "check")
MESH_KINDS = ("tri", "quad")
DEGREES = (1, 2, 3)
DEFAULT_K = 1
DEFAULT_OUTPUT = "results"

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """
    Konfiguration eines CLI-Aufrufs.

    Attributes:
        command: einer von COMMANDS
        problem: Testproblem 1, 2 oder 3
        k: Polynomgrad (None: Befehlsstandard)
        levels: Anzahl Verfeinerungslevel
        mesh: "tri" oder "quad"
        output: Ausgabedatei oder -verzeichnis
        exactness: Quadraturexaktheit (None: 2k+2)
        seed: Startwert der Zufallsprüfungen
        straight: Interface durch Sehnen approximieren
        start_level: Hintergrundlevel der ersten Zeile
        formats: Exportformate der Studie (CSV immer)
        verbose: DEBUG-Logging
        matrix: optionaler Pfad für den Matrix-Dump (mesh-dump)
        quadrature: optionaler Pfad für den Quadratur-Dump (mesh-dump)
    """
    command: str
    problem: int = 1
    k: Optional[int] = None
    levels: int = 4
    mesh: str = "tri"
    output: Optional[str] = None
    exactness: Optional[int] = None
    seed: int = 0
    straight: bool = False
    start_level: int = 1
    formats: Tuple[str, ...] = ("csv",)
    verbose: bool = False
    matrix: Optional[str] = None
    quadrature: Optional[str] = None
    workers: Optional[int] = None

    @property
    def degree(self) -> int:
        return self.k if self.k is not None else DEFAULT_K

    def validate(self) -> None:
        """Prüft die Konfiguration; ValueError bei ungültigen Werten."""
        if self.command not in COMMANDS:
            raise ValueError(f"Unbekannter Befehl: {self.command}")
        if self.problem not in PROBLEM_IDS:
            raise ValueError(f"Unbekanntes Testproblem: {self.problem} (erlaubt: {PROBLEM_IDS})")
        if self.k is not None and self.k not in DEGREES:
            raise ValueError(f"Polynomgrad muss in {DEGREES} liegen: {self.k}")
        if self.levels < 1:
            raise ValueError(f"Anzahl Level muss >= 1 sein: {self.levels}")
        if self.mesh not in MESH_KINDS:
            raise ValueError(f"Unbekannter Gittertyp: {self.mesh}")
        if self.start_level < 0:
            raise ValueError(f"Startlevel muss >= 0 sein: {self.start_level}")
        if self.exactness is not None and self.exactness < 2 * self.degree:
            raise ValueError(
                f"Quadraturexaktheit {self.exactness} zu klein für k={self.degree} (mindestens {2 * self.degree})"
            )
        unknown = set(self.formats) - set(EXPORT_FORMATS)
        if unknown:
            raise ValueError(f"Unbekannte Exportformate: {sorted(unknown)}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wg-stokes",
        description="Weak-Galerkin-Löser für Stokes-Interface-Probleme auf gekrümmten Gittern"
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Ausführliche Ausgabe (DEBUG)"
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", type=int, default=1, choices=PROBLEM_IDS,
                        help="Testproblem (Standard: 1)")
    common.add_argument("--k", type=int, choices=DEGREES, help="Polynomgrad")
    common.add_argument("--levels", type=int, default=4, help="Anzahl Level (Standard: 4)")
    common.add_argument("--mesh", choices=MESH_KINDS, default="tri", help="Gittertyp (Standard: tri)")
    common.add_argument("--output", help="Ausgabedatei oder -verzeichnis")
    common.add_argument("--exactness", type=int, help="Quadraturexaktheit (Standard: 2k+2)")
    common.add_argument("--seed", type=int, default=0, help="Startwert der Zufallsprüfungen")
    common.add_argument("--straight", action="store_true", help="Interface durch Sehnen approximieren")
    common.add_argument("--start-level", type=int, default=1, help="Hintergrundlevel der ersten Zeile")
    common.add_argument(
        "--format",
        choices=["csv", "excel", "json", "all"],
        default="csv",
        help="Ausgabeformat der Studie (Standard: csv)"
    )
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="Ausführliche Ausgabe (DEBUG)")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("study", parents=[common], help="Konvergenzstudie")
    sub.add_parser("patch", parents=[common], help="Patch-Tests (k = 1..3 oder --k)")
    sub.add_parser("infsup", parents=[common], help="Diskrete Inf-sup-Konstante")
    dump = sub.add_parser("mesh-dump", parents=[common], help="Gitter als WGMESH-Datei schreiben")
    dump.add_argument("--matrix", help="Systemmatrix zusätzlich im Koordinatenformat schreiben")
    dump.add_argument("--quadrature", help="Zellquadraturpunkte zusätzlich als CSV schreiben")
    sub.add_parser("check", parents=[common], help="Eigenschaftsprüfungen")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    formats = EXPORT_FORMATS if args.format == "all" else tuple(dict.fromkeys(("csv", args.format)))
    return RunConfig(
        command=args.command,
        problem=args.problem,
        k=args.k,
        levels=args.levels,
        mesh=args.mesh,
        output=args.output,
        exactness=args.exactness,
        seed=args.seed,
        straight=args.straight,
        start_level=args.start_level,
        formats=formats,
        verbose=args.verbose,
        matrix=getattr(args, "matrix", None),
        quadrature=getattr(args, "quadrature", None),
    )


def _run_study(config: RunConfig) -> int:
    problem = get_problem(config.problem)
    study = ConvergenceStudy(
        problem,
        config.degree,
        config.levels,
        kind=config.mesh,
        straight=config.straight,
        start_level=config.start_level,
        exactness=config.exactness,
        workers=config.workers,
    )
    report = study.run()
    print(report.format_table())

    output = Path(config.output or DEFAULT_OUTPUT)
    exporter = Exporter(project_name=problem.name)
    if output.suffix.lower() == ".csv":
        paths = {"csv": exporter.export_to_csv(report, output)}
        for fmt in config.formats:
            if fmt == "excel":
                paths["excel"] = exporter.export_to_excel(report, output.with_suffix(".xlsx"))
            elif fmt == "json":
                paths["json"] = exporter.export_to_json(report, output.with_suffix(".json"))
    else:
        paths = exporter.export_all(report, output, config.formats)
    for fmt, path in paths.items():
        print(f"Exportiert ({fmt}): {path}")
    return 0


def _run_patch(config: RunConfig) -> int:
    degrees = [config.k] if config.k is not None else list(DEGREES)
    failed = 0
    for k in degrees:
        result = patch_test(k, level=config.start_level, kind=config.mesh, workers=config.workers)
        status = "PASS" if result.passed else "FAIL"
        print(
            f"{status} Patch-Test k={k}: |||e_h|||={result.energy:.3e}, "
            f"‖e_0‖={result.l2u:.3e}, ‖ε_h‖={result.l2p:.3e}"
        )
        failed += 0 if result.passed else 1
    return 1 if failed else 0


def _run_infsup(config: RunConfig) -> int:
    values = infsup_study(
        config.problem, config.degree, config.levels, config.mesh, config.start_level, config.workers
    )
    print(f"{'Level':>5} {'β_h':>11} {'Verhältnis':>10}")
    previous: Optional[float] = None
    for n, beta in enumerate(values):
        ratio = f"{beta / previous:10.4f}" if previous else " " * 10
        print(f"{config.start_level + n:>5} {beta:11.4e} {ratio}")
        previous = beta
    return 0


def _run_mesh_dump(config: RunConfig) -> int:
    problem = get_problem(config.problem)
    mesh = build_problem_mesh(problem, config.start_level, config.mesh, config.straight)
    default = f"problem{problem.id}_level{config.start_level}_{config.mesh}.wgmesh"
    path = save_mesh(mesh, config.output or default)
    stats = mesh_statistics(mesh)
    print(
        f"Gitter geschrieben: {path} ({stats.num_cells} Zellen, {stats.num_curved} gekrümmt, h={stats.h:.4e})"
    )
    if not stats.passed:
        logger.warning(f"Regularitätsschranken verletzt in Zellen {list(stats.offending_cells)}")

    exporter = Exporter(project_name=problem.name)
    if config.matrix:
        data = derive_data(problem)
        system = SystemAssembler(config.degree, config.exactness, config.workers).assemble(mesh, data)
        constrained = apply_constraints(system, mesh, data)
        print(f"Matrix geschrieben: {exporter.export_matrix(constrained.matrix, config.matrix)}")
    if config.quadrature:
        exactness = config.exactness if config.exactness is not None else 2 * config.degree + 2
        cache = QuadratureCache(mesh)
        rules = [cache.cell_rule(cell.id, exactness) for cell in mesh.cells]
        print(f"Quadratur geschrieben: {exporter.export_quadrature(rules, config.quadrature)}")
    return 0


def _run_check(config: RunConfig) -> int:
    suite = PropertySuite(
        k=config.k if config.k is not None else 1,
        seed=config.seed,
        level=config.start_level,
        workers=config.workers,
        exactness=config.exactness,
    )
    results = suite.run()
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} Prüfungen bestanden")
    return 1 if failed else 0


_HANDLERS = {
    "study": _run_study,
    "patch": _run_patch,
    "infsup": _run_infsup,
    "mesh-dump": _run_mesh_dump,
    "check": _run_check,
}


def run(config: RunConfig) -> int:
    """
    Führt einen Befehl aus.

    Returns:
        0 bei Erfolg, 1 bei numerischem Fehler oder fehlgeschlagener Prüfung,
        2 bei ungültiger Konfiguration
    """
    try:
        config.validate()
        logger.info(f"Starte '{config.command}' (Problem {config.problem}, Gitter {config.mesh})")
        return _HANDLERS[config.command](config)
    except ValueError as e:
        logger.error(f"Ungültige Konfiguration: {e}")
        print(f"Fehler: {e}", file=sys.stderr)
        return 2
    except WGError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Hauptfunktion für Kommandozeilenbetrieb."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=LOG_FORMAT,
        force=True,
    )
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
