"""
Fehlerklassen des WG-Stokes-Lösers.

Jede Klasse trägt den Kontext (Zellen-ID, Kanten-ID, Punkt, Level) als
Attribut, damit die Kommandozeile und die Konvergenzstudie ihn weiterreichen
können.
"""

from typing import Any, Optional, Sequence


class WGError(Exception):
    """Basisklasse aller numerischen Fehler."""

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = dict(context)
        self.level: Optional[int] = context.get("level")

    def with_level(self, level: int) -> "WGError":
        """Hängt das Verfeinerungslevel an die Meldung an."""
        self.level = level
        self.context["level"] = level
        if f"(Level {level})" not in self.message:
            self.message = f"{self.message} (Level {level})"
            self.args = (self.message,)
        return self

    def with_hint(self, hint: str) -> "WGError":
        """Hängt einen Lösungshinweis an die Meldung an."""
        if hint not in self.message:
            self.message = f"{self.message}; {hint}"
            self.args = (self.message,)
        return self

    def __str__(self) -> str:
        return self.message


class MeshError(WGError):
    """Fehler beim Anpassen des Gitters an das Interface."""


class CellCutTwice(MeshError):
    """Ein Zellrand schneidet das Interface mehr als zweimal."""

    def __init__(self, message: str, cell_ids: Sequence[int] = ()) -> None:
        super().__init__(message, cell_ids=tuple(cell_ids))
        self.cell_ids = tuple(cell_ids)


class DegenerateCut(MeshError):
    """Ein Schnitt erzeugt eine Zelle, die die Regularitätsschranken verletzt."""

    def __init__(self, message: str, cell_ids: Sequence[int] = ()) -> None:
        super().__init__(message, cell_ids=tuple(cell_ids))
        self.cell_ids = tuple(cell_ids)


class NonPositiveJacobian(WGError):
    """detJ <= 0 an einem Prüfpunkt der Referenzabbildung."""

    def __init__(self, cell_id: int, point: Sequence[float], det: float) -> None:
        super().__init__(
            f"Nicht-positive Jacobi-Determinante {det:.3e} in Zelle {cell_id} "
            f"am Referenzpunkt ({point[0]:.4f}, {point[1]:.4f})",
            cell_id=cell_id,
            point=tuple(point),
        )
        self.cell_id = cell_id
        self.point = tuple(point)
        self.det = det


class SingularMass(WGError):
    """Massenmatrix nicht positiv definit (Basis oder Quadratur defekt)."""

    def __init__(self, message: str, cell_id: Optional[int] = None, edge_id: Optional[int] = None) -> None:
        super().__init__(message, cell_id=cell_id, edge_id=edge_id)
        self.cell_id = cell_id
        self.edge_id = edge_id


class InconsistentConstraint(WGError):
    """Ein Freiheitsgrad wurde zweimal mit verschiedenen Werten fixiert."""

    def __init__(self, dof: int, first: float, second: float) -> None:
        super().__init__(
            f"Freiheitsgrad {dof} widersprüchlich fixiert: {first:.6e} vs. {second:.6e}",
            dof=dof,
        )
        self.dof = dof


class SingularSystem(WGError):
    """Zusammenbruch der Faktorisierung des Sattelpunktsystems."""

    def __init__(self, message: str, cause: str = "") -> None:
        super().__init__(f"{message}; vermutete Ursache: {cause}" if cause else message, cause=cause)
        self.cause = cause


class DerivativeMismatch(WGError):
    """Symbolische und finite-Differenzen-Ableitung weichen ab."""

    def __init__(self, problem_id: int, quantity: str, rel_error: float) -> None:
        super().__init__(
            f"Testproblem {problem_id}: {quantity} weicht von finiten Differenzen ab "
            f"(relativer Fehler {rel_error:.3e})",
            problem_id=problem_id,
        )
        self.problem_id = problem_id
        self.rel_error = rel_error
