"""
Exporter - Modul zum Export von Konvergenzstudien und Debug-Daten.

Dieses Modul exportiert:
- Fehlertabellen als CSV (festes Schema), Excel (.xlsx) und JSON
- Systemmatrizen im Koordinatenformat (row col value)
- Quadraturpunkte als CSV (x, y, w)
"""

import json
import logging
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np
import pandas as pd
from scipy import sparse

from ..verify.study import CSV_COLUMNS, ErrorReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.4e"
MATRIX_FORMAT = "%.16e"
EXPORT_FORMATS = ("csv", "excel", "json")


def _number(value: Optional[float]) -> Optional[float]:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return float(value)


class Exporter:
    """
    Klasse zum Export von Fehlertabellen.

    Unterstützt folgende Formate:
    - CSV mit dem Spaltenschema n,h,energy_err,energy_order,l2u_err,l2u_order,l2p_err,l2p_order
    - Excel (.xlsx) mit formatierter Tabelle inkl. rohem und verschobenem Druckfehler
    - JSON für maschinenlesbare Ausgabe

    Attributes:
        project_name: Name des Projekts für Header
        created_by: Ersteller-Name
    """

    def __init__(
        self,
        project_name: str = "WG-Stokes-Interface",
        created_by: str = "wg-stokes"
    ) -> None:
        self.project_name = project_name
        self.created_by = created_by
        logger.info(f"Exporter initialisiert für Projekt: {project_name}")

    def export_to_csv(self, report: ErrorReport, output_path: Union[str, Path]) -> Path:
        """
        Exportiert die Fehlertabelle als CSV-Datei.

        Die Ordnungsspalten der ersten Zeile bleiben leer.

        Args:
            report: ErrorReport der Studie
            output_path: Ausgabepfad für die CSV-Datei

        Returns:
            Pfad zur erstellten CSV-Datei
        """
        output_path = Path(output_path)

        if not output_path.suffix:
            output_path = output_path.with_suffix(".csv")

        logger.info(f"Exportiere als CSV: {output_path}")

        frame = report.to_frame()
        output_path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(
            str(output_path),
            sep=",",
            index=False,
            columns=CSV_COLUMNS,
            float_format=FLOAT_FORMAT,
            na_rep="",
            encoding="utf-8",
        )

        logger.info(f"CSV-Export erfolgreich: {output_path} ({len(frame)} Zeilen)")
        return output_path

    def export_to_excel(self, report: ErrorReport, output_path: Union[str, Path]) -> Path:
        """
        Exportiert die Fehlertabelle als Excel-Datei.

        Args:
            report: ErrorReport der Studie
            output_path: Ausgabepfad für die Excel-Datei

        Returns:
            Pfad zur erstellten Excel-Datei
        """
        output_path = Path(output_path)

        if not output_path.suffix:
            output_path = output_path.with_suffix(".xlsx")

        logger.info(f"Exportiere als Excel: {output_path}")

        try:
            from openpyxl import Workbook
            from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
        except ImportError as e:
            logger.error(f"Erforderliche Bibliothek nicht installiert: {e}")
            raise

        wb = Workbook()
        ws = wb.active
        ws.title = f"k={report.k} {report.mesh_kind}"

        # Styles definieren
        header_font = Font(bold=True, size=12)
        header_fill = PatternFill(start_color="CCE5FF", end_color="CCE5FF", fill_type="solid")
        thin_border = Border(
            left=Side(style='thin'),
            right=Side(style='thin'),
            top=Side(style='thin'),
            bottom=Side(style='thin')
        )

        headers = [
            "n", "h", "|||e_h|||", "Ordnung", "‖e_0‖", "Ordnung",
            "‖ε_h‖", "Ordnung", "‖ε_h‖ (roh)", "DOFs",
        ]
        last_column = chr(ord("A") + len(headers) - 1)

        # Header
        ws.merge_cells(f"A1:{last_column}1")
        ws['A1'] = f"{self.project_name}: {report.problem_name}"
        ws['A1'].font = Font(bold=True, size=14)

        shape = "gerades Interface (Sehnen)" if report.straight else "gekrümmtes Interface"
        ws['A2'] = f"Erstellt am: {datetime.now().strftime('%d.%m.%Y %H:%M')}"
        ws['A3'] = f"Erstellt von: {self.created_by}"
        ws['A4'] = f"Polynomgrad k={report.k}, Gitter {report.mesh_kind}, {shape}"

        row_num = 6
        for col, header in enumerate(headers, 1):
            cell = ws.cell(row=row_num, column=col, value=header)
            cell.font = header_font
            cell.fill = header_fill
            cell.border = thin_border
            cell.alignment = Alignment(horizontal='center')

        for r in report.rows:
            row_num += 1
            values = [
                r.n, r.h, r.energy_err, _number(r.energy_order), r.l2u_err, _number(r.l2u_order),
                r.l2p_err, _number(r.l2p_order), r.l2p_raw, r.dofs,
            ]
            for col, value in enumerate(values, 1):
                cell = ws.cell(row=row_num, column=col, value=value)
                cell.border = thin_border
                if col in (2, 3, 5, 7, 9):
                    cell.number_format = "0.0000E+00"
                elif col in (4, 6, 8):
                    cell.number_format = "0.00"

        # Spaltenbreiten anpassen
        ws.column_dimensions['A'].width = 5
        for letter in "BCDEFGHIJ":
            ws.column_dimensions[letter].width = 13

        output_path.parent.mkdir(parents=True, exist_ok=True)
        wb.save(str(output_path))

        logger.info(f"Excel-Export erfolgreich: {output_path}")
        return output_path

    def export_to_json(
        self,
        report: ErrorReport,
        output_path: Union[str, Path],
        indent: int = 2
    ) -> Path:
        """
        Exportiert die Fehlertabelle als JSON-Datei.

        Args:
            report: ErrorReport der Studie
            output_path: Ausgabepfad für die JSON-Datei
            indent: Einrückung für JSON-Formatierung

        Returns:
            Pfad zur erstellten JSON-Datei
        """
        output_path = Path(output_path)

        if not output_path.suffix:
            output_path = output_path.with_suffix(".json")

        logger.info(f"Exportiere als JSON: {output_path}")

        energy_order, l2u_order, l2p_order = report.finest_orders()
        export_data: Dict[str, Any] = {
            "meta": {
                "project_name": self.project_name,
                "created_by": self.created_by,
                "created_at": datetime.now().isoformat(),
                "problem_id": report.problem_id,
                "problem_name": report.problem_name,
                "k": report.k,
                "mesh_kind": report.mesh_kind,
                "straight": report.straight,
                "levels": len(report.rows),
            },
            "rows": [],
            "finest_orders": {
                "energy": _number(energy_order),
                "l2u": _number(l2u_order),
                "l2p": _number(l2p_order),
            },
        }

        for r in report.rows:
            export_data["rows"].append({
                "n": r.n,
                "h": r.h,
                "energy_err": r.energy_err,
                "energy_order": _number(r.energy_order),
                "l2u_err": r.l2u_err,
                "l2u_order": _number(r.l2u_order),
                "l2p_err": r.l2p_err,
                "l2p_order": _number(r.l2p_order),
                "l2p_raw": r.l2p_raw,
                "dofs": r.dofs,
                "divergence_residual": r.divergence_residual,
            })

        output_path.parent.mkdir(parents=True, exist_ok=True)

        with open(output_path, 'w', encoding='utf-8') as f:
            json.dump(export_data, f, indent=indent, ensure_ascii=False)

        logger.info(f"JSON-Export erfolgreich: {output_path}")
        return output_path

    def export_all(
        self,
        report: ErrorReport,
        output_dir: Union[str, Path],
        formats: Iterable[str] = EXPORT_FORMATS,
        base_name: Optional[str] = None
    ) -> Dict[str, Path]:
        """
        Exportiert die Fehlertabelle in mehreren Formaten.

        CSV wird immer geschrieben; Fehler in Excel oder JSON werden
        protokolliert, brechen den Export aber nicht ab.

        Args:
            report: ErrorReport der Studie
            output_dir: Ausgabeverzeichnis
            formats: Teilmenge von ("csv", "excel", "json")
            base_name: Basis-Dateiname (Standard: report.label)

        Returns:
            Dictionary mit Format als Schlüssel und Pfad als Wert
        """
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        base_name = base_name or report.label
        wanted = set(formats) | {"csv"}
        unknown = wanted - set(EXPORT_FORMATS)
        if unknown:
            raise ValueError(f"Unbekannte Exportformate: {sorted(unknown)}")

        logger.info(f"Exportiere {sorted(wanted)} nach: {output_dir}")

        results = {"csv": self.export_to_csv(report, output_dir / f"{base_name}.csv")}

        if "excel" in wanted:
            try:
                results["excel"] = self.export_to_excel(report, output_dir / f"{base_name}.xlsx")
            except Exception as e:
                logger.error(f"Excel-Export fehlgeschlagen: {e}")

        if "json" in wanted:
            try:
                results["json"] = self.export_to_json(report, output_dir / f"{base_name}.json")
            except Exception as e:
                logger.error(f"JSON-Export fehlgeschlagen: {e}")

        logger.info(f"Export abgeschlossen: {len(results)} Format(e) erstellt")
        return results

    def export_matrix(self, matrix: Any, output_path: Union[str, Path]) -> Path:
        """
        Schreibt eine (dünnbesetzte) Matrix als Textdatei "row col value".

        Die erste Zeile enthält "rows cols nnz"; Werte mit 17 signifikanten Stellen.
        """
        output_path = Path(output_path)
        coo = sparse.coo_matrix(matrix)
        coo.sum_duplicates()
        order = np.lexsort((coo.col, coo.row))

        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
            np.savetxt(
                f,
                np.column_stack([coo.row[order], coo.col[order], coo.data[order]]),
                fmt=["%d", "%d", MATRIX_FORMAT],
            )

        logger.info(f"Matrix exportiert: {output_path} ({coo.shape[0]}x{coo.shape[1]}, {coo.nnz} Einträge)")
        return output_path

    def export_quadrature(self, rules: Iterable[Any], output_path: Union[str, Path]) -> Path:
        """Quadraturpunkte und Gewichte einer oder mehrerer Regeln als CSV (x, y, w)."""
        output_path = Path(output_path)
        frames = [
            pd.DataFrame({"x": rule.points[:, 0], "y": rule.points[:, 1], "w": rule.weights})
            for rule in rules
        ]
        frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=["x", "y", "w"])

        output_path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(str(output_path), index=False, float_format=MATRIX_FORMAT)

        logger.info(f"Quadratur exportiert: {output_path} ({len(frame)} Punkte)")
        return output_path
