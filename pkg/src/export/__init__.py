"""Export-Modul für Fehlertabellen, Matrizen und Quadraturdaten."""

from .exporter import EXPORT_FORMATS, Exporter

__all__ = ["EXPORT_FORMATS", "Exporter"]
