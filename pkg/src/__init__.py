"""
WG-Stokes-Interface

Weak-Galerkin-Löser für Stokes-Interface-Probleme auf interface-angepassten,
gekrümmten Gittern mit Verifikationswerkzeugen (Konvergenzstudien, Patch-Tests,
Inf-sup-Konstante, Eigenschaftsprüfungen).

Die Kommandozeile liegt in src.main (Einstiegspunkt wg-stokes).
"""

__version__ = "1.0.0"
__author__ = "WG-Stokes Team"

from .exceptions import WGError

__all__ = ["WGError"]
