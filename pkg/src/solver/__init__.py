"""Direkter Löser für das WG-Sattelpunktsystem."""

from .solver import SaddlePointSolver, WGSolution, diagnose, residual_report, solve

__all__ = ["SaddlePointSolver", "WGSolution", "diagnose", "residual_report", "solve"]
