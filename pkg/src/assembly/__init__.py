"""Assemblierung des WG-Sattelpunktsystems."""

from .dofmap import DofMap
from .problem_data import ProblemData, homogeneous_data
from .local_forms import LocalForms, interface_load, local_forms
from .constraints import ConstrainedSystem, ConstraintSet, apply_constraints
from .assembler import Discretization, SaddlePointSystem, SystemAssembler, assemble, resolve_workers

__all__ = [
    "DofMap",
    "ProblemData",
    "homogeneous_data",
    "LocalForms",
    "interface_load",
    "local_forms",
    "ConstrainedSystem",
    "ConstraintSet",
    "apply_constraints",
    "Discretization",
    "SaddlePointSystem",
    "SystemAssembler",
    "assemble",
    "resolve_workers",
]
