"""Gitter-Modul: Interface-Kurven, Hintergrundgitter und Interface-Anpassung."""

from .curve import SIDE_1, SIDE_2, SIDE_ON, TOL_GEOM, InterfaceCurve
from .mesh import (
    EDGE_BOUNDARY,
    EDGE_INTERFACE,
    EDGE_INTERIOR,
    Cell,
    Edge,
    InterfaceMesh,
    MeshBuilder,
    build_background_mesh,
)
from .statistics import MeshStats, mesh_statistics
from .fitting import InterfaceFitter, fit_interface, polygonal_approximation
from .mesh_io import load_mesh, save_mesh

__all__ = [
    "SIDE_1",
    "SIDE_2",
    "SIDE_ON",
    "TOL_GEOM",
    "InterfaceCurve",
    "EDGE_BOUNDARY",
    "EDGE_INTERFACE",
    "EDGE_INTERIOR",
    "Cell",
    "Edge",
    "InterfaceMesh",
    "MeshBuilder",
    "build_background_mesh",
    "MeshStats",
    "mesh_statistics",
    "InterfaceFitter",
    "fit_interface",
    "polygonal_approximation",
    "load_mesh",
    "save_mesh",
]
