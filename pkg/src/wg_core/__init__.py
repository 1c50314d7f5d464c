"""WG-Kern: Polynombasen, L²-Projektionen und schwache Differentialoperatoren."""

from .basis import CellBasis, EdgeBasis, monomial_exponents, scalar_dimension
from .spaces import CellEdge, CellSpace, EdgeSpace, WGFunction
from .projection import project_pressure_Qh, project_Q0, project_Qb, project_tensor_Qh
from .weak_operators import divergence_matrix, gradient_matrix, weak_divergence, weak_gradient

__all__ = [
    "CellBasis",
    "EdgeBasis",
    "monomial_exponents",
    "scalar_dimension",
    "CellEdge",
    "CellSpace",
    "EdgeSpace",
    "WGFunction",
    "project_pressure_Qh",
    "project_Q0",
    "project_Qb",
    "project_tensor_Qh",
    "divergence_matrix",
    "gradient_matrix",
    "weak_divergence",
    "weak_gradient",
]
