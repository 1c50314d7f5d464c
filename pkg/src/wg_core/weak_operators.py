"""
Schwacher Gradient und schwache Divergenz.

(∇_w v, q)_T = −(v_0, ∇·q)_T + ⟨v_b, q·n⟩_∂T  für q ∈ [P_{k−1}(T)]^{2×2}
(∇_w·v, τ)_T = −(v_0, ∇τ)_T + ⟨v_b, τ n⟩_∂T    für τ ∈ P_{k−1}(T)
"""

import numpy as np

from .spaces import CellSpace, WGFunction


def _edge_moments(space: CellSpace, wg: WGFunction, direction: int) -> np.ndarray:
    """Rechte Seite je Komponente, Form (2, dim P_{k−1})."""
    weights = space.rule.weights
    v0_values = space.phi @ wg.v0.T
    rhs = -(space.psi_grad[:, :, direction] * weights[:, None]).T @ v0_values
    for ce, coeffs in zip(space.edges, wg.vb):
        trace = ce.space.values @ np.asarray(coeffs).T
        w = ce.rule.weights * ce.normals[:, direction]
        rhs = rhs + (ce.psi * w[:, None]).T @ trace
    return rhs.T


def weak_gradient(space: CellSpace, wg: WGFunction) -> np.ndarray:
    """
    Schwacher Gradient, direkt aus der Definition.

    Returns:
        Koeffizienten G[i, j] der Ableitung ∂_j der Komponente i, Form (2, 2, dim P_{k−1})
    """
    result = np.zeros((2, 2, space.n1))
    for j in range(2):
        result[:, j, :] = space.solve_mass_low(_edge_moments(space, wg, j).T).T
    return result


def weak_divergence(space: CellSpace, wg: WGFunction) -> np.ndarray:
    """Schwache Divergenz, Form (dim P_{k−1},)."""
    rhs = _edge_moments(space, wg, 0)[0] + _edge_moments(space, wg, 1)[1]
    return space.solve_mass_low(rhs)


def gradient_matrix(space: CellSpace) -> np.ndarray:
    """
    Matrixform des schwachen Gradienten.

    Returns:
        Form (2, 2, dim P_{k−1}, n_local): Block [i, j] wirkt auf Komponente i
    """
    ns = space.n_scalar
    mat = np.zeros((2, 2, space.n1, 2 * ns))
    for i in range(2):
        for j in range(2):
            mat[i, j, :, i * ns:(i + 1) * ns] = space.grad_ops[j]
    return mat


def divergence_matrix(space: CellSpace) -> np.ndarray:
    """Matrixform der schwachen Divergenz, Form (dim P_{k−1}, n_local)."""
    return np.hstack([space.grad_ops[0], space.grad_ops[1]])
