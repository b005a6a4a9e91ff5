"""The two example graphs and their hand-chosen diagonalizations and expansions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DirectedGraph

_R2, _R3 = np.sqrt(2.0), np.sqrt(3.0)

THREE_VERTEX = DirectedGraph(3, frozenset({(0, 1), (1, 0), (2, 0), (2, 1)}))
FOUR_VERTEX = DirectedGraph(4, frozenset({(0, 3), (1, 2), (2, 0), (2, 1), (3, 0), (3, 1)}))

A3 = np.array([[0, 1, 0], [1, 0, 0], [1, 1, 0]], dtype=float)
H3 = np.array([[1, -1, -1], [-1, 1, -1], [0, 0, 2]], dtype=float)
A4 = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [1, 1, 0, 0], [1, 1, 0, 0]], dtype=float)
H4 = np.array([[1, 0, -1, -1], [0, 1, -1, -1], [0, -1, 2, 0], [-1, 0, 0, 2]], dtype=float)


@dataclass(frozen=True)
class FixtureDecomposition:
    """H = prefactor * P @ diag(lam) @ P_inv, in the hand-picked ordering."""
    name: str
    H: np.ndarray
    P: np.ndarray
    lam: np.ndarray
    P_inv: np.ndarray
    prefactor: float


THREE_VERTEX_DEC = FixtureDecomposition(
    "three_vertex", H3,
    P=np.array([[-1, 1, -1], [1, 1, 0], [0, 0, 1]], dtype=float),
    lam=np.array([2.0, 0.0, 2.0]),
    P_inv=np.array([[-1, 1, -1], [1, 1, 1], [0, 0, 2]], dtype=float),
    prefactor=0.5,
)

FOUR_VERTEX_DEC = FixtureDecomposition(
    "four_vertex", H4,
    P=np.array([[2, -1, 1, 0], [2, -1, -1, 0], [1, 1, -1, 1], [1, 1, 1, -1]], dtype=float),
    lam=np.array([0.0, 3.0, 1.0, 2.0]),
    P_inv=np.array([[1, 1, 1, 1], [-1, -1, 2, 2], [3, -3, 0, 0], [3, -3, 3, -3]], dtype=float),
    prefactor=1.0 / 6.0,
)

FIXTURES = (THREE_VERTEX_DEC, FOUR_VERTEX_DEC)

# Expanded 4x4 versions of the three-vertex P and P^-1, chosen so that the
# unitary factors of their SVDs need few optical elements.
P3_EXPANDED = np.array([
    [-1, 1, -1, 1],
    [1, 1, 0, 0],
    [0, 0, 1, 1],
    [-1, 1, 1, -1],
], dtype=float)

P3_INV_EXPANDED = np.array([
    [-1, 1, -1, 2 / _R3],
    [1, 1, 1, -2 / _R3],
    [0, 0, 2, _R3],
    [-2, 0, 1, -2 / _R3],
], dtype=float)

# Factors printed alongside the expansions: P3_EXPANDED = 2 * D1 @ U1 and
# P3_INV_EXPANDED = sqrt(7) * U2 @ D2.
P3_D1 = np.diag([1, 1 / _R2, 1 / _R2, 1])
P3_U1 = np.array([
    [-0.5, 0.5, -0.5, 0.5],
    [1 / _R2, 1 / _R2, 0, 0],
    [0, 0, 1 / _R2, 1 / _R2],
    [-0.5, 0.5, 0.5, -0.5],
])
P3_U2 = np.array([
    [-1 / np.sqrt(6), 1 / _R2, -1 / np.sqrt(7), 2 / np.sqrt(21)],
    [1 / np.sqrt(6), 1 / _R2, 1 / np.sqrt(7), -2 / np.sqrt(21)],
    [0, 0, 2 / np.sqrt(7), 3 / np.sqrt(21)],
    [-2 / np.sqrt(6), 0, 1 / np.sqrt(7), -2 / np.sqrt(21)],
])
P3_D2 = np.diag([np.sqrt(6 / 7), np.sqrt(2 / 7), 1, 1])

# Printed three-factor cosine-sine factorization of P3_U1.
P3_U1_CSD = (
    np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float),
    np.array([[-1 / _R2, 0, -1 / _R2, 0], [0, 1, 0, 0], [1 / _R2, 0, -1 / _R2, 0], [0, 0, 0, 1]]),
    np.array([[1 / _R2, -1 / _R2, 0, 0], [1 / _R2, 1 / _R2, 0, 0],
              [0, 0, 1 / _R2, -1 / _R2], [0, 0, 1 / _R2, 1 / _R2]]),
)

# Four-vertex SVD as printed (4 decimals): P = 3.2566 * U @ diag(d) @ V.
P4_SVD_SCALE = 3.2566
P4_SVD_D = np.array([1, 0.5657, 0.7026, 0.2684])
P4_SVD_U = np.array([
    [-0.6768, -0.2049, 0.3717, -0.6015],
    [-0.6768, -0.2049, -0.3717, 0.6015],
    [-0.2049, 0.6768, -0.6015, -0.3717],
    [-0.2049, 0.6768, 0.6015, 0.3717],
])
P4_SVD_V = np.array([
    [-0.9571, 0.2898, 0, 0],
    [0.2898, 0.9571, 0, 0],
    [0, 0, 0.8507, -0.5257],
    [0, 0, -0.5257, -0.8507],
])


def match_fixture(H, tol: float = 1e-12) -> FixtureDecomposition | None:
    H = np.asarray(H)
    for fx in FIXTURES:
        if H.shape == fx.H.shape and np.allclose(H, fx.H, rtol=0.0, atol=tol):
            return fx
    return None
