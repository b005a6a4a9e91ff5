"""Matrix factorizations used by the compiler: SVD, 2+2 cosine-sine, wave-plate triples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ir import WaveplateTriple
from .jones import triple_matrix

UNITARY_TOL = 1e-10
_HALF_SQRT2 = np.sqrt(0.5)


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U)
    return U.ndim == 2 and U.shape[0] == U.shape[1] and \
        np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) <= tol


def canonical_angle(theta: float) -> float:
    """Wave-plate orientations are pi-periodic; map into [0, pi)."""
    a = float(np.mod(theta, np.pi))
    return 0.0 if np.isclose(a, np.pi, rtol=0.0, atol=1e-15) else a


@dataclass(frozen=True)
class SvdFactors:
    """M = scale * U1 @ diag(d) @ U2 with d descending in [0, 1]."""
    U1: np.ndarray
    d: np.ndarray
    U2: np.ndarray
    scale: float

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.d)

    def product(self) -> np.ndarray:
        return self.scale * (self.U1 * self.d) @ self.U2


def svd(M) -> SvdFactors:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("svd expects a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    U1, s, U2 = np.linalg.svd(M)
    if s[0] == 0.0:
        raise ValueError("zero matrix has no attenuation scale")
    return SvdFactors(U1, s / s[0], U2, float(s[0]))


def monomial_perm(U: np.ndarray, tol: float = 1e-12) -> np.ndarray | None:
    """If U has exactly one nonzero per row and column return perm with U[i, perm[i]] != 0."""
    mask = np.abs(U) > tol
    if not (np.all(mask.sum(axis=0) == 1) and np.all(mask.sum(axis=1) == 1)):
        return None
    return np.argmax(mask, axis=1)


# ---------------------------------------------------------------- CSD

@dataclass(frozen=True)
class CsdFactors:
    """U = blkdiag(L, Lp) @ S4(theta) @ blkdiag(R, Rp)."""
    L: np.ndarray
    Lp: np.ndarray
    theta: tuple[float, float]
    R: np.ndarray
    Rp: np.ndarray

    @property
    def L4(self) -> np.ndarray:
        return _blkdiag(self.L, self.Lp)

    @property
    def R4(self) -> np.ndarray:
        return _blkdiag(self.R, self.Rp)

    @property
    def S4(self) -> np.ndarray:
        return s4_matrix(*self.theta)

    def product(self) -> np.ndarray:
        return self.L4 @ self.S4 @ self.R4


def _blkdiag(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    M = np.zeros((4, 4), dtype=complex)
    M[:2, :2] = A
    M[2:, 2:] = B
    return M


def s4_matrix(theta1: float, theta2: float) -> np.ndarray:
    """Cosine-sine core coupling modes (0, 2) by theta1 and (1, 3) by theta2."""
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    # exact zeros outside the two rotation planes
    return np.array([
        [c1, 0.0, s1, 0.0],
        [0.0, c2, 0.0, s2],
        [-s1, 0.0, c1, 0.0],
        [0.0, -s2, 0.0, c2],
    ])


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _complement(u: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to the unit 2-vector u."""
    return np.array([-np.conj(u[1]), np.conj(u[0])])


def _orthonormal_columns(X: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Unitary Q whose column k points along X[:, k], largest column first.

    The smaller column is only used to fix the phase of the orthogonal
    complement, so a tiny or vanishing column never amplifies rounding.
    """
    big, small = (1, 0) if np.linalg.norm(X[:, 1]) >= np.linalg.norm(X[:, 0]) else (0, 1)
    Q = np.empty((2, 2), dtype=complex)
    if np.linalg.norm(X[:, big]) <= 1e-300:
        return fallback.astype(complex)
    Q[:, big] = _unit(X[:, big])
    comp = _complement(Q[:, big])
    overlap = np.vdot(comp, X[:, small])
    Q[:, small] = comp * (overlap / abs(overlap) if abs(overlap) > 0 else 1.0)
    return Q


def csd4(U) -> CsdFactors:
    """2+2 cosine-sine decomposition of a 4x4 unitary with cos(theta) descending."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (4, 4):
        raise ValueError("csd4 expects a 4x4 matrix")
    if not is_unitary(U):
        raise ValueError("csd4 input is not unitary")
    A, B, C, D = U[:2, :2], U[:2, 2:], U[2:, :2], U[2:, 2:]

    L, c, R = np.linalg.svd(A)
    if c[1] >= _HALF_SQRT2 and np.linalg.norm(C) > 1e-14:
        # both cosines near 1: A's singular vectors are ill-determined (gap ~ s^2),
        # so take the shared right vectors from C, whose small singular values
        # are resolved to absolute precision
        W, sig, Rc = np.linalg.svd(C)
        R = Rc[::-1]
        Lp = -W[:, ::-1]
        s = sig[::-1]
        AR = A @ R.conj().T          # == L @ diag(c)
        c = np.linalg.norm(AR, axis=0)
        L = _polish_rows((AR / c).T).T
    else:
        c = np.clip(c, 0.0, 1.0)
        X = -C @ R.conj().T          # == Lp @ diag(s)
        s = np.linalg.norm(X, axis=0)
        Lp = _orthonormal_columns(X, np.eye(2))
    theta = np.arctan2(s, c)
    cos, sin = np.cos(theta), np.sin(theta)

    Y = L.conj().T @ B           # == diag(s) @ Rp
    Z = Lp.conj().T @ D          # == diag(c) @ Rp
    Rp = np.empty((2, 2), dtype=complex)
    for k in range(2):
        Rp[k] = Y[k] / sin[k] if sin[k] > cos[k] else Z[k] / cos[k]
    Rp = _polish_rows(Rp)
    return CsdFactors(L, Lp, (float(theta[0]), float(theta[1])), R, Rp)


def _polish_rows(M: np.ndarray) -> np.ndarray:
    # Gram-Schmidt on rows in order; only removes rounding-level drift
    Q = np.empty_like(M)
    Q[0] = _unit(M[0])
    r = M[1] - np.vdot(Q[0], M[1]) * Q[0]
    Q[1] = _unit(r)
    return Q


# ---------------------------------------------------------------- wave plates

_SX = np.array([[0, 1], [1, 0]], dtype=complex)


def _rx(b: float) -> np.ndarray:
    return np.cos(b / 2) * np.eye(2) - 1j * np.sin(b / 2) * _SX


def _zyz(V: np.ndarray) -> tuple[float, float, float]:
    """Angles (phi, theta, lam) with V = +-Rz(phi) Ry(theta) Rz(lam), V in SU(2)."""
    theta = 2.0 * np.arctan2(abs(V[1, 0]), abs(V[0, 0]))
    plus = 2.0 * np.angle(V[1, 1]) if abs(V[1, 1]) > 1e-12 else 0.0
    minus = 2.0 * np.angle(V[1, 0]) if abs(V[1, 0]) > 1e-12 else 0.0
    return (plus + minus) / 2, theta, (plus - minus) / 2


def solve_waveplate_triple(target) -> WaveplateTriple:
    """Orientations (alpha, beta, gamma) with QWP(alpha) HWP(beta) QWP(gamma) ~ target.

    With these plate conventions QWP(a) HWP(b) QWP(g) is, up to phase,
    Ry(2a) Rx(2a + 2g - 4b) Ry(-2g), so the problem reduces to a Y-X-Y Euler
    decomposition, obtained from Z-Y-Z after conjugating by Rx(pi/2).
    """
    target = np.asarray(target, dtype=complex)
    if target.shape != (2, 2) or not is_unitary(target):
        raise ValueError("target must be a 2x2 unitary")
    V = target / np.sqrt(np.linalg.det(target))
    Vz = _rx(np.pi / 2) @ V @ _rx(-np.pi / 2)     # = Rz(a) Rx(b) Rz(c)
    phi, b, lam = _zyz(Vz)                         # Rx(b) = Rz(-pi/2) Ry(b) Rz(pi/2)
    a, c = phi + np.pi / 2, lam - np.pi / 2
    alpha = canonical_angle(a / 2)
    gamma = canonical_angle(-c / 2)
    beta = canonical_angle((a - c - b) / 4)
    trial = WaveplateTriple(alpha, beta, gamma)
    M = triple_matrix(trial)
    overlap = np.vdot(target, M) / 2
    result = WaveplateTriple(alpha, beta, gamma, float(np.angle(overlap)))
    err = np.linalg.norm(triple_matrix(result, compensate=True) - target)
    if err > 1e-9:
        raise ArithmeticError(f"wave-plate solve failed to reconstruct target (error {err:.2e})")
    return result


def rotation_hwp_pair(theta: float) -> tuple[float, float]:
    """HWP angles (first, second) whose product is [[cos, sin], [-sin, cos]](theta).

    HWP(b) @ HWP(0) is a rotation by 2b, so b = -theta/2.
    """
    return 0.0, canonical_angle(-theta / 2)
