"""Eigendecomposition of walk Hamiltonians, time evolution and CTQW centrality."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import CentralityReport

HERMITIAN = "hermitian"
PSEUDO_HERMITIAN = "pseudo_hermitian"
COMPLEX_SPECTRUM = "complex_spectrum"
DEFECTIVE = "defective"

EVOLVABLE = (HERMITIAN, PSEUDO_HERMITIAN)

CLUSTER_RADIUS = 1e-4  # relative; eigenvalues this close may belong to one Jordan block
RANK_TOL = 1e-7       # relative singular-value cutoff for geometric multiplicity


class NotEvolvableError(ValueError):
    """The decomposition cannot be used to build a bounded time evolution."""


@dataclass(frozen=True)
class SpectralDecomposition:
    H: np.ndarray
    P: np.ndarray
    lam: np.ndarray
    P_inv: np.ndarray
    classification: str
    residual: float
    eigenvalues: np.ndarray  # raw complex eigenvalues, kept for diagnostics

    @property
    def n(self) -> int:
        return self.H.shape[0]

    @property
    def evolvable(self) -> bool:
        return self.classification in EVOLVABLE

    def require_evolvable(self):
        if not self.evolvable:
            bad = ", ".join(_fmt_complex(z) for z in self.offending_eigenvalues())
            raise NotEvolvableError(
                f"Hamiltonian is {self.classification}; offending eigenvalues: {bad}")

    def offending_eigenvalues(self) -> np.ndarray:
        scale = max(1.0, np.linalg.norm(self.H))
        if self.classification == COMPLEX_SPECTRUM:
            return self.eigenvalues[np.abs(self.eigenvalues.imag) > 1e-9 * scale]
        if self.classification == DEFECTIVE:
            return _repeated(self.eigenvalues, CLUSTER_RADIUS * scale)
        return np.array([], dtype=complex)

    def coefficients(self, psi0) -> np.ndarray:
        """Expansion coefficients of ``psi0`` in the eigenbasis."""
        psi0 = _as_state(psi0, self.n)
        return self.P_inv @ psi0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "classification": self.classification,
            "residual": self.residual,
            "lambda": [float(x) for x in self.lam],
            "H": _complex_rows(self.H),
            "P": _complex_rows(self.P),
            "P_inv": _complex_rows(self.P_inv),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralDecomposition":
        H = _rows_to_complex(obj["H"])
        P = _rows_to_complex(obj["P"])
        P_inv = _rows_to_complex(obj["P_inv"])
        lam = np.asarray(obj["lambda"], dtype=float)
        return cls(H, P, lam, P_inv, obj["classification"], float(obj["residual"]), lam.astype(complex))


def _complex_rows(M: np.ndarray) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _rows_to_complex(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _repeated(vals: np.ndarray, tol: float) -> np.ndarray:
    out = [v for k, v in enumerate(vals)
           if any(abs(v - w) <= tol for m, w in enumerate(vals) if m != k)]
    return np.array(out, dtype=complex)


def _as_state(psi, n: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (n,):
        raise ValueError(f"state has shape {psi.shape}, expected ({n},)")
    if not np.all(np.isfinite(psi)):
        raise ValueError("state has non-finite entries")
    return psi


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Unit norm, with the first largest-magnitude component real positive."""
    v = v / np.linalg.norm(v)
    mags = np.abs(v)
    k = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    return v * (abs(v[k]) / v[k])


def _clusters(lam: np.ndarray, tol: float) -> list[list[int]]:
    """Group indices of a sorted real array whose neighbours differ by at most tol."""
    groups: list[list[int]] = []
    for k in range(len(lam)):
        if groups and lam[k] - lam[groups[-1][-1]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def eigendecompose(H, tol: float = 1e-9) -> SpectralDecomposition:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("Hamiltonian must be square")
    n = H.shape[0]
    if n == 0:
        raise ValueError("Hamiltonian has dimension 0")
    if not np.all(np.isfinite(H)):
        raise ValueError("Hamiltonian has non-finite entries")
    H = H.astype(complex)
    scale = max(1.0, np.linalg.norm(H))

    if np.linalg.norm(H - H.conj().T) <= tol * scale:
        lam, P = np.linalg.eigh(0.5 * (H + H.conj().T))
        P = np.column_stack([_canonical_phase(P[:, k]) for k in range(n)])
        return SpectralDecomposition(H, P, lam, P.conj().T, HERMITIAN,
                                     _residual(H, P, lam), lam.astype(complex))

    w, V = np.linalg.eig(H)
    # a Jordan block of size k splits into eigenvalues ~eps^(1/k) apart, so
    # multiplicities are judged on loose clusters and confirmed by rank
    clusters = _complex_clusters(w, CLUSTER_RADIUS * scale)
    P = V.astype(complex)
    lam_c = w.copy()
    for group in clusters:
        if len(group) == 1:
            continue
        mu = w[group].mean()
        _, sv, Vh = np.linalg.svd(H - mu * np.eye(n))
        geometric = int(np.sum(sv <= RANK_TOL * scale))
        if geometric == len(group):
            lam_c[group] = mu
            P[:, group] = Vh[n - geometric:].conj().T
        elif geometric > 0:
            return _unusable(H, w, V, DEFECTIVE)
    cond = np.linalg.cond(P)
    if not np.isfinite(cond) or cond > 1.0 / tol:
        return _unusable(H, w, V, DEFECTIVE)
    if np.any(np.abs(lam_c.imag) > tol * scale):
        return _unusable(H, w, V, COMPLEX_SPECTRUM)

    order = np.argsort(lam_c.real, kind="stable")
    lam = lam_c.real[order]
    P = P[:, order]
    P = np.column_stack([_canonical_phase(P[:, k]) for k in range(n)])
    if np.allclose(P.imag, 0.0, atol=1e-14) and np.allclose(H.imag, 0.0):
        P = P.real.astype(complex)
    P_inv = np.linalg.inv(P)
    return SpectralDecomposition(H, P, lam, P_inv, PSEUDO_HERMITIAN,
                                 _residual(H, P, lam), w[np.argsort(w.real, kind="stable")])


def _complex_clusters(w: np.ndarray, radius: float) -> list[list[int]]:
    """Connected components of eigenvalues closer than ``radius``."""
    label = list(range(len(w)))

    def root(k):
        while label[k] != k:
            label[k] = label[label[k]]
            k = label[k]
        return k

    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            if abs(w[i] - w[j]) <= radius:
                label[root(i)] = root(j)
    groups: dict[int, list[int]] = {}
    for k in range(len(w)):
        groups.setdefault(root(k), []).append(k)
    return list(groups.values())


def _unusable(H, w, V, classification) -> SpectralDecomposition:
    order = np.lexsort((w.imag, w.real))
    w, V = w[order], V[:, order]
    try:
        V_inv = np.linalg.pinv(V)
    except np.linalg.LinAlgError:
        V_inv = np.full_like(V, np.nan)
    return SpectralDecomposition(H, V, w.real.copy(), V_inv, classification,
                                 float(np.linalg.norm(H @ V - V * w)), w)


def _residual(H, P, lam) -> float:
    return float(np.linalg.norm(H @ P - P * lam))


def evolution_operator(dec: SpectralDecomposition, t: float) -> np.ndarray:
    dec.require_evolvable()
    return (dec.P * np.exp(-1j * dec.lam * t)) @ dec.P_inv


def evolve_state(dec: SpectralDecomposition, psi0, t: float) -> np.ndarray:
    c = dec.coefficients(psi0)
    dec.require_evolvable()
    return dec.P @ (np.exp(-1j * dec.lam * t) * c)


def time_averaged_probabilities(dec: SpectralDecomposition, psi0, tol: float = 1e-9) -> np.ndarray:
    """Infinite-time average of |<j|psi(t)>|^2.

    Cross terms between distinct eigenvalues average out; components within a
    degenerate eigenspace interfere coherently and are summed first.
    """
    dec.require_evolvable()
    c = dec.coefficients(psi0)
    scale = max(1.0, np.linalg.norm(dec.H))
    avg = np.zeros(dec.n)
    for group in _clusters(dec.lam, tol * scale):
        avg += np.abs(dec.P[:, group] @ c[group]) ** 2
    return avg


def ctqw_centrality(dec: SpectralDecomposition, psi0=None) -> CentralityReport:
    if psi0 is None:
        psi0 = np.ones(dec.n)
    avg = time_averaged_probabilities(dec, psi0)
    if avg.sum() <= 0.0:
        raise ValueError("initial state has zero time-averaged probability")
    return CentralityReport.from_scores("ctqw", avg)


def time_average_numeric(dec: SpectralDecomposition, psi0, period: float, samples: int) -> np.ndarray:
    """Periodic trapezoidal average of |psi_j(t)|^2 over [0, period)."""
    if samples < 2:
        raise ValueError("need at least two samples")
    if period <= 0:
        raise ValueError("period must be positive")
    c = dec.coefficients(psi0)
    dec.require_evolvable()
    ts = np.arange(samples) * (period / samples)
    amps = (dec.P @ (np.exp(-1j * np.outer(dec.lam, ts)) * c[:, None]))
    return (np.abs(amps) ** 2).mean(axis=1)


def norm_bounds(dec: SpectralDecomposition, psi0) -> tuple[float, float]:
    """Lower and upper bounds on ||psi(t)||^2 valid for every t.

    The eigen-coefficients only rotate in phase, so
    ||c|| / ||P^-1||_2 <= ||psi(t)|| <= sum_k |c_k| ||p_k||.
    """
    dec.require_evolvable()
    c = dec.coefficients(psi0)
    upper = float(np.sum(np.abs(c) * np.linalg.norm(dec.P, axis=0))) ** 2
    lower = (np.linalg.norm(c) / np.linalg.norm(dec.P_inv, 2)) ** 2
    return float(lower), upper
