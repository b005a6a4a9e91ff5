"""Jones-calculus evaluation of element programs on a path x polarization ququart.

Conventions: basis (H, V); an element with fast axis at angle theta is
rot(theta) @ J0 @ rot(-theta) with rot the counter-clockwise rotation, so
HWP(theta) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]] and QWP uses J0 = diag(1, i).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .ir import (DIM, Attenuator, BlockUnitary, Blocker, CircuitIR, Phase, Routing, Stage,
                 Waveplate, WaveplateTriple)


def rot(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def hwp(theta: float) -> np.ndarray:
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def qwp(theta: float) -> np.ndarray:
    return rot(theta) @ np.diag([1.0, 1.0j]) @ rot(-theta)


def plate(kind: str, theta: float) -> np.ndarray:
    if kind == "HWP":
        return hwp(theta)
    if kind == "QWP":
        return qwp(theta)
    raise ValueError(f"unknown plate {kind!r}")


def triple_matrix(w: WaveplateTriple, compensate: bool = False) -> np.ndarray:
    """QWP(alpha) HWP(beta) QWP(gamma); light meets QWP(gamma) first."""
    M = qwp(w.alpha) @ hwp(w.beta) @ qwp(w.gamma)
    if compensate:
        M = M * np.exp(-1j * w.global_phase)
    return M


def _on_path(block: np.ndarray, path: int) -> np.ndarray:
    M = np.eye(DIM, dtype=complex)
    k = 2 * (path - 1)
    M[k:k + 2, k:k + 2] = block
    return M


def element_matrix(stage: Stage, t: float = 0.0) -> np.ndarray:
    if isinstance(stage, Waveplate):
        return _on_path(plate(stage.plate, stage.angle), stage.path)
    if isinstance(stage, BlockUnitary):
        M = np.eye(DIM, dtype=complex)
        for path, w in enumerate(stage.paths, start=1):
            if w is not None:
                # the triple's global phase is trimmed by the path's phase setting
                M = _on_path(triple_matrix(w, compensate=True), path) @ M
        return M
    if isinstance(stage, Routing):
        M = np.zeros((DIM, DIM), dtype=complex)
        M[np.arange(DIM), list(stage.perm)] = 1.0
        return M
    if isinstance(stage, Attenuator):
        return np.diag(np.sin(2 * np.asarray(stage.angles))).astype(complex)
    if isinstance(stage, Phase):
        return np.diag(np.exp(-1j * stage.centered * t))
    if isinstance(stage, Blocker):
        d = np.ones(DIM, dtype=complex)
        d[list(stage.modes)] = 0.0
        return np.diag(d)
    raise ValueError(f"unknown stage kind {getattr(stage, 'kind', type(stage).__name__)!r}")


def transfer_matrix(ir: CircuitIR, t: float = 0.0) -> np.ndarray:
    """End-to-end 4x4 map of the program (later stages multiply on the left)."""
    T = np.eye(DIM, dtype=complex)
    for stage in ir.stages:
        T = element_matrix(stage, t) @ T
    return T


def simulate(ir: CircuitIR, psi_in, t: float = 0.0) -> np.ndarray:
    psi = np.asarray(psi_in, dtype=complex)
    if psi.shape != (DIM,):
        raise ValueError(f"ququart state must have {DIM} amplitudes")
    for stage in ir.stages:
        psi = element_matrix(stage, t) @ psi
    return psi


def phase_invariant_distance(A: np.ndarray, B: np.ndarray) -> float:
    """min over phi of ||A - exp(i phi) B||_F."""
    overlap = np.vdot(B, A)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(A - phase * B))


def input_state(ir: CircuitIR, amplitudes=None) -> np.ndarray:
    """Normalized ququart carrying ``amplitudes`` (default all ones) on the vertex modes."""
    n = ir.n_vertices
    amps = np.ones(n, dtype=complex) if amplitudes is None else np.asarray(amplitudes, dtype=complex)
    if amps.shape != (n,):
        raise ValueError(f"expected {n} vertex amplitudes")
    psi = np.zeros(DIM, dtype=complex)
    psi[list(ir.detectors)] = amps
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("input state is zero")
    return psi / norm


@dataclass(frozen=True)
class SweepTable:
    t: np.ndarray
    probabilities: np.ndarray  # (len(t), n_detectors), physical detection probabilities
    detectors: tuple[int, ...]
    total_scale: float = 1.0
    counts: np.ndarray | None = None

    def walk_probabilities(self) -> np.ndarray:
        """Probabilities with the compiled circuit's global loss divided out."""
        return self.probabilities * self.total_scale ** 2

    def centrality(self) -> np.ndarray:
        avg = self.probabilities.mean(axis=0)
        return avg / avg.sum()

    def with_counts(self, mean_total: float, seed) -> "SweepTable":
        """Attach Poisson counts; ``mean_total`` photons enter the circuit per grid point."""
        counts = sample_counts(self.probabilities, mean_total, seed)
        return SweepTable(self.t, self.probabilities, self.detectors, self.total_scale, counts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        k = len(self.detectors)
        header = ["t"] + [f"det{j + 1}" for j in range(k)]
        if self.counts is not None:
            header += [f"count{j + 1}" for j in range(k)]
        writer.writerow(header)
        for row in range(len(self.t)):
            fields = [f"{self.t[row]:.12g}"] + [f"{p:.12g}" for p in self.probabilities[row]]
            if self.counts is not None:
                fields += [str(int(c)) for c in self.counts[row]]
            writer.writerow(fields)
        return buf.getvalue()


def sweep(ir: CircuitIR, psi_in, t_grid) -> SweepTable:
    t_grid = np.asarray(t_grid, dtype=float).ravel()
    if t_grid.size == 0:
        raise ValueError("time grid is empty")
    det = list(ir.detectors)
    rows = np.empty((t_grid.size, len(det)))
    for k, t in enumerate(t_grid):
        rows[k] = np.abs(simulate(ir, psi_in, t)[det]) ** 2
    return SweepTable(t_grid, rows, tuple(det), ir.total_scale)


def sample_counts(probabilities, mean_total: float, seed) -> np.ndarray:
    """Independent Poisson draws with means ``mean_total * p``.

    ``seed`` is an int, None, or an existing ``numpy.random.Generator``.
    """
    p = np.asarray(probabilities, dtype=float)
    if mean_total < 0 or np.any(p < 0):
        raise ValueError("probabilities and mean_total must be non-negative")
    if np.any(p > 1.0 + 1e-9):
        raise ValueError("probabilities must not exceed 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.poisson(mean_total * p)
