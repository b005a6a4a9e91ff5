"""Compile U(t) = P exp(-i lam t) P^-1 into a program of optical stages.

The non-unitary P and P^-1 are each split into unitary . attenuation . unitary,
every 4x4 unitary into a cosine-sine core between two per-path polarization
blocks, and each 2x2 block into a QWP-HWP-QWP triple. All time dependence sits
in a single diagonal phase stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fixtures
from .decompose import (canonical_angle, csd4, monomial_perm, rotation_hwp_pair,
                        solve_waveplate_triple, svd)
from .ir import (DIM, Attenuator, BlockUnitary, Blocker, CircuitIR, Phase, Routing, Stage,
                 Waveplate)
from .jones import element_matrix, hwp, phase_invariant_distance, qwp, transfer_matrix
from .spectral import SpectralDecomposition, eigendecompose

PAPER_FIXTURE = "paper_fixture"
GENERIC_PAD = "generic_pad"
EXPANSION_MODES = (PAPER_FIXTURE, GENERIC_PAD)

VERIFY_TOL = 1e-8
S4_ROUTING = (0, 2, 1, 3)  # regroups (1H,1V,2H,2V) into (1H,2H | 1V,2V)


class CompileError(ValueError):
    pass


# ---------------------------------------------------------------- attenuation / phase

def synthesize_attenuation(d, lambda_scale: float = 1.0, label: str = "") -> Attenuator:
    """HWP angles with sin(2 theta_k) = d_k, so mode k keeps amplitude d_k."""
    d = np.asarray(d, dtype=float)
    if np.any(d < -1e-12) or np.any(d > 1 + 1e-12):
        raise ValueError("attenuation entries must lie in [0, 1]")
    angles = 0.5 * np.arcsin(np.clip(d, 0.0, 1.0))
    return Attenuator(tuple(float(a) for a in angles), float(lambda_scale), label)


def _gadget_calibration() -> tuple[float, float]:
    """Slope and intercept of arg(V/H) for QWP(pi/4) HWP(theta) QWP(pi/4)."""
    def rel(theta):
        M = qwp(np.pi / 4) @ hwp(theta) @ qwp(np.pi / 4)
        return np.angle(M[1, 1] / M[0, 0])
    step = 1e-3
    slope = np.angle(np.exp(1j * (rel(step) - rel(0.0)))) / step
    return float(np.round(slope, 6)), float(rel(0.0))


GADGET_SLOPE, GADGET_INTERCEPT = _gadget_calibration()


def synthesize_phase_stage(lam, center: bool = True, label: str = "Lambda") -> Phase:
    """Phase stage for eigenvalues ``lam`` (padded to four modes with zero phase).

    With ``center`` the midpoint of the spectrum is factored out as a global
    phase and recorded as ``offset``.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or not 1 <= lam.size <= DIM or not np.all(np.isfinite(lam)):
        raise ValueError(f"need between 1 and {DIM} real eigenvalues")
    offset = 0.5 * (lam.max() + lam.min()) if center else 0.0
    coeffs = np.concatenate([lam, np.full(DIM - lam.size, offset)])
    centered = coeffs - offset
    hwp_meta = []
    for path in (1, 2):
        h, v = centered[2 * path - 2], centered[2 * path - 1]
        # want arg(V/H) = -(v - h) t = GADGET_SLOPE * theta + GADGET_INTERCEPT
        slope = -(v - h) / GADGET_SLOPE
        intercept = canonical_angle(-GADGET_INTERCEPT / GADGET_SLOPE)
        hwp_meta.append((path, float(slope), intercept))
    return Phase(tuple(float(c) for c in coeffs), float(offset), tuple(hwp_meta), label)


# ---------------------------------------------------------------- dimension expansion

def expand_dimension(M, mode: str = GENERIC_PAD) -> tuple[np.ndarray, tuple[int, ...]]:
    """Embed a 3x3 matrix in 4x4. Returns the matrix and the modes blocked afterwards."""
    M = np.asarray(M)
    if M.shape != (3, 3):
        raise ValueError("expand_dimension expects a 3x3 matrix")
    if mode == PAPER_FIXTURE:
        fx = fixtures.THREE_VERTEX_DEC
        if np.allclose(M, fx.P, rtol=0.0, atol=1e-12):
            return fixtures.P3_EXPANDED.astype(complex), (3,)
        if np.allclose(M, fx.P_inv, rtol=0.0, atol=1e-12):
            return fixtures.P3_INV_EXPANDED.astype(complex), (3,)
        raise CompileError("paper_fixture expansion requested for a matrix that is not a fixture")
    if mode == GENERIC_PAD:
        out = np.zeros((DIM, DIM), dtype=complex)
        out[:3, :3] = M
        out[3, 3] = 1.0
        return out, (3,)
    raise ValueError(f"unknown expansion mode {mode!r}")


# ---------------------------------------------------------------- factoring

@dataclass(frozen=True)
class OpticalFactors:
    """M = scale * left @ diag(d) @ right, with d in [0, 1] (not necessarily sorted)."""
    left: np.ndarray
    d: np.ndarray
    right: np.ndarray
    scale: float

    def product(self) -> np.ndarray:
        return self.scale * (self.left * self.d) @ self.right


def optical_factors(M, tol: float = 1e-12) -> OpticalFactors:
    """SVD arranged so that trivial unitary factors come out as exact identities.

    Orthogonal rows or columns are split off directly; otherwise a signed
    permutation on either side of the SVD is folded into the other unitary.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    eye = np.eye(n, dtype=complex)
    G = M @ M.conj().T
    if np.linalg.norm(G - np.diag(np.diag(G))) <= tol * max(1.0, np.linalg.norm(G)):
        norms = np.sqrt(np.real(np.diag(G)))
        scale = norms.max()
        return OpticalFactors(eye, norms / scale, M / norms[:, None], float(scale))
    G = M.conj().T @ M
    if np.linalg.norm(G - np.diag(np.diag(G))) <= tol * max(1.0, np.linalg.norm(G)):
        norms = np.sqrt(np.real(np.diag(G)))
        scale = norms.max()
        return OpticalFactors(M / norms[None, :], norms / scale, eye, float(scale))

    f = svd(M)
    perm = monomial_perm(f.U1)
    if perm is not None:
        return OpticalFactors(eye, f.d[perm], f.U1 @ f.U2, f.scale)
    perm = monomial_perm(f.U2.T)
    if perm is not None:
        return OpticalFactors(f.U1 @ f.U2, f.d[perm], eye, f.scale)
    return OpticalFactors(f.U1, f.d, f.U2, f.scale)


# ---------------------------------------------------------------- stage emission

def _is_identity(U: np.ndarray, tol: float = 1e-12) -> bool:
    return np.linalg.norm(U - np.eye(U.shape[0])) <= tol


def _block(U2: np.ndarray):
    return None if _is_identity(U2) else solve_waveplate_triple(U2)


def unitary_stages(U, label: str = "") -> list[Stage]:
    """Stages realizing a 4x4 unitary exactly (not merely up to phase)."""
    U = np.asarray(U, dtype=complex)
    if _is_identity(U):
        return []
    f = csd4(U)
    stages: list[Stage] = []
    right = (_block(f.R), _block(f.Rp))
    if right != (None, None):
        stages.append(BlockUnitary(right, label))
    if any(abs(th) > 1e-15 for th in f.theta):
        stages.append(Routing(S4_ROUTING, label))
        for path, th in zip((1, 2), f.theta):
            if abs(th) > 1e-15:
                first, second = rotation_hwp_pair(th)
                stages.append(Waveplate(path, "HWP", first, label))
                stages.append(Waveplate(path, "HWP", second, label))
        stages.append(Routing(S4_ROUTING, label))
    left = (_block(f.L), _block(f.Lp))
    if left != (None, None):
        stages.append(BlockUnitary(left, label))
    return stages


def factor_stages(fac: OpticalFactors, names: tuple[str, str, str]) -> list[Stage]:
    """Stages for fac.product() / fac.scale; names label (right, diagonal, left)."""
    right, diag, left = names
    stages = unitary_stages(fac.right, right)
    if not np.allclose(fac.d, 1.0, rtol=0.0, atol=1e-15):
        stages.append(synthesize_attenuation(fac.d, fac.scale, diag))
    stages += unitary_stages(fac.left, left)
    return stages


def peephole(stages) -> list[Stage]:
    """Drop stages that act as the identity and cancel adjacent equal HWP pairs.

    HWP(a) HWP(a) = I, so e.g. two neighbouring 45-degree plates on one path vanish.
    Routing pairs that undo each other are removed too.
    """
    out: list[Stage] = []
    for s in stages:
        if isinstance(s, BlockUnitary) and s.paths == (None, None):
            continue
        if isinstance(s, Routing) and tuple(s.perm) == tuple(range(DIM)):
            continue
        if isinstance(s, Blocker) and not s.modes:
            continue
        if isinstance(s, Attenuator) and np.allclose(np.sin(2 * np.asarray(s.angles)), 1.0,
                                                     rtol=0.0, atol=1e-15):
            continue
        prev = out[-1] if out else None
        if (isinstance(s, Waveplate) and isinstance(prev, Waveplate) and s.plate == prev.plate == "HWP"
                and s.path == prev.path and np.isclose(s.angle, prev.angle, rtol=0.0, atol=1e-15)):
            out.pop()
            continue
        if (isinstance(s, Routing) and isinstance(prev, Routing)
                and all(prev.perm[s.perm[i]] == i for i in range(DIM))):
            out.pop()
            continue
        if isinstance(s, Blocker) and isinstance(prev, Blocker) and set(s.modes) <= set(prev.modes):
            continue
        out.append(s)
    # a removal can expose a new adjacent pair
    return out if len(out) == len(stages) else peephole(out)


# ---------------------------------------------------------------- pipeline

@dataclass(frozen=True)
class CompileOptions:
    mode: str = GENERIC_PAD
    center: bool = True
    simplify: bool = True

    def to_json(self) -> dict:
        return {"mode": self.mode, "center": self.center, "simplify": self.simplify}


def _walk_triple(dec: SpectralDecomposition, opts: CompileOptions):
    if opts.mode == PAPER_FIXTURE:
        fx = fixtures.match_fixture(dec.H.real if np.allclose(dec.H.imag, 0) else dec.H)
        if fx is None:
            raise CompileError("paper_fixture mode requires one of the two example Hamiltonians")
        return fx.P.astype(complex), fx.lam, fx.P_inv.astype(complex), fx.prefactor, fx.name
    if opts.mode != GENERIC_PAD:
        raise ValueError(f"unknown expansion mode {opts.mode!r}")
    return dec.P, dec.lam, dec.P_inv, 1.0, None


def compile_evolution(dec: SpectralDecomposition, options: CompileOptions | None = None) -> CircuitIR:
    opts = options or CompileOptions()
    dec.require_evolvable()
    n = dec.n
    if n not in (3, 4):
        raise CompileError(f"unsupported dimension {n}; only 3- and 4-vertex graphs compile")
    P, lam, P_inv, prefactor, fixture = _walk_triple(dec, opts)

    blocked: tuple[int, ...] = ()
    if n == 3:
        P, blocked = expand_dimension(P, opts.mode)
        P_inv, _ = expand_dimension(P_inv, opts.mode)
    phase = synthesize_phase_stage(lam, center=opts.center)

    inv_f = optical_factors(P_inv)
    fwd_f = optical_factors(P)

    stages: list[Stage] = []
    if blocked:
        stages.append(Blocker(blocked, "input"))
    stages += factor_stages(inv_f, ("V2", "D2", "U2"))
    stages.append(phase)
    if blocked:
        stages.append(Blocker(blocked, "Lambda"))
    stages += factor_stages(fwd_f, ("U1", "D1", "V1"))
    if blocked:
        stages.append(Blocker(blocked, "output"))
    if opts.simplify:
        stages = peephole(stages)

    total_scale = prefactor * inv_f.scale * fwd_f.scale
    provenance = {
        "n": n,
        "options": opts.to_json(),
        "fixture": fixture,
        "lambda": [float(x) for x in lam],
        "offset": phase.offset,
        "H": [[float(x) for x in row] for row in dec.H.real],
        "scales": {"prefactor": prefactor, "P_inv": inv_f.scale, "P": fwd_f.scale},
    }
    return CircuitIR(tuple(stages), float(total_scale), DIM, tuple(range(n)), provenance)


def reference_evolution(H, t: float) -> np.ndarray:
    """Dense exp(-i H t) padded with zeros to 4x4; independent of the compiler path."""
    from scipy.linalg import expm

    H = np.asarray(H, dtype=complex)
    U = np.zeros((DIM, DIM), dtype=complex)
    n = H.shape[0]
    U[:n, :n] = expm(-1j * H * t)
    return U


@dataclass
class VerifyReport:
    max_error: float
    worst_t: float
    samples: int
    tolerance: float = VERIFY_TOL
    located_stage: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def to_json(self) -> dict:
        return {"passed": self.passed, "max_error": self.max_error, "worst_t": self.worst_t,
                "samples": self.samples, "tolerance": self.tolerance,
                "located_stage": self.located_stage, "notes": self.notes}


def verify_circuit(ir: CircuitIR, H, samples: int = 32, tol: float = VERIFY_TOL) -> VerifyReport:
    """Compare the program's transfer matrix with exp(-iHt) over t in [0, 2 pi)."""
    H = np.asarray(H)
    n = H.shape[0]
    if n != ir.n_vertices:
        raise ValueError(f"circuit has {ir.n_vertices} vertex modes but the graph has {n} vertices")
    if samples < 1:
        raise ValueError("need at least one t-sample")
    worst, worst_t = 0.0, 0.0
    for t in 2 * np.pi * np.arange(samples) / samples:
        T = transfer_matrix(ir, t) * ir.total_scale
        err = phase_invariant_distance(T, reference_evolution(H, t))
        if err > worst:
            worst, worst_t = err, float(t)
    report = VerifyReport(worst, worst_t, samples, tol)
    if not report.passed:
        report.located_stage, note = locate_fault(ir, H)
        report.notes.append(note)
    return report


def locate_fault(ir: CircuitIR, H) -> tuple[int | None, str]:
    """Recompile H with the program's recorded options and find the first differing stage."""
    opts = CompileOptions(**ir.provenance.get("options", {}))
    try:
        ref = compile_evolution(eigendecompose(H), opts)
    except (CompileError, ValueError) as exc:
        return None, f"could not recompile reference program: {exc}"
    if len(ref.stages) != len(ir.stages):
        return None, "reference program has a different stage layout; fault not located"
    probe = (0.0, 1.0)
    for k, (a, b) in enumerate(zip(ir.stages, ref.stages)):
        if a.kind != b.kind or any(
                np.linalg.norm(element_matrix(a, t) - element_matrix(b, t)) > 1e-9 for t in probe):
            return k, f"stage {k} ({a.kind}{', ' + a.label if a.label else ''}) differs from the reference"
    if not np.isclose(ir.total_scale, ref.total_scale, rtol=1e-12):
        return None, "total_scale differs from the reference"
    return None, "all stages match the reference; mismatch not located"
