"""Acceptance checks, one per criterion; prints a PASS/FAIL line for each.

Run with pytest, or directly: python tests/test_acceptance.py
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import haar_unitary, random_pseudo_hermitian  # noqa: E402
from dirwalk import fixtures  # noqa: E402
from dirwalk.compiler import PAPER_FIXTURE, GENERIC_PAD, CompileOptions, compile_evolution, verify_circuit  # noqa: E402
from dirwalk.decompose import csd4, s4_matrix, svd  # noqa: E402
from dirwalk.graph import hamiltonian, pagerank  # noqa: E402
from dirwalk.jones import sample_counts  # noqa: E402
from dirwalk.spectral import ctqw_centrality, eigendecompose, evolve_state, norm_bounds  # noqa: E402

SEED = 7


def c1_hamiltonian_fixtures():
    t0 = time.perf_counter()
    H3 = hamiltonian(fixtures.THREE_VERTEX)
    H4 = hamiltonian(fixtures.FOUR_VERTEX)
    ms = 1e3 * (time.perf_counter() - t0)
    want3 = np.array([[1, -1, -1], [-1, 1, -1], [0, 0, 2]])
    want4 = np.array([[1, 0, -1, -1], [0, 1, -1, -1], [0, -1, 2, 0], [-1, 0, 0, 2]])
    ok = np.array_equal(H3, want3) and np.array_equal(H4, want4) and ms < 50
    return ok, f"exact match, {ms:.2f} ms"


def c2_spectra():
    l3 = eigendecompose(fixtures.H3).lam
    l4 = eigendecompose(fixtures.H4).lam
    err = max(np.abs(l3 - [0, 2, 2]).max(), np.abs(l4 - [0, 1, 2, 3]).max())
    return err <= 1e-9, f"max eigenvalue error {err:.1e}"


def quadrature(H, samples=10_000):
    n = H.shape[0]
    psi = np.ones(n, dtype=complex)
    step = expm(-1j * H * 2 * np.pi / samples)
    acc = np.zeros(n)
    for _ in range(samples):
        acc += np.abs(psi) ** 2
        psi = step @ psi
    return acc / acc.sum()


def c3_ctqw_centrality():
    worst_closed = worst_quad = 0.0
    groups_ok = True
    for H, exact in ((fixtures.H3, np.array([5, 5, 2]) / 12), (fixtures.H4, np.array([17, 17, 5, 5]) / 44)):
        report = ctqw_centrality(eigendecompose(H))
        worst_closed = max(worst_closed, np.abs(report.scores - exact).max())
        worst_quad = max(worst_quad, np.abs(report.scores - quadrature(H)).max())
        # vertices 1 and 2 rank above the rest
        groups_ok &= report.ranking[0] == (0, 1)
    ok = worst_closed <= 1e-9 and worst_quad <= 1e-6 and groups_ok
    return ok, f"closed-form error {worst_closed:.1e}, quadrature error {worst_quad:.1e}, top group {{1,2}}: {groups_ok}"


def c4_degeneracy_breaking():
    dampings = [1e-3, 0.15, 0.5, 0.85, 0.99, 1.0]
    spread = max(np.ptp(pagerank(fixtures.FOUR_VERTEX, d).scores) for d in dampings)
    single = all(len(pagerank(fixtures.FOUR_VERTEX, d).ranking) == 1 for d in dampings)
    ctqw_groups = ctqw_centrality(eigendecompose(fixtures.H4)).ranking
    ok = spread <= 1e-9 and single and len(ctqw_groups) == 2
    return ok, f"pagerank spread {spread:.1e} over dampings {dampings}; ctqw groups {len(ctqw_groups)}"


def c5_compiler_soundness():
    rng = np.random.default_rng(SEED)
    cases = [(fixtures.H3, PAPER_FIXTURE), (fixtures.H4, PAPER_FIXTURE),
             (fixtures.H3, GENERIC_PAD), (fixtures.H4, GENERIC_PAD)]
    cases += [(random_pseudo_hermitian(rng)[0], GENERIC_PAD) for _ in range(100)]
    t0 = time.perf_counter()
    worst, failures = 0.0, 0
    for H, mode in cases:
        report = verify_circuit(compile_evolution(eigendecompose(H), CompileOptions(mode=mode)), H, samples=32)
        worst = max(worst, report.max_error)
        failures += not report.passed
    seconds = time.perf_counter() - t0
    ok = failures == 0 and worst <= 1e-8 and seconds < 10
    return ok, f"{len(cases)} programs, max error {worst:.1e}, {failures} failures, {seconds:.1f} s"


def c6_factorization_properties():
    rng = np.random.default_rng(SEED)
    csd_err = max(np.linalg.norm(csd4(U).product() - U) for U in (haar_unitary(rng) for _ in range(1000)))
    svd_err = 0.0
    for _ in range(1000):
        M = rng.normal(size=(4, 4))
        svd_err = max(svd_err, np.linalg.norm(svd(M).product() - M) / np.linalg.norm(M))
    zero_slots = [(0, 1), (0, 3), (1, 0), (1, 2), (2, 1), (2, 3), (3, 0), (3, 2)]
    exact_zeros = all(csd4(haar_unitary(rng)).S4[i, j] == 0.0 for _ in range(100) for i, j in zero_slots)
    exact_zeros &= all(s4_matrix(a, b)[i, j] == 0.0 for a, b in rng.uniform(0, np.pi / 2, (100, 2))
                       for i, j in zero_slots)
    ok = csd_err <= 1e-10 and svd_err <= 1e-10 and exact_zeros
    return ok, f"CSD error {csd_err:.1e}, SVD relative error {svd_err:.1e}, exact S4 zeros: {exact_zeros}"


def c7_numeric_factor_fixture():
    f = svd(fixtures.FOUR_VERTEX_DEC.P)
    scale = round(f.scale, 4)
    ratios = sorted(round(float(x), 4) for x in f.d)
    ok = scale == 3.2566 and ratios == sorted([1.0, 0.7026, 0.5657, 0.2684])
    return ok, f"scale {scale}, singular value ratios {sorted(ratios, reverse=True)}"


def refined_max(f, ts, values):
    """Maximum of f over [ts[0], ts[-1]]: grid peaks polished by a bounded 1-D search."""
    best = values.max()
    peaks = np.flatnonzero((values[1:-1] >= values[:-2]) & (values[1:-1] >= values[2:])) + 1
    for k in peaks[np.argsort(values[peaks])[-5:]]:
        lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
        res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return best


def c8_norm_oscillation():
    ts = np.round(np.arange(0, 50 + 1e-9, 0.01), 10)
    half = len(ts) // 2
    details, ok = [], True
    for name, H in (("H3", fixtures.H3), ("H4", fixtures.H4)):
        dec = eigendecompose(H)
        psi0 = np.ones(dec.n) / np.sqrt(dec.n)

        def norm2(t):
            return np.linalg.norm(evolve_state(dec, psi0, t)) ** 2

        norms = np.array([norm2(t) for t in ts])
        lo, hi = norm_bounds(dec, psi0)
        bounded = lo - 1e-12 <= norms.min() and norms.max() <= hi + 1e-12
        # grid samples catch each periodic peak at a different offset, so the
        # halves are compared through the function's maxima, located on the grid
        first = refined_max(norm2, ts[:half + 1], norms[:half + 1])
        second = refined_max(norm2, ts[half:], norms[half:])
        grid_gap = norms[half:].max() - norms[:half].max()
        steady = second <= first + 1e-9
        ok &= bounded and steady
        details.append(f"{name} |psi|^2 in [{norms.min():.4f}, {norms.max():.4f}] within [{lo:.4f}, {hi:.4f}], "
                       f"half maxima differ by {second - first:.1e} (raw grid samples {grid_gap:.1e})")
    return ok, "; ".join(details)


def c9_shot_noise():
    counts = sample_counts(np.ones(10_000), 600, seed=SEED)
    mean, var = counts.mean(), counts.var(ddof=1)
    sigma = np.sqrt(600 / counts.size)
    ok = abs(mean - 600) <= 3 * sigma and 0.9 <= var / mean <= 1.1
    return ok, f"mean {mean:.2f} (3 sigma = {3 * sigma:.2f}), variance/mean {var / mean:.3f}"


CRITERIA = [
    (1, "Hamiltonian fixtures", c1_hamiltonian_fixtures),
    (2, "Spectra", c2_spectra),
    (3, "CTQW centrality", c3_ctqw_centrality),
    (4, "Degeneracy breaking", c4_degeneracy_breaking),
    (5, "Compiler soundness", c5_compiler_soundness),
    (6, "CSD/SVD property suites", c6_factorization_properties),
    (7, "Numeric factor fixture", c7_numeric_factor_fixture),
    (8, "Norm oscillation", c8_norm_oscillation),
    (9, "Shot-noise statistics", c9_shot_noise),
]


def report_line(number, title, check):
    ok, detail = check()
    return ok, f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} - {detail}"


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, line = report_line(number, title, check)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [report_line(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
