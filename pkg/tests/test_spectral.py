import numpy as np
import sympy
import pytest
from scipy.linalg import expm

from dirwalk import fixtures
from dirwalk.graph import DirectedGraph, hamiltonian
from dirwalk.spectral import (COMPLEX_SPECTRUM, DEFECTIVE, HERMITIAN, PSEUDO_HERMITIAN,
                              NotEvolvableError, SpectralDecomposition, ctqw_centrality,
                              eigendecompose, evolution_operator, evolve_state, norm_bounds,
                              time_average_numeric, time_averaged_probabilities)

from conftest import random_pseudo_hermitian


def quadrature_average(H, psi0, samples=10_000, period=2 * np.pi):
    """Average of |exp(-iHt) psi0|^2 over one period, by dense exponentials."""
    step = expm(-1j * H * period / samples)
    psi = np.asarray(psi0, dtype=complex)
    acc = np.zeros(len(psi))
    for _ in range(samples):
        acc += np.abs(psi) ** 2
        psi = step @ psi
    return acc / samples


def test_fixture_spectra():
    d3 = eigendecompose(fixtures.H3)
    d4 = eigendecompose(fixtures.H4)
    assert d3.classification == d4.classification == PSEUDO_HERMITIAN
    np.testing.assert_allclose(d3.lam, [0, 2, 2], atol=1e-9)
    np.testing.assert_allclose(d4.lam, [0, 1, 2, 3], atol=1e-9)
    for d in (d3, d4):
        assert d.residual < 1e-12
        np.testing.assert_allclose(d.P @ d.P_inv, np.eye(d.n), atol=1e-12)
        np.testing.assert_allclose((d.P * d.lam) @ d.P_inv, d.H, atol=1e-12)


def test_hand_diagonalizations_agree():
    for fx in (fixtures.THREE_VERTEX_DEC, fixtures.FOUR_VERTEX_DEC):
        H = fx.prefactor * (fx.P * fx.lam) @ fx.P_inv
        np.testing.assert_allclose(fx.prefactor * fx.P @ fx.P_inv, np.eye(len(fx.lam)), atol=1e-12)
        np.testing.assert_allclose(H, fx.H, atol=1e-12)


def test_eigenvectors_canonical():
    d = eigendecompose(fixtures.H4)
    np.testing.assert_allclose(np.linalg.norm(d.P, axis=0), 1.0)
    for k in range(d.n):
        v = d.P[:, k]
        j = int(np.argmax(np.abs(v) > np.abs(v).max() - 1e-12))
        assert abs(v[j].imag) < 1e-15 and v[j].real > 0


def test_hermitian_branch():
    # undirected path: symmetric Laplacian
    g = DirectedGraph(3, {(0, 1), (1, 0), (1, 2), (2, 1)})
    d = eigendecompose(hamiltonian(g))
    assert d.classification == HERMITIAN
    np.testing.assert_allclose(d.lam, [0, 1, 3], atol=1e-12)
    np.testing.assert_allclose(d.P_inv, d.P.conj().T)


def test_complex_spectrum_names_eigenvalues():
    cycle = DirectedGraph(3, {(0, 1), (1, 2), (2, 0)})
    d = eigendecompose(hamiltonian(cycle))
    assert d.classification == COMPLEX_SPECTRUM
    assert not d.evolvable
    bad = d.offending_eigenvalues()
    np.testing.assert_allclose(sorted(bad.imag), [-np.sqrt(3) / 2, np.sqrt(3) / 2], atol=1e-9)
    with pytest.raises(NotEvolvableError, match=r"1\.5\+0\.866025i"):
        evolution_operator(d, 1.0)
    assert eigendecompose([[0, 1], [-1, 0]]).classification == COMPLEX_SPECTRUM


def test_defective():
    assert eigendecompose([[1, 1], [0, 1]]).classification == DEFECTIVE
    chain = DirectedGraph(3, {(0, 1), (1, 2)})  # Jordan block at eigenvalue 1
    d = eigendecompose(hamiltonian(chain))
    assert d.classification == DEFECTIVE
    assert len(d.offending_eigenvalues()) == 2
    with pytest.raises(NotEvolvableError, match="defective"):
        ctqw_centrality(d)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0)), [[np.nan]]])
def test_bad_input(bad):
    with pytest.raises(ValueError):
        eigendecompose(bad)


def test_zero_hamiltonian():
    d = eigendecompose(np.zeros((3, 3)))
    assert d.classification == HERMITIAN
    np.testing.assert_allclose(evolution_operator(d, 2.7), np.eye(3))


def test_ctqw_closed_forms():
    np.testing.assert_allclose(ctqw_centrality(eigendecompose(fixtures.H3)).scores,
                               [5 / 12, 5 / 12, 2 / 12], atol=1e-12)
    r4 = ctqw_centrality(eigendecompose(fixtures.H4))
    np.testing.assert_allclose(r4.scores, np.array([17, 17, 5, 5]) / 44, atol=1e-12)
    assert r4.ranking == ((0, 1), (2, 3))


@pytest.mark.parametrize("H", [fixtures.H3, fixtures.H4])
def test_time_average_against_quadrature(H):
    d = eigendecompose(H)
    psi0 = np.ones(d.n)
    oracle = quadrature_average(H, psi0)
    np.testing.assert_allclose(time_averaged_probabilities(d, psi0), oracle, atol=1e-9)
    np.testing.assert_allclose(time_average_numeric(d, psi0, 2 * np.pi, 64), oracle, atol=1e-9)


def test_degenerate_cluster_interferes():
    # lambda = 2 appears twice for H3; the cross term inside that eigenspace must survive
    d = eigendecompose(fixtures.H3)
    psi0 = np.array([1.0, 0.3, -0.5])
    c = d.coefficients(psi0)
    naive = (np.abs(d.P) ** 2) @ (np.abs(c) ** 2)
    exact = time_averaged_probabilities(d, psi0)
    assert not np.allclose(naive, exact)
    np.testing.assert_allclose(exact, quadrature_average(fixtures.H3, psi0, 2000), atol=1e-9)


def test_evolve_matches_expm(rng):
    for _ in range(20):
        H, _ = random_pseudo_hermitian(rng)
        d = eigendecompose(H)
        psi0 = rng.normal(size=4) + 1j * rng.normal(size=4)
        t = rng.uniform(0, 10)
        np.testing.assert_allclose(evolve_state(d, psi0, t), expm(-1j * H * t) @ psi0, atol=1e-9)


def test_norm_bounds_hold(rng):
    for H in (fixtures.H3, fixtures.H4, random_pseudo_hermitian(rng)[0]):
        d = eigendecompose(H)
        lo, hi = norm_bounds(d, np.ones(d.n))
        ts = np.linspace(0, 20, 400)
        norms = [np.linalg.norm(evolve_state(d, np.ones(d.n), t)) ** 2 for t in ts]
        assert lo - 1e-9 <= min(norms) and max(norms) <= hi + 1e-9


def test_state_validation():
    d = eigendecompose(fixtures.H3)
    with pytest.raises(ValueError):
        d.coefficients(np.ones(4))
    with pytest.raises(ValueError):
        ctqw_centrality(d, np.zeros(3))
    with pytest.raises(ValueError):
        time_average_numeric(d, np.ones(3), 2 * np.pi, 1)


def test_json_roundtrip():
    d = eigendecompose(fixtures.H4)
    back = SpectralDecomposition.from_json(d.to_json())
    assert back.classification == d.classification
    np.testing.assert_array_equal(back.P, d.P)
    np.testing.assert_array_equal(back.lam, d.lam)
    np.testing.assert_array_equal(back.P_inv, d.P_inv)


def exact_class(H):
    """Classification in exact arithmetic: real-root count and eigenspace dimensions."""
    M = sympy.Matrix(np.asarray(H, dtype=int).tolist())
    x = sympy.Symbol("x")
    poly = sympy.Poly(M.charpoly(x).as_expr(), x)
    roots = poly.real_roots()  # repeated according to multiplicity
    if len(roots) < M.rows:
        return "complex"
    for root in set(roots):
        if M.rows - (M - root * sympy.eye(M.rows)).rank() < roots.count(root):
            return "defective"
    return "ok"


_COARSE = {HERMITIAN: "ok", PSEUDO_HERMITIAN: "ok", COMPLEX_SPECTRUM: "complex", DEFECTIVE: "defective"}


def all_graphs(n, stride=1):
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for mask in range(0, 2 ** len(pairs), stride):
        yield DirectedGraph(n, {p for k, p in enumerate(pairs) if mask >> k & 1})


@pytest.mark.parametrize("n, stride", [(3, 1), (4, 29)])
def test_classification_matches_exact_arithmetic(n, stride):
    for g in all_graphs(n, stride):
        H = hamiltonian(g)
        assert _COARSE[eigendecompose(H).classification] == exact_class(H), sorted(g.edges)
