from pathlib import Path

import numpy as np
import pytest
from scipy.stats import ortho_group, unitary_group

DATA = Path(__file__).resolve().parents[1] / "src" / "dirwalk" / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"


def haar_unitary(rng, n=4):
    return unitary_group.rvs(n, random_state=rng)


def random_pseudo_hermitian(rng, n=4, cond=4.0):
    """P diag(lam) P^-1 with integer lam in [0, 4] and cond(P) <= cond."""
    Q1, Q2 = ortho_group.rvs(n, random_state=rng), ortho_group.rvs(n, random_state=rng)
    s = rng.uniform(1.0, cond, n)
    s[0], s[-1] = 1.0, cond
    P = Q1 @ np.diag(s) @ Q2
    lam = rng.integers(0, 5, n).astype(float)
    return P @ np.diag(lam) @ np.linalg.inv(P), lam


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
