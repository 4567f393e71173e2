import numpy as np
import pytest

from crossover_lab.model import SystemParams

REF = SystemParams(0.1, 5.0, 0.1, 0.5)

# alpha, beta at REF frozen from a dense eigensolver run (regression fixture)
GOLDEN_ALPHA = 0.02779846910221464
GOLDEN_BETA = 0.09181083016551002


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unitary(dim, rng):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ref():
    return REF
