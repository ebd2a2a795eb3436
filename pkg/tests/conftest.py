import numpy as np
import pytest

from oqsim import _kernels
from oqsim.qobj import Qobj

BACKENDS = ["numpy"] + (["numba"] if _kernels.numba_backend is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every kernel call through one backend for the test's duration."""
    be = getattr(_kernels, f"{request.param}_backend")
    for name in ("spmv", "dp5_linear_step", "wigner_clenshaw"):
        monkeypatch.setattr(_kernels, name, getattr(be, name))
    return request.param


def rand_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def rand_herm(rng, n, dims=None):
    a = rand_matrix(rng, n)
    return Qobj(0.5 * (a + a.conj().T), dims)


def rand_ket(rng, n, dims=None):
    v = rand_matrix(rng, n, 1)
    return Qobj(v / np.linalg.norm(v), dims)


def rand_dm(rng, n, rank=None):
    a = rand_matrix(rng, n, rank or n)
    rho = a @ a.conj().T
    return Qobj(rho / np.trace(rho))
