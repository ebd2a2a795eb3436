import numpy as np
import pytest

from oqsim.errors import DimensionError
from oqsim.sparse import ComplexSparseMatrix

from conftest import rand_matrix


def sparse_pair(rng, n, m, density=0.3):
    a = rand_matrix(rng, n, m)
    a[rng.random((n, m)) > density] = 0
    return a, ComplexSparseMatrix.from_dense(a)


@pytest.mark.parametrize("seed", range(10))
def test_ops_match_dense(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    a, A = sparse_pair(rng, n, n)
    b, B = sparse_pair(rng, n, n)
    c, C = sparse_pair(rng, 3, 2)
    x = rand_matrix(rng, n, 1).ravel()

    assert np.allclose(A.add(B).to_dense(), a + b)
    assert np.allclose(A.add(B, alpha=-2.5j).to_dense(), a - 2.5j * b)
    assert np.allclose(A.matmul(B).to_dense(), a @ b)
    assert np.allclose(A.kron(C).to_dense(), np.kron(a, c))
    assert np.allclose(A.adjoint().to_dense(), a.conj().T)
    assert np.allclose(A.transpose().to_dense(), a.T)
    assert np.allclose(A.matvec(x), a @ x)
    assert np.isclose(A.trace(), np.trace(a))
    assert np.isclose(A.hermitian_deviation(), np.max(np.abs(a - a.conj().T), initial=0))


@pytest.mark.parametrize("seed", range(5))
def test_matvec_backends_agree(seed, backend):
    rng = np.random.default_rng(seed)
    a, A = sparse_pair(rng, 30, 30, density=0.1)
    x = rand_matrix(rng, 30, 1).ravel()
    assert np.allclose(A.matvec(x), a @ x, atol=1e-13)


def test_add_cancels_to_empty():
    rng = np.random.default_rng(0)
    a, A = sparse_pair(rng, 5, 5)
    D = A.add(A, alpha=-1.0)
    assert D.nnz == 0
    assert D.shape == (5, 5)


def test_prune_drops_small_entries():
    A = ComplexSparseMatrix.from_dense(np.array([[1.0, 1e-14], [0.0, 2.0]]))
    assert A.nnz == 2
    assert ComplexSparseMatrix.from_dense(np.array([[1.0, 1e-3]]), prune=1e-2).nnz == 1


def test_allclose_and_identity():
    eye = ComplexSparseMatrix.identity(4)
    assert eye.allclose(ComplexSparseMatrix.from_dense(np.eye(4)))
    assert not eye.allclose(ComplexSparseMatrix.identity(4, scale=2.0))
    assert eye.hermitian_deviation() == 0.0


def test_shape_mismatch_raises():
    A = ComplexSparseMatrix.identity(2)
    B = ComplexSparseMatrix.identity(3)
    with pytest.raises(DimensionError):
        A.add(B)
    with pytest.raises(DimensionError):
        A.matmul(B)
