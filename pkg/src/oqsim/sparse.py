"""Compressed-row complex sparse matrices.

Storage is the usual CSR triplet with sorted column indices per row. Matrix
vector products go through the accelerated kernels; structural operations
(products, Kronecker products, sums) are delegated to scipy.sparse and the
result is brought back to canonical form.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import DimensionError, ShapeError

PRUNE_TOL = 1e-12


def _keys(m):
    rows = np.repeat(np.arange(m.shape[0], dtype=np.int64), np.diff(m.indptr))
    return rows * m.shape[1] + m.indices


def _merge(ka, va, kb, vb):
    """Sum two (linear index, value) lists; returns sorted unique keys and sums."""
    keys = np.concatenate((ka, kb))
    vals = np.concatenate((va, vb))
    uniq, inv = np.unique(keys, return_inverse=True)
    out = np.zeros(uniq.shape[0], dtype=np.complex128)
    np.add.at(out, inv, vals)
    return uniq, out


def _frozen(a):
    a.setflags(write=False)
    return a


class ComplexSparseMatrix:
    """Immutable complex CSR matrix.

    Invariants: ``indptr`` is monotone with ``indptr[-1] == len(data)``;
    column indices strictly increase within each row.
    """

    __slots__ = ("shape", "indptr", "indices", "data", "_sp")

    def __init__(self, indptr, indices, data, shape):
        self.shape = (int(shape[0]), int(shape[1]))
        self.indptr = _frozen(np.ascontiguousarray(indptr, dtype=np.int64))
        self.indices = _frozen(np.ascontiguousarray(indices, dtype=np.int64))
        self.data = _frozen(np.ascontiguousarray(data, dtype=np.complex128))
        self._sp = None
        if self.indptr.shape[0] != self.shape[0] + 1:
            raise ShapeError("row offset array does not match row count")
        if self.indptr[-1] != self.data.shape[0] or self.indices.shape != self.data.shape:
            raise ShapeError("inconsistent CSR arrays")

    # construction -----------------------------------------------------

    @classmethod
    def from_scipy(cls, m, prune=PRUNE_TOL):
        m = sp.csr_array(m, dtype=np.complex128, copy=True)
        m.sum_duplicates()
        m.sort_indices()
        if prune is not None and m.nnz:
            keep = np.abs(m.data) >= prune
            if not keep.all():
                m.data[~keep] = 0
                m.eliminate_zeros()
        else:
            m.eliminate_zeros()
        return cls(m.indptr, m.indices, m.data, m.shape)

    @classmethod
    def from_dense(cls, arr, prune=PRUNE_TOL):
        arr = np.asarray(arr, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got ndim={arr.ndim}")
        return cls.from_scipy(sp.csr_array(arr), prune=prune)

    @classmethod
    def from_triplets(cls, rows, cols, values, shape, prune=PRUNE_TOL):
        m = sp.coo_array((np.asarray(values, dtype=np.complex128),
                          (np.asarray(rows), np.asarray(cols))), shape=shape)
        return cls.from_scipy(m.tocsr(), prune=prune)

    @classmethod
    def identity(cls, n, scale=1.0):
        idx = np.arange(n)
        return cls(np.arange(n + 1), idx, np.full(n, scale, dtype=np.complex128), (n, n))

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape[0] + 1), np.zeros(0), np.zeros(0), shape)

    # conversion -------------------------------------------------------

    def to_scipy(self):
        if self._sp is None:
            self._sp = sp.csr_array((self.data, self.indices, self.indptr), shape=self.shape)
        return self._sp

    def to_dense(self):
        return self.to_scipy().toarray()

    @property
    def nnz(self):
        return int(self.data.shape[0])

    # element-wise structure ------------------------------------------

    def prune(self, tol=PRUNE_TOL):
        if tol <= 0 or not self.nnz:
            return self
        if np.all(np.abs(self.data) >= tol):
            return self
        return ComplexSparseMatrix.from_scipy(self.to_scipy().copy(), prune=tol)

    def adjoint(self):
        return ComplexSparseMatrix.from_scipy(self.to_scipy().conj().T, prune=None)

    def transpose(self):
        return ComplexSparseMatrix.from_scipy(self.to_scipy().T, prune=None)

    def conj(self):
        return ComplexSparseMatrix(self.indptr, self.indices, self.data.conj(), self.shape)

    def diagonal(self):
        return self.to_scipy().diagonal()

    def trace(self):
        if self.shape[0] != self.shape[1]:
            raise ShapeError(f"trace of non-square {self.shape} matrix")
        return complex(self.diagonal().sum())

    def max_abs(self):
        return float(np.abs(self.data).max()) if self.nnz else 0.0

    # algebra ----------------------------------------------------------

    def scale(self, c, prune=PRUNE_TOL):
        if c == 0:
            return ComplexSparseMatrix.zeros(self.shape)
        out = ComplexSparseMatrix(self.indptr, self.indices, self.data * c, self.shape)
        return out.prune(prune) if prune else out

    def add(self, other, alpha=1.0, prune=PRUNE_TOL):
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape} matrices")
        if (self.indptr.shape == other.indptr.shape and self.indices.shape == other.indices.shape
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)):
            # same sparsity pattern: add values in place of a structural merge
            out = ComplexSparseMatrix(self.indptr, self.indices,
                                      self.data + alpha * other.data, self.shape)
            return out.prune(prune) if prune else out
        keys, vals = _merge(_keys(self), self.data, _keys(other), alpha * other.data)
        if prune:
            keep = np.abs(vals) >= prune
            keys, vals = keys[keep], vals[keep]
        ncols = self.shape[1]
        rows = keys // ncols
        indptr = np.zeros(self.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.shape[0]), out=indptr[1:])
        return ComplexSparseMatrix(indptr, keys - rows * ncols, vals, self.shape)

    def matmul(self, other, prune=PRUNE_TOL):
        if self.shape[1] != other.shape[0]:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        return ComplexSparseMatrix.from_scipy(
            self.to_scipy() @ other.to_scipy(), prune=prune)

    def kron(self, other, prune=PRUNE_TOL):
        return ComplexSparseMatrix.from_scipy(
            sp.kron(self.to_scipy(), other.to_scipy(), format="csr"), prune=prune)

    def matvec(self, x):
        x = np.ascontiguousarray(x, dtype=np.complex128)
        if x.shape != (self.shape[1],):
            raise DimensionError(f"vector of length {x.shape} for {self.shape} matrix")
        return _kernels.spmv(self.indptr, self.indices, self.data, x)

    def hermitian_deviation(self):
        """max |A - A^dagger| over all entries."""
        if self.shape[0] != self.shape[1]:
            return np.inf
        if not self.nnz:
            return 0.0
        n = self.shape[0]
        k = _keys(self)
        kt = self.indices * n + k // n
        _, d = _merge(k, self.data, kt, -self.data.conj())
        return float(np.abs(d).max())

    def allclose(self, other, atol=PRUNE_TOL):
        if self.shape != other.shape:
            return False
        _, d = _merge(_keys(self), self.data, _keys(other), -other.data)
        return (float(np.abs(d).max()) if d.size else 0.0) <= atol

    def __repr__(self):
        return f"ComplexSparseMatrix(shape={self.shape}, nnz={self.nnz})"
