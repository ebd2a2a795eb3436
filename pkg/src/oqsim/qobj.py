"""The quantum object: a sparse complex matrix plus tensor-structure metadata.

A single class represents kets, bras, operators and superoperators. The
object type and Hermiticity are inferred from the data and dimensions at
construction; instances are immutable and every operation returns a new
object.
"""
from __future__ import annotations

import json
import numbers
from functools import reduce

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (ArgumentError, CapacityError, DimensionError, DomainError,
                     NormalizationError, QTypeError, ShapeError)
from .sparse import PRUNE_TOL, ComplexSparseMatrix

HERM_TOL = 1e-12
DENSE_CAP = 4096
SQRTM_TOL = 1e-10
_PHASE_TOL = 1e-10
_DEGEN_TOL = 1e-10

__all__ = ["Qobj", "QuantumObject", "tensor", "ptrace", "tidyup",
           "HERM_TOL", "DENSE_CAP"]


def _prod(xs):
    return int(reduce(lambda a, b: a * b, xs, 1))


def _is_nested(dimlist):
    return len(dimlist) > 0 and isinstance(dimlist[0], (list, tuple))


def _normalize_dims(dims):
    out = []
    for part in dims:
        if _is_nested(part):
            out.append([[int(x) for x in sub] for sub in part])
        else:
            out.append([int(x) for x in part])
    return out


def _check_dims(dims, shape):
    if len(dims) != 2:
        raise DimensionError(f"dims must be a pair of lists, got {dims!r}")
    for side, n in zip(dims, shape):
        flat = [x for sub in side for x in sub] if _is_nested(side) else side
        if not flat or any(x < 1 for x in flat):
            raise DimensionError(f"dims entries must be positive, got {dims!r}")
        if _is_nested(side):
            size = _prod(_prod(sub) for sub in side)
        else:
            size = _prod(side)
        if size != n:
            raise DimensionError(f"dims {dims!r} inconsistent with shape {shape}")


def _infer_type(dims, shape):
    if _is_nested(dims[0]):
        return "super"
    rows, cols = shape
    if cols == 1 and rows > 1:
        return "ket"
    if rows == 1 and cols > 1:
        return "bra"
    return "oper"


def _as_matrix(data, prune):
    if isinstance(data, ComplexSparseMatrix):
        return data.prune(prune) if prune else data
    if sp.issparse(data):
        return ComplexSparseMatrix.from_scipy(data, prune=prune)
    return ComplexSparseMatrix.from_dense(np.asarray(data), prune=prune)


class Qobj:
    """Quantum state, operator or superoperator.

    Parameters
    ----------
    data : array_like, scipy sparse matrix or ComplexSparseMatrix
        Matrix entries. A 1-d sequence becomes a column (ket).
    dims : pair of lists, optional
        Row-space and column-space subsystem dimensions, e.g.
        ``[[N, 2], [N, 2]]`` for a cavity-qubit operator. Defaults to a
        single factor per side.
    prune : float or None
        Entries with magnitude below this threshold are dropped.
    """

    __array_priority__ = 100
    __slots__ = ("data", "dims", "shape", "type", "isherm")

    def __init__(self, data=None, dims=None, *, prune=PRUNE_TOL):
        if isinstance(data, Qobj):
            mat = data.data.prune(prune) if prune else data.data
            dims = data.dims if dims is None else dims
        else:
            mat = _as_matrix([[0]] if data is None else data, prune)
        shape = mat.shape
        if dims is None:
            dims = [[shape[0]], [shape[1]]]
        dims = _normalize_dims(dims)
        _check_dims(dims, shape)
        self.data = mat
        self.dims = dims
        self.shape = shape
        self.type = _infer_type(dims, shape)
        if shape[0] == shape[1]:
            self.isherm = mat.hermitian_deviation() <= HERM_TOL
        else:
            self.isherm = False

    # type predicates --------------------------------------------------

    @property
    def isket(self):
        return self.type == "ket"

    @property
    def isbra(self):
        return self.type == "bra"

    @property
    def isoper(self):
        return self.type == "oper"

    @property
    def issuper(self):
        return self.type == "super"

    def _square(self, what):
        if self.shape[0] != self.shape[1]:
            raise ShapeError(f"{what} requires a square object, got shape {self.shape}")

    def _same_kind(self, mat, dims=None):
        return Qobj(mat, self.dims if dims is None else dims)

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Qobj):
            if other.dims != self.dims:
                raise DimensionError(f"cannot add dims {self.dims} and {other.dims}")
            return self._same_kind(self.data.add(other.data))
        if isinstance(other, numbers.Number):
            if other == 0:
                return self
            if self.shape[0] != self.shape[1] or self.type in ("ket", "bra"):
                raise QTypeError(f"cannot add a scalar to a {self.type}")
            eye = ComplexSparseMatrix.identity(self.shape[0], complex(other))
            return self._same_kind(self.data.add(eye))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._same_kind(self.data.scale(-1.0))

    def __sub__(self, other):
        if isinstance(other, (Qobj, numbers.Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return self._same_kind(self.data.scale(complex(other)))
        if not isinstance(other, Qobj):
            return NotImplemented
        if (self.isket and other.isket) or (self.isbra and other.isbra):
            raise QTypeError(f"product {self.type} x {other.type} is undefined")
        if self.dims[1] != other.dims[0]:
            raise DimensionError(
                f"cannot multiply dims {self.dims} by {other.dims}")
        return Qobj(self.data.matmul(other.data), [self.dims[0], other.dims[1]])

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return self._same_kind(self.data.scale(complex(other)))
        return NotImplemented

    def __truediv__(self, other):
        if not isinstance(other, numbers.Number):
            return NotImplemented
        if other == 0:
            raise ArgumentError("division of a quantum object by zero")
        return self._same_kind(self.data.scale(1.0 / complex(other)))

    def __pow__(self, n):
        if not isinstance(n, numbers.Integral) or n < 0:
            raise ArgumentError("only non-negative integer powers are supported")
        self._square("power")
        out = Qobj(ComplexSparseMatrix.identity(self.shape[0]), self.dims)
        for _ in range(int(n)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Qobj):
            return NotImplemented
        return self.dims == other.dims and self.data.allclose(other.data)

    __hash__ = None

    # Table 1 methods --------------------------------------------------

    def dag(self):
        """Conjugate transpose."""
        return Qobj(self.data.adjoint(), [self.dims[1], self.dims[0]])

    def conj(self):
        return Qobj(self.data.conj(), self.dims)

    def trans(self):
        return Qobj(self.data.transpose(), [self.dims[1], self.dims[0]])

    def tr(self):
        self._square("trace")
        return self.data.trace()

    def norm(self):
        """Euclidean norm for kets/bras, trace norm for operators."""
        if self.type in ("ket", "bra"):
            return float(np.sqrt(np.sum(np.abs(self.data.data) ** 2)))
        self._cap("norm")
        m = self.full()
        if self.isherm:
            return float(np.sum(np.abs(la.eigvalsh(m))))
        return float(np.sum(la.svd(m, compute_uv=False)))

    def unit(self):
        n = self.norm()
        if n == 0:
            raise NormalizationError("cannot normalize a zero object")
        return self / n

    def diag(self):
        d = self.data.diagonal()
        return d.real if np.all(d.imag == 0) else d

    def full(self):
        return self.data.to_dense()

    def _cap(self, what, cap=DENSE_CAP):
        if self.shape[0] > cap:
            raise CapacityError(
                f"{what} densifies a {self.shape[0]}-row object (cap {cap})")

    def expm(self):
        """Matrix exponential (scaling and squaring with a Pade approximant)."""
        self._square("expm")
        self._cap("expm")
        return Qobj(la.expm(self.full()), self.dims)

    def sqrtm(self):
        """Principal square root of a Hermitian positive-semidefinite operator."""
        self._square("sqrtm")
        self._cap("sqrtm")
        if not self.isherm:
            raise DomainError("sqrtm requires a Hermitian operator")
        return Qobj(_psd_sqrt(self.full()), self.dims)

    def eigenstates(self, sparse=False, eigvals=0, max_dim=DENSE_CAP):
        """Eigenvalues (ascending) and the corresponding eigenkets.

        Hermitian input gives real eigenvalues and an orthonormal set. Each
        eigenvector is phase-fixed so its first nonzero component is real
        and positive. ``sparse=True`` with ``eigvals=k`` uses Lanczos for
        the k lowest states of a Hermitian operator.
        """
        self._square("eigenstates")
        n = self.shape[0]
        if sparse and self.isherm and 0 < eigvals < n - 1:
            vals, vecs = spla.eigsh(self.data.to_scipy(), k=eigvals, which="SA")
            order = np.argsort(vals)
            vals, vecs = vals[order], vecs[:, order]
        else:
            self._cap("eigenstates", max_dim)
            if self.isherm:
                vals, vecs = la.eigh(self.full())
            else:
                vals, vecs = la.eig(self.full())
                order = np.lexsort((vals.imag, vals.real))
                vals, vecs = vals[order], vecs[:, order]
            if eigvals:
                vals, vecs = vals[:eigvals], vecs[:, :eigvals]
        vecs = _fix_phases(vecs)
        vals, vecs = _order_degenerate(vals, vecs)
        ket_dims = [self.dims[0], [1] * len(self.dims[0])]
        kets = [Qobj(vecs[:, k], ket_dims) for k in range(vecs.shape[1])]
        return vals, kets

    def eigenenergies(self):
        self._square("eigenenergies")
        self._cap("eigenenergies")
        if self.isherm:
            return la.eigvalsh(self.full())
        vals = la.eigvals(self.full())
        return vals[np.lexsort((vals.imag, vals.real))]

    def ptrace(self, sel):
        return ptrace(self, sel)

    def tidyup(self, tol=PRUNE_TOL):
        return tidyup(self, tol)

    # display / serialization -----------------------------------------

    def __str__(self):
        head = (f"Quantum object: dims = {self.dims}, shape = {list(self.shape)}, "
                f"type = {self.type}"
                + (f", isHerm = {self.isherm}" if self.type in ("oper", "super") else ""))
        return head + "\nQobj data =\n" + str(self.full())

    def __repr__(self):
        return self.__str__()

    def to_dict(self):
        """Debug dump: dense row-major entries as (re, im) pairs."""
        m = self.full()
        return {
            "dims": self.dims,
            "shape": list(self.shape),
            "type": self.type,
            "isherm": bool(self.isherm),
            "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        arr = np.array([[complex(re, im) for re, im in row] for row in d["data"]])
        return cls(arr, d["dims"])


QuantumObject = Qobj


def _psd_sqrt(m, tol=SQRTM_TOL):
    m = 0.5 * (m + m.conj().T)
    vals, vecs = la.eigh(m)
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    if vals.size and vals.min() < -tol * scale:
        raise DomainError(f"sqrtm of an operator with eigenvalue {vals.min():.3e} < 0")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root) @ vecs.conj().T


def _fix_phases(vecs):
    vecs = np.array(vecs, dtype=np.complex128, copy=True)
    for k in range(vecs.shape[1]):
        v = vecs[:, k]
        nz = np.flatnonzero(np.abs(v) > _PHASE_TOL)
        if nz.size:
            c = v[nz[0]]
            vecs[:, k] = v * (abs(c) / c)
    return vecs


def _order_degenerate(vals, vecs):
    """Within groups of equal eigenvalues, order vectors lexicographically
    (descending) by their phase-fixed components."""
    n = len(vals)
    order = list(range(n))
    i = 0
    while i < n:
        j = i + 1
        while j < n and abs(vals[j] - vals[i]) <= _DEGEN_TOL * max(1.0, abs(vals[i])):
            j += 1
        if j - i > 1:
            def key(k):
                v = np.round(vecs[:, k], 10)
                return tuple(x for z in v for x in (-z.real, -z.imag))
            order[i:j] = sorted(order[i:j], key=key)
        i = j
    return vals[order], vecs[:, order]


def tensor(*args):
    """Kronecker product of kets, bras or operators, in argument order."""
    if len(args) == 1 and isinstance(args[0], (list, tuple)):
        args = tuple(args[0])
    if not args:
        raise ArgumentError("tensor requires at least one object")
    if not all(isinstance(q, Qobj) for q in args):
        raise QTypeError("tensor arguments must be quantum objects")
    kinds = {q.type for q in args}
    if len(kinds) != 1 or kinds == {"super"}:
        raise QTypeError(f"tensor of mixed or unsupported types {sorted(kinds)}")
    mat = args[0].data
    rows = list(args[0].dims[0])
    cols = list(args[0].dims[1])
    for q in args[1:]:
        mat = mat.kron(q.data)
        rows += q.dims[0]
        cols += q.dims[1]
    return Qobj(mat, [rows, cols])


def ptrace(q, sel):
    """Reduced density operator over the subsystems listed in ``sel``.

    ``sel`` names the subsystems to keep; they appear in their original
    relative order. Kets and bras are promoted to density operators first.
    """
    if not isinstance(q, Qobj):
        raise QTypeError("ptrace expects a quantum object")
    if isinstance(sel, numbers.Integral):
        sel = [int(sel)]
    sel = [int(s) for s in sel]
    if q.type == "super":
        raise QTypeError("ptrace is undefined for superoperators")
    if q.isbra:
        q = q.dag()
    dims = q.dims[0]
    nsys = len(dims)
    if not sel or len(set(sel)) != len(sel) or any(s < 0 or s >= nsys for s in sel):
        raise ArgumentError(f"invalid subsystem selection {sel} for {nsys} subsystems")
    if q.isoper and q.dims[0] != q.dims[1]:
        raise DimensionError("ptrace needs an operator with matching row/column dims")
    keep = sorted(sel)
    rest = [k for k in range(nsys) if k not in keep]
    dk = _prod(dims[k] for k in keep)
    dr = _prod(dims[k] for k in rest)
    new_dims = [[dims[k] for k in keep], [dims[k] for k in keep]]

    if q.isket:
        psi = q.full().reshape(dims)
        m = np.transpose(psi, keep + rest).reshape(dk, dr)
        return Qobj(m @ m.conj().T, new_dims)

    # operator: accumulate nonzeros whose traced-out indices coincide
    coo = q.data.to_scipy().tocoo()
    r_idx = np.unravel_index(coo.row, dims)
    c_idx = np.unravel_index(coo.col, dims)
    mask = np.ones(coo.nnz, dtype=bool)
    for k in rest:
        mask &= r_idx[k] == c_idx[k]
    keep_dims = [dims[k] for k in keep]
    if keep:
        rr = np.ravel_multi_index([r_idx[k][mask] for k in keep], keep_dims)
        cc = np.ravel_multi_index([c_idx[k][mask] for k in keep], keep_dims)
    else:
        rr = cc = np.zeros(int(mask.sum()), dtype=np.int64)
    out = sp.coo_array((coo.data[mask], (rr, cc)), shape=(dk, dk)).tocsr()
    return Qobj(out, new_dims)


def tidyup(q, tol=PRUNE_TOL):
    """Drop stored entries with magnitude below ``tol``."""
    if tol < 0:
        raise ArgumentError("tidyup tolerance must be non-negative")
    return Qobj(q.data.prune(tol), q.dims, prune=None)
