"""Lindblad master-equation evolution.

The density matrix is column-stacked, vec(rho)[i + j*N] = rho[i, j], so
vec(A rho B) = (B^T kron A) vec(rho). With that layout

    L = -i (I kron H - H^T kron I)
        + sum_n [ conj(C_n) kron C_n - 1/2 I kron C_n^dag C_n
                  - 1/2 (C_n^dag C_n)^T kron I ].
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .errors import (ArgumentError, CapacityError, ConditioningError,
                     DimensionError, DomainError, QTypeError, UnsupportedError)
from .integrate import SolverOptions, check_tlist, integrate_adaptive
from .metrics import ket2dm
from .qobj import Qobj
from .sparse import ComplexSparseMatrix
from .timedep import TimeDependentOperator, as_time_dependent

__all__ = [
    "liouvillian", "build_liouvillian", "odesolve", "essolve",
    "ExpectationTable", "vec", "unvec", "COND_LIMIT", "density_diagnostics",
]

COND_LIMIT = 1e12


def vec(rho):
    return rho.full().ravel(order="F")


def unvec(v, dims):
    n = int(round(np.sqrt(v.size)))
    return Qobj(np.asarray(v).reshape((n, n), order="F"), dims)


def _fmt(z):
    if isinstance(z, complex) or np.iscomplexobj(z):
        z = complex(z)
        return f"{z.real:.17g}{z.imag:+.17g}j"
    return f"{float(z):.17g}"


@dataclass
class ExpectationTable:
    """Solver output: one expectation series per observable, or the states."""

    tlist: np.ndarray
    expect: list = field(default_factory=list)
    names: list = field(default_factory=list)
    states: list = field(default_factory=list)
    final_state: Qobj | None = None
    solver: str = "me"

    def column(self, key):
        if isinstance(key, str):
            key = self.names.index(key)
        return self.expect[key]

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + list(self.names))
        for k, t in enumerate(self.tlist):
            w.writerow([_fmt(float(t))] + [_fmt(col[k]) for col in self.expect])


def _hamiltonian_super(Hs, n):
    eye = sp.identity(n, dtype=complex, format="csr")
    return -1j * (sp.kron(eye, Hs) - sp.kron(Hs.T, eye))


def _dissipator_super(cs, n):
    eye = sp.identity(n, dtype=complex, format="csr")
    cdc = (cs.conj().T @ cs).tocsr()
    return sp.kron(cs.conj(), cs) - 0.5 * sp.kron(eye, cdc) - 0.5 * sp.kron(cdc.T, eye)


def _check_c_ops(c_ops, dims):
    for k, c in enumerate(c_ops):
        if not isinstance(c, Qobj) or not c.isoper:
            raise QTypeError(f"collapse operator {k} must be an operator")
        if c.dims != dims:
            raise DimensionError(f"collapse operator {k} dims {c.dims} differ from {dims}")


def liouvillian(H, c_ops=()):
    """Superoperator acting on column-stacked density matrices.

    ``H`` may be None for a purely dissipative generator; then the dims come
    from the first collapse operator.
    """
    c_ops = list(c_ops)
    if H is None:
        if not c_ops:
            raise ArgumentError("need a Hamiltonian or at least one collapse operator")
        dims = c_ops[0].dims
    else:
        if not isinstance(H, Qobj) or not H.isoper:
            raise QTypeError("Hamiltonian must be an operator")
        if not H.isherm:
            raise DomainError("Hamiltonian is not Hermitian")
        dims = H.dims
    _check_c_ops(c_ops, dims)
    n = c_ops[0].shape[0] if H is None else H.shape[0]
    L = sp.csr_matrix((n * n, n * n), dtype=complex)
    if H is not None:
        L = L + _hamiltonian_super(H.data.to_scipy(), n)
    for c in c_ops:
        L = L + _dissipator_super(c.data.to_scipy(), n)
    return Qobj(L.tocsr(), dims=[[dims[0], dims[1]], [dims[0], dims[1]]])


build_liouvillian = liouvillian


def _observables(e_ops, names):
    e_ops = list(e_ops)
    for k, op in enumerate(e_ops):
        if not isinstance(op, Qobj) or not op.isoper:
            raise QTypeError(f"observable {k} must be an operator")
    if names is None:
        names = [f"e{k}" for k in range(len(e_ops))]
    if len(names) != len(e_ops):
        raise ArgumentError("one name per observable")
    return e_ops, list(names)


def _trace_weights(op):
    # tr(O rho) = sum over stored O[r, c] times vec(rho)[r*N + c]
    coo = op.data.to_scipy().tocoo()
    n = op.shape[0]
    return coo.row.astype(np.int64) * n + coo.col, coo.data.astype(complex)


class _Recorder:
    def __init__(self, tlist, e_ops, dims, mode):
        self.e_ops = e_ops
        self.mode = mode
        self.dims = dims
        self.herm = [op.isherm for op in e_ops]
        self.values = [np.zeros(tlist.size, float if h else complex) for h in self.herm]
        self.states = []
        self.last = None
        if mode == "dm":
            self.weights = [_trace_weights(op) for op in e_ops]
        else:
            self.mats = [op.data for op in e_ops]

    def __call__(self, k, t, y):
        self.last = y
        for i in range(len(self.e_ops)):
            if self.mode == "dm":
                idx, w = self.weights[i]
                val = np.dot(w, y[idx])
            else:
                val = np.vdot(y, self.mats[i].matvec(y))
            self.values[i][k] = val.real if self.herm[i] else val
        if not self.e_ops:
            self.states.append(self._qobj(y))

    def _qobj(self, y):
        if self.mode == "dm":
            return unvec(y.copy(), self.dims)
        return Qobj(y.copy(), [self.dims[0], [1] * len(self.dims[0])])


def _initial(state0, dims, as_dm):
    if not isinstance(state0, Qobj):
        raise QTypeError("initial state must be a quantum object")
    if state0.isbra:
        state0 = state0.dag()
    if state0.isket:
        if state0.dims[0] != dims[0]:
            raise DimensionError(f"state dims {state0.dims} do not match {dims}")
        return vec(ket2dm(state0)) if as_dm else state0.full().ravel()
    if state0.isoper:
        if state0.dims != dims:
            raise DimensionError(f"state dims {state0.dims} do not match {dims}")
        return vec(state0)
    raise QTypeError(f"cannot evolve a {state0.type}")


def _generator(H, c_ops, mode, n):
    """Either a constant sparse matrix or a callable f(t, y)."""
    if isinstance(H, Qobj):
        if not H.isherm:
            raise DomainError("Hamiltonian is not Hermitian")
        if mode == "ket":
            return ComplexSparseMatrix.from_scipy(-1j * H.data.to_scipy())
        return liouvillian(H, c_ops).data

    diss = None
    if c_ops:
        diss = sum((_dissipator_super(c.data.to_scipy(), n) for c in c_ops),
                   sp.csr_matrix((n * n, n * n), dtype=complex)).tocsr()

    if H.evaluator is not None:
        def f(t, y):
            Hs = H(t).data.to_scipy()
            if mode == "ket":
                return -1j * (Hs @ y)
            rho = y.reshape((n, n), order="F")
            comm = Hs @ rho - (Hs.T @ rho.T).T
            out = (-1j * comm).ravel(order="F")
            return out + diss @ y if diss is not None else out
        return f

    pieces = []
    if H.constant is not None:
        pieces.append((None, H.constant))
    pieces += list(H.terms)
    mats = []
    for coeff, op in pieces:
        Hs = op.data.to_scipy()
        m = -1j * Hs if mode == "ket" else _hamiltonian_super(Hs, n)
        mats.append((coeff, m.tocsr()))
    if diss is not None:
        mats.append((None, diss))
    params = H.params

    def f(t, y):
        out = np.zeros_like(y)
        for coeff, m in mats:
            term = m @ y
            out += term if coeff is None else complex(coeff(t, params)) * term
        return out
    return f


def odesolve(H, state0, tlist, c_ops=(), e_ops=(), params=None, options=None, names=None):
    """Evolve ``state0`` over ``tlist`` and return an ExpectationTable.

    With no collapse operators and a ket input the Schrodinger equation is
    integrated on the state vector; otherwise the state is promoted to a
    density matrix and the Lindblad equation is integrated. ``H`` may be a
    Qobj, a TimeDependentOperator, or a callable ``H(t, params)``.
    With no observables the table carries the states at every time.
    """
    tlist = check_tlist(tlist)
    H = as_time_dependent(H, params)
    dims = H.dims
    if len(dims) != 2 or dims[0] != dims[1]:
        raise DimensionError(f"Hamiltonian dims {dims} are not square")
    c_ops = list(c_ops)
    _check_c_ops(c_ops, dims)
    n = int(np.prod(dims[0]))
    is_ket = isinstance(state0, Qobj) and state0.type in ("ket", "bra")
    mode = "ket" if is_ket and not c_ops else "dm"
    y0 = _initial(state0, dims, mode == "dm")
    e_ops, names = _observables(e_ops, names)
    gen = _generator(H, c_ops, mode, n)
    rec = _Recorder(tlist, e_ops, dims, mode)
    integrate_adaptive(gen, y0, tlist, options or SolverOptions(), observer=rec)
    return ExpectationTable(tlist, rec.values, names, rec.states,
                            rec._qobj(rec.last), solver="me")


def essolve(H, state0, tlist, c_ops=(), e_ops=(), options=None, names=None):
    """Same contract as odesolve, solved by diagonalizing the generator.

    The state is expanded in the eigenvectors of L (or of H for unitary
    ket evolution) and each mode is propagated with its exponential.
    """
    if isinstance(H, TimeDependentOperator) or not isinstance(H, Qobj):
        raise UnsupportedError("essolve needs a time-independent Hamiltonian")
    opts = options or SolverOptions()
    tlist = check_tlist(tlist)
    dims = H.dims
    c_ops = list(c_ops)
    _check_c_ops(c_ops, dims)
    if not H.isherm:
        raise DomainError("Hamiltonian is not Hermitian")
    is_ket = isinstance(state0, Qobj) and state0.type in ("ket", "bra")
    mode = "ket" if is_ket and not c_ops else "dm"
    n = int(np.prod(dims[0]))
    size = n if mode == "ket" else n * n
    if size > opts.dense_cap:
        raise CapacityError(f"generator dimension {size} exceeds dense cap {opts.dense_cap}")
    y0 = _initial(state0, dims, mode == "dm")
    e_ops, names = _observables(e_ops, names)
    rec = _Recorder(tlist, e_ops, dims, mode)
    dt = tlist - tlist[0]
    if mode == "ket":
        lam, V = la.eigh(H.full())
        c = V.conj().T @ y0
        rates = -1j * lam
    else:
        lam, V = la.eig(liouvillian(H, c_ops).full())
        cond = np.linalg.cond(V)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise ConditioningError(
                f"Liouvillian eigenvector matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}")
        c = la.solve(V, y0)
        rates = lam
    for k, tau in enumerate(dt):
        rec(k, tlist[k], V @ (np.exp(rates * tau) * c))
    return ExpectationTable(tlist, rec.values, names, rec.states,
                            rec._qobj(rec.last), solver="es")


def density_diagnostics(states):
    """Worst-case trace error, Hermiticity deviation and smallest eigenvalue
    over a sequence of density matrices (kets are promoted)."""
    tr_err = herm = 0.0
    min_eig = np.inf
    for s in states:
        m = ket2dm(s).full() if s.type in ("ket", "bra") else s.full()
        tr_err = max(tr_err, abs(np.trace(m) - 1))
        herm = max(herm, float(np.max(np.abs(m - m.conj().T))))
        min_eig = min(min_eig, float(la.eigvalsh(0.5 * (m + m.conj().T))[0]))
    return {"max_trace_error": float(tr_err), "max_hermiticity_deviation": herm,
            "min_eigenvalue": float(min_eig)}
