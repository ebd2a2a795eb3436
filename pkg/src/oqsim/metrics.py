"""Functions on states: expectation values, fidelity, distances, entropy."""
from __future__ import annotations

import numpy as np
import scipy.linalg as la

from .errors import DimensionError, DomainError, QTypeError, ShapeError
from .qobj import Qobj, _psd_sqrt

__all__ = ["expect", "fidelity", "tracedist", "entropy_vn", "ket2dm"]

_IMAG_TOL = 1e-10
_ENTROPY_FLOOR = 1e-15


def ket2dm(psi):
    """|psi><psi| from a ket (or the ket of a bra)."""
    if not isinstance(psi, Qobj) or psi.type not in ("ket", "bra"):
        raise QTypeError("ket2dm expects a ket or bra")
    if psi.isbra:
        psi = psi.dag()
    return psi * psi.dag()


def _expect_one(op, state):
    if state.isbra:
        state = state.dag()
    if state.isket:
        if op.dims[1] != state.dims[0]:
            raise DimensionError(f"operator dims {op.dims} vs state dims {state.dims}")
        v = state.full().ravel()
        val = complex(np.vdot(v, op.data.matvec(v)))
    elif state.isoper:
        if op.dims[1] != state.dims[0] or op.dims[0] != state.dims[1]:
            raise DimensionError(f"operator dims {op.dims} vs state dims {state.dims}")
        # tr(O rho) = sum_ij O_ij rho_ji
        val = complex(op.data.to_scipy().multiply(state.data.to_scipy().T).sum())
    else:
        raise QTypeError(f"cannot take an expectation value in a {state.type}")
    if op.isherm:
        if abs(val.imag) > _IMAG_TOL * (1 + abs(val.real)):
            raise DomainError(
                f"Hermitian expectation value has imaginary part {val.imag:.3e}")
        return val.real
    return val


def expect(op, state):
    """<O> in a ket (<psi|O|psi>) or density operator (tr O rho).

    A list of states returns an array; Hermitian operators give real values.
    """
    if isinstance(state, Qobj):
        return _expect_one(op, state)
    vals = [_expect_one(op, s) for s in state]
    return np.array(vals, dtype=float if op.isherm else complex)


def _as_dm(q):
    return ket2dm(q) if q.type in ("ket", "bra") else q


def _check_pair(a, b):
    if a.dims[0] != b.dims[0]:
        raise DimensionError(f"dims mismatch: {a.dims} vs {b.dims}")


def fidelity(a, b):
    """F = tr sqrt(sqrt(a) b sqrt(a)); equals |<psi|phi>| for pure states."""
    _check_pair(a, b)
    if a.isket or b.isket:
        psi, other = (a, b) if a.isket else (b, a)
        v = psi.full().ravel()
        if other.isket:
            f = abs(np.vdot(v, other.full().ravel()))
        else:
            f = np.sqrt(max(np.vdot(v, other.full() @ v).real, 0.0))
        return float(min(f, 1.0) if f < 1 + 1e-10 else f)
    ra, rb = _as_dm(a).full(), _as_dm(b).full()
    sa = _psd_sqrt(ra)
    m = sa @ rb @ sa
    lam = la.eigvalsh(0.5 * (m + m.conj().T))
    f = float(np.sum(np.sqrt(np.clip(lam, 0.0, None))))
    return min(f, 1.0) if f < 1 + 1e-10 else f


def tracedist(a, b):
    """Half the trace norm of the difference of two density operators."""
    _check_pair(a, b)
    d = _as_dm(a).full() - _as_dm(b).full()
    return float(0.5 * np.sum(np.abs(la.eigvalsh(0.5 * (d + d.conj().T)))))


def entropy_vn(rho, base=np.e):
    """Von Neumann entropy -sum(l log l), natural log by default."""
    if rho.type in ("ket", "bra"):
        return 0.0
    if rho.shape[0] != rho.shape[1]:
        raise ShapeError("entropy requires a square density operator")
    m = rho.full()
    lam = la.eigvalsh(0.5 * (m + m.conj().T))
    lam = lam[lam > _ENTROPY_FLOOR]
    s = float(-np.sum(lam * np.log(lam)))
    return s / np.log(base) if base != np.e else s
