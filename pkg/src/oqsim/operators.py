"""Standard operators: bosonic ladder operators, Pauli matrices, spin-j."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import ArgumentError
from .qobj import Qobj, tensor

__all__ = [
    "qeye", "destroy", "create", "num", "displace", "squeeze", "squeez",
    "sigmax", "sigmay", "sigmaz", "sigmap", "sigmam", "jmat",
    "OperatorSpec", "make_operator",
]


def _check_n(N):
    if int(N) != N or N < 1:
        raise ArgumentError(f"Hilbert-space dimension must be a positive integer, got {N!r}")
    return int(N)


def qeye(N):
    """Identity operator; a list of dimensions gives the composite identity."""
    if isinstance(N, (list, tuple)):
        return tensor([qeye(n) for n in N])
    N = _check_n(N)
    return Qobj(sp.identity(N, format="csr"))


def destroy(N):
    """Annihilation operator truncated to N Fock states: a|n> = sqrt(n)|n-1>."""
    N = _check_n(N)
    return Qobj(sp.diags(np.sqrt(np.arange(1, N)), 1, shape=(N, N), format="csr"))


def create(N):
    return destroy(N).dag()


def num(N):
    N = _check_n(N)
    return Qobj(sp.diags(np.arange(N, dtype=float), 0, format="csr"))


def displace(N, alpha):
    """exp(alpha a^dagger - conj(alpha) a) on the truncated space."""
    a = destroy(N)
    return (alpha * a.dag() - np.conj(alpha) * a).expm()


def squeeze(N, z):
    """exp((conj(z) a^2 - z a^dagger^2) / 2) on the truncated space."""
    a = destroy(N)
    return (0.5 * (np.conj(z) * (a * a) - z * (a.dag() * a.dag()))).expm()


squeez = squeeze


def sigmax():
    return Qobj([[0, 1], [1, 0]])


def sigmay():
    return Qobj([[0, -1j], [1j, 0]])


def sigmaz():
    return Qobj([[1, 0], [0, -1]])


def sigmap():
    return Qobj([[0, 1], [0, 0]])


def sigmam():
    return Qobj([[0, 0], [1, 0]])


def _spin_value(j):
    try:
        frac = Fraction(j).limit_denominator(2)
    except (TypeError, ValueError):
        raise ArgumentError(f"invalid spin {j!r}") from None
    if frac < 0 or abs(float(frac) - float(j)) > 1e-12 or frac.denominator not in (1, 2):
        raise ArgumentError(f"spin must be a non-negative half-integer, got {j!r}")
    return frac


def jmat(j, which=None):
    """Spin-j operators in the |j, m> basis ordered m = j, j-1, ..., -j.

    ``which`` is one of 'x', 'y', 'z', '+', '-'; with no argument the
    triple (Jx, Jy, Jz) is returned.
    """
    jf = _spin_value(j)
    dim = int(2 * jf + 1)
    if dim == 1:
        raise ArgumentError("spin 0 has no nontrivial operators")
    jv = float(jf)
    m = jv - np.arange(dim)
    # <m+1|J+|m> = sqrt(j(j+1) - m(m+1)) sits at (k-1, k) for m = j - k
    up = np.sqrt(jv * (jv + 1) - m[1:] * (m[1:] + 1))
    jp = Qobj(sp.diags(up, 1, shape=(dim, dim), format="csr"))
    if which is None:
        return jmat(j, "x"), jmat(j, "y"), jmat(j, "z")
    if which == "+":
        return jp
    if which == "-":
        return jp.dag()
    if which == "x":
        return 0.5 * (jp + jp.dag())
    if which == "y":
        return -0.5j * (jp - jp.dag())
    if which == "z":
        return Qobj(sp.diags(m, 0, format="csr"))
    raise ArgumentError(f"unknown spin component {which!r}")


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    N: int = 2
    param: complex = 0.0
    j: float = 0.5
    component: str = "z"


def make_operator(spec):
    kind = spec.kind
    if kind == "identity":
        return qeye(spec.N)
    if kind in ("destroy", "create", "num"):
        return {"destroy": destroy, "create": create, "num": num}[kind](spec.N)
    if kind == "displace":
        return displace(spec.N, spec.param)
    if kind == "squeeze":
        return squeeze(spec.N, spec.param)
    paulis = {"sigmax": sigmax, "sigmay": sigmay, "sigmaz": sigmaz,
              "sigmap": sigmap, "sigmam": sigmam}
    if kind in paulis:
        return paulis[kind]()
    if kind == "jmat":
        return jmat(spec.j, spec.component)
    raise ArgumentError(f"unknown operator kind {kind!r}")
