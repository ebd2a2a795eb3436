"""Standard states: Fock, coherent and thermal."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ArgumentError
from .qobj import Qobj

__all__ = [
    "basis", "fock", "fock_dm", "coherent", "coherent_dm", "thermal_dm",
    "TruncationWarning", "StateSpec", "make_state",
]

TAIL_WARN = 1e-6


class TruncationWarning(UserWarning):
    """A state lost significant probability mass to Fock-space truncation."""


def _check(N, n=0):
    if int(N) != N or N < 1:
        raise ArgumentError(f"Hilbert-space dimension must be a positive integer, got {N!r}")
    if int(n) != n or not 0 <= n < N:
        raise ArgumentError(f"basis index {n!r} outside 0..{int(N) - 1}")
    return int(N), int(n)


def basis(N, n=0):
    N, n = _check(N, n)
    v = np.zeros(N, dtype=complex)
    v[n] = 1.0
    return Qobj(v)


fock = basis


def fock_dm(N, n=0):
    N, n = _check(N, n)
    m = np.zeros((N, N), dtype=complex)
    m[n, n] = 1.0
    return Qobj(m)


def _coherent_amplitudes(N, alpha):
    n = np.arange(N)
    if alpha == 0:
        amp = np.zeros(N, dtype=complex)
        amp[0] = 1.0
        return amp
    # e^{-|a|^2/2} a^n / sqrt(n!) evaluated in log space
    logmag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(alpha))


def coherent(N, alpha):
    """Coherent state from the analytic Fock amplitudes, renormalized after
    truncation. Emits TruncationWarning when the lost tail exceeds 1e-6."""
    N, _ = _check(N)
    amp = _coherent_amplitudes(N, complex(alpha))
    mass = float(np.sum(np.abs(amp) ** 2))
    tail = 1.0 - mass
    if tail > TAIL_WARN:
        warnings.warn(
            f"coherent state |alpha|^2={abs(alpha) ** 2:.4g} truncated to N={N}: "
            f"tail mass {tail:.3g} discarded", TruncationWarning, stacklevel=2)
    return Qobj(amp / np.sqrt(mass))


def coherent_dm(N, alpha):
    psi = coherent(N, alpha)
    return psi * psi.dag()


def thermal_dm(N, n_mean):
    """Diagonal thermal state with rho_nn proportional to (n/(1+n))^k."""
    N, _ = _check(N)
    if n_mean < 0:
        raise ArgumentError("mean occupation must be non-negative")
    if n_mean == 0:
        return fock_dm(N, 0)
    k = np.arange(N)
    w = np.exp(k * (np.log(n_mean) - np.log1p(n_mean)))
    return Qobj(np.diag(w / w.sum()))


@dataclass(frozen=True)
class StateSpec:
    kind: str
    N: int
    index: int = 0
    alpha: complex = 0.0
    n_mean: float = 0.0


def make_state(spec):
    if spec.kind == "basis":
        return basis(spec.N, spec.index)
    if spec.kind == "fock_dm":
        return fock_dm(spec.N, spec.index)
    if spec.kind == "coherent":
        return coherent(spec.N, spec.alpha)
    if spec.kind == "coherent_dm":
        return coherent_dm(spec.N, spec.alpha)
    if spec.kind == "thermal_dm":
        return thermal_dm(spec.N, spec.n_mean)
    raise ArgumentError(f"unknown state kind {spec.kind!r}")
