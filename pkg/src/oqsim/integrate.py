"""Adaptive Dormand-Prince 5(4) integration for complex state vectors.

Steps are accepted when the scaled max-norm of the embedded error estimate
is at most one, i.e. |err_i| <= atol + rtol * |y_i| componentwise. Step
sizes follow a PI controller. Output at requested times comes from the
quartic continuous extension of each accepted step, so the step sequence
does not depend on the output grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels._tableau import A, C, E, P
from .errors import ArgumentError, ConvergenceError
from .sparse import ComplexSparseMatrix

__all__ = ["SolverOptions", "DormandPrince", "integrate_adaptive", "check_tlist"]


@dataclass(frozen=True)
class SolverOptions:
    rtol: float = 1e-6
    atol: float = 1e-8
    max_internal_steps: int = 100_000
    max_step: float = np.inf
    first_step: float | None = None
    dense_cap: int = 4096  # largest superoperator dimension essolve will diagonalize

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ArgumentError("tolerances must be positive")
        if self.max_internal_steps < 1:
            raise ArgumentError("max_internal_steps must be >= 1")


def check_tlist(tlist, min_points=2):
    t = np.asarray(tlist, dtype=float)
    if t.ndim != 1 or t.size < min_points:
        raise ArgumentError(f"tlist needs at least {min_points} points")
    if np.any(np.diff(t) <= 0):
        raise ArgumentError("tlist must be strictly ascending")
    return t


class DormandPrince:
    """Single-trajectory stepper exposing accepted steps and dense output.

    ``rhs`` is either a callable ``f(t, y)`` or a ComplexSparseMatrix M for
    the autonomous linear system y' = M y, which takes the fused kernel path.
    """

    SAFETY = 0.9
    FAC_MIN = 0.2
    FAC_MAX = 10.0
    BETA = 0.04
    ALPHA = 0.2 - 0.75 * BETA

    def __init__(self, rhs, t0, y0, t_bound, opts=None):
        self.opts = opts or SolverOptions()
        self.linear = rhs if isinstance(rhs, ComplexSparseMatrix) else None
        self.fun = None if self.linear is not None else rhs
        self.t_bound = float(t_bound)
        self.nsteps = 0
        self.nfail = 0
        self._err_prev = 1e-4
        self.t = float(t0)
        self.y = np.array(y0, dtype=np.complex128)
        self.f = self._eval(self.t, self.y)
        self.h = self.opts.first_step or self._initial_step()
        self.t_old = self.t
        self.y_old = self.y
        self.K = None
        self.h_used = 0.0

    def _eval(self, t, y):
        if self.linear is not None:
            m = self.linear
            return _kernels.spmv(m.indptr, m.indices, m.data, y)
        return np.asarray(self.fun(t, y), dtype=np.complex128)

    def _rms(self, v, scale):
        return float(np.sqrt(np.mean(np.abs(v / scale) ** 2))) if v.size else 0.0

    def _initial_step(self):
        o = self.opts
        span = self.t_bound - self.t
        if span <= 0:
            return 1.0
        scale = o.atol + o.rtol * np.abs(self.y)
        d0 = self._rms(self.y, scale)
        d1 = self._rms(self.f, scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, span)
        y1 = self.y + h0 * self.f
        f1 = self._eval(self.t + h0, y1)
        d2 = self._rms(f1 - self.f, scale) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        return min(100 * h0, h1, span, o.max_step)

    def _trial(self, h):
        o = self.opts
        y = self.y
        if self.linear is not None:
            m = self.linear
            return _kernels.dp5_linear_step(m.indptr, m.indices, m.data, y,
                                            self.f, h, o.rtol, o.atol)
        t = self.t
        K = np.empty((7, y.size), dtype=np.complex128)
        K[0] = self.f
        for s in range(1, 6):
            K[s] = self._eval(t + C[s] * h, y + h * (A[s, :s] @ K[:s]))
        y_new = y + h * (A[6, :6] @ K[:6])
        K[6] = self._eval(t + h, y_new)
        scale = o.atol + o.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(h * (E @ K)) / scale)) if y.size else 0.0
        return y_new, K, err

    def step(self):
        """Take one accepted step, never passing ``t_bound``."""
        o = self.opts
        t = self.t
        remaining = self.t_bound - t
        if remaining <= 0:
            raise ArgumentError("integration already reached its end time")
        h = min(self.h, o.max_step, remaining)
        rejected = False
        while True:
            self.nsteps += 1
            if self.nsteps > o.max_internal_steps:
                raise ConvergenceError(
                    f"exceeded {o.max_internal_steps} internal steps", t)
            if h <= 10 * np.finfo(float).eps * max(abs(t), 1.0):
                raise ConvergenceError("step size underflow", t)
            y_new, K, err = self._trial(h)
            if not np.isfinite(err):
                self.nfail += 1
                h *= self.FAC_MIN
                rejected = True
                continue
            if err <= 1.0:
                if err == 0.0:
                    fac = self.FAC_MAX
                else:
                    fac = self.SAFETY * err ** -self.ALPHA * self._err_prev ** self.BETA
                    fac = min(self.FAC_MAX, max(self.FAC_MIN, fac))
                if rejected:
                    fac = min(fac, 1.0)
                self._err_prev = max(err, 1e-4)
                break
            self.nfail += 1
            h *= max(self.FAC_MIN, self.SAFETY * err ** -self.ALPHA)
            rejected = True
        self.t_old, self.y_old, self.K, self.h_used = t, self.y, K, h
        self.t = self.t_bound if h == remaining else t + h
        self.y = y_new
        self.f = K[6]
        self.h = h * fac

    def dense(self, ts):
        """States at times inside the last accepted step, shape (len(ts), n)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        theta = (ts - self.t_old) / self.h_used
        powers = np.cumprod(np.repeat(theta[None, :], 4, axis=0), axis=0)
        Q = self.K.T @ P
        return self.y_old[None, :] + self.h_used * (Q @ powers).T

    def restart(self, t, y):
        """Continue from a new state (e.g. after a quantum jump)."""
        self.t = float(t)
        self.y = np.array(y, dtype=np.complex128)
        self.f = self._eval(self.t, self.y)
        self._err_prev = 1e-4


def integrate_adaptive(f, y0, tlist, opts=None, observer=None):
    """Integrate y' = f(t, y) and report the state at every time in ``tlist``.

    ``f`` may be a ComplexSparseMatrix for a constant linear generator. If
    ``observer(k, t, y)`` is given it receives each output state and nothing
    is stored; otherwise an array of shape (len(tlist), len(y0)) is returned.
    """
    tlist = check_tlist(tlist, min_points=1)
    y0 = np.asarray(y0, dtype=np.complex128)
    out = None if observer is not None else np.empty((tlist.size, y0.size), np.complex128)

    def emit(k, y):
        if observer is None:
            out[k] = y
        else:
            observer(k, tlist[k], y)

    emit(0, y0)
    if tlist.size == 1:
        return out
    solver = DormandPrince(f, tlist[0], y0, tlist[-1], opts)
    k = 1
    while k < tlist.size:
        solver.step()
        j = int(np.searchsorted(tlist, solver.t, side="right"))
        if j > k:
            ys = solver.dense(tlist[k:j])
            if tlist[j - 1] == solver.t:
                ys[-1] = solver.y
            for i in range(k, j):
                emit(i, ys[i - k])
            k = j
    return out
