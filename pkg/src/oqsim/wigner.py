"""Wigner quasi-probability function of a single bosonic mode.

Convention: phase-space point alpha = (x + i p)/sqrt(2), hbar = 1, and
the function integrates to one over dx dp (vacuum peak 1/pi).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ArgumentError, DimensionError
from .metrics import ket2dm
from .qobj import Qobj

__all__ = ["PhaseSpaceGrid", "WignerMap", "wigner", "wigner_map"]


@dataclass(frozen=True)
class PhaseSpaceGrid:
    xvec: np.ndarray
    yvec: np.ndarray

    def __post_init__(self):
        for name in ("xvec", "yvec"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.ndim != 1 or v.size < 2 or np.any(np.diff(v) <= 0):
                raise ArgumentError(f"{name} needs >= 2 strictly ascending samples")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class WignerMap:
    grid: PhaseSpaceGrid
    values: np.ndarray  # values[i, j] = W(x_i, y_j)

    def integral(self):
        return float(np.trapezoid(np.trapezoid(self.values, self.grid.yvec, axis=1),
                                  self.grid.xvec))

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "W"])
        for i, x in enumerate(self.grid.xvec):
            for j, y in enumerate(self.grid.yvec):
                w.writerow([f"{x:.17g}", f"{y:.17g}", f"{self.values[i, j]:.17g}"])


def _single_mode_dm(state):
    if not isinstance(state, Qobj):
        raise ArgumentError("wigner expects a quantum object")
    rho = ket2dm(state) if state.type in ("ket", "bra") else state
    if rho.type != "oper" or len(rho.dims[0]) != 1 or rho.dims[0] != rho.dims[1]:
        raise DimensionError(
            f"wigner needs a single-mode state, got dims {state.dims}; ptrace first")
    return rho.full()


def wigner(state, xvec, yvec=None, g=np.sqrt(2)):
    """W(x_i, y_j) on the grid, as an array of shape (len(xvec), len(yvec)).

    The Laguerre series over density-matrix diagonals is summed with a
    Clenshaw recurrence, which stays stable for large Fock cutoffs.
    """
    yvec = xvec if yvec is None else yvec
    grid = PhaseSpaceGrid(np.asarray(xvec, float), np.asarray(yvec, float))
    rho = _single_mode_dm(state)
    m = rho.shape[0]
    X, Y = np.meshgrid(grid.xvec, grid.yvec, indexing="ij")
    a2 = (g * (X + 1j * Y)).ravel()
    b = np.abs(a2) ** 2
    rho2 = np.ascontiguousarray(rho * (2.0 - np.eye(m)), dtype=np.complex128)
    series = _kernels.wigner_clenshaw(rho2, np.ascontiguousarray(a2), b)
    w = series.real * np.exp(-0.5 * b) * (g * g / (2 * np.pi))
    return w.reshape(X.shape)


def wigner_map(state, grid):
    return WignerMap(grid, wigner(state, grid.xvec, grid.yvec))
