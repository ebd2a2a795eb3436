"""Time-dependent operators H(t) = H0 + sum_k f_k(t, params) H_k."""
from __future__ import annotations

from .errors import DimensionError, QTypeError
from .qobj import Qobj

__all__ = ["TimeDependentOperator", "as_time_dependent"]


class TimeDependentOperator:
    """Either a constant part plus coefficient-weighted terms, or an opaque
    ``evaluator(t, params) -> Qobj`` whose output dims never change.

    Coefficients are called as ``coeff(t, params)`` and may return real or
    complex numbers.
    """

    def __init__(self, constant=None, terms=(), evaluator=None, params=None):
        self.params = {} if params is None else params
        self.evaluator = evaluator
        self.constant = constant
        self.terms = [(c, op) for c, op in terms]
        if evaluator is not None:
            if constant is not None or self.terms:
                raise QTypeError("give either an evaluator or constant/terms, not both")
            probe = evaluator(0.0, self.params)
            if not isinstance(probe, Qobj):
                raise QTypeError("evaluator must return a quantum object")
            self.dims = probe.dims
            return
        parts = ([constant] if constant is not None else []) + [op for _, op in self.terms]
        if not parts:
            raise QTypeError("time-dependent operator has no parts")
        self.dims = parts[0].dims
        for p in parts:
            if not isinstance(p, Qobj):
                raise QTypeError("terms must be quantum objects")
            if p.dims != self.dims:
                raise DimensionError(f"term dims {p.dims} differ from {self.dims}")

    @property
    def shape(self):
        return self(0.0).shape if self.evaluator else (self.constant or self.terms[0][1]).shape

    def __call__(self, t):
        if self.evaluator is not None:
            out = self.evaluator(t, self.params)
            if out.dims != self.dims:
                raise DimensionError(f"evaluator dims changed to {out.dims} at t={t}")
            return out
        total = self.constant if self.constant is not None else 0 * self.terms[0][1]
        for coeff, op in self.terms:
            total = total + complex(coeff(t, self.params)) * op
        return total


def as_time_dependent(H, params=None):
    """Wrap a plain callable ``H(t, params)`` (the callback style) if needed."""
    if isinstance(H, (Qobj, TimeDependentOperator)):
        return H
    if callable(H):
        return TimeDependentOperator(evaluator=H, params=params)
    raise QTypeError(f"cannot use {type(H).__name__} as a Hamiltonian")
