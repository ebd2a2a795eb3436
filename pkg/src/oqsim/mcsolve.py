"""Monte-Carlo quantum-jump trajectories.

Each trajectory integrates the unnormalized state under
H_eff = H - (i/2) sum_n C_n^dag C_n. A uniform number r is drawn; when the
squared norm <psi|psi> decays to r the jump time is located by bisection on
the dense output, a channel is picked with weights <psi|C_n^dag C_n|psi>,
the collapsed state is renormalized and a new r is drawn.

Trajectory i draws from its own PCG64 stream seeded by splitmix64 of the
master seed, so any trajectory can be replayed alone and ensemble averages
do not depend on how trajectories are spread over worker processes.
"""
from __future__ import annotations

import json
import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import (ArgumentError, ConvergenceError, DimensionError, DomainError,
                     JumpError, QTypeError, TrajectoryError)
from .integrate import DormandPrince, SolverOptions, check_tlist
from .mesolve import ExpectationTable, _check_c_ops, _observables
from .qobj import Qobj
from .sparse import ComplexSparseMatrix
from .timedep import TimeDependentOperator, as_time_dependent

__all__ = [
    "EffectiveHamiltonian", "build_effective_hamiltonian", "TrajectoryConfig",
    "TrajectoryRecord", "EnsembleResult", "jump_probabilities", "select_collapse",
    "apply_collapse", "run_trajectory", "mcsolve", "splitmix64", "trajectory_seed",
]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x):
    z = (int(x) + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def trajectory_seed(master_seed, index):
    return splitmix64((int(master_seed) + int(index) * _GOLDEN) & _MASK)


@dataclass(frozen=True)
class TrajectoryConfig:
    ntraj: int = 500
    master_seed: int = 0
    norm_root_tol: float = 1e-6
    opts: SolverOptions = field(default_factory=SolverOptions)
    workers: int | None = None  # None: one per available core

    def __post_init__(self):
        if int(self.ntraj) != self.ntraj or self.ntraj < 1:
            raise ArgumentError(f"ntraj must be a positive integer, got {self.ntraj!r}")
        if not self.norm_root_tol > 0:
            raise ArgumentError("norm_root_tol must be positive")
        if self.workers is not None and self.workers < 1:
            raise ArgumentError("workers must be >= 1")


class EffectiveHamiltonian:
    """H_eff = hermitian_part - (i/2) anti_hermitian_sum, parts kept separately."""

    def __init__(self, H, c_ops=()):
        self.hermitian_part = H
        self.c_ops = list(c_ops)
        dims = H.dims
        _check_c_ops(self.c_ops, dims)
        if isinstance(H, Qobj):
            if not H.isoper:
                raise QTypeError("Hamiltonian must be an operator")
            if not H.isherm:
                raise DomainError("Hamiltonian is not Hermitian")
        self.dims = dims
        n = int(np.prod(dims[0]))
        S = sp.csr_matrix((n, n), dtype=complex)
        for c in self.c_ops:
            cs = c.data.to_scipy()
            S = S + cs.conj().T @ cs
        self.anti_hermitian_sum = Qobj(S.tocsr(), dims)
        self._prepared = None

    def prepared(self):
        """(generator, C_n matrices, C_n^dag C_n matrices), built once."""
        if self._prepared is None:
            self._prepared = (self.generator(), [c.data for c in self.c_ops],
                              [(c.dag() * c).data for c in self.c_ops])
        return self._prepared

    @property
    def time_dependent(self):
        return isinstance(self.hermitian_part, TimeDependentOperator)

    def operator(self, t=0.0):
        H = self.hermitian_part(t) if self.time_dependent else self.hermitian_part
        return H - 0.5j * self.anti_hermitian_sum

    def generator(self):
        """d psi/dt = -i H_eff psi, as a sparse matrix or a callable."""
        S = self.anti_hermitian_sum.data.to_scipy()
        if not self.time_dependent:
            Hs = self.hermitian_part.data.to_scipy()
            return ComplexSparseMatrix.from_scipy((-1j * Hs - 0.5 * S).tocsr())
        H = self.hermitian_part
        if H.evaluator is not None:
            def f(t, y):
                return -1j * (H(t).data.to_scipy() @ y) - 0.5 * (S @ y)
            return f
        mats = []
        if H.constant is not None:
            mats.append((None, (-1j * H.constant.data.to_scipy() - 0.5 * S).tocsr()))
        else:
            mats.append((None, (-0.5 * S).tocsr()))
        mats += [(c, (-1j * op.data.to_scipy()).tocsr()) for c, op in H.terms]
        params = H.params

        def f(t, y):
            out = np.zeros_like(y)
            for coeff, m in mats:
                term = m @ y
                out += term if coeff is None else complex(coeff(t, params)) * term
            return out
        return f


def build_effective_hamiltonian(H, c_ops=(), params=None):
    return EffectiveHamiltonian(as_time_dependent(H, params), c_ops)


def _vec(psi):
    if isinstance(psi, Qobj):
        if not psi.isket:
            raise QTypeError("expected a ket")
        return psi.full().ravel()
    return np.asarray(psi, dtype=complex)


def _weights(y, cdc):
    rates = np.array([np.vdot(y, m.matvec(y)).real for m in cdc])
    rates = np.clip(rates, 0.0, None)
    total = float(rates.sum())
    return total, (rates / total if total > 0 else rates)


def jump_probabilities(psi, c_ops):
    """Total jump rate sum_n <psi|C_n^dag C_n|psi> and normalized channel weights."""
    y = _vec(psi)
    cdc = [(c.dag() * c).data for c in c_ops]
    return _weights(y, cdc)


def select_collapse(weights, r):
    """Smallest index n whose cumulative weight reaches r."""
    cum = np.cumsum(np.asarray(weights, dtype=float))
    n = int(np.searchsorted(cum, r, side="left"))
    return min(n, cum.size - 1)


def _collapse(y, cmat):
    out = cmat.matvec(y)
    nrm = float(np.linalg.norm(out))
    if nrm == 0.0:
        raise JumpError("collapse produced the zero vector")
    return out / nrm


def apply_collapse(psi, C):
    """C psi / sqrt(<psi|C^dag C|psi>) as a ket."""
    return Qobj(_collapse(_vec(psi), C.data), psi.dims)


@dataclass
class TrajectoryRecord:
    seed: int
    expect: np.ndarray              # (n_ops, n_times)
    jumps: list                     # [(tau, channel), ...]
    states: np.ndarray | None = None  # (n_times, dim), normalized


def _draw(rng):
    r = 0.0
    while r == 0.0:
        r = rng.random()
    return r


def _locate_jump(solver, r, tol):
    """Bisect the last step's dense output for <psi|psi> = r."""
    lo, hi = solver.t_old, solver.t
    psi = solver.y
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        psi = solver.dense(mid)[0]
        gap = float(np.vdot(psi, psi).real) - r
        if abs(gap) <= tol or mid in (lo, hi):
            return mid, psi
        if gap > 0:
            lo = mid
        else:
            hi = mid
    return mid, psi


def run_trajectory(heff, psi0, tlist, seed, e_ops=(), config=None, store_states=False):
    """One quantum-jump trajectory; expectation values use the normalized state."""
    cfg = config or TrajectoryConfig()
    tlist = check_tlist(tlist)
    rng = np.random.Generator(np.random.PCG64(seed))
    gen, cmats, cdc = heff.prepared()
    ops = [op.data for op in e_ops]
    herm = [op.isherm for op in e_ops]
    nt = tlist.size
    expect = np.zeros((len(ops), nt), dtype=float if all(herm) else complex)
    states = np.zeros((nt, heff.anti_hermitian_sum.shape[0]), complex) if store_states else None
    jumps = []

    def emit(k, y):
        y = y / np.linalg.norm(y)
        for i, m in enumerate(ops):
            v = np.vdot(y, m.matvec(y))
            expect[i, k] = v.real if herm[i] else v
        if states is not None:
            states[k] = y

    y0 = _vec(psi0)
    emit(0, y0)
    solver = DormandPrince(gen, tlist[0], y0, tlist[-1], cfg.opts)
    r = _draw(rng)
    k = 1
    while k < nt:
        solver.step()
        jumped = bool(cmats) and float(np.vdot(solver.y, solver.y).real) <= r
        if jumped:
            tau, psi = _locate_jump(solver, r, cfg.norm_root_tol)
        else:
            tau = solver.t
        j = int(np.searchsorted(tlist, tau, side="right"))
        if j > k:
            ys = solver.dense(tlist[k:j])
            if not jumped and tlist[j - 1] == solver.t:
                ys[-1] = solver.y
            for i in range(k, j):
                emit(i, ys[i - k])
            k = j
        if jumped:
            total, w = _weights(psi, cdc)
            if total <= 0:
                raise JumpError(f"no collapse channel can fire at t={tau}")
            channel = select_collapse(w, _draw(rng))
            jumps.append((float(tau), channel))
            r = _draw(rng)
            if k < nt:
                solver.restart(tau, _collapse(psi, cmats[channel]))
    return TrajectoryRecord(seed, expect, jumps, states)


# worker pool -----------------------------------------------------------

_TASK = None


def _run_range(start, stop):
    heff, psi0, tlist, e_ops, cfg, store = _TASK
    out = []
    for i in range(start, stop):
        seed = trajectory_seed(cfg.master_seed, i)
        try:
            out.append(run_trajectory(heff, psi0, tlist, seed, e_ops, cfg, store))
        except (ConvergenceError, JumpError) as exc:
            raise TrajectoryError(str(exc), i, seed, getattr(exc, "t", None)) from exc
    return out


def _chunks(ntraj, workers):
    nchunks = min(ntraj, 4 * workers)
    edges = np.linspace(0, ntraj, nchunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _warm_kernels():
    # compile in the parent so forked workers inherit the machine code
    one = np.ones(1, dtype=np.int64)
    indptr = np.array([0, 1], dtype=np.int64)
    data = np.array([-1.0 + 0j])
    y = np.ones(1, dtype=complex)
    _kernels.spmv(indptr, one * 0, data, y)
    _kernels.dp5_linear_step(indptr, one * 0, data, y, -y, 0.1, 1e-6, 1e-8)


def _run_all(task, ntraj, workers):
    global _TASK
    _TASK = task
    try:
        if workers == 1 or ntraj == 1:
            return _run_range(0, ntraj)
        _warm_kernels()
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            futures = [pool.submit(_run_range, a, b) for a, b in _chunks(ntraj, workers)]
            records = []
            for fut in futures:
                records.extend(fut.result())
            return records
    finally:
        _TASK = None


@dataclass
class EnsembleResult:
    table: ExpectationTable
    runs_expect: np.ndarray  # (ntraj, n_ops, n_times)
    jumps: list
    seeds: list
    master_seed: int
    workers: int
    states: list | None = None  # per-trajectory lists of kets when no observables

    @property
    def ntraj(self):
        return len(self.seeds)

    @property
    def tlist(self):
        return self.table.tlist

    @property
    def expect(self):
        return self.table.expect

    def to_csv(self, fh):
        self.table.to_csv(fh)

    def jumps_dict(self):
        return {
            "master_seed": self.master_seed,
            "ntraj": self.ntraj,
            "trajectories": [
                {"index": i, "seed": s, "jumps": [{"t": t, "channel": c} for t, c in js]}
                for i, (s, js) in enumerate(zip(self.seeds, self.jumps))
            ],
        }

    def write_jumps(self, fh):
        json.dump(self.jumps_dict(), fh, indent=1)
        fh.write("\n")


def _default_workers():
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def mcsolve(H, psi0, tlist, config=500, c_ops=(), e_ops=(), *, params=None,
            seed=None, workers=None, options=None, names=None):
    """Average ``config.ntraj`` quantum-jump trajectories.

    ``config`` is a TrajectoryConfig or just the trajectory count; ``seed``,
    ``workers`` and ``options`` override the corresponding config fields.
    Averages are accumulated in trajectory-index order.
    """
    cfg = config if isinstance(config, TrajectoryConfig) else TrajectoryConfig(ntraj=config)
    overrides = {}
    if seed is not None:
        overrides["master_seed"] = int(seed)
    if workers is not None:
        overrides["workers"] = int(workers)
    if options is not None:
        overrides["opts"] = options
    if overrides:
        cfg = TrajectoryConfig(**{**cfg.__dict__, **overrides})
    tlist = check_tlist(tlist)
    heff = build_effective_hamiltonian(H, c_ops, params)
    if not isinstance(psi0, Qobj) or not psi0.isket:
        raise QTypeError("mcsolve needs a ket initial state")
    if psi0.dims[0] != heff.dims[0]:
        raise DimensionError(f"state dims {psi0.dims} do not match {heff.dims}")
    if abs(psi0.norm() - 1) > 1e-10:
        raise ArgumentError("initial state must be normalized")
    e_ops, names = _observables(e_ops, names)
    store = not e_ops
    nworkers = cfg.workers or _default_workers()
    records = _run_all((heff, psi0, tlist, e_ops, cfg, store), cfg.ntraj, nworkers)

    runs = np.stack([rec.expect for rec in records])
    acc = np.zeros(runs.shape[1:], dtype=runs.dtype)
    for rec in records:
        acc += rec.expect
    acc /= cfg.ntraj
    states = None
    if store:
        kdims = [heff.dims[0], [1] * len(heff.dims[0])]
        states = [[Qobj(v, kdims) for v in rec.states] for rec in records]
    table = ExpectationTable(tlist, [acc[i] for i in range(len(e_ops))], names,
                             solver="mc")
    return EnsembleResult(table, runs, [rec.jumps for rec in records],
                          [rec.seed for rec in records], cfg.master_seed, nworkers, states)
