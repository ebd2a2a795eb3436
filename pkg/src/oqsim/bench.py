"""Timing sweeps over model size, plus a kernel backend comparison."""
from __future__ import annotations

import os
import time

import numpy as np

from . import _kernels
from .demos import coupled_oscillator_model, spin_chain_model
from .errors import ArgumentError, QuantumError
from .mcsolve import _default_workers, mcsolve
from .mesolve import essolve, odesolve
from .operators import destroy, qeye
from .qobj import tensor
from .states import basis, coherent

__all__ = ["MODELS", "bench_model", "bench_kernels"]


def _coupled(n):
    H, psi0, c_ops, e_ops = coupled_oscillator_model(n, 2 * np.pi, 2 * np.pi,
                                                     0.2 * np.pi, 0.05)
    return H, psi0, c_ops, e_ops, np.linspace(0, 10, 100), n * n


def _trilinear(n):
    ops = []
    for k in range(3):
        f = [qeye(n)] * 3
        f[k] = destroy(n)
        ops.append(tensor(*f))
    a0, a1, a2 = ops
    H = 1j * (a0 * a1.dag() * a2.dag() - a0.dag() * a1 * a2)
    c_ops = [np.sqrt(0.2) * a0, np.sqrt(0.8) * a1, np.sqrt(0.2) * a2]
    # pump occupation D^(1/3)/4 keeps the coherent state inside the cutoff
    psi0 = tensor(coherent(n, np.sqrt(n / 4.0)), basis(n, 0), basis(n, 0))
    return H, psi0, c_ops, [o.dag() * o for o in ops], np.linspace(0, 4, 201), n ** 3


def _spin(m):
    H, psi0, c_ops, sz = spin_chain_model(int(m), 2 * np.pi, 0.2 * np.pi, 0.01)
    return H, psi0, c_ops, sz, np.linspace(0, 10, 100), 2 ** int(m)


MODELS = {"coupled-oscillators": _coupled, "trilinear": _trilinear, "spin-chain": _spin}


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def bench_model(model, sizes, solver="me", workers=None, ntraj=100, seed=0):
    """Wall-clock per sweep point; failures are recorded and the sweep continues.

    For the Monte-Carlo solver with more than one worker the same point is
    also timed with one worker and the speedup reported.
    """
    if model not in MODELS:
        raise ArgumentError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    if solver not in ("me", "mc", "es"):
        raise ArgumentError("solver must be me, mc or es")
    nworkers = workers or _default_workers()
    try:
        # compile kernels on a throwaway run so the first point is not penalized
        H, psi0, c_ops, e_ops, tlist, _ = MODELS[model](2)
        odesolve(H, psi0, tlist[:5], c_ops, e_ops)
        if solver == "mc":
            mcsolve(H, psi0, tlist[:5], 2, c_ops, e_ops, seed=seed, workers=1)
    except QuantumError:
        pass
    rows = []
    for size in sizes:
        row = {"size": size}
        try:
            H, psi0, c_ops, e_ops, tlist, D = MODELS[model](size)
            row["D"] = D
            if solver == "me":
                row["seconds"] = _timed(lambda: odesolve(H, psi0, tlist, c_ops, e_ops))
            elif solver == "es":
                row["seconds"] = _timed(lambda: essolve(H, psi0, tlist, c_ops, e_ops))
            else:
                def run(w):
                    return _timed(lambda: mcsolve(H, psi0, tlist, ntraj, c_ops, e_ops,
                                                  seed=seed, workers=w))
                row["seconds"] = run(nworkers)
                if nworkers > 1:
                    row["seconds_1_worker"] = run(1)
                    row["speedup"] = row["seconds_1_worker"] / row["seconds"]
        except (QuantumError, MemoryError) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return {
        "model": model, "solver": solver, "workers": nworkers,
        "ntraj": ntraj if solver == "mc" else None,
        "available_cores": _default_workers(), "os_cpu_count": os.cpu_count(),
        "backend": _kernels.BACKEND_NAME, "points": rows,
    }


def _best(fn, repeat):
    return min(_timed(fn) for _ in range(repeat))


def bench_kernels(n=4096, repeat=5, seed=0):
    """Time each hot kernel under both backends on identical inputs."""
    rng = np.random.default_rng(seed)
    import scipy.sparse as sp
    m = sp.random(n, n, density=8.0 / n, random_state=rng, format="csr")
    m = (m + 1j * sp.random(n, n, density=8.0 / n, random_state=rng, format="csr")).tocsr()
    m.sort_indices()
    indptr = m.indptr.astype(np.int64)
    indices = m.indices.astype(np.int64)
    data = m.data.astype(np.complex128)
    y = rng.normal(size=n) + 1j * rng.normal(size=n)
    M = 40
    rho = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    rho = rho + rho.conj().T
    xs = np.linspace(-5, 5, 60)
    X, P = np.meshgrid(xs, xs, indexing="ij")
    a2 = np.ascontiguousarray((np.sqrt(2) * (X + 1j * P)).ravel())
    b = np.abs(a2) ** 2

    backends = {"numpy": _kernels.numpy_backend}
    if _kernels.numba_backend is not None:
        backends["numba"] = _kernels.numba_backend
    report = {"n": n, "nnz": int(m.nnz), "wigner_M": M, "wigner_points": int(b.size),
              "results": {}}
    for name, be in backends.items():
        k1 = be.spmv(indptr, indices, data, y)
        be.dp5_linear_step(indptr, indices, data, y, k1, 1e-3, 1e-6, 1e-8)
        be.wigner_clenshaw(rho, a2, b)
        report["results"][name] = {
            "spmv_s": _best(lambda: be.spmv(indptr, indices, data, y), repeat),
            "dp5_step_s": _best(lambda: be.dp5_linear_step(indptr, indices, data, y, k1,
                                                            1e-3, 1e-6, 1e-8), repeat),
            "wigner_s": _best(lambda: be.wigner_clenshaw(rho, a2, b), repeat),
        }
    if "numba" in backends:
        # both backends must agree before their timings mean anything
        ref, alt = _kernels.numpy_backend, _kernels.numba_backend
        # relative: the raw Laguerre series grows like exp(|alpha|^2 / 2)
        def rel(u, v):
            return float(np.max(np.abs(u - v)) / np.max(np.abs(u)))
        report["max_rel_difference"] = {
            "spmv": rel(ref.spmv(indptr, indices, data, y), alt.spmv(indptr, indices, data, y)),
            "wigner": rel(ref.wigner_clenshaw(rho, a2, b), alt.wigner_clenshaw(rho, a2, b)),
        }
        report["speedup_numba_over_numpy"] = {
            k.removesuffix("_s"): report["results"]["numpy"][k] / report["results"]["numba"][k]
            for k in report["results"]["numpy"]
        }
    return report
