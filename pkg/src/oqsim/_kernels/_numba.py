"""numba-compiled kernels; same signatures and results as ``_numpy``."""
import numpy as np
from numba import njit

from ._tableau import A, E


@njit(cache=True)
def spmv(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        acc = 0j
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        out[i] = acc
    return out


@njit(cache=True)
def _spmv_into(indptr, indices, data, x, out):
    n = indptr.shape[0] - 1
    for i in range(n):
        acc = 0j
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        out[i] = acc


@njit(cache=True)
def dp5_linear_step(indptr, indices, data, y, k1, h, rtol, atol):
    n = y.shape[0]
    K = np.empty((7, n), dtype=np.complex128)
    ys = np.empty(n, dtype=np.complex128)
    K[0, :] = k1
    for s in range(1, 7):
        for i in range(n):
            acc = y[i]
            for j in range(s):
                a = A[s, j]
                if a != 0.0:
                    acc += h * a * K[j, i]
            ys[i] = acc
        _spmv_into(indptr, indices, data, ys, K[s])
    y_new = ys.copy()
    # stage 6 was evaluated at y + h * sum(A[6, :6] K) == y_new (FSAL)
    err_max = 0.0
    for i in range(n):
        e = 0j
        for j in range(7):
            e += E[j] * K[j, i]
        e *= h
        sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
        r = abs(e) / sc
        if r > err_max:
            err_max = r
    return y_new, K, err_max


@njit(cache=True)
def wigner_clenshaw(rho2, a2, b):
    m = rho2.shape[0]
    npts = a2.shape[0]
    out = np.empty(npts, dtype=np.complex128)
    for p in range(npts):
        x = b[p]
        w = rho2[0, m - 1]
        for L in range(m - 2, -1, -1):
            n = m - L
            if n == 1:
                y0 = rho2[0, L]
                y1 = 0j
            else:
                y0 = rho2[n - 2, n - 2 + L]
                y1 = rho2[n - 1, n - 1 + L]
                k = n
                for i in range(3, n + 1):
                    k -= 1
                    ci = rho2[n - i, n - i + L]
                    t0 = ci - y1 * np.sqrt((k - 1) * (L + k - 1) / ((L + k) * k))
                    t1 = y0 - y1 * ((L + 2 * k - 1) - x) / np.sqrt((L + k) * k)
                    y0 = t0
                    y1 = t1
            val = y0 - y1 * ((L + 1) - x) / np.sqrt(L + 1.0)
            w = val + w * a2[p] / np.sqrt(L + 1.0)
        out[p] = w
    return out
