"""Pure-numpy kernels. Reference path and fallback when numba is disabled."""
import numpy as np

from ._tableau import A, E


def spmv(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    prod = data * x[indices]
    return (np.bincount(rows, weights=prod.real, minlength=n)
            + 1j * np.bincount(rows, weights=prod.imag, minlength=n))


def dp5_linear_step(indptr, indices, data, y, k1, h, rtol, atol):
    """One Dormand-Prince step of y' = M y.

    Returns the 5th-order solution, the stage matrix (7, n) whose last row
    is M @ y_new, and the scaled max-norm of the local error estimate.
    """
    n = y.shape[0]
    K = np.empty((7, n), dtype=np.complex128)
    K[0] = k1
    for s in range(1, 6):
        ys = y + h * (A[s, :s] @ K[:s])
        K[s] = spmv(indptr, indices, data, ys)
    y_new = y + h * (A[6, :6] @ K[:6])
    K[6] = spmv(indptr, indices, data, y_new)
    err = h * (E @ K)
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return y_new, K, float(np.max(np.abs(err) / scale))


def wigner_clenshaw(rho2, a2, b):
    """Laguerre-series Wigner sum over phase-space points.

    ``rho2`` is the density matrix with off-diagonals doubled, ``a2`` the
    complex points g*(x+iy) and ``b`` their squared moduli. Returns the
    complex series value; the caller applies the Gaussian envelope.
    """
    m = rho2.shape[0]
    w = np.full(a2.shape, rho2[0, m - 1], dtype=np.complex128)
    for L in range(m - 2, -1, -1):
        c = np.diagonal(rho2, L)
        w = _laguerre_series(L, b, c) + w * a2 / np.sqrt(L + 1.0)
    return w


def _laguerre_series(L, x, c):
    n = c.shape[0]
    if n == 1:
        y0 = np.full(x.shape, c[0], dtype=np.complex128)
        y1 = np.zeros(x.shape, dtype=np.complex128)
    else:
        y0 = np.full(x.shape, c[n - 2], dtype=np.complex128)
        y1 = np.full(x.shape, c[n - 1], dtype=np.complex128)
        k = n
        for i in range(3, n + 1):
            k -= 1
            y0, y1 = (
                c[n - i] - y1 * np.sqrt((k - 1) * (L + k - 1) / ((L + k) * k)),
                y0 - y1 * ((L + 2 * k - 1) - x) / np.sqrt((L + k) * k),
            )
    return y0 - y1 * ((L + 1) - x) / np.sqrt(L + 1.0)
