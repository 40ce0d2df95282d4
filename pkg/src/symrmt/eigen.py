"""General (non-hermitean) eigenvalue solver.

Pipeline: diagonal balancing by powers of two, Householder reduction to upper
Hessenberg form, then implicitly shifted complex QR (single shift, Wilkinson
shift with exceptional shifts) acting only on the active window, since only
eigenvalues are wanted.  The kernels are compiled with numba.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import ContractError, NumericalFailure

MAX_N = 4096
_EPS = np.finfo(np.float64).eps
_MAX_ITS_PER_EIGENVALUE = 60


@njit(cache=True)
def _balance(a):
    n = a.shape[0]
    radix = 2.0
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j, i].real) + abs(a[j, i].imag)
                    r += abs(a[i, j].real) + abs(a[i, j].imag)
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                g = 1.0 / f
                for j in range(n):
                    a[i, j] *= g
                for j in range(n):
                    a[j, i] *= f
    return a


@njit(cache=True)
def _hessenberg(a):
    n = a.shape[0]
    for k in range(n - 2):
        alpha2 = 0.0
        for i in range(k + 1, n):
            alpha2 += a[i, k].real ** 2 + a[i, k].imag ** 2
        xnorm = np.sqrt(alpha2)
        if xnorm == 0.0:
            continue
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        v = np.empty(n - k - 1, dtype=np.complex128)
        for i in range(k + 1, n):
            v[i - k - 1] = a[i, k]
        v[0] -= alpha
        vnorm = 0.0
        for i in range(v.shape[0]):
            vnorm += v[i].real ** 2 + v[i].imag ** 2
        vnorm = np.sqrt(vnorm)
        if vnorm == 0.0:
            continue
        for i in range(v.shape[0]):
            v[i] /= vnorm
        # left: rows k+1.., columns k..
        for j in range(k, n):
            s = 0.0 + 0.0j
            for i in range(v.shape[0]):
                s += np.conj(v[i]) * a[k + 1 + i, j]
            s *= 2.0
            for i in range(v.shape[0]):
                a[k + 1 + i, j] -= v[i] * s
        # right: all rows, columns k+1..
        for i in range(n):
            s = 0.0 + 0.0j
            for j in range(v.shape[0]):
                s += a[i, k + 1 + j] * v[j]
            s *= 2.0
            for j in range(v.shape[0]):
                a[i, k + 1 + j] -= s * np.conj(v[j])
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a


@njit(cache=True)
def _abs1(z):
    return abs(z.real) + abs(z.imag)


@njit(cache=True)
def _givens(x, y):
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0.0 + 0.0j
    if ax == 0.0:
        return 0.0, 1.0 + 0.0j
    r = np.hypot(ax, ay)
    c = ax / r
    s = (x / ax) * np.conj(y) / r
    return c, s


@njit(cache=True)
def _rot_rows(h, k, c, s, j0, j1):
    for j in range(j0, j1):
        t1 = h[k, j]
        t2 = h[k + 1, j]
        h[k, j] = c * t1 + s * t2
        h[k + 1, j] = -np.conj(s) * t1 + c * t2


@njit(cache=True)
def _rot_cols(h, k, c, s, i0, i1):
    for i in range(i0, i1):
        t1 = h[i, k]
        t2 = h[i, k + 1]
        h[i, k] = t1 * c + t2 * np.conj(s)
        h[i, k + 1] = -t1 * s + t2 * c


@njit(cache=True)
def _wilkinson(a, b, c, d):
    tr2 = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) * (a - d) + b * c)
    l1 = tr2 + disc
    l2 = tr2 - disc
    if abs(l1 - d) <= abs(l2 - d):
        return l1
    return l2


@njit(cache=True)
def _qr_eigenvalues(h, max_its):
    """Eigenvalues of an upper Hessenberg matrix; returns (values, stalled)."""
    n = h.shape[0]
    w = np.zeros(n, dtype=np.complex128)
    hnorm = 0.0
    for i in range(n):
        for j in range(n):
            hnorm = max(hnorm, _abs1(h[i, j]))
    hi = n - 1
    its = 0
    while hi >= 0:
        # locate the start of the active unreduced block
        l = hi
        while l > 0:
            tst = _abs1(h[l - 1, l - 1]) + _abs1(h[l, l])
            if tst == 0.0:
                tst = hnorm
            if _abs1(h[l, l - 1]) <= _EPS * tst:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_its:
            return w, hi
        if its % 10 == 0:
            mu = h[hi, hi] + 0.75 * _abs1(h[hi, hi - 1])
        else:
            mu = _wilkinson(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        # implicit single-shift sweep on rows/columns l..hi
        c, s = _givens(h[l, l] - mu, h[l + 1, l])
        _rot_rows(h, l, c, s, l, hi + 1)
        _rot_cols(h, l, c, s, l, min(l + 3, hi + 1))
        for k in range(l + 1, hi):
            c, s = _givens(h[k, k - 1], h[k + 1, k - 1])
            _rot_rows(h, k, c, s, k - 1, hi + 1)
            h[k + 1, k - 1] = 0.0
            _rot_cols(h, k, c, s, l, min(k + 3, hi + 1))
    return w, -1


@njit(cache=True)
def _eigvals_kernel(a, max_its):
    h = _balance(a)
    h = _hessenberg(h)
    return _qr_eigenvalues(h, max_its)


def balance(a) -> np.ndarray:
    """Diagonally similar matrix with row and column norms equalised."""
    return _balance(np.array(a, dtype=np.complex128, copy=True))


def hessenberg(a) -> np.ndarray:
    """Upper Hessenberg matrix unitarily similar to ``a``."""
    return _hessenberg(np.array(a, dtype=np.complex128, copy=True))


def eigenvalues_general(a) -> np.ndarray:
    """All eigenvalues of a square complex matrix, with multiplicity.

    Raises
    ------
    NumericalFailure
        If the QR iteration stalls; ``exc.index`` is the eigenvalue index
        that failed to deflate.
    """
    m = np.array(a, dtype=np.complex128, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"eigenvalues need a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    if n > MAX_N:
        raise ContractError(f"matrix size {n} exceeds the supported maximum {MAX_N}")
    if not np.all(np.isfinite(m)):
        raise ContractError("matrix has non-finite entries")
    w, stalled = _eigvals_kernel(m, _MAX_ITS_PER_EIGENVALUE)
    if stalled >= 0:
        raise NumericalFailure(
            f"QR iteration did not converge for eigenvalue index {stalled}", index=int(stalled))
    return w
