"""Inner loops of the Shabat and conservative Newton solvers.

Every kernel exists twice: a loop version compiled with ``numba.njit`` and a
vectorized numpy version.  The numba path is used when numba imports and the
environment variable ``INTEGRAX_DISABLE_NUMBA`` is unset (or ``0``); set it to
``1`` to force the numpy path.  Polynomials are complex coefficient arrays,
constant term first.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.polynomial import polynomial as npoly

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("INTEGRAX_DISABLE_NUMBA", "0").lower() in ("", "0", "false", "no")


# numpy implementations


def np_poly_from_roots(roots, mults):
    """Monic ``prod (x - roots[k])**mults[k]``."""
    if len(roots) == 0:
        return np.ones(1, dtype=np.complex128)
    return np.asarray(npoly.polyfromroots(np.repeat(roots, mults)), dtype=np.complex128)


def np_polyval(coeffs, x):
    return npoly.polyval(x, coeffs)


def np_shabat_system(white, alpha, black, beta, c):
    """Residual and Jacobian of ``c*W(x) - 1 - c*K(x) = 0`` coefficient-wise.

    ``W = prod (x - white)**alpha`` and ``K = prod (x - black)**beta`` share the
    degree n; the residual holds the n coefficients of degree < n.  Jacobian
    columns are ordered white roots, black roots, then ``c``.
    """
    n = int(np.sum(alpha))
    pw = np_poly_from_roots(white, alpha)
    pb = np_poly_from_roots(black, beta)
    res = c * (pw[:n] - pb[:n])
    res[0] -= 1.0
    p, q = len(white), len(black)
    jac = np.empty((n, p + q + 1), dtype=np.complex128)
    for i in range(p):
        m = alpha.copy()
        m[i] -= 1
        jac[:, i] = -c * alpha[i] * np_poly_from_roots(white, m)[:n]
    for j in range(q):
        m = beta.copy()
        m[j] -= 1
        jac[:, p + j] = c * beta[j] * np_poly_from_roots(black, m)[:n]
    jac[:, p + q] = pw[:n] - pb[:n]
    return res, jac


def np_conservative_system(crit, gamma, scale):
    """Residual ``C(c_i) - c_i`` and its Jacobian in the critical points.

    ``C = scale * integral_0^x prod (t - crit)**gamma dt``.
    """
    l = len(crit)
    q = np_poly_from_roots(crit, gamma)
    C = npoly.polyint(scale * q)
    res = npoly.polyval(crit, C) - crit
    jac = np.empty((l, l), dtype=np.complex128)
    for j in range(l):
        m = gamma.copy()
        m[j] -= 1
        dC = npoly.polyint(-scale * gamma[j] * np_poly_from_roots(crit, m))
        jac[:, j] = npoly.polyval(crit, dC)
    jac -= np.eye(l)
    return res, jac


# loop implementations for numba


def _loop_poly_from_roots(roots, mults):
    deg = 0
    for k in range(mults.shape[0]):
        deg += mults[k]
    out = np.zeros(deg + 1, dtype=np.complex128)
    out[0] = 1.0
    cur = 0
    for k in range(roots.shape[0]):
        r = roots[k]
        for _ in range(mults[k]):
            cur += 1
            for i in range(cur, 0, -1):
                out[i] = out[i - 1] - r * out[i]
            out[0] = -r * out[0]
    return out


def _loop_polyval(coeffs, x):
    out = np.empty(x.shape[0], dtype=np.complex128)
    for k in range(x.shape[0]):
        acc = 0j
        for i in range(coeffs.shape[0] - 1, -1, -1):
            acc = acc * x[k] + coeffs[i]
        out[k] = acc
    return out


def _loop_shabat_system(white, alpha, black, beta, c):
    n = 0
    for i in range(alpha.shape[0]):
        n += alpha[i]
    pw = _poly_from_roots_k(white, alpha)
    pb = _poly_from_roots_k(black, beta)
    p, q = white.shape[0], black.shape[0]
    res = np.empty(n, dtype=np.complex128)
    jac = np.empty((n, p + q + 1), dtype=np.complex128)
    for t in range(n):
        res[t] = c * (pw[t] - pb[t])
        jac[t, p + q] = pw[t] - pb[t]
    res[0] -= 1.0
    m = alpha.copy()
    for i in range(p):
        m[i] -= 1
        d = _poly_from_roots_k(white, m)
        m[i] += 1
        for t in range(n):
            jac[t, i] = -c * alpha[i] * d[t]
    m = beta.copy()
    for j in range(q):
        m[j] -= 1
        d = _poly_from_roots_k(black, m)
        m[j] += 1
        for t in range(n):
            jac[t, p + j] = c * beta[j] * d[t]
    return res, jac


def _loop_integrate_eval(q, scale, x):
    # scale * integral_0^x q, Horner on the integrated coefficients
    acc = 0j
    for i in range(q.shape[0] - 1, -1, -1):
        acc = acc * x + scale * q[i] / (i + 1)
    return acc * x


def _loop_conservative_system(crit, gamma, scale):
    l = crit.shape[0]
    q = _poly_from_roots_k(crit, gamma)
    res = np.empty(l, dtype=np.complex128)
    for i in range(l):
        res[i] = _integrate_eval_k(q, scale, crit[i]) - crit[i]
    jac = np.empty((l, l), dtype=np.complex128)
    m = gamma.copy()
    for j in range(l):
        m[j] -= 1
        d = _poly_from_roots_k(crit, m)
        m[j] += 1
        for i in range(l):
            jac[i, j] = _integrate_eval_k(d, -scale * gamma[j], crit[i])
        jac[j, j] -= 1.0
    return res, jac


if HAVE_NUMBA:
    _poly_from_roots_k = numba.njit(cache=True)(_loop_poly_from_roots)
    _integrate_eval_k = numba.njit(cache=True)(_loop_integrate_eval)
    jit_poly_from_roots = _poly_from_roots_k
    jit_polyval = numba.njit(cache=True)(_loop_polyval)
    jit_shabat_system = numba.njit(cache=True)(_loop_shabat_system)
    jit_conservative_system = numba.njit(cache=True)(_loop_conservative_system)
else:  # pragma: no cover
    jit_poly_from_roots = jit_polyval = jit_shabat_system = jit_conservative_system = None

if USE_NUMBA:
    poly_from_roots = jit_poly_from_roots
    polyval = jit_polyval
    shabat_system = jit_shabat_system
    conservative_system = jit_conservative_system
else:
    poly_from_roots = np_poly_from_roots
    polyval = np_polyval
    shabat_system = np_shabat_system
    conservative_system = np_conservative_system

BACKEND = "numba" if USE_NUMBA else "numpy"


def as_roots(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.complex128)


def as_mults(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.int64)
