"""Entire-in-lambda trigonometric kernels and closed-form integrals.

Everything here is written in terms of quantities that are even in rho
(``cos(rho*t)`` and ``sin(rho*t)/rho``), so callers never have to worry about
the branch of ``rho = sqrt(lambda)`` or about removable singularities at
``rho = 0``.
"""

from __future__ import annotations

import numpy as np

_SMALL = 1e-4


def sinc(z):
    """sin(z)/z, analytic continuation at z = 0, complex-safe."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SMALL
    zs = z[small]
    z2 = zs * zs
    out[small] = 1.0 - z2 / 6.0 + z2 * z2 / 120.0
    zb = z[~small]
    out[~small] = np.sin(zb) / zb
    return out


def cos_sqrt(z2):
    """cos(sqrt(z2)); single-valued (even) function of sqrt(z2)."""
    w = np.sqrt(np.asarray(z2, dtype=complex))
    return np.cos(w)


def sinc_sqrt(z2):
    """sin(sqrt(z2))/sqrt(z2); single-valued function of z2."""
    w = np.sqrt(np.asarray(z2, dtype=complex))
    return sinc(w)


def dsinc_sqrt(z2):
    """d/dz2 of sinc_sqrt: (w cos w - sin w)/(2 w^3) at w = sqrt(z2)."""
    z2 = np.asarray(z2, dtype=complex)
    w = np.sqrt(z2)
    out = np.empty_like(z2)
    small = np.abs(z2) < _SMALL
    zs = z2[small]
    out[small] = -1.0 / 6.0 + zs / 60.0 - zs * zs / 1680.0
    wb = w[~small]
    out[~small] = (wb * np.cos(wb) - np.sin(wb)) / (2.0 * wb**3)
    return out


def overlap_sin_sin(mu, rho, length=np.pi):
    """Integral of sin(mu t) sin(rho t) over [0, length]."""
    mu = np.asarray(mu, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    d, s = (mu - rho) * length, (mu + rho) * length
    return 0.5 * length * (sinc(d) - sinc(s))


def overlap_cos_cos(mu, rho, length=np.pi):
    """Integral of cos(mu t) cos(rho t) over [0, length]."""
    mu = np.asarray(mu, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    d, s = (mu - rho) * length, (mu + rho) * length
    return 0.5 * length * (sinc(d) + sinc(s))


def _cosm1_over(z):
    """(1 - cos z)/z with series fallback near zero."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SMALL
    zs = z[small]
    out[small] = zs / 2.0 - zs**3 / 24.0
    zb = z[~small]
    out[~small] = (1.0 - np.cos(zb)) / zb
    return out


def overlap_sin_cos(mu, rho, length=np.pi):
    """Integral of sin(mu t) cos(rho t) over [0, length]."""
    mu = np.asarray(mu, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    d, s = (mu - rho) * length, (mu + rho) * length
    return 0.5 * length * (_cosm1_over(s) + _cosm1_over(d))


def poly_sin(m, rho, length=np.pi):
    """Integral of t^m sin(rho t) over [0, length] (entire in lambda = rho^2 for odd use sites)."""
    rho = np.asarray(rho, dtype=complex)
    out = np.empty_like(rho)
    small = np.abs(rho) * length < 0.5
    if np.any(small):
        out[small] = _poly_sin_series(m, rho[small], length)
    if np.any(~small):
        out[~small] = _poly_trig_recur(m, rho[~small], length)[0]
    return out


def poly_cos(m, rho, length=np.pi):
    """Integral of t^m cos(rho t) over [0, length]."""
    rho = np.asarray(rho, dtype=complex)
    out = np.empty_like(rho)
    small = np.abs(rho) * length < 0.5
    if np.any(small):
        out[small] = _poly_cos_series(m, rho[small], length)
    if np.any(~small):
        out[~small] = _poly_trig_recur(m, rho[~small], length)[1]
    return out


def _poly_trig_recur(m, rho, length):
    # S_m = (-L^m cos(rho L) + m C_{m-1})/rho ;  C_m = (L^m sin(rho L) - m S_{m-1})/rho
    s_prev = (1.0 - np.cos(rho * length)) / rho
    c_prev = np.sin(rho * length) / rho
    if m == 0:
        return s_prev, c_prev
    for k in range(1, m + 1):
        lk = length**k
        s_k = (-lk * np.cos(rho * length) + k * c_prev) / rho
        c_k = (lk * np.sin(rho * length) - k * s_prev) / rho
        s_prev, c_prev = s_k, c_k
    return s_prev, c_prev


def _poly_sin_series(m, rho, length, tol=1e-18):
    out = np.zeros_like(rho)
    term_pow = rho * length ** (m + 2)
    k = 0
    fact = 1.0
    while True:
        denom = fact * (m + 2 * k + 2)
        contrib = (-1.0) ** k * term_pow / denom
        out = out + contrib
        if np.all(np.abs(contrib) < tol * (1.0 + np.abs(out))):
            break
        k += 1
        fact *= (2 * k) * (2 * k + 1)
        term_pow = term_pow * (rho * length) ** 2
        if k > 60:
            break
    return out


def _poly_cos_series(m, rho, length, tol=1e-18):
    out = np.zeros_like(rho)
    term_pow = np.ones_like(rho) * length ** (m + 1)
    k = 0
    fact = 1.0
    while True:
        denom = fact * (m + 2 * k + 1)
        contrib = (-1.0) ** k * term_pow / denom
        out = out + contrib
        if np.all(np.abs(contrib) < tol * (1.0 + np.abs(out))):
            break
        k += 1
        fact *= (2 * k - 1) * (2 * k)
        term_pow = term_pow * (rho * length) ** 2
        if k > 60:
            break
    return out


def poly_poly(m, n, length=np.pi):
    """Integral of t^(m+n) over [0, length]."""
    return length ** (m + n + 1) / (m + n + 1)


def gauss_panels(f, a, b, panels, order=12):
    """Composite Gauss-Legendre quadrature of a (vector-valued) callable."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    x = (mid[:, None] + half * nodes[None, :]).ravel()
    w = (half * np.broadcast_to(weights, (panels, order))).ravel()
    vals = f(x)
    return np.tensordot(vals, w, axes=([-1], [0]))
