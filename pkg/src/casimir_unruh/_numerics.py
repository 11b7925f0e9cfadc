"""Small numerical kernels shared by the correlator and energy modules."""
from __future__ import annotations

import math

import numpy as np


def neville_to_zero(steps, values):
    """Polynomial extrapolation of ``values(step)`` to ``step = 0``.

    Returns ``(limit, residual)`` where the residual is the change between
    the two highest-order extrapolants, a conservative error estimate.
    """
    steps = [float(s) for s in steps]
    levels = [[float(v) for v in values]]
    n = len(levels[0])
    if n == 1:
        return levels[0][0], math.inf
    for m in range(1, n):
        t = levels[-1]
        levels.append([
            (steps[i] * t[i + 1] - steps[i + m] * t[i]) / (steps[i] - steps[i + m])
            for i in range(n - m)
        ])
    best = levels[-1][0]
    # previous order, built from the smallest steps
    return best, abs(best - levels[-2][-1])


def coth(x):
    """coth for x > 0 without overflow."""
    x = np.asarray(x, dtype=float)
    e = np.exp(-2.0 * x)
    return (1.0 + e) / -np.expm1(-2.0 * x)


def csch2(x):
    """1/sinh(x)**2 for x > 0 without overflow."""
    x = np.asarray(x, dtype=float)
    e = np.exp(-2.0 * x)
    return 4.0 * e / np.expm1(-2.0 * x) ** 2


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def panel_quad(f, edges, rtol=1e-10, atol=0.0, max_panels=2_000_000, order=20):
    """Adaptive composite Gauss-Legendre quadrature of a vectorized ``f``.

    Each panel is integrated with orders ``order`` and ``order // 2``; panels
    whose difference exceeds the local share of the tolerance are bisected.
    Summation uses ``math.fsum`` over panels sorted by position, so the result
    does not depend on the refinement history.

    Returns ``(integral, error_estimate, n_panels)``.
    """
    x_hi, w_hi = _gauss_legendre(order)
    x_lo, w_lo = _gauss_legendre(max(order // 2, 2))
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    done_lo, done_val, done_err = [], [], []
    total_scale = None
    while lo.size:
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        v_hi = (f(mid[:, None] + half[:, None] * x_hi[None, :]) @ w_hi) * half
        v_lo = (f(mid[:, None] + half[:, None] * x_lo[None, :]) @ w_lo) * half
        err = np.abs(v_hi - v_lo)
        if total_scale is None:
            total_scale = max(abs(math.fsum(v_hi)), float(np.sum(np.abs(v_hi))) * 1e-3)
        tol = np.maximum(atol, rtol * total_scale) * (2 * half) / max(edges[-1] - edges[0], 1e-300)
        ok = (err <= np.maximum(tol, 1e-15 * np.abs(v_hi))) | (half < 1e-13 * np.maximum(1.0, np.abs(mid)))
        done_lo.append(lo[ok])
        done_val.append(v_hi[ok])
        done_err.append(err[ok])
        lo, hi = lo[~ok], hi[~ok]
        if lo.size:
            m = 0.5 * (lo + hi)
            lo, hi = np.concatenate([lo, m]), np.concatenate([m, hi])
        if sum(a.size for a in done_lo) + lo.size > max_panels:
            raise ArithmeticError("panel_quad: panel budget exhausted")
    pos = np.concatenate(done_lo)
    vals = np.concatenate(done_val)
    errs = np.concatenate(done_err)
    order_idx = np.argsort(pos, kind="stable")
    return math.fsum(vals[order_idx]), float(np.sum(errs)), int(pos.size)
