"""Quadrature kernels used throughout the package.

Two routes are provided on purpose: a cached panelized Gauss-Legendre
prefix table (fast, vectorized, used by curve evaluation) and an adaptive
Simpson rule (slow, independent, used as the oracle in tests and for
one-off integrals such as the gauge period).
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

# 8-point Gauss-Legendre rule on [0, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=48):
    """Integrate a vectorized function over [a, b] by adaptive Simpson.

    ``f`` maps an array of abscissae (m,) to values of shape (m,) or
    (m, d).  Subdivision is carried out in batches so the function is
    always called on arrays.  Raises :class:`QuadratureError` with the
    achieved residual if the tolerance cannot be met.
    """
    a = float(a)
    b = float(b)
    if a == b:
        probe = np.asarray(f(np.array([a])))
        return np.zeros(probe.shape[1:])

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo)[..., None] / 6.0 * (flo + 4.0 * fmid + fhi)

    lo = np.array([a])
    hi = np.array([b])
    flo = np.atleast_2d(np.asarray(f(lo), dtype=float).reshape(1, -1))
    fhi = np.atleast_2d(np.asarray(f(hi), dtype=float).reshape(1, -1))
    mid = 0.5 * (lo + hi)
    fmid = np.asarray(f(mid), dtype=float).reshape(1, -1)

    total = np.zeros(flo.shape[1])
    worst = 0.0
    for depth in range(max_depth):
        coarse = simpson(lo, hi, flo, fmid, fhi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flmid = np.asarray(f(lmid), dtype=float).reshape(len(lmid), -1)
        frmid = np.asarray(f(rmid), dtype=float).reshape(len(rmid), -1)
        left = simpson(lo, mid, flo, flmid, fmid)
        right = simpson(mid, hi, fmid, frmid, fhi)
        fine = left + right
        err = np.abs(fine - coarse).max(axis=1) / 15.0
        # local acceptance, proportional to interval share of [a, b]
        budget = tol * np.abs(hi - lo) / abs(b - a)
        done = err <= np.maximum(budget, 1e-300)
        if depth == max_depth - 1:
            worst = float(err[~done].sum()) if (~done).any() else 0.0
            total += (fine[done].sum(axis=0) if done.any() else 0.0)
            if (~done).any():
                total += fine[~done].sum(axis=0)
                raise QuadratureError(
                    f"adaptive Simpson did not converge; residual {worst:.3e}",
                    achieved=worst,
                )
            break
        total += fine[done].sum(axis=0) if done.any() else 0.0
        keep = ~done
        if not keep.any():
            break
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        flo = np.concatenate([flo[keep], fmid[keep]])
        fhi = np.concatenate([fmid[keep], fhi[keep]])
        fmid = np.concatenate([flmid[keep], frmid[keep]])
        mid = 0.5 * (lo + hi)
    result = total
    if result.shape == (1,):
        return result[0]
    return result


def _panel_gl(f, starts, ends):
    """Gauss-Legendre integrals of ``f`` over a batch of intervals.

    starts/ends: (m,).  Returns (m, d).
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    width = ends - starts
    nodes = starts[:, None] + width[:, None] * _GL_NODES[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float)
    vals = vals.reshape(len(starts), len(_GL_NODES), -1)
    return (vals * _GL_WEIGHTS[None, :, None]).sum(axis=1) * width[:, None]


class PrefixIntegrator:
    """Cached prefix integrals of a periodic vector field over one period.

    Panels are a uniform grid refined by any supplied breakpoints, so
    piecewise-smooth integrands are integrated panel-exactly.  Queries
    are vectorized: ``integral(x)`` returns the integral of ``f`` from 0
    to each entry of ``x``, with whole periods handled through the
    per-period total.
    """

    def __init__(self, f, period, n_panels=2048, breakpoints=None):
        self.f = f
        self.period = float(period)
        edges = np.linspace(0.0, self.period, int(n_panels) + 1)
        if breakpoints is not None and len(breakpoints) > 0:
            extra = np.mod(np.asarray(breakpoints, dtype=float), self.period)
            edges = np.unique(np.concatenate([edges, extra]))
            # drop panels of negligible width produced by near-duplicates
            keep = np.concatenate([[True], np.diff(edges) > 1e-13 * self.period])
            edges = edges[keep]
            if edges[-1] < self.period:
                edges = np.concatenate([edges, [self.period]])
        self.edges = edges
        panel_ints = _panel_gl(f, edges[:-1], edges[1:])
        self.dim = panel_ints.shape[1]
        self.prefix = np.vstack([np.zeros(self.dim), np.cumsum(panel_ints, axis=0)])
        self.per_period = self.prefix[-1].copy()

    def integral(self, x):
        """Integral of f from 0 to x (x array-like, any real values)."""
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = np.ravel(x)
        wraps = np.floor(x / self.period)
        y = x - wraps * self.period
        # guard against y == period from rounding
        y = np.clip(y, 0.0, self.period)
        idx = np.searchsorted(self.edges, y, side="right") - 1
        idx = np.clip(idx, 0, len(self.edges) - 2)
        starts = self.edges[idx]
        out = self.prefix[idx] + _panel_gl(self.f, starts, y)
        out = out + wraps[:, None] * self.per_period[None, :]
        return out.reshape(shape + (self.dim,))
