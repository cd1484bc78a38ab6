"""Periodic unit-speed curves, stored tangent-first.

A curve is represented by its unit tangent field and a basepoint; the
position is recovered by integrating the tangent.  This makes the
unit-speed constraint structural rather than approximate.  The module
also provides the constructive realization of a closed curve whose
tangent image is a prescribed closed spherical curve (dwell plateaus at
selected image points, lengths solved by linear programming).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import linprog, nnls
from scipy.spatial import cKDTree

from .errors import PreconditionError
from .quadrature import PrefixIntegrator, _panel_gl

# norm / closure tolerances per representation class
NORM_TOL = {"analytic": 1e-9, "sampled": 1e-6}
PAIR_TOL = {"analytic": 1e-8, "sampled": 1e-5}


def _as_batch(x):
    x = np.asarray(x, dtype=float)
    return np.atleast_1d(x), x.ndim == 0


class TangentRep:
    """Base class for unit-tangent representations."""

    tol_class = "analytic"
    breakpoints = ()

    def __init__(self, period, dim, smoothness=3):
        self.period = float(period)
        self.dim = int(dim)
        self.smoothness = int(smoothness)

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, x, h=1e-6):
        """d(tangent)/dx; central finite difference unless overridden."""
        step = h * max(self.period, 1.0)
        return (self(x + step) - self(x - step)) / (2.0 * step)


class AngleTangent(TangentRep):
    """Planar tangent e^{i alpha(x)} given by a (lifted) angle function."""

    def __init__(self, alpha, period, alpha_prime=None, smoothness=3):
        super().__init__(period, 2, smoothness)
        self.alpha = alpha
        self.alpha_prime = alpha_prime

    def __call__(self, x):
        a = np.asarray(self.alpha(np.asarray(x, dtype=float)))
        return np.stack([np.cos(a), np.sin(a)], axis=-1)

    def derivative(self, x, h=1e-6):
        x = np.asarray(x, dtype=float)
        if self.alpha_prime is None:
            return super().derivative(x, h)
        a = np.asarray(self.alpha(x))
        ap = np.asarray(self.alpha_prime(x))
        return ap[..., None] * np.stack([-np.sin(a), np.cos(a)], axis=-1)


class SphereSamplesTangent(TangentRep):
    """Dense samples on the unit sphere, interpolated and renormalized.

    Samples are taken at m uniform nodes over one period (node j at
    j*P/m).  Componentwise periodic cubic interpolation, renormalized on
    evaluation so the unit-norm invariant degrades only through the
    direction, never the length.
    """

    tol_class = "sampled"

    def __init__(self, samples, period, smoothness=1, tol_class=None):
        samples = np.asarray(samples, dtype=float)
        super().__init__(period, samples.shape[1], smoothness)
        if tol_class is not None:
            self.tol_class = tol_class
        norms = np.linalg.norm(samples, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-3):
            raise PreconditionError("sphere samples are not unit vectors")
        self.samples = samples / norms[:, None]
        m = len(samples)
        grid = np.linspace(0.0, self.period, m + 1)
        closed = np.vstack([self.samples, self.samples[:1]])
        self._spline = CubicSpline(grid, closed, axis=0, bc_type="periodic")
        self._dspline = self._spline.derivative()

    def _raw(self, x):
        return self._spline(np.mod(x, self.period))

    def __call__(self, x):
        v = self._raw(np.asarray(x, dtype=float))
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def derivative(self, x, h=1e-6):
        x = np.asarray(x, dtype=float)
        v = self._raw(x)
        dv = self._dspline(np.mod(x, self.period))
        nrm = np.linalg.norm(v, axis=-1, keepdims=True)
        t = v / nrm
        return dv / nrm - t * (t * dv).sum(axis=-1, keepdims=True) / nrm


class CallableTangent(TangentRep):
    """Tangent given by an arbitrary vectorized callable."""

    def __init__(self, fn, period, dim, deriv=None, smoothness=3,
                 tol_class="analytic", breakpoints=()):
        super().__init__(period, dim, smoothness)
        self.fn = fn
        self._deriv = deriv
        self.tol_class = tol_class
        self.breakpoints = tuple(breakpoints)

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def derivative(self, x, h=1e-6):
        if self._deriv is None:
            return super().derivative(x, h)
        return np.asarray(self._deriv(np.asarray(x, dtype=float)), dtype=float)


@dataclass
class ClosureReport:
    defect: float
    closed: bool


@dataclass
class UnitSpeedCurve:
    """Periodic curve with |a'(x)| = 1, evaluated by tangent integration."""

    rep: TangentRep
    basepoint: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.basepoint = np.asarray(self.basepoint, dtype=float)
        if self.basepoint.shape != (self.rep.dim,):
            raise PreconditionError("basepoint dimension mismatch")
        self._prefix = None

    @property
    def period(self):
        return self.rep.period

    @property
    def dim(self):
        return self.rep.dim

    @property
    def smoothness(self):
        return self.rep.smoothness

    @property
    def norm_tol(self):
        return NORM_TOL[self.rep.tol_class]

    @property
    def pair_tol(self):
        return PAIR_TOL[self.rep.tol_class]

    def tangent(self, x):
        xb, scalar = _as_batch(x)
        out = self.rep(xb)
        return out[0] if scalar else out

    def tangent_derivative(self, x):
        xb, scalar = _as_batch(x)
        out = self.rep.derivative(xb)
        return out[0] if scalar else out

    def _integrator(self):
        if self._prefix is None:
            self._prefix = PrefixIntegrator(
                self.rep, self.period, n_panels=2048,
                breakpoints=self.rep.breakpoints)
        return self._prefix

    def position(self, x):
        """basepoint + integral of the tangent from 0 to x."""
        xb, scalar = _as_batch(x)
        out = self.basepoint + self._integrator().integral(xb)
        return out[0] if scalar else out

    # spec-facing name
    def eval(self, x):
        return self.position(x)

    def drift(self):
        """Integral of the tangent over one period (zero for closed curves)."""
        return self._integrator().per_period.copy()

    def closure_defect(self):
        defect = float(np.linalg.norm(self.drift()))
        return ClosureReport(defect=defect, closed=defect <= 1e-6 * self.period)

    def validate(self, samples=10000):
        """Check unit norm and periodicity of the tangent on a sample grid."""
        x = np.linspace(0.0, self.period, samples, endpoint=False)
        t = self.tangent(x)
        norm_err = float(np.abs(np.linalg.norm(t, axis=1) - 1.0).max())
        per_err = float(np.abs(self.tangent(x + self.period) - t).max())
        tol = self.norm_tol
        if norm_err > tol:
            raise PreconditionError(
                f"tangent norm deviates by {norm_err:.3e} (tolerance {tol:.1e})")
        if per_err > tol:
            raise PreconditionError(
                f"tangent not periodic: deviation {per_err:.3e}")
        return norm_err, per_err

    def shifted(self, x0, new_basepoint=None):
        """Same curve with parameter origin moved to x0."""
        rep = self.rep
        base = self.position(x0) if new_basepoint is None else np.asarray(new_basepoint, float)
        shifted_breaks = tuple(np.mod(np.asarray(rep.breakpoints, float) - x0, rep.period)) \
            if rep.breakpoints else ()
        new_rep = CallableTangent(
            lambda y: rep(np.asarray(y, dtype=float) + x0),
            rep.period, rep.dim,
            deriv=lambda y: rep.derivative(np.asarray(y, dtype=float) + x0),
            smoothness=rep.smoothness, tol_class=rep.tol_class,
            breakpoints=shifted_breaks)
        return UnitSpeedCurve(new_rep, base, metadata=dict(self.metadata))


def smoothstep(k):
    """Monotone [0,1]->[0,1] polynomial of degree 2k+1 with derivatives
    1..k vanishing at both ends."""
    from math import comb
    coeffs = np.zeros(2 * k + 2)
    for j in range(k + 1):
        coeffs[k + 1 + j] = comb(k + j, j) * comb(2 * k + 1, k - j) * (-1) ** j
    return np.polynomial.Polynomial(coeffs)


def sampled_hausdorff(a_pts, b_pts):
    """Symmetric Hausdorff distance between two point samples."""
    ta, tb = cKDTree(a_pts), cKDTree(b_pts)
    d_ab = ta.query(b_pts)[0].max()
    d_ba = tb.query(a_pts)[0].max()
    return float(max(d_ab, d_ba))


def _hull_interior_lp(points, tol=1e-9):
    """max t s.t. sum(lam_i p_i) = 0, sum(lam) = 1, lam_i >= t.

    Positive optimum certifies that 0 admits a strictly positive convex
    combination of the points (relative-interior containment).
    """
    m, n = points.shape
    # variables: lam (m), t
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_eq = np.zeros((n + 1, m + 1))
    a_eq[:n, :m] = points.T
    a_eq[n, :m] = 1.0
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    a_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    b_ub = np.zeros(m)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * m + [(None, 1.0)], method="highs")
    if not res.success:
        return -np.inf
    return float(-res.fun)


class _PiecewiseTangent:
    """Vectorized evaluator for the assembled move/dwell tangent field."""

    def __init__(self, cfun, cderiv, pieces, natural_period, scale=1.0):
        # pieces: list of (start, end, kind, payload)
        #   kind "move": payload = (c_start, c_end, poly, dpoly) mapping piece to c-params
        #   kind "dwell": payload = unit point (n,)
        self.cfun = cfun
        self.cderiv = cderiv
        self.starts = np.array([p[0] for p in pieces])
        self.pieces = pieces
        self.natural_period = natural_period
        self.scale = scale  # natural parameter per output parameter

    def _locate(self, x):
        y = np.mod(np.asarray(x, dtype=float) * self.scale, self.natural_period)
        idx = np.searchsorted(self.starts, y, side="right") - 1
        return y, np.clip(idx, 0, len(self.pieces) - 1)

    def __call__(self, x):
        y, idx = self._locate(x)
        out = np.empty(y.shape + (self._dim(),))
        for j, (s, e, kind, payload) in enumerate(self.pieces):
            mask = idx == j
            if not mask.any():
                continue
            if kind == "dwell":
                out[mask] = payload
            else:
                c0, c1, poly, _ = payload
                u = (y[mask] - s) / (e - s)
                out[mask] = self.cfun(c0 + (c1 - c0) * poly(u))
        return out

    def _dim(self):
        for _, _, kind, payload in self.pieces:
            if kind == "dwell":
                return len(payload)
        return self.cfun(np.array([0.0])).shape[-1]

    def deriv(self, x):
        y, idx = self._locate(x)
        out = np.zeros(y.shape + (self._dim(),))
        for j, (s, e, kind, payload) in enumerate(self.pieces):
            mask = idx == j
            if not mask.any() or kind == "dwell":
                continue
            c0, c1, poly, dpoly = payload
            u = (y[mask] - s) / (e - s)
            cparam = c0 + (c1 - c0) * poly(u)
            rate = (c1 - c0) * dpoly(u) / (e - s) * self.scale
            out[mask] = self.cderiv(cparam) * rate[:, None]
        return out


def _greedy_farthest(points, count, seeds=()):
    """Indices of a farthest-point sample of ``points`` (chordal metric)."""
    chosen = list(seeds)
    if not chosen:
        chosen = [0]
    d = np.full(len(points), np.inf)
    for i in chosen:
        d = np.minimum(d, np.linalg.norm(points - points[i], axis=1))
    while len(chosen) < count:
        i = int(np.argmax(d))
        chosen.append(i)
        d = np.minimum(d, np.linalg.norm(points - points[i], axis=1))
    return chosen


def from_tangent_image(c, k=3, c_period=2.0 * np.pi, period=None,
                       basepoint=None, pinned=(), ell_min=1e-3,
                       hull_tol=1e-9, n_samples=1024):
    """Closed unit-speed curve whose tangent image is the closed spherical
    curve ``c``.

    ``c`` is either a vectorized callable u -> S^{n-1} or an (m, n) array
    of samples over one period.  Requires 0 to admit a strictly positive
    convex combination of the sampled image (checked by linear
    feasibility).  ``pinned`` is a sequence of (u, min_fraction) forcing a
    dwell at c(u) occupying at least ``min_fraction`` of the final period.

    The construction selects dwell points by farthest-point sampling,
    reparametrizes the moving segments by a degree-(2k+1) plateau map
    whose derivatives 1..k vanish at the junctions, and solves a linear
    program for positive dwell lengths that cancel the moving segments'
    integral, so the assembled curve closes.
    """
    if callable(c):
        cfun_raw = c
        tol_class = "analytic"
        cderiv_raw = None
    else:
        samples = np.asarray(c, dtype=float)
        rep = SphereSamplesTangent(samples, c_period, smoothness=k)
        cfun_raw = rep
        cderiv_raw = rep.derivative
        tol_class = "sampled"

    def cfun(u):
        v = np.asarray(cfun_raw(np.asarray(u, dtype=float)), dtype=float)
        return v

    if cderiv_raw is None:
        h = 1e-6 * c_period
        def cderiv(u):
            return (cfun(np.asarray(u) + h) - cfun(np.asarray(u) - h)) / (2 * h)
    else:
        cderiv = cderiv_raw

    dim = cfun(np.array([0.0])).shape[-1]
    us = np.linspace(0.0, c_period, n_samples, endpoint=False)
    image = cfun(us)

    t_star = _hull_interior_lp(image[:: max(1, n_samples // 256)], hull_tol)
    if not np.isfinite(t_star) or t_star <= hull_tol:
        raise PreconditionError("convex hull does not contain origin")

    poly = smoothstep(k)
    dpoly = poly.deriv()

    # fast path: the image integral already vanishes, so c itself is the
    # tangent field of a closed curve and no dwells are needed
    if not pinned:
        edges = np.linspace(0.0, c_period, 257)
        raw = _panel_gl(cfun, edges[:-1], edges[1:]).sum(axis=0)
        if np.linalg.norm(raw) <= 1e-10 * c_period:
            scale = 1.0 if period is None else c_period / float(period)
            out_period = c_period if period is None else float(period)
            fn = (lambda x: cfun(np.asarray(x, dtype=float) * scale))
            dv = (lambda x: cderiv(np.asarray(x, dtype=float) * scale) * scale)
            rep_out = CallableTangent(fn, out_period, dim, deriv=dv,
                                      smoothness=k, tol_class=tol_class)
            base = np.zeros(dim) if basepoint is None else np.asarray(basepoint, float)
            return UnitSpeedCurve(rep_out, base,
                                  metadata={"dwells": [], "hull_margin": t_star})

    pinned = list(pinned)
    circ = lambda d: np.minimum(np.mod(d, c_period), c_period - np.mod(d, c_period))
    pinned_idx = [int(np.argmin(circ(us - u0))) for u0, _ in pinned]
    pin_params = [u0 % c_period for u0, _ in pinned]

    def segment_moment(params):
        prev = np.concatenate([[params[-1] - c_period], params[:-1]])
        moment = np.zeros(dim)
        for lo, hi in zip(prev, params):
            edges = np.linspace(lo, hi, 17)
            moment += _panel_gl(
                lambda y, lo=lo, hi=hi: cfun(lo + (hi - lo) * poly((y - lo) / (hi - lo))),
                edges[:-1], edges[1:]).sum(axis=0)
        return prev, moment

    n_start = dim + 1 + len(pinned)
    last_err = None
    for q in range(n_start, max(4 * dim, n_start) + 1, 2):
        idx = _greedy_farthest(image, q, seeds=pinned_idx if pinned_idx else [0])
        params = sorted(set(
            [us[i] for i in idx if i not in pinned_idx] + pin_params))
        params = np.array(params)
        _, moment0 = segment_moment(params)
        # augment with the positive-combination support of the moment
        # equation over all image samples, so the dwell cone is feasible
        sol, _ = nnls(image.T, -moment0)
        support = [us[i] for i in np.where(sol > 1e-9)[0]]
        params = np.array(sorted(set(params.tolist() + support)))
        # merge junctions closer than a minimum separation (short moving
        # segments would concentrate curvature); pinned params survive
        min_sep = c_period / 64.0
        merged = [params[0]]
        for u in params[1:]:
            if u - merged[-1] >= min_sep or u in pin_params:
                if u in pin_params and u - merged[-1] < min_sep \
                        and merged[-1] not in pin_params:
                    merged.pop()
                merged.append(u)
        if (merged[0] + c_period) - merged[-1] < min_sep and \
                merged[-1] not in pin_params and len(merged) > 1:
            merged.pop()
        params = np.array(merged)
        pts = cfun(params)
        prev, moment = segment_moment(params)
        target = -moment

        # project the moment equation onto the span of the dwell points
        u_svd, s_svd, _ = np.linalg.svd(pts.T, full_matrices=True)
        rank = int((s_svd > 1e-9 * s_svd.max()).sum())
        basis = u_svd[:, :rank]
        resid_perp = np.linalg.norm(target - basis @ (basis.T @ target))
        if resid_perp > 1e-9 * max(1.0, np.linalg.norm(target)):
            last_err = "moment outside dwell-point span"
            continue
        a_eq = basis.T @ pts.T          # rank x q
        b_eq = basis.T @ target
        a_ub, b_ub = None, None
        if pinned:
            rows = []
            rhs = []
            for (u0, frac) in pinned:
                j = int(np.argmin(np.abs(params - (u0 % c_period))))
                row = np.full(len(params), frac)
                row[j] = frac - 1.0
                rows.append(row)           # frac*sum(l) - l_j <= -frac*cP
                rhs.append(-frac * c_period)
            a_ub = np.array(rows)
            b_ub = np.array(rhs)
        res = linprog(np.ones(len(params)), A_ub=a_ub, b_ub=b_ub,
                      A_eq=a_eq, b_eq=b_eq,
                      bounds=(ell_min, None), method="highs")
        if res.success:
            ell = res.x
            # polish the equality residual with a pseudo-inverse correction
            r = target - pts.T @ ell
            corr, *_ = np.linalg.lstsq(pts.T, r, rcond=None)
            if np.all(ell + corr >= 0.5 * ell_min):
                ell = ell + corr
            break
        last_err = "linear program infeasible"
    else:
        raise PreconditionError(
            f"dwell-length solve failed: {last_err or 'no feasible point set'}")

    natural_period = c_period + float(ell.sum())
    scale = 1.0 if period is None else natural_period / float(period)
    out_period = natural_period if period is None else float(period)

    pieces = []
    cursor = 0.0
    dwells = []
    for i, (lo, hi) in enumerate(zip(prev, params)):
        pieces.append((cursor, cursor + (hi - lo), "move", (lo, hi, poly, dpoly)))
        cursor += hi - lo
        pieces.append((cursor, cursor + ell[i], "dwell",
                       np.asarray(cfun(np.array([hi]))[0])))
        dwells.append((cursor / scale, (cursor + ell[i]) / scale, float(hi)))
        cursor += ell[i]

    pw = _PiecewiseTangent(cfun, cderiv, pieces, natural_period, scale=scale)
    breaks = tuple(np.array([p[0] for p in pieces]) / scale)
    rep_out = CallableTangent(pw, out_period, dim, deriv=pw.deriv,
                              smoothness=k, tol_class=tol_class,
                              breakpoints=breaks)
    base = np.zeros(dim) if basepoint is None else np.asarray(basepoint, float)
    curve = UnitSpeedCurve(rep_out, base, metadata={"dwells": dwells,
                                                    "hull_margin": t_star})
    return curve
