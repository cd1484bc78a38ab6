"""Admissible initial couples and the orthogonal-gauge representation.

A couple is a periodic immersed curve together with an orthogonal,
subluminal velocity field.  Normalization reparametrizes it so that
|gamma0'|^2 + |v0|^2 = 1, after which the two unit-speed half-wave
curves are read off algebraically:

    a' = gamma0' + v0,      b' = gamma0' - v0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curves import (CallableTangent, SphereSamplesTangent, UnitSpeedCurve,
                     _as_batch)
from .errors import PreconditionError
from .quadrature import PrefixIntegrator, adaptive_simpson


@dataclass
class AdmissibleCouple:
    """Initial data (gamma0, v0): gamma0' and v0 as vectorized callables.

    gamma0 is reconstructed as basepoint + integral of gamma0_deriv.
    """

    gamma0_deriv: object            # x -> (m, n)
    v0: object                      # x -> (m, n)
    period: float
    dim: int
    basepoint: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.basepoint = np.asarray(self.basepoint, dtype=float)
        self._prefix = None

    def gamma0(self, x):
        if self._prefix is None:
            self._prefix = PrefixIntegrator(
                lambda y: np.asarray(self.gamma0_deriv(y), dtype=float),
                self.period, n_panels=2048,
                breakpoints=self.metadata.get("breakpoints", ()))
        xb, scalar = _as_batch(x)
        out = self.basepoint + self._prefix.integral(xb)
        return out[0] if scalar else out

    def validate(self, samples=2048, ortho_tol=1e-9):
        x = np.linspace(0.0, self.period, samples, endpoint=False)
        gp = np.asarray(self.gamma0_deriv(x), dtype=float)
        v = np.asarray(self.v0(x), dtype=float)
        speed = np.linalg.norm(gp, axis=1)
        vmag = np.linalg.norm(v, axis=1)
        ortho = np.abs((gp * v).sum(axis=1)).max()
        if ortho > ortho_tol * max(1.0, speed.max()):
            raise PreconditionError(
                f"v0 not orthogonal to gamma0': max residual {ortho:.3e}")
        if vmag.max() >= 1.0 - 1e-9:
            raise PreconditionError("velocity not uniformly subluminal")
        if speed.min() <= 1e-6:
            raise PreconditionError("gamma0 is not an immersion (|gamma0'| ~ 0)")
        return float(ortho), float(vmag.max()), float(speed.min())

    def is_normalized(self, samples=2048, tol=1e-9):
        x = np.linspace(0.0, self.period, samples, endpoint=False)
        gp = np.asarray(self.gamma0_deriv(x), dtype=float)
        v = np.asarray(self.v0(x), dtype=float)
        resid = np.abs((gp * gp).sum(axis=1) + (v * v).sum(axis=1) - 1.0).max()
        return float(resid) <= tol, float(resid)


@dataclass
class OrthogonalGauge:
    """A pair (a, b) of unit-speed curves with common period E0."""

    a: UnitSpeedCurve
    b: UnitSpeedCurve
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.a.dim != self.b.dim:
            raise PreconditionError("a and b live in different dimensions")
        if abs(self.a.period - self.b.period) > 1e-12 * self.a.period:
            raise PreconditionError("a and b have different periods")

    @property
    def E0(self):
        return self.a.period

    @property
    def dim(self):
        return self.a.dim

    @property
    def pair_tol(self):
        return max(self.a.pair_tol, self.b.pair_tol)

    def min_sum_norm(self, samples=4096):
        """min over the diagonal of |a'(x) + b'(x)| (X-membership margin)."""
        x = np.linspace(0.0, self.E0, samples, endpoint=False)
        s = self.a.tangent(x) + self.b.tangent(x)
        return float(np.linalg.norm(s, axis=1).min())

    def periodicity_defect(self):
        """|(a+b)(E0) - (a+b)(0)|; zero for members of the periodic class."""
        return float(np.linalg.norm(self.a.drift() + self.b.drift()))

    @property
    def periodic(self):
        return self.periodicity_defect() <= 1e-6

    def validate(self, samples=4096):
        self.a.validate(samples)
        self.b.validate(samples)
        m = self.min_sum_norm(samples)
        if m <= 1e-6:
            raise PreconditionError(
                f"a' + b' vanishes somewhere (min |a'+b'| = {m:.3e})")
        return m


def period_E0(couple: AdmissibleCouple, tol=1e-10):
    """Common period of the normalized couple:
    integral over one period of |gamma0'| / sqrt(1 - |v0|^2)."""
    couple.validate()

    def integrand(x):
        gp = np.asarray(couple.gamma0_deriv(x), dtype=float)
        v = np.asarray(couple.v0(x), dtype=float)
        return np.linalg.norm(gp, axis=1) / np.sqrt(
            1.0 - (v * v).sum(axis=1))

    return float(adaptive_simpson(integrand, 0.0, couple.period, tol=tol))


def normalize(couple: AdmissibleCouple, nodes=4096):
    """Equivalent couple reparametrized so |gamma0'|^2 + |v0|^2 = 1.

    The new parameter s runs over [0, E0].  The monotone change of
    variables lambda(s) is inverted with a PCHIP seed refined by Newton
    steps against the exact cumulative integral, and the reparametrized
    tangent uses the algebraic identity |gamma0'(lambda)| lambda'(s) =
    sqrt(1 - |v0(lambda)|^2), so the normalization holds structurally.
    """
    couple.validate()
    normalized, _ = couple.is_normalized()
    L = couple.period

    def density(x):
        gp = np.asarray(couple.gamma0_deriv(x), dtype=float)
        v = np.asarray(couple.v0(x), dtype=float)
        return (np.linalg.norm(gp, axis=1)
                / np.sqrt(1.0 - (v * v).sum(axis=1)))[:, None]

    mu = PrefixIntegrator(density, L, n_panels=nodes,
                          breakpoints=couple.metadata.get("breakpoints", ()))
    E0 = float(mu.per_period[0])
    if normalized:
        return couple

    grid = np.linspace(0.0, L, nodes + 1)
    mu_vals = mu.integral(grid)[:, 0]
    # strictly increasing by the immersion hypothesis
    inverse_seed = PchipInterpolator(mu_vals, grid)

    def lam(s):
        s = np.asarray(s, dtype=float)
        wraps = np.floor(s / E0)
        y = s - wraps * E0
        x = np.clip(inverse_seed(np.clip(y, 0.0, E0)), 0.0, L)
        for _ in range(3):
            f = mu.integral(x)[..., 0] - y
            fp = density(np.ravel(x)).reshape(x.shape)
            x = np.clip(x - f / fp, 0.0, L)
        return x + wraps * L

    def new_deriv(s):
        x = lam(np.asarray(s, dtype=float))
        gp = np.asarray(couple.gamma0_deriv(x), dtype=float)
        v = np.asarray(couple.v0(x), dtype=float)
        speed = np.linalg.norm(gp, axis=-1, keepdims=True)
        scale = np.sqrt(1.0 - (v * v).sum(axis=-1, keepdims=True))
        return gp / speed * scale

    def new_v0(s):
        return np.asarray(couple.v0(lam(np.asarray(s, dtype=float))), dtype=float)

    return AdmissibleCouple(new_deriv, new_v0, E0, couple.dim,
                            couple.basepoint,
                            metadata={"parent": couple.metadata})


def gauge_from_couple(couple: AdmissibleCouple, smoothness=3, bake=4096):
    """Orthogonal gauge (a, b) of a normalized couple:
    a' = gamma0' + v0, b' = gamma0' - v0, with a(0) = b(0) = gamma0(0).

    ``bake`` resamples the algebraic tangent fields into renormalized
    periodic splines for fast evaluation; the resampling error is
    measured at panel midpoints and the node count doubled until it is
    below 2e-10, so the gauge keeps the analytic tolerance class.
    Piecewise couples (with breakpoints) are never baked.
    """
    ok, resid = couple.is_normalized()
    if not ok:
        raise PreconditionError(
            f"couple not normalized (residual {resid:.3e}); call normalize first")

    def a_tan(x):
        return (np.asarray(couple.gamma0_deriv(x), dtype=float)
                + np.asarray(couple.v0(x), dtype=float))

    def b_tan(x):
        return (np.asarray(couple.gamma0_deriv(x), dtype=float)
                - np.asarray(couple.v0(x), dtype=float))

    breaks = couple.metadata.get("breakpoints", ())
    if bake and not breaks:
        reps = []
        for tan in (a_tan, b_tan):
            nodes = int(bake)
            while True:
                xs = np.linspace(0.0, couple.period, nodes, endpoint=False)
                rep = SphereSamplesTangent(tan(xs), couple.period,
                                           smoothness=smoothness,
                                           tol_class="analytic")
                mids = xs + 0.5 * couple.period / nodes
                err = np.abs(rep(mids) - tan(mids)).max()
                if err <= 2e-10 or nodes >= 32768:
                    break
                nodes *= 2
            if err > 2e-10:
                rep = None
            reps.append(rep)
        if all(r is not None for r in reps):
            a = UnitSpeedCurve(reps[0], couple.basepoint)
            b = UnitSpeedCurve(reps[1], couple.basepoint)
            g = OrthogonalGauge(a, b, metadata={"from_couple": True,
                                                "baked_nodes": nodes})
            g.validate()
            return g

    a = UnitSpeedCurve(CallableTangent(a_tan, couple.period, couple.dim,
                                       smoothness=smoothness, breakpoints=breaks),
                       couple.basepoint)
    b = UnitSpeedCurve(CallableTangent(b_tan, couple.period, couple.dim,
                                       smoothness=smoothness, breakpoints=breaks),
                       couple.basepoint)
    g = OrthogonalGauge(a, b, metadata={"from_couple": True})
    g.validate()
    return g


def couple_from_gauge(g: OrthogonalGauge):
    """Normalized admissible couple of a gauge:
    gamma0 = (a + b)/2, v0 = (a' - b')/2."""
    g.validate()

    def deriv(x):
        return 0.5 * (g.a.tangent(np.asarray(x, dtype=float))
                      + g.b.tangent(np.asarray(x, dtype=float)))

    def v0(x):
        return 0.5 * (g.a.tangent(np.asarray(x, dtype=float))
                      - g.b.tangent(np.asarray(x, dtype=float)))

    base = 0.5 * (g.a.basepoint + g.b.basepoint)
    breaks = tuple(g.a.rep.breakpoints) + tuple(g.b.rep.breakpoints)
    return AdmissibleCouple(deriv, v0, g.E0, g.dim, base,
                            metadata={"breakpoints": breaks})


def equivalent_gauges(g1: OrthogonalGauge, g2: OrthogonalGauge,
                      x0, z0, sigma0, samples=512):
    """Check the claimed equivalence witness (x0, z0, sigma0):
    a2(x) = a1(sigma0 x + x0) + z0 and b2(x) = b1(sigma0 x + x0) - z0.

    Returns the maximum sampled deviation (a verification predicate; no
    search over witnesses is attempted).
    """
    if sigma0 not in (+1, -1):
        raise PreconditionError("sigma0 must be +1 or -1")
    z0 = np.asarray(z0, dtype=float)
    x = np.linspace(0.0, g1.E0, samples, endpoint=False)
    da = g2.a.position(x) - (g1.a.position(sigma0 * x + x0) + z0)
    db = g2.b.position(x) - (g1.b.position(sigma0 * x + x0) - z0)
    return float(max(np.abs(da).max(), np.abs(db).max()))
