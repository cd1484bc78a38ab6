"""Named gauges, couples and spherical paths used by tests and the CLI.

Everything here is deterministic; randomized families take an explicit
seed.  Angle-represented planar curves use only even harmonics in the
periodic part of the angle, which keeps them exactly closed (odd total
harmonics cannot cancel the winding term, so the period integral of
e^{i alpha} vanishes identically).
"""

from __future__ import annotations

import numpy as np

from .curves import AngleTangent, CallableTangent, UnitSpeedCurve
from .gauge import AdmissibleCouple, OrthogonalGauge

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# planar building blocks

def circle_curve(basepoint=(1.0, 0.0)):
    """Unit-speed unit circle: a(x) = (cos x, sin x)."""
    rep = AngleTangent(lambda x: x + 0.5 * np.pi, TWO_PI,
                       alpha_prime=lambda x: np.ones_like(x), smoothness=7)
    return UnitSpeedCurve(rep, np.asarray(basepoint, dtype=float))


def circle_gauge():
    """a = b = unit circle; collapses to the origin at t = E0/4."""
    return OrthogonalGauge(circle_curve(), circle_curve(),
                           metadata={"name": "circle"})


def angle_curve(alpha, alpha_prime, period=TWO_PI, basepoint=(0.0, 0.0),
                smoothness=7):
    rep = AngleTangent(alpha, period, alpha_prime=alpha_prime,
                       smoothness=smoothness)
    return UnitSpeedCurve(rep, np.asarray(basepoint, dtype=float))


def symmetric_oval_curve(wobble=0.2, basepoint=None):
    """Centrally symmetric uniformly convex planar curve with tangent
    angle x + pi/2 + wobble*sin(2x); convex iff |wobble| < 1/2."""
    alpha = lambda x: x + 0.5 * np.pi + wobble * np.sin(2.0 * x)
    alpha_p = lambda x: 1.0 + 2.0 * wobble * np.cos(2.0 * x)
    curve = angle_curve(alpha, alpha_p)
    if basepoint is None:
        # basepoint making the curve exactly centrally symmetric
        xs = np.linspace(0.0, np.pi, 4097)
        tang = curve.tangent(xs)
        from scipy.integrate import simpson
        half = np.array([simpson(tang[:, 0], x=xs), simpson(tang[:, 1], x=xs)])
        curve = UnitSpeedCurve(curve.rep, -0.5 * half)
    return curve


def nonconvex_gauge(amplitude=0.8):
    """Planar gauge with a nonconvex a and b(x) = -a(x + E0/2).

    The tangent angle turning rate 1 + 2*amplitude*cos(2x) changes sign
    for amplitude > 1/2, so the curve is nonconvex.
    """
    alpha = lambda x: x + 0.5 * np.pi + amplitude * np.sin(2.0 * x)
    alpha_p = lambda x: 1.0 + 2.0 * amplitude * np.cos(2.0 * x)
    a = angle_curve(alpha, alpha_p)
    beta = lambda x: alpha(x + np.pi) + np.pi
    beta_p = lambda x: alpha_p(x + np.pi)
    b = angle_curve(beta, beta_p, basepoint=-a.position(np.pi))
    return OrthogonalGauge(a, b, metadata={"name": "nonconvex"})


def degenerate_slice_gauge():
    """Planar gauge with angles alpha(x) = x and beta(x) = x + pi/2 for
    the curves a' = e^{i alpha}, -b' = e^{i beta}; its antipodal set is a
    union of full degenerate slices."""
    a = angle_curve(lambda x: x, lambda x: np.ones_like(x))
    b = angle_curve(lambda x: x + 1.5 * np.pi, lambda x: np.ones_like(x))
    return OrthogonalGauge(a, b, metadata={"name": "degenerate-slice"})


# ---------------------------------------------------------------------------
# four-dimensional Hopf pair

def hopf_gauge():
    """a and b are unit circles in orthogonal coordinate planes of R^4;
    the tangent images on S^3 form a Hopf-linked pair with margin sqrt 2."""
    def a_tan(x):
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return np.stack([np.cos(x), np.sin(x), z, z], axis=-1)

    def a_tan_d(x):
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return np.stack([-np.sin(x), np.cos(x), z, z], axis=-1)

    def b_tan(x):
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return np.stack([z, z, np.cos(x), np.sin(x)], axis=-1)

    def b_tan_d(x):
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return np.stack([z, z, -np.sin(x), np.cos(x)], axis=-1)

    a = UnitSpeedCurve(CallableTangent(a_tan, TWO_PI, 4, deriv=a_tan_d,
                                       smoothness=7), np.array([0., -1., 0., 0.]))
    b = UnitSpeedCurve(CallableTangent(b_tan, TWO_PI, 4, deriv=b_tan_d,
                                       smoothness=7), np.array([0., 0., 0., -1.]))
    return OrthogonalGauge(a, b, metadata={"name": "hopf"})


def mirrored_hopf_gauge():
    """Hopf pair with the orientation of b reversed (last axis negated)."""
    g = hopf_gauge()
    rep = g.b.rep

    def b_tan(x):
        v = rep(x).copy()
        v[..., 3] = -v[..., 3]
        return v

    def b_tan_d(x):
        v = rep.derivative(x).copy()
        v[..., 3] = -v[..., 3]
        return v

    base = g.b.basepoint.copy()
    base[3] = -base[3]
    b = UnitSpeedCurve(CallableTangent(b_tan, TWO_PI, 4, deriv=b_tan_d,
                                       smoothness=7), base)
    return OrthogonalGauge(g.a, b, metadata={"name": "hopf-mirrored"})


# ---------------------------------------------------------------------------
# spherical paths for the tangent-image builder (S^2 in R^3)

def meridian_oval_path(lon=0.0, width=0.25, overshoot=0.18,
                       bottom=None, pinched=False):
    """Closed spherical path sweeping the given meridian pole to pole.

    The colatitude runs from -overshoot (behind the north pole) to
    pi + bottom (behind the south pole; ``bottom`` < 0 keeps clear of
    it), while the transverse offset oscillates with amplitude
    ``width``.  With ``pinched`` the offset vanishes at mid-sweep, so
    the path passes exactly through the meridian's equator point.
    """
    bottom = overshoot if bottom is None else bottom
    u1 = np.array([np.cos(lon), np.sin(lon), 0.0])
    u2 = np.array([-np.sin(lon), np.cos(lon), 0.0])
    u3 = np.array([0.0, 0.0, 1.0])
    c0 = 0.5 * (np.pi + bottom - overshoot)
    c1 = 0.5 * (np.pi + bottom + overshoot)

    def path(u):
        u = np.asarray(u, dtype=float)
        psi = c0 - c1 * np.cos(u)
        w = width * (np.sin(2.0 * u) if pinched else np.sin(u))
        m = np.multiply.outer(np.sin(psi), u1) + np.multiply.outer(np.cos(psi), u3)
        return np.cos(w)[..., None] * m + np.multiply.outer(np.sin(w), u2)

    return path


def swing_path(swing=1.6, lat_max=1.22, lon_center=0.0):
    """Closed spherical path through the equator point at ``lon_center``:
    longitude swings by +-swing around the center while the latitude
    oscillates at twice the rate (lat = lat_max * sin 2u).  Passes
    exactly through the center point at u = 0 and u = pi."""

    def path(u):
        u = np.asarray(u, dtype=float)
        lon = lon_center + swing * np.sin(u)
        lat = lat_max * np.sin(2.0 * u)
        cl = np.cos(lat)
        return np.stack([cl * np.cos(lon), cl * np.sin(lon), np.sin(lat)],
                        axis=-1)

    return path


def wavy_circle_path(wave=0.25, phase=0.0, axis_frame=None):
    """Closed spherical path: a great circle with latitude wave
    lambda(u) = wave * sin(u + phase).  Exactly closed for any wave
    amplitude (the integrand has no first harmonic)."""
    if axis_frame is None:
        e1 = np.array([1.0, 0.0, 0.0])
        e2 = np.array([0.0, 1.0, 0.0])
        e3 = np.array([0.0, 0.0, 1.0])
    else:
        e1, e2, e3 = axis_frame

    def path(u):
        u = np.asarray(u, dtype=float)
        lam = wave * np.sin(u + phase)
        cl = np.cos(lam)
        return (np.multiply.outer(cl * np.cos(u), e1)
                + np.multiply.outer(cl * np.sin(u), e2)
                + np.multiply.outer(np.sin(lam), e3))

    return path


# ---------------------------------------------------------------------------
# random couples (Fourier position + scaled normal velocity)

def fourier_couple(n=2, seed=0, modes=3, v_scale=0.5, amp=0.5):
    """Random periodic admissible couple: a unit circle in the first two
    coordinates perturbed by Fourier modes 2..modes+1, with velocity
    field v0 = rho(x) * N(x) along a unit normal.  Closed by construction;
    immersion and subluminality are guaranteed by the amplitude budget."""
    rng = np.random.default_rng(seed)
    ms = np.arange(2, modes + 2)
    coef_c = rng.normal(size=(len(ms), n)) / ms[:, None] ** 2
    coef_s = rng.normal(size=(len(ms), n)) / ms[:, None] ** 2
    # scale so the perturbation of gamma0' stays below min(amp, 0.55),
    # keeping the base circle an immersion with definite margin
    budget = float(((np.abs(coef_c) + np.abs(coef_s)) * ms[:, None]).sum())
    scale = min(amp, 0.55) / budget if budget > 0 else 0.0
    coef_c *= scale
    coef_s *= scale

    def gamma_deriv(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (n,))
        out[..., 0] = -np.sin(x)
        out[..., 1] = np.cos(x)
        for j, m in enumerate(ms):
            out += (np.multiply.outer(-m * np.sin(m * x), coef_c[j])
                    + np.multiply.outer(m * np.cos(m * x), coef_s[j]))
        return out

    phase = rng.uniform(0.0, TWO_PI)

    def v0(x):
        x = np.asarray(x, dtype=float)
        gp = gamma_deriv(x)
        unit = gp / np.linalg.norm(gp, axis=-1, keepdims=True)
        if n == 2:
            normal = np.stack([-unit[..., 1], unit[..., 0]], axis=-1)
        else:
            ref = np.zeros(n)
            ref[2] = 1.0
            proj = unit * (unit @ ref)[..., None]
            normal = ref - proj
            normal = normal / np.linalg.norm(normal, axis=-1, keepdims=True)
        rho = v_scale * (0.6 + 0.4 * np.sin(x + phase))
        return rho[..., None] * normal

    base = rng.normal(scale=0.2, size=n)
    return AdmissibleCouple(gamma_deriv, v0, TWO_PI, n, base,
                            metadata={"seed": seed, "modes": modes})


def random_planar_gauge(seed=0, modes=3, v_scale=0.5):
    """Random n = 2 gauge in the periodic class, via a Fourier couple."""
    from .gauge import gauge_from_couple, normalize
    couple = normalize(fourier_couple(2, seed=seed, modes=modes,
                                      v_scale=v_scale))
    g = gauge_from_couple(couple)
    g.metadata["name"] = f"random-planar-{seed}"
    return g
