import numpy as np
import pytest

from worldsheet import catalog
from worldsheet.errors import PreconditionError
from worldsheet.gauge import (AdmissibleCouple, couple_from_gauge,
                              equivalent_gauges, gauge_from_couple, normalize,
                              period_E0)
from worldsheet.quadrature import adaptive_simpson

TWO_PI = 2.0 * np.pi


def circle_couple(radius=1.0, v_scale=0.0):
    def deriv(x):
        x = np.asarray(x, dtype=float)
        return radius * np.stack([-np.sin(x), np.cos(x)], axis=-1)

    def v0(x):
        x = np.asarray(x, dtype=float)
        inward = -np.stack([np.cos(x), np.sin(x)], axis=-1)
        return v_scale * inward

    return AdmissibleCouple(deriv, v0, TWO_PI, 2,
                            np.array([radius, 0.0]))


def test_period_unit_circle():
    assert abs(period_E0(circle_couple()) - TWO_PI) < 1e-10


def test_period_radius_two():
    assert abs(period_E0(circle_couple(radius=2.0)) - 2 * TWO_PI) < 1e-10


def test_period_with_velocity_half():
    # E0 = integral 1/sqrt(1-1/4) = 2pi * 2/sqrt(3); also via the oracle
    c = circle_couple(v_scale=0.5)
    expect = adaptive_simpson(
        lambda x: np.ones_like(x) / np.sqrt(1 - 0.25), 0.0, TWO_PI, tol=1e-12)
    got = period_E0(c)
    assert abs(got - expect) < 1e-10
    assert abs(got - TWO_PI * 2.0 / np.sqrt(3.0)) < 1e-9


def test_normalize_already_normalized_unchanged():
    c = circle_couple()
    assert c.is_normalized()[0]
    assert normalize(c) is c


def test_normalize_radius_two_gives_arclength():
    nc = normalize(circle_couple(radius=2.0))
    ok, resid = nc.is_normalized()
    assert ok and resid < 1e-9
    assert abs(nc.period - 2 * TWO_PI) < 1e-9
    # reparametrized curve traces the same circle at unit speed
    xs = np.linspace(0, nc.period, 64)
    pos = nc.gamma0(xs)
    assert np.abs(np.linalg.norm(pos, axis=1) - 2.0).max() < 1e-8


def test_normalize_with_velocity():
    nc = normalize(circle_couple(v_scale=0.5))
    ok, resid = nc.is_normalized()
    assert ok and resid < 1e-9
    assert abs(nc.period - TWO_PI * 2 / np.sqrt(3)) < 1e-9


def test_normalize_idempotent():
    couple = catalog.fourier_couple(2, seed=13)
    nc = normalize(couple)
    xs = np.linspace(0, nc.period, 512)
    again = normalize(nc)
    assert again is nc or np.abs(
        np.asarray(again.gamma0_deriv(xs)) - np.asarray(nc.gamma0_deriv(xs))
    ).max() < 1e-9


def test_subluminal_rejection():
    c = circle_couple(v_scale=1.0 - 1e-12)
    with pytest.raises(PreconditionError, match="subluminal"):
        normalize(c)


def test_gauge_from_couple_zero_velocity_halves_coincide():
    g = gauge_from_couple(circle_couple())
    xs = np.linspace(0, TWO_PI, 256)
    assert np.abs(g.a.tangent(xs) - g.b.tangent(xs)).max() < 1e-12


def test_gauge_requires_normalized_couple():
    with pytest.raises(PreconditionError, match="normalize"):
        gauge_from_couple(circle_couple(radius=2.0))


def test_gauge_from_random_couple_membership_seed7():
    couple = normalize(catalog.fourier_couple(2, seed=7, modes=3))
    g = gauge_from_couple(couple)
    xs = np.linspace(0, g.E0, 10000, endpoint=False)
    s = np.linalg.norm(g.a.tangent(xs) + g.b.tangent(xs), axis=1)
    assert s.min() > 1e-6
    norms_a = np.linalg.norm(g.a.tangent(xs), axis=1)
    norms_b = np.linalg.norm(g.b.tangent(xs), axis=1)
    assert np.abs(norms_a - 1).max() < 1e-9
    assert np.abs(norms_b - 1).max() < 1e-9


def test_couple_from_gauge_circle(circle):
    c = couple_from_gauge(circle)
    xs = np.linspace(0, TWO_PI, 128)
    v = np.asarray(c.v0(xs))
    assert np.abs(v).max() < 1e-12
    ok, _ = c.is_normalized()
    assert ok


def test_couple_from_gauge_hopf_half_energies(hopf):
    c = couple_from_gauge(hopf)
    xs = np.linspace(0, TWO_PI, 256)
    gp = np.asarray(c.gamma0_deriv(xs))
    v = np.asarray(c.v0(xs))
    assert np.abs((gp * gp).sum(1) - 0.5).max() < 1e-12
    assert np.abs((v * v).sum(1) - 0.5).max() < 1e-12


def test_round_trip_identity_seed11():
    couple = normalize(catalog.fourier_couple(2, seed=11, modes=3))
    g = gauge_from_couple(couple)
    back = couple_from_gauge(g)
    g2 = gauge_from_couple(back)
    xs = np.linspace(0, g.E0, 999)
    assert np.abs(g2.a.tangent(xs) - g.a.tangent(xs)).max() < 1e-9
    # positions agree after basepoint alignment
    shift = g2.a.basepoint - g.a.basepoint
    assert np.abs((g2.a.position(xs) - shift) - g.a.position(xs)).max() < 1e-9


def test_equivalence_predicate_detects_shift():
    g = catalog.circle_gauge()
    # shifted witness: a(x + x0) differs from a(x) unless x0 = 0 mod 2pi
    dev_true = equivalent_gauges(g, g, x0=0.0, z0=np.zeros(2), sigma0=1)
    dev_false = equivalent_gauges(g, g, x0=0.5, z0=np.zeros(2), sigma0=1)
    assert dev_true < 1e-12
    assert dev_false > 0.1


def test_immersion_rejected():
    def deriv(x):
        x = np.asarray(x, dtype=float)
        # speed vanishes at x = 0
        return (1 - np.cos(x))[..., None] * np.stack(
            [-np.sin(x), np.cos(x)], axis=-1)

    c = AdmissibleCouple(deriv, lambda x: np.zeros(np.shape(x) + (2,)),
                         TWO_PI, 2, np.zeros(2))
    with pytest.raises(PreconditionError, match="immersion"):
        c.validate()
