import numpy as np
import pytest

from worldsheet import catalog
from worldsheet.curves import (SphereSamplesTangent, UnitSpeedCurve,
                               from_tangent_image, sampled_hausdorff,
                               smoothstep)
from worldsheet.errors import PreconditionError
from worldsheet.quadrature import adaptive_simpson

TWO_PI = 2.0 * np.pi


def equator(u):
    u = np.asarray(u, dtype=float)
    return np.stack([np.cos(u), np.sin(u), np.zeros_like(u)], axis=-1)


def test_circle_eval_at_pi():
    c = catalog.circle_curve()
    assert np.abs(c.position(np.pi) - np.array([-1.0, 0.0])).max() < 1e-9


def test_eval_at_zero_is_basepoint():
    c = catalog.circle_curve(basepoint=(0.3, -2.0))
    assert np.abs(c.position(0.0) - np.array([0.3, -2.0])).max() < 1e-15


def test_sphere_path_eval_against_simpson_oracle():
    # dense samples of the circle tangent; compare position with the
    # independent quadrature oracle and the analytic point
    xs = np.linspace(0.0, TWO_PI, 2048, endpoint=False)
    samples = np.stack([np.cos(xs + np.pi / 2), np.sin(xs + np.pi / 2)], axis=1)
    rep = SphereSamplesTangent(samples, TWO_PI)
    curve = UnitSpeedCurve(rep, np.array([1.0, 0.0]))
    p = curve.position(np.pi / 2)
    assert np.abs(p - np.array([0.0, 1.0])).max() < 1e-6
    oracle = np.array([1.0, 0.0]) + adaptive_simpson(rep, 0.0, np.pi / 2,
                                                     tol=1e-12)
    assert np.abs(p - oracle).max() < 1e-9


def test_eval_additivity_against_quadrature():
    c = catalog.circle_curve()
    rng = np.random.default_rng(5)
    x1 = rng.uniform(0, TWO_PI, 100)
    x2 = x1 + rng.uniform(0, TWO_PI, 100)
    diff = c.position(x2) - c.position(x1)
    for j in range(100):
        oracle = adaptive_simpson(c.rep, x1[j], x2[j], tol=1e-12)
        assert np.abs(diff[j] - oracle).max() < 1e-8 * max(1, x2[j] - x1[j])


def test_eval_periodic_consistency():
    c = catalog.circle_curve()
    xs = np.linspace(0, TWO_PI, 37)
    d = c.position(xs + TWO_PI) - c.position(xs)
    assert np.abs(d - d[0]).max() < 1e-12


def test_closure_circle():
    rep = catalog.circle_curve().closure_defect()
    assert rep.closed
    assert rep.defect < 1e-12


def test_closure_straight_tangent_open():
    rep_t = lambda x: np.stack([np.ones_like(np.asarray(x, float)),
                                np.zeros_like(np.asarray(x, float))], axis=-1)
    from worldsheet.curves import CallableTangent
    c = UnitSpeedCurve(CallableTangent(rep_t, 1.0, 2), np.zeros(2))
    rep = c.closure_defect()
    assert not rep.closed
    assert abs(rep.defect - 1.0) < 1e-12


def test_unit_norm_invariant_dense():
    for curve in (catalog.circle_curve(),
                  catalog.symmetric_oval_curve(0.2),
                  from_tangent_image(equator, k=2)):
        norm_err, per_err = curve.validate(10000)
        assert norm_err <= 1e-9
        assert per_err <= 1e-9


def test_smoothstep_boundary_derivatives():
    for k in (1, 2, 3, 5):
        p = smoothstep(k)
        assert abs(p(0.0)) < 1e-15 and abs(p(1.0) - 1.0) < 1e-14
        d = p
        for _ in range(k):
            d = d.deriv()
            assert abs(d(0.0)) < 1e-12 and abs(d(1.0)) < 1e-10


# from_tangent_image ------------------------------------------------------

def test_equator_realizes_itself():
    a = from_tangent_image(equator, k=2)
    assert a.closure_defect().defect < 1e-10
    xs = np.linspace(0, a.period, 4096, endpoint=False)
    pos = a.position(xs)
    r = np.linalg.norm(pos - pos.mean(axis=0), axis=1)
    assert np.abs(r - 1.0).max() < 1e-9
    assert np.abs(pos[:, 2]).max() < 1e-12


def test_tangent_image_hausdorff_meridian_oval():
    path = catalog.meridian_oval_path(lon=0.0, width=0.25, overshoot=0.18)
    a = from_tangent_image(path, k=3)
    assert a.closure_defect().defect <= 1e-6
    m = 1 << 16
    img = a.tangent(np.linspace(0, a.period, m, endpoint=False))
    tgt = path(np.linspace(0, TWO_PI, m, endpoint=False))
    assert sampled_hausdorff(img, tgt) <= 1e-3


def test_from_tangent_image_rejects_hemisphere():
    def north(u):
        u = np.asarray(u, dtype=float)
        lat = 0.5 + 0.2 * np.sin(u)
        return np.stack([np.cos(lat) * np.cos(u), np.cos(lat) * np.sin(u),
                         np.sin(lat)], axis=-1)

    with pytest.raises(PreconditionError, match="convex hull"):
        from_tangent_image(north, k=1)


def test_from_tangent_image_sampled_input():
    us = np.linspace(0, TWO_PI, 2048, endpoint=False)
    path = catalog.meridian_oval_path(lon=0.0, width=0.3, overshoot=0.2)
    a = from_tangent_image(path(us), k=2)
    assert a.closure_defect().defect <= 1e-6
    # sampled representation carries the looser tolerance class
    assert a.norm_tol == 1e-6


def test_from_tangent_image_requested_period():
    path = catalog.wavy_circle_path(wave=0.2)
    a = from_tangent_image(path, k=3, period=2.5)
    assert abs(a.period - 2.5) < 1e-15
    assert a.closure_defect().defect < 1e-10
    assert a.validate(4096)[0] < 1e-12


def test_pinned_dwell_fraction():
    path = catalog.meridian_oval_path(lon=0.0, width=0.3, overshoot=0.45,
                                      pinched=True)
    a = from_tangent_image(path, k=3, period=1.0,
                           pinned=[(np.pi / 2, 0.2)])
    spans = [(d1 - d0) for d0, d1, cp in a.metadata["dwells"]
             if abs(cp - np.pi / 2) < 1e-9]
    assert spans and max(spans) >= 0.2 - 1e-9
    # the dwell really sits at e1
    d0, d1, _ = [d for d in a.metadata["dwells"]
                 if abs(d[2] - np.pi / 2) < 1e-9][0]
    mid = 0.5 * (d0 + d1)
    assert np.abs(a.tangent(mid) - np.array([1.0, 0.0, 0.0])).max() < 1e-12


def test_plateau_reparametrization_junction_smoothness():
    # tangent derivative of the realized curve vanishes where dwells meet
    # moving segments (order-k contact)
    path = catalog.meridian_oval_path(lon=0.0, width=0.25, overshoot=0.18)
    a = from_tangent_image(path, k=3)
    for d0, d1, _ in a.metadata["dwells"][:4]:
        for edge in (d0, d1):
            dv = a.tangent_derivative(np.array([edge - 1e-9, edge + 1e-9]))
            assert np.abs(dv).max() < 1e-5
