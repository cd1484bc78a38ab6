import numpy as np
import pytest

from worldsheet import catalog
from worldsheet.errors import PreconditionError
from worldsheet.gauge import OrthogonalGauge
from worldsheet.singular import (angle_state, classify_sing_star,
                                 find_antipodal_pairs, grid_residuals,
                                 is_global_immersion, null_tangent_check,
                                 sing_star_time_extent, tangent_formula)
from worldsheet.surface import derivatives, metric_det

TWO_PI = 2.0 * np.pi


def test_circle_full_slice_detection(circle):
    rep = find_antipodal_pairs(circle)
    assert len(rep.components) == 1
    comp = rep.components[0]
    assert comp.kind == "full_time_slice"
    assert min(abs(t - np.pi / 2) for t in comp.slice_times) < 2 * TWO_PI / 512
    assert min(abs(t - 3 * np.pi / 2) for t in comp.slice_times) < 2 * TWO_PI / 512


def test_circle_pairs_satisfy_antipodal_relation(circle):
    rep = find_antipodal_pairs(circle)
    for p in rep.components[0].pairs[:50]:
        # a'(s) = -b'(sigma) happens exactly at s - sigma = pi mod 2pi
        assert abs((p.s - p.sigma - np.pi + np.pi) % TWO_PI - np.pi) < 1e-7
        assert p.residual <= 1e-8
        # round trip (t, x) -> (s, sigma) is the exact algebraic inverse
        # (no modular adjustment), up to one rounding of the half-sums
        assert abs((p.x + p.t) - p.s) <= 4 * np.finfo(float).eps * max(1, p.s)
        assert abs((p.x - p.t) - p.sigma) <= 4 * np.finfo(float).eps * max(1, p.s)


def test_hopf_immersion_margin(hopf):
    ok, margin = is_global_immersion(hopf)
    assert ok
    assert abs(margin - np.sqrt(2)) < 1e-9


def test_degenerate_gauge_full_slice():
    d = catalog.degenerate_slice_gauge()
    rep = find_antipodal_pairs(d)
    assert len(rep.components) == 1
    comp = rep.components[0]
    assert comp.kind == "full_time_slice"
    assert min(abs(t - np.pi / 4) for t in comp.slice_times) < 2 * TWO_PI / 512


def test_meridian_loops_immersion(meridian_loops):
    ok, margin = is_global_immersion(meridian_loops)
    assert ok
    assert margin > 0.05


def test_random_planar_always_singular():
    for seed in range(6):
        g = catalog.random_planar_gauge(seed=seed)
        rep = find_antipodal_pairs(g)
        assert not rep.empty, seed


def test_detected_pairs_have_degenerate_metric():
    g = catalog.random_planar_gauge(seed=9)
    rep = find_antipodal_pairs(g)
    for p in rep.pairs[:100]:
        assert abs(metric_det(g, p.t, p.x)) <= 1e-6


def test_brute_force_oracle_agreement():
    # refined detection vs the plain grid: no sub-threshold grid cell
    # without a reported pair, and every reported pair is a true zero
    for seed in (1, 3, 8):
        g = catalog.random_planar_gauge(seed=seed)
        rep = find_antipodal_pairs(g, grid_n=512)
        res, grid = grid_residuals(g, 512)
        tol = g.pair_tol
        hot = np.argwhere(res < tol / 10)
        pairs = np.array([[p.s, p.sigma] for p in rep.pairs])
        spacing = g.E0 / 512
        for i, j in hot:
            d = np.abs(pairs - np.array([grid[i], grid[j]]))
            d = np.minimum(d, g.E0 - d).max(axis=1)
            assert d.min() <= 2 * spacing
        for p in rep.pairs:
            assert p.residual <= 10 * tol


def test_tangent_formula_quarter_offset_gauge():
    a = catalog.angle_curve(lambda x: x + 0.5 * np.pi,
                            lambda x: np.ones_like(x))
    # beta = alpha - pi/2 so that F(0, 0) = pi/2 is regular
    b = catalog.angle_curve(lambda x: x + np.pi, lambda x: np.ones_like(x))
    g = OrthogonalGauge(a, b)
    st = angle_state(g)
    tau = tangent_formula(st, 0.0, 0.0)
    gx, _ = derivatives(g, 0.0, 0.0)
    direct = gx / np.linalg.norm(gx)
    assert np.abs(np.asarray(tau) - direct).max() < 1e-12


def test_tangent_formula_random_gauge_seed5():
    g = catalog.random_planar_gauge(seed=5)
    st = angle_state(g)
    rng = np.random.default_rng(5)
    count = 0
    while count < 1000:
        t = rng.uniform(0, g.E0)
        x = rng.uniform(0, g.E0)
        gx, _ = derivatives(g, t, x)
        nrm = np.linalg.norm(gx)
        if nrm < 1e-3:
            continue
        tau = np.asarray(tangent_formula(st, t, x))
        direct = gx / nrm
        mism = np.arccos(np.clip(np.abs(tau @ direct), -1, 1))
        assert np.abs(tau - direct).max() < 1e-8 or mism < 1e-8
        count += 1


def test_tangent_formula_reflection_antisymmetry():
    a = catalog.angle_curve(lambda x: x + 0.5 * np.pi,
                            lambda x: np.ones_like(x))
    b = catalog.angle_curve(lambda x: x + np.pi, lambda x: np.ones_like(x))
    st = angle_state(OrthogonalGauge(a, b))
    tau1 = np.asarray(tangent_formula(st, 0.1, 0.3))

    class Flipped:
        E0 = st.E0

        def F(self, t, x):
            return -st.F(t, x)

        def G(self, t, x):
            return st.G(t, x)

    tau2 = np.asarray(tangent_formula(Flipped(), 0.1, 0.3))
    assert np.abs(tau1 + tau2).max() < 1e-12


def test_tangent_formula_rejects_singular_point(circle):
    st = angle_state(circle)
    with pytest.raises(PreconditionError):
        tangent_formula(st, np.pi / 2, 0.3)


def test_classify_circle_full_slice_not_strict(circle):
    rep = find_antipodal_pairs(circle)
    cc = classify_sing_star(circle, rep.components[0])
    assert cc.sing_star == "no"


def test_classify_generic_crossing_strict():
    g = catalog.random_planar_gauge(seed=3)
    rep = find_antipodal_pairs(g)
    flags = {classify_sing_star(g, c).sing_star for c in rep.components}
    assert "yes" in flags


def test_null_tangent_circle(circle):
    rep = find_antipodal_pairs(circle)
    vals = null_tangent_check(circle, rep.components[0].pairs[0])
    assert np.nanmax(vals) < 1e-7


def test_null_tangent_decay_perturbed_circle():
    g = catalog.random_planar_gauge(seed=9)
    rep = find_antipodal_pairs(g)
    comp = min(rep.components, key=lambda c: len(c.pairs))
    p = min(comp.pairs, key=lambda q: q.residual)
    radii = (2e-2, 1e-2, 5e-3, 2.5e-3)
    vals = null_tangent_check(g, p, radii=radii)
    good = np.isfinite(vals)
    vals = vals[good]
    for a, b in zip(vals[:-1], vals[1:]):
        assert b <= 0.5 * a + 1e-7


def test_null_tangent_requires_pair(hopf):
    rep = find_antipodal_pairs(hopf)
    pair = rep.pairs[0] if rep.pairs else None
    with pytest.raises(PreconditionError, match="no singular pairs"):
        null_tangent_check(hopf, pair)


def test_time_extent_nonconvex_nonempty():
    g = catalog.nonconvex_gauge()
    iv = sing_star_time_extent(g, t_samples=256, x_samples=1024)
    assert iv
    assert sum(b - a for a, b in iv) > 0.05


def test_time_extent_degenerate_cases_empty(circle):
    assert sing_star_time_extent(circle, t_samples=128, x_samples=512) == []
    d = catalog.degenerate_slice_gauge()
    assert sing_star_time_extent(d, t_samples=128, x_samples=512) == []


def test_coarse_grid_warning():
    import warnings
    fast = catalog.angle_curve(lambda x: 20 * x + 0.5 * np.pi,
                               lambda x: 20 * np.ones_like(x))
    mate = catalog.angle_curve(lambda x: 20 * x + 1.5 * np.pi,
                               lambda x: 20 * np.ones_like(x))
    g = OrthogonalGauge(fast, mate)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        find_antipodal_pairs(g, grid_n=64)
    assert any("suggest grid_n" in str(w.message) for w in caught)
