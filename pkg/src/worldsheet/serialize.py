"""JSON specs for curves, couples and gauges, plus CSV writers.

Builders referenced by name rebuild deterministically from their
parameters; arbitrary gauges export as dense unit-sphere tangent samples.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from . import catalog, constructions
from .curves import AngleTangent, SphereSamplesTangent, UnitSpeedCurve
from .errors import PreconditionError
from .gauge import AdmissibleCouple, OrthogonalGauge

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# curves

def curve_from_spec(spec):
    kind = spec.get("kind")
    if kind == "circle":
        return catalog.circle_curve(tuple(spec.get("basepoint", (1.0, 0.0))))
    if kind == "angle_fourier":
        period = float(spec.get("period", 2.0 * np.pi))
        w = float(spec.get("winding", 1))
        phase = float(spec.get("phase", 0.5 * np.pi))
        modes = [(int(m), float(c), float(s))
                 for m, c, s in spec.get("modes", [])]
        om = 2.0 * np.pi / period

        def alpha(x):
            x = np.asarray(x, dtype=float)
            out = phase + w * om * x
            for m, c, s in modes:
                out = out + c * np.cos(m * om * x) + s * np.sin(m * om * x)
            return out

        def alpha_p(x):
            x = np.asarray(x, dtype=float)
            out = np.full_like(x, w * om)
            for m, c, s in modes:
                out = out + m * om * (-c * np.sin(m * om * x)
                                      + s * np.cos(m * om * x))
            return out

        base = np.asarray(spec.get("basepoint", (0.0, 0.0)), dtype=float)
        return UnitSpeedCurve(AngleTangent(alpha, period, alpha_prime=alpha_p,
                                           smoothness=int(spec.get("smoothness", 7))),
                              base)
    if kind == "sphere_samples":
        samples = np.asarray(spec["samples"], dtype=float)
        rep = SphereSamplesTangent(samples, float(spec["period"]),
                                   smoothness=int(spec.get("smoothness", 1)))
        base = np.asarray(spec.get("basepoint", np.zeros(samples.shape[1])),
                          dtype=float)
        return UnitSpeedCurve(rep, base)
    raise PreconditionError(f"unknown curve kind {kind!r}")


def curve_to_spec(curve: UnitSpeedCurve, samples=4096):
    xs = np.linspace(0.0, curve.period, samples, endpoint=False)
    return {
        "kind": "sphere_samples",
        "period": float(curve.period),
        "smoothness": int(curve.smoothness),
        "basepoint": [float(v) for v in curve.basepoint],
        "samples": np.round(curve.tangent(xs), 15).tolist(),
    }


# ---------------------------------------------------------------------------
# couples

def couple_from_spec(spec):
    g0 = spec["gamma0"]
    kind = g0.get("kind")
    if kind == "circle":
        radius = float(g0.get("radius", 1.0))
        n = int(g0.get("n", 2))

        def deriv(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros(x.shape + (n,))
            out[..., 0] = -radius * np.sin(x)
            out[..., 1] = radius * np.cos(x)
            return out

        base = np.zeros(n)
        base[0] = radius
        period = 2.0 * np.pi
        dim = n
    elif kind == "fourier_loop":
        n = int(g0["n"])
        modes = [(int(m), np.asarray(c, float), np.asarray(s, float))
                 for m, c, s in g0["modes"]]
        base = np.asarray(g0.get("basepoint", np.zeros(n)), dtype=float)

        def deriv(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros(x.shape + (n,))
            out[..., 0] = -np.sin(x)
            out[..., 1] = np.cos(x)
            for m, c, s in modes:
                out += (np.multiply.outer(-m * np.sin(m * x), c)
                        + np.multiply.outer(m * np.cos(m * x), s))
            return out

        period = 2.0 * np.pi
        dim = n
    else:
        raise PreconditionError(f"unknown gamma0 kind {kind!r}")

    v0spec = spec.get("v0", {"kind": "zero"})
    vkind = v0spec.get("kind", "zero")
    if vkind == "zero":
        def v0(x):
            x = np.asarray(x, dtype=float)
            return np.zeros(x.shape + (dim,))
    elif vkind in ("normal_scale", "fourier"):
        if vkind == "normal_scale":
            scale = float(v0spec.get("scale", 0.5))
            phase = float(v0spec.get("phase", 0.0))
            wobble = float(v0spec.get("wobble", 0.0))

            def rho(x):
                return scale * (1.0 + wobble * np.sin(x + phase))
        else:
            coeffs = [(int(m), float(c), float(s))
                      for m, c, s in v0spec.get("modes", [])]
            base_rho = float(v0spec.get("mean", 0.0))

            def rho(x):
                out = np.full_like(np.asarray(x, dtype=float), base_rho)
                for m, c, s in coeffs:
                    out = out + c * np.cos(m * x) + s * np.sin(m * x)
                return out

        def v0(x):
            x = np.asarray(x, dtype=float)
            gp = deriv(x)
            unit = gp / np.linalg.norm(gp, axis=-1, keepdims=True)
            if dim == 2:
                normal = np.stack([-unit[..., 1], unit[..., 0]], axis=-1)
            else:
                ref = np.zeros(dim)
                ref[2] = 1.0
                normal = ref - unit * (unit @ ref)[..., None]
                normal = normal / np.linalg.norm(normal, axis=-1, keepdims=True)
            return rho(x)[..., None] * normal
    else:
        raise PreconditionError(f"unknown v0 kind {vkind!r}")

    return AdmissibleCouple(deriv, v0, period, dim, base)


# ---------------------------------------------------------------------------
# gauges

_BUILDERS = {
    "circle": lambda p: catalog.circle_gauge(),
    "hopf": lambda p: catalog.hopf_gauge(),
    "mirrored_hopf": lambda p: catalog.mirrored_hopf_gauge(),
    "nonconvex": lambda p: catalog.nonconvex_gauge(p.get("amplitude", 0.8)),
    "degenerate_slice": lambda p: catalog.degenerate_slice_gauge(),
    "random_planar": lambda p: catalog.random_planar_gauge(
        seed=int(p.get("seed", 0)), modes=int(p.get("modes", 3)),
        v_scale=float(p.get("v_scale", 0.5))),
}


def _meridian_loops(p):
    from .curves import from_tangent_image
    a = from_tangent_image(
        catalog.meridian_oval_path(lon=0.0, width=0.25, overshoot=0.18), k=3)
    b = from_tangent_image(
        catalog.swing_path(swing=2.0, lat_max=-0.9, lon_center=0.0),
        k=3, period=a.period)
    g = OrthogonalGauge(a, b, metadata={"name": "meridian-loops"})
    g.validate()
    return g


def _wavy_pair(p):
    from .curves import from_tangent_image
    a = from_tangent_image(
        catalog.wavy_circle_path(wave=float(p.get("wave_a", 0.25)),
                                 phase=float(p.get("phase_a", 0.0))), k=3)
    b = from_tangent_image(
        catalog.wavy_circle_path(wave=float(p.get("wave_b", 0.18)),
                                 phase=float(p.get("phase_b", 1.2))),
        k=3, period=a.period)
    g = OrthogonalGauge(a, b, metadata={"name": "wavy-pair"})
    g.validate()
    return g


def _cantor(p):
    spec = constructions.CantorSpec.single_mode(
        int(p.get("k", 1)), m=int(p.get("m", 8)), depth=int(p.get("depth", 8)))
    g, _ = constructions.sharp_example_gauge(spec)
    return g


_BUILDERS["meridian_loops"] = _meridian_loops
_BUILDERS["wavy_pair"] = _wavy_pair
_BUILDERS["cantor"] = _cantor


def gauge_from_spec(spec):
    if "builder" in spec:
        b = spec["builder"]
        name = b.get("name")
        if name not in _BUILDERS:
            raise PreconditionError(f"unknown builder {name!r}")
        return _BUILDERS[name]({k: v for k, v in b.items() if k != "name"})
    if "couple" in spec:
        from .gauge import gauge_from_couple, normalize
        return gauge_from_couple(normalize(couple_from_spec(spec["couple"])))
    if "a" in spec and "b" in spec:
        a = curve_from_spec(spec["a"])
        b = curve_from_spec(spec["b"])
        g = OrthogonalGauge(a, b)
        g.validate()
        return g
    raise PreconditionError("gauge spec needs 'builder', 'couple', or 'a'/'b'")


def gauge_to_spec(g: OrthogonalGauge, samples=4096):
    return {
        "schema_version": SCHEMA_VERSION,
        "a": curve_to_spec(g.a, samples),
        "b": curve_to_spec(g.b, samples),
        "E0": float(g.E0),
        "name": g.metadata.get("name"),
    }


# ---------------------------------------------------------------------------
# output helpers

def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_report(path, payload):
    payload = dict(payload)
    payload["schema_version"] = SCHEMA_VERSION
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(jsonable(payload), fh, sort_keys=True, indent=1)
        fh.write("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating))
                        else v for v in row])
