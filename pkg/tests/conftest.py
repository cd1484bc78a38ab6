import numpy as np
import pytest

from worldsheet import catalog, constructions
from worldsheet.curves import from_tangent_image
from worldsheet.gauge import OrthogonalGauge


@pytest.fixture(scope="session")
def circle():
    return catalog.circle_gauge()


@pytest.fixture(scope="session")
def hopf():
    return catalog.hopf_gauge()


@pytest.fixture(scope="session")
def meridian_loops():
    a = from_tangent_image(
        catalog.meridian_oval_path(lon=0.0, width=0.25, overshoot=0.18), k=3)
    b = from_tangent_image(
        catalog.swing_path(swing=2.0, lat_max=-0.9, lon_center=0.0),
        k=3, period=a.period)
    g = OrthogonalGauge(a, b, metadata={"name": "meridian-loops"})
    g.validate()
    return g


@pytest.fixture(scope="session")
def wavy_pair():
    a = from_tangent_image(catalog.wavy_circle_path(wave=0.25, phase=0.0), k=3)
    b = from_tangent_image(catalog.wavy_circle_path(wave=0.18, phase=1.2),
                           k=3, period=a.period)
    g = OrthogonalGauge(a, b, metadata={"name": "wavy-pair"})
    g.validate()
    return g


@pytest.fixture(scope="session")
def cantor_k1():
    spec = constructions.CantorSpec.single_mode(1, m=8, depth=8)
    return constructions.sharp_example_gauge(spec)


@pytest.fixture(scope="session")
def cantor_k2():
    spec = constructions.CantorSpec.single_mode(2, m=8, depth=8)
    return constructions.sharp_example_gauge(spec)


@pytest.fixture(scope="session")
def nonuniq():
    return constructions.nonuniqueness_pair()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
