import numpy as np
import pytest

from nps.geometry import Curve2D
from nps.nystrom import assemble
from nps.symmetrizable import SymmetrizablePair, factorize


@pytest.fixture(scope="session")
def ellipse_ops():
    return assemble(Curve2D.ellipse(1.0, 0.5), 256)


@pytest.fixture(scope="session")
def ellipse_ops128():
    return assemble(Curve2D.ellipse(1.0, 0.5), 128)


@pytest.fixture(scope="session")
def ellipse_spec(ellipse_ops):
    return factorize(SymmetrizablePair.from_operators(ellipse_ops))


@pytest.fixture(scope="session")
def circle_ops():
    return assemble(Curve2D.circle(0.25), 128, rescale=False)


@pytest.fixture(scope="session")
def kite_ops():
    return assemble(Curve2D.kite(), 256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
