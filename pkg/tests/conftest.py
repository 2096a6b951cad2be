import numpy as np
import pytest

from skewsphere import CorrelationSpec, ParameterVector
from skewsphere.kernels import available_backends, get_backend


def make_params(family="exponential", sigma2=(1.0, 1.0), eta=(1.0, 2.0),
                mu=(0.0, 0.0), scales=(0.15, 0.25), rho=0.5):
    return ParameterVector(sigma2, eta, mu, CorrelationSpec(family, scales, rho))


@pytest.fixture
def exp_right_params():
    """Exponential family, both components right-skewed."""
    return make_params()


@pytest.fixture
def exp_mixed_params():
    """Exponential family, one right- and one left-skewed component."""
    return make_params(eta=(1.0, -2.0))


@pytest.fixture
def askey_right_params():
    return make_params(family="askey", scales=(0.3, 0.5))


@pytest.fixture
def askey_mixed_params():
    return make_params(family="askey", eta=(1.0, -2.0), scales=(0.3, 0.5))


@pytest.fixture(params=available_backends())
def backend(request):
    return get_backend(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
