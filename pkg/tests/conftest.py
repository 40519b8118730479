import pytest

from tumordyn import (
    ConstantSchedule,
    ModelParams,
    SinusoidSchedule,
    find_periodic,
)


@pytest.fixture(scope="session")
def sinusoid():
    return SinusoidSchedule(period=1.0, mean_level=1.0, amplitude=0.5)


@pytest.fixture(scope="session")
def default_params(sinusoid):
    return ModelParams(mu=1.0, sigma_tilde=0.9, gamma=1.0, schedule=sinusoid)


@pytest.fixture(scope="session")
def default_orbit(default_params):
    return find_periodic(default_params)


@pytest.fixture(scope="session")
def constant_params():
    return ModelParams(
        mu=1.0, sigma_tilde=0.9, gamma=1.0, schedule=ConstantSchedule(period=1.0, value=1.0)
    )


@pytest.fixture(scope="session")
def constant_orbit(constant_params):
    return find_periodic(constant_params)
