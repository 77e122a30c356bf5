import numpy as np
import pytest

from nkpc_policy.models.data_structures import ModelParams

TABLE2 = dict(beta=0.99, kappa=0.1275, rho=0.8, epsilon=6.0, q=1.0, sigma_eps=1.0)


def draw_params(rng: np.random.Generator, with_q: bool = True) -> ModelParams:
    """Random valid calibration away from the edges of the parameter space."""
    return ModelParams(beta=rng.uniform(0.9, 0.995),
                       kappa=rng.uniform(0.01, 0.5),
                       rho=rng.uniform(0.1, 0.95),
                       epsilon=rng.uniform(1.5, 12.0),
                       q=rng.uniform(0.5, 1.0) if with_q else 1.0,
                       sigma_eps=1.0)


@pytest.fixture
def table2_params() -> ModelParams:
    return ModelParams(**TABLE2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
