import numpy as np
import pytest
from hypothesis import settings

from convoy.data import with_intercept
from convoy.decision import scale_link_probabilities
from convoy.fixtures import REFERENCE_ATTACK_PROBABILITY, regional_dataset
from convoy.logit import GaussianPrior, sample_posterior
from convoy.network import demo_network

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def table_data():
    return regional_dataset()


@pytest.fixture(scope="session")
def full_data(table_data):
    return with_intercept(table_data)


@pytest.fixture(scope="session")
def reference_draws(full_data):
    """One full-length chain, shared by every test that only needs draws."""
    return sample_posterior(full_data, GaussianPrior(), iterations=11000, burn_in=1000, seed=1)


@pytest.fixture(scope="session")
def quick_draws(full_data):
    """Short chain for tests exercising plumbing rather than estimates."""
    return sample_posterior(full_data, GaussianPrior(), iterations=1500, burn_in=500, seed=1)


@pytest.fixture(scope="session")
def net():
    return demo_network()


@pytest.fixture(scope="session")
def reference_marginals(net):
    """The 2-decimal scaled marginals used in the reference decision table."""
    return scale_link_probabilities(net, "9", REFERENCE_ATTACK_PROBABILITY, round_2dp=True)


def toy_rows(rng, s, k):
    """Random small design and binary response for oracle comparisons."""
    z = rng.normal(size=(s, k))
    y = rng.integers(0, 2, size=s)
    return z, y
