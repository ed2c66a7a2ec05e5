import numpy as np
import pytest

from cpimac import ChannelRealization, sample_channel


@pytest.fixture
def unit_channel():
    return ChannelRealization.unit()


@pytest.fixture(params=[0, 7, 42, 1234])
def seeded_channel(request):
    return sample_channel(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
