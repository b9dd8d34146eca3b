import numpy as np
import pytest

from ellislab.flows import PRESETS

GOLDEN = PRESETS["golden"]
SILVER = PRESETS["silver"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
