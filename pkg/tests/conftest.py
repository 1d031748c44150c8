import random

import pytest
from hypothesis import settings

settings.register_profile("integrax", deadline=None, derandomize=True)
settings.load_profile("integrax")


@pytest.fixture
def rng():
    return random.Random(20240611)
