import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ancilla_thermo.core import random_density_matrix
from ancilla_thermo.model import ModelParams

settings.register_profile("ci", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def resonant():
    """Default resonant, exchange-symmetric point."""
    return ModelParams()


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def density_matrices(draw, dim=4):
    return random_density_matrix(dim, np.random.default_rng(draw(seeds)))


@st.composite
def model_params(draw, symmetric=False):
    jx = draw(st.floats(0.0, 2.0))
    g = draw(st.floats(0.5, 10.0))
    return ModelParams(
        omega_s=draw(st.floats(0.5, 2.0)),
        omega_a=draw(st.floats(0.5, 2.0)),
        j_x=jx,
        j_y=jx if symmetric else draw(st.floats(0.0, 2.0)),
        j_z=draw(st.floats(-1.0, 1.0)),
        gamma=g,
        big_gamma=g * draw(st.floats(0.05, 0.95)),
    )
