# conftest.py
import numpy as np
import pytest

from lattice_model.core import Box, ModelParams, build_grid


##########################################################################################
# PARAMETERS

@pytest.fixture
def default_params():
    """Default two-dimensional study parameters at eps = 1/8."""
    return ModelParams(d=2, s=0.5, p=2.0, ell=0.0, alpha=0.0, c=1.0, C_tilde=0.5, eps=0.125)


@pytest.fixture
def params_3d_raw():
    """d = 3, p = 2, s = 1/2 with alpha = ell = 0."""
    return {"d": 3, "s": 0.5, "p": 2.0, "ell": 0.0, "alpha": 0.0, "c": 1.0, "C_tilde": 1.0,
            "eps": 0.1}


##########################################################################################
# GRIDS

@pytest.fixture
def unit_square():
    return Box.unit(2)


@pytest.fixture
def grid_3x3(unit_square):
    """Q = (0, 1)^2 at eps = 1/4: 9 nodes."""
    return build_grid(unit_square, 0.25)


@pytest.fixture
def grid_7x7(unit_square):
    return build_grid(unit_square, 0.125)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
