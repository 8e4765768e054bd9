import numpy as np
import pytest

from polaron2d import ModelParams, QuadratureSpec


@pytest.fixture
def params_m2() -> ModelParams:
    return ModelParams(2.0, -1.0)


@pytest.fixture
def tight_quad() -> QuadratureSpec:
    return QuadratureSpec(rel_tol=1e-13, abs_tol=1e-14, max_subdivisions=600)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
