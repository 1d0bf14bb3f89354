import numpy as np
import pytest

from chemosteer import (build_beta, build_domain, build_time_grid,
                        select_params, build_weights)
from chemosteer.elliptic import DriftField


@pytest.fixture
def domain32():
    return build_domain(32, (0.3, 0.7), 0.5)


@pytest.fixture
def tgrid24():
    return build_time_grid(1.0, 24)


@pytest.fixture
def beta32(domain32):
    return build_beta(domain32)


def random_drift(rng, domain, tgrid, amplitude=1.0, per_step=False):
    """Random bounded drift with exact zeros on boundary faces."""
    n_faces = domain.n_cells + 1
    if per_step:
        faces = np.zeros((tgrid.n_steps, n_faces))
        faces[:, 1:-1] = rng.uniform(-amplitude, amplitude,
                                     (tgrid.n_steps, n_faces - 2))
        return DriftField(faces=faces)
    slice_ = np.zeros(n_faces)
    slice_[1:-1] = rng.uniform(-amplitude, amplitude, n_faces - 2)
    return DriftField.constant(slice_, tgrid)


def default_weights(domain, tgrid, beta, b_sup=0.0):
    params = select_params(b_sup, tgrid.horizon_T, beta)
    return build_weights(params, beta, domain, tgrid)
