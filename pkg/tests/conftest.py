import numpy as np
import pytest

from drscreen.data import Dataset


def make_blobs(rng, n, d, sep=1.5):
    """Two Gaussian class clusters at +-sep along every informative axis."""
    half = n // 2
    x = np.vstack(
        [
            rng.standard_normal((half, d)) + sep,
            rng.standard_normal((n - half, d)) - sep,
        ]
    )
    y = np.concatenate([np.ones(half), -np.ones(n - half)])
    perm = rng.permutation(n)
    return Dataset.from_features(x[perm], y[perm])


def make_blobs_with_noise(rng, n, d_informative, d_noise, sep=2.0):
    """Cluster features plus pure-noise features; feature screening bait."""
    half = n // 2
    xi = np.vstack(
        [
            rng.standard_normal((half, d_informative)) + sep,
            rng.standard_normal((n - half, d_informative)) - sep,
        ]
    )
    xn = rng.standard_normal((n, d_noise))
    y = np.concatenate([np.ones(half), -np.ones(n - half)])
    perm = rng.permutation(n)
    return Dataset.from_features(np.hstack([xi, xn])[perm], y[perm])


def no_intercept_dataset(x, y):
    return Dataset(x=np.asarray(x, dtype=float), y=np.asarray(y, dtype=float),
                   has_intercept=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
