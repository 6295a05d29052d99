"""Shared generators for randomized tests.

Datasets are produced by scoring random points with a random monotone
function (nonnegative linear part plus nonnegative step terms, optionally
rounded to create label ties), so monotone consistency holds by
construction and only needs to be re-checked by validate_dataset.
"""

import numpy as np

from mononet.core import MonotoneDataset, validate_dataset


def random_monotone_score(rng: np.random.Generator, X: np.ndarray) -> np.ndarray:
    d = X.shape[1]
    y = X @ rng.random(d)
    for _ in range(int(rng.integers(0, 3))):
        j = int(rng.integers(d))
        t = float(rng.uniform(X[:, j].min(), X[:, j].max() + 0.1))
        y = y + rng.random() * (X[:, j] >= t)
    if rng.random() < 0.3:
        y = np.round(y, 1)  # rounding is nondecreasing, so ties stay consistent
    if rng.random() < 0.3:
        y = y - float(y.max()) * rng.random()  # exercise negative labels
    return y


def random_monotone_dataset(
    rng: np.random.Generator, max_n: int = 64, max_d: int = 8
) -> MonotoneDataset:
    d = int(rng.integers(1, max_d + 1))
    n = int(rng.integers(1, max_n + 1))
    if rng.random() < 0.5:
        X = rng.random((n, d)) * float(rng.choice([1.0, 10.0]))
    else:
        # small integer grids force comparable pairs and shared coordinates
        X = rng.integers(0, 4, size=(n, d)).astype(float)
    X = np.unique(X, axis=0)
    rng.shuffle(X)
    y = random_monotone_score(rng, X)
    return validate_dataset(list(zip(map(tuple, X), y)))
