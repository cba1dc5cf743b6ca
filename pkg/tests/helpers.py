"""Shared constructors for test instances."""

import os

import numpy as np

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def fixture(*parts):
    return os.path.join(FIXTURES, *parts)


def random_triplet(seed, n=8, d=16):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, d)), rng.normal(size=(n, d)), rng.normal(size=(n, d))


def block_orthogonal_noise(rng, direction, n_ids, scale):
    """Noise Frobenius-orthogonal to the direction, separately on the
    leading n_ids rows and on the trailing rows, so the projection feet of
    both the truncated and the full triplet are exactly unchanged."""
    noise = rng.normal(size=direction.shape)
    for sl in (slice(0, n_ids), slice(n_ids, direction.shape[0])):
        block = direction[sl]
        denom = float(np.dot(block.ravel(), block.ravel()))
        if denom > 0.0:
            coef = float(np.dot(block.ravel(), noise[sl].ravel())) / denom
            noise[sl] = noise[sl] - coef * block
    nn = float(np.linalg.norm(noise))
    return noise * (scale / nn) if nn > 0.0 else noise


def planted_instance(seed, n=8, d=16, k=30, j=14, rel_noise=0.0):
    """A, B random Gaussian; C at step j of the A-B segment, optionally
    plus block-orthogonal noise of the given relative Frobenius norm."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, d))
    b = rng.normal(size=(n, d))
    c = (j / k) * a + ((k - j) / k) * b
    ids = tuple(int(v) for v in rng.choice(np.arange(1, n + 1), size=3, replace=False))
    if rel_noise > 0.0:
        scale = rel_noise * float(np.linalg.norm(c))
        c = c + block_orthogonal_noise(rng, b - a, max(ids), scale)
    return a, b, c, ids
