"""Dense matrix primitives: interpolation, inner products, row-wise cosine.

All public operations work on 2-D float64 arrays ("embedding matrices",
n rows of d-dimensional token vectors) or 4-D float64 arrays ("video
tensors", frames x height x width x channels).  Arrays are validated and
widened to float64 at the boundary; results are always fresh arrays, so
everything here is pure and safe to share across threads.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidIndex, ShapeMismatch

__all__ = [
    "as_matrix",
    "as_video",
    "lerp",
    "frob_inner",
    "row_cosine_mean",
    "zero_row_threshold",
]


def as_matrix(values) -> np.ndarray:
    """Validate and return a read-only float64 n x d matrix.

    Requires at least one row and one column and fully finite entries.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeMismatch(f"matrix dimensions must be >= 1, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("matrix contains non-finite values")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def as_video(values) -> np.ndarray:
    """Validate and return a read-only float64 n_f x h x w x c tensor."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 4:
        raise ShapeMismatch(f"expected a 4-D video tensor, got ndim={arr.ndim}")
    if min(arr.shape) < 1:
        raise ShapeMismatch(f"video dimensions must be >= 1, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("video tensor contains non-finite values")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _require_same_shape(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ShapeMismatch(f"operand shapes differ: {x.shape} vs {y.shape}")


def zero_row_threshold(d: int) -> float:
    """Norm below which a d-dimensional row counts as numerically zero."""
    return 1e-12 * np.sqrt(d)


def lerp(x: np.ndarray, y: np.ndarray, i: int, k: int) -> np.ndarray:
    """The i-th of k interpolation steps between x and y.

    Returns (i/k) * x + ((k - i)/k) * y, so i = k is pure x and i = 0 is
    pure y.  Scoring loops use 1..k; i = 0 is permitted here because tests
    and sweeps need the far endpoint.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _require_same_shape(x, y)
    if k < 1:
        raise InvalidIndex(f"step count k must be >= 1, got {k}")
    if not 0 <= i <= k:
        raise InvalidIndex(f"index i must satisfy 0 <= i <= {k}, got {i}")
    return (i / k) * x + ((k - i) / k) * y


def frob_inner(x: np.ndarray, y: np.ndarray) -> float:
    """Frobenius inner product: the flattened-vector dot product.

    This is the unique bilinear extension of the vector inner product to
    matrices treated as single vectors, and it is what the projection step
    in the interpolation finder uses.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _require_same_shape(x, y)
    return float(np.dot(x.ravel(), y.ravel()))


def row_cosine_mean(x: np.ndarray, y: np.ndarray) -> float:
    """Mean over rows of the cosine similarity between matching rows.

    Computes (1/n) * sum_i <X_i, Y_i> / (||X_i|| * ||Y_i||).  Raises
    ZeroRow if any row of either operand has norm below the scale-aware
    threshold, since the quotient is meaningless there.
    """
    from .errors import ZeroRow

    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _require_same_shape(x, y)
    delta = zero_row_threshold(x.shape[1])
    x_norms = np.linalg.norm(x, axis=1)
    y_norms = np.linalg.norm(y, axis=1)
    for norms in (x_norms, y_norms):
        bad = np.flatnonzero(norms < delta)
        if bad.size:
            raise ZeroRow(int(bad[0]))
    dots = np.einsum("ij,ij->i", x, y)
    return float(np.mean(dots / (x_norms * y_norms)))
