"""Small dense linear algebra kernel.

Matrices are plain 2-D ``float64`` numpy arrays; this module adds the shape
and finiteness checks the rest of the package relies on, and a hand-written
Cholesky solver that reports indefinite systems instead of patching them.
"""

import numpy as np

from .exceptions import NotPositiveDefinite, ShapeError

SYMMETRY_RTOL = 1e-9


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array with positive dimensions."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    if m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f"{name} must have positive dimensions, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf")
    return m


def identity(n):
    return np.eye(n, dtype=np.float64)


def matmul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply a{a.shape} by b{b.shape}: "
            f"a.cols={a.shape[1]} != b.rows={b.shape[0]}"
        )
    return a @ b


def transpose(a):
    # a fresh contiguous copy, so the involution is bit-identical
    return np.ascontiguousarray(as_matrix(a).T)


def cholesky(a):
    """Lower-triangular ``L`` with ``L @ L.T == a``.

    Raises NotPositiveDefinite on the first pivot that is not strictly
    positive (or not finite).
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ShapeError(f"cholesky needs a square matrix, got {a.shape}")
    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > 0.0 or not np.isfinite(pivot):
            raise NotPositiveDefinite(f"non-positive pivot {pivot!r} at index {j}")
        L[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return L


def _forward_substitute(L, b):
    n = L.shape[0]
    y = np.empty(n)
    for i in range(n):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    return y


def _back_substitute_transposed(L, y):
    # solves L.T x = y without forming L.T
    n = L.shape[0]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


def solve_spd(a, b):
    """Solve ``a x = b`` for a symmetric positive-definite ``a``.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Symmetric to a relative tolerance of 1e-9.
    b : array_like, shape (n,)

    Returns
    -------
    x : ndarray, shape (n,)
    """
    a = as_matrix(a, "a")
    n = a.shape[0]
    if a.shape[1] != n:
        raise ShapeError(f"solve_spd needs a square matrix, got a{a.shape}")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (n,):
        raise ShapeError(f"right-hand side has shape {b.shape}, expected ({n},)")
    scale = np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * scale:
        raise ValueError("solve_spd needs a symmetric matrix")
    L = cholesky(a)
    return _back_substitute_transposed(L, _forward_substitute(L, b))
