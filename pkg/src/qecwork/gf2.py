"""Dense linear algebra over GF(2) on uint8 numpy arrays."""

from __future__ import annotations

import numpy as np


def as_bits(rows, ncols: int | None = None) -> np.ndarray:
    """Coerce a nested sequence (or array) to a 2-D uint8 matrix of 0/1."""
    mat = np.array(rows, dtype=np.uint8) % 2
    if mat.ndim == 2:
        return mat
    if mat.size == 0:
        return mat.reshape(0, ncols if ncols is not None else 0)
    if mat.ndim == 1:
        mat = mat.reshape(-1, ncols) if ncols else mat.reshape(1, -1)
    return mat


def rref(mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form.

    Pivots are chosen at the lowest available column index, so the result is
    deterministic. Zero rows are dropped.

    Returns
    -------
    reduced : ndarray
        Matrix of shape (rank, ncols).
    pivots : list of int
        Pivot column of each returned row.
    """
    m = as_bits(mat).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        m[others] ^= m[r]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(mat) -> int:
    m = as_bits(mat)
    if m.size == 0:
        return 0
    return len(rref(m)[1])


def nullspace(mat) -> np.ndarray:
    """Basis (as rows) of {x : mat @ x = 0 mod 2}."""
    m = as_bits(mat)
    cols = m.shape[1]
    reduced, pivots = rref(m) if m.size else (np.zeros((0, cols), np.uint8), [])
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, p in zip(reduced, pivots):
            basis[i, p] = row[f]
    return basis


def in_rowspace(mat, vec) -> bool:
    m = as_bits(mat)
    v = as_bits(vec)
    if m.size == 0:
        return not v.any()
    return rank(np.vstack([m, v])) == rank(m)


def inverse(mat) -> np.ndarray:
    m = as_bits(mat)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("matrix is not square")
    aug = np.hstack([m, np.eye(n, dtype=np.uint8)])
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular over GF(2)")
    return reduced[:n, n:]


def matmul(a, b) -> np.ndarray:
    return (as_bits(a).astype(np.int64) @ as_bits(b).astype(np.int64) % 2).astype(np.uint8)
