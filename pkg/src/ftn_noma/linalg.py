"""Small complex linear-algebra kernels used to build the MIMO linear stage."""

from __future__ import annotations

import numpy as np

from .errors import ConstructionError

__all__ = ["gram_schmidt_columns", "projector", "null_space_vector", "chordal_metric",
           "normalize_phase"]

_DROP_TOL = 1e-10
_RANK_TOL = 1e-12


def gram_schmidt_columns(m, tol=_DROP_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``m``.

    Classical Gram-Schmidt with one re-orthogonalization pass per column.
    A column whose residual falls below ``tol`` times its own norm is
    dropped, so the result has ``rank(m)`` columns (possibly zero).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    basis = []
    for col in m.T:
        norm0 = np.linalg.norm(col)
        if norm0 == 0.0:
            continue
        v = col.copy()
        for _ in range(2):
            for q in basis:
                v -= q * (q.conj() @ v)
        nv = np.linalg.norm(v)
        if nv <= tol * norm0:
            continue
        basis.append(v / nv)
    if not basis:
        return np.zeros((m.shape[0], 0), dtype=complex)
    return np.stack(basis, axis=1)


def projector(m) -> np.ndarray:
    """Orthogonal projector onto the column space of ``m``."""
    q = gram_schmidt_columns(m)
    return q @ q.conj().T


def normalize_phase(x, tol=1e-12) -> np.ndarray:
    """Rotate ``x`` so its first non-negligible component is real and positive."""
    x = np.asarray(x, dtype=complex)
    mag = np.abs(x)
    idx = np.flatnonzero(mag > tol * max(mag.max(initial=0.0), 1e-300))
    if idx.size == 0:
        return x
    c = x[idx[0]]
    return x * (np.conj(c) / abs(c))


def null_space_vector(rows, dim=None) -> np.ndarray:
    """Unit vector ``x`` with ``rows @ x = 0``.

    ``rows`` holds the constraint vectors as rows (bilinear form, no
    conjugation).  With no constraints the first canonical basis vector of
    length ``dim`` is returned.  When the null space has more than one
    dimension, the right singular vector of the smallest singular value is
    used.  The phase is normalized for reproducibility.

    Raises
    ------
    ConstructionError
        If the constraints have full rank, leaving no null space.
    """
    rows = np.asarray(rows, dtype=complex)
    if rows.size == 0:
        if dim is None:
            dim = rows.shape[-1] if rows.ndim == 2 else None
        if not dim:
            raise ValueError("dim is required when there are no constraints")
        e = np.zeros(dim, dtype=complex)
        e[0] = 1.0
        return e
    rows = np.atleast_2d(rows)
    k = rows.shape[1]
    _, s, vh = np.linalg.svd(rows, full_matrices=True)
    rank = int(np.sum(s > _RANK_TOL * s[0])) if s[0] > 0 else 0
    if rank >= k:
        raise ConstructionError(f"constraints of rank {rank} leave no null space in C^{k}")
    x = vh[-1].conj()
    return normalize_phase(x / np.linalg.norm(x))


def chordal_metric(accumulated, candidate, exponent=0.1) -> float:
    """Norm-weighted chordal distance between two column spaces.

    ``||candidate||_F ** exponent * ||P_acc - P_cand||_F`` where ``P`` are
    orthogonal projectors onto the respective column spaces.
    """
    diff = projector(accumulated) - projector(candidate)
    return float(np.linalg.norm(candidate) ** exponent * np.linalg.norm(diff))
