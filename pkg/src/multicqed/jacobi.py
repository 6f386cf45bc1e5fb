"""Cyclic Jacobi eigensolver for dense Hermitian matrices.

Each rotation first removes the phase of the pivot ``a[p, q]`` and then applies
a real symmetric Jacobi rotation, so complex Hermitian input needs no special
casing beyond complex arithmetic. Real symmetric input runs the same kernel in
float64. Sweeps visit pairs in row-cyclic order ``(0,1), (0,2), ..., (n-2,n-1)``,
so results are deterministic for identical input.

Before rotating, the matrix is split into the connected components of its
nonzero pattern. Rotations never create entries between components, so
diagonalizing each block separately is exact; it also keeps symmetry-forbidden
matrix elements of eigenvectors exactly zero.
"""

from __future__ import annotations

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class JacobiConvergenceError(ArithmeticError):
    """The sweep cap was reached before the off-diagonal norm fell below threshold."""

    def __init__(self, sweeps: int, off_norm: float, threshold: float):
        self.sweeps = sweeps
        self.off_norm = off_norm
        self.threshold = threshold
        super().__init__(
            f"Jacobi did not converge after {sweeps} sweeps: "
            f"off-diagonal norm {off_norm:.3e} > threshold {threshold:.3e}"
        )


@numba.njit(cache=True)
def _sweep(a, v):
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            r = abs(apq)
            if r == 0.0:
                continue
            app = a[p, p].real
            aqq = a[q, q].real
            phase = np.conj(apq) / r
            theta = (aqq - app) / (2.0 * r)
            if theta >= 0.0:
                t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
            else:
                t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # unitary block on columns (p, q): [[c, s], [-s*phase, c*phase]]
            uqp = -s * phase
            uqq = c * phase
            for k in range(n):
                x = a[k, p]
                y = a[k, q]
                a[k, p] = c * x + uqp * y
                a[k, q] = s * x + uqq * y
            cuqp = np.conj(uqp)
            cuqq = np.conj(uqq)
            for k in range(n):
                x = a[p, k]
                y = a[q, k]
                a[p, k] = c * x + cuqp * y
                a[q, k] = s * x + cuqq * y
            a[p, p] = app - t * r
            a[q, q] = aqq + t * r
            a[p, q] = 0.0
            a[q, p] = 0.0
            for k in range(n):
                x = v[k, p]
                y = v[k, q]
                v[k, p] = c * x + uqp * y
                v[k, q] = s * x + uqq * y


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _jacobi_block(a: np.ndarray, threshold: float, max_sweeps: int):
    n = a.shape[0]
    v = np.eye(n, dtype=a.dtype)
    sweeps = 0
    off = _off_norm(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            raise JacobiConvergenceError(sweeps, off, threshold)
        _sweep(a, v)
        sweeps += 1
        off = _off_norm(a)
    return a.diagonal().real.copy(), v, sweeps


def blocks(h: np.ndarray) -> list[np.ndarray]:
    """Index sets of the connected components of the nonzero pattern, in order."""
    n = h.shape[0]
    count, labels = connected_components(csr_matrix(h != 0), directed=False)
    groups = [np.nonzero(labels == c)[0] for c in range(count)]
    groups.sort(key=lambda g: g[0])
    return groups if n else []


def jacobi_eigh(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decompose a Hermitian matrix.

    Parameters
    ----------
    h : (n, n) array
        Hermitian matrix; not modified.
    tol : float
        Stop when the off-diagonal Frobenius norm of every block is at most
        ``tol * ||h||_F``.
    max_sweeps : int
        Per-block sweep cap.

    Returns
    -------
    eigenvalues : (n,) float array, ascending (stable for ties)
    eigenvectors : (n, n) array; column ``j`` belongs to ``eigenvalues[j]``
    sweeps : int
        Largest sweep count over all blocks.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    n = h.shape[0]
    real = not np.iscomplexobj(h) or not np.any(h.imag)
    dtype = np.float64 if real else np.complex128
    work = np.array(h.real if real else h, dtype=dtype)
    threshold = tol * float(np.linalg.norm(work))

    values = np.zeros(n)
    vectors = np.zeros((n, n), dtype=dtype)
    max_used = 0
    for group in blocks(work):
        sub = np.ascontiguousarray(work[np.ix_(group, group)])
        w, v, sweeps = _jacobi_block(sub, threshold, max_sweeps)
        values[group] = w
        vectors[np.ix_(group, group)] = v
        max_used = max(max_used, sweeps)

    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order].astype(np.complex128), max_used
