"""Reduced density matrices and pure-state concurrence over a bipartition.

A bipartition is given by the partition axes (emitters first, then modes, in
flat-index digit order) that make up subsystem A; the rest is B.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .hilbert import StateIndexer, SystemConfig


class BipartitionError(ValueError):
    pass


def _split(idx: StateIndexer, members: Iterable[int]) -> tuple[list[int], list[int]]:
    a = sorted(set(int(x) for x in members))
    n = len(idx.dims)
    if not a or len(a) >= n or a[0] < 0 or a[-1] >= n:
        raise BipartitionError(
            f"subsystem A must be a nonempty proper subset of partitions 0..{n - 1}, got {a}"
        )
    b = [x for x in range(n) if x not in a]
    return a, b


def _matrix(space, phi, members):
    idx = space.indexer if isinstance(space, SystemConfig) else space
    a, b = _split(idx, members)
    psi = np.asarray(phi).reshape(idx.dims).transpose(a + b)
    d_a = int(np.prod([idx.dims[x] for x in a]))
    return psi.reshape(d_a, -1)


def partial_trace(space, phi, members: Iterable[int]) -> np.ndarray:
    """``rho_A[a, a'] = sum_b psi(a, b) conj(psi(a', b))``.

    Rows and columns of ``rho_A`` follow the mixed-radix order of the A digits
    in ascending partition order.
    """
    m = _matrix(space, phi, members)
    return m @ m.conj().T


def purity(rho: np.ndarray) -> float:
    """``Tr rho^2`` of a Hermitian matrix."""
    return float(np.sum(np.abs(rho) ** 2))


def schmidt_weights(space, phi, members: Iterable[int]) -> np.ndarray:
    """Eigenvalues of ``rho_A`` (squared singular values), descending."""
    s = np.linalg.svd(_matrix(space, phi, members), compute_uv=False)
    return s**2


def concurrence(space, phi, members: Iterable[int]) -> float:
    """Pure-state concurrence ``sqrt(2 (1 - Tr rho_A^2))``.

    For a normalized state ``1 - Tr rho_A^2 = 2 sum_{i<j} p_i p_j`` over the
    Schmidt weights ``p``. The pair sum has no cancellation, so product states
    give 0 to rounding instead of ``sqrt(eps) ~ 1e-8``.
    """
    p = schmidt_weights(space, phi, members)
    tail = np.cumsum(p[::-1])[::-1]
    pairs = float(np.dot(p[:-1], tail[1:]))
    return 2.0 * float(np.sqrt(pairs))


def max_concurrence(space, members: Iterable[int]) -> float:
    """Upper bound ``sqrt(2 (1 - 1/d_min))`` for the given split."""
    idx = space.indexer if isinstance(space, SystemConfig) else space
    a, b = _split(idx, members)
    d_a = int(np.prod([idx.dims[x] for x in a]))
    d_b = idx.size // d_a
    return float(np.sqrt(2.0 * (1.0 - 1.0 / min(d_a, d_b))))
