"""Initial state vectors on the flat basis."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .hilbert import BasisState, StateIndexer, SystemConfig


class DegenerateStateError(ValueError):
    """The requested state has zero norm."""


def _indexer(space) -> StateIndexer:
    return space.indexer if isinstance(space, SystemConfig) else space


def fock_state(space: SystemConfig | StateIndexer, basis: BasisState) -> np.ndarray:
    idx = _indexer(space)
    phi = np.zeros(idx.size, dtype=np.complex128)
    phi[idx.index_of(basis)] = 1.0
    return phi


def truncated_coherent(alpha: complex, cap: int) -> np.ndarray:
    """Unnormalized amplitudes ``alpha**f / sqrt(f!)`` for ``f = 0..cap``."""
    amps = np.empty(cap + 1, dtype=np.complex128)
    amps[0] = 1.0
    for f in range(1, cap + 1):
        amps[f] = amps[f - 1] * alpha / math.sqrt(f)
    return amps


def coherent_state(
    space: SystemConfig | StateIndexer,
    alphas: Sequence[complex],
    emitter_state: Sequence[int] | Mapping[tuple[int, ...], complex],
) -> np.ndarray:
    """Product of truncated coherent modes with an emitter state, renormalized.

    Parameters
    ----------
    alphas
        One complex amplitude per mode.
    emitter_state
        Either one 1-based level per emitter, or a table mapping level tuples
        to complex amplitudes.
    """
    idx = _indexer(space)
    if len(alphas) != idx.n_modes:
        raise ValueError(f"expected {idx.n_modes} coherent amplitudes, got {len(alphas)}")
    emitter_dims = idx.dims[: idx.n_emitters]
    atom = np.zeros(emitter_dims or (1,), dtype=np.complex128)
    if isinstance(emitter_state, Mapping):
        items = emitter_state.items()
    else:
        items = [(tuple(emitter_state), 1.0)]
    for levels, amp in items:
        levels = tuple(levels)
        if len(levels) != idx.n_emitters:
            raise ValueError(f"expected {idx.n_emitters} emitter levels, got {levels}")
        for n, r in enumerate(levels):
            idx.check_level(n, r)
        atom[tuple(r - 1 for r in levels) or (0,)] += amp
    psi = atom.reshape(-1)
    for nu, alpha in enumerate(alphas):
        psi = np.kron(psi, truncated_coherent(complex(alpha), idx.photon_caps[nu]))
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise DegenerateStateError("emitter amplitude table is all zero")
    return psi / norm


def superposition(
    space: SystemConfig | StateIndexer, terms: Sequence[tuple[complex, BasisState]]
) -> np.ndarray:
    idx = _indexer(space)
    phi = np.zeros(idx.size, dtype=np.complex128)
    for weight, basis in terms:
        phi[idx.index_of(basis)] += weight
    norm = np.linalg.norm(phi)
    if norm == 0:
        raise DegenerateStateError("superposition weights cancel to the zero vector")
    return phi / norm
