"""Probabilities and expectation values of a pure state.

All functions take the :class:`~multicqed.hilbert.StateIndexer` (or the
config) and a flat state vector. The vector is reshaped to the partition
tensor ``psi[r_1, .., r_k, f_1, .., f_m]`` (0-based digits), and each quantity
is a contraction over that tensor. Emitter and mode positions are 0-based,
emitter levels 1-based.
"""

from __future__ import annotations

import numpy as np

from .hilbert import BasisState, StateIndexer, SystemConfig


def _setup(space, phi):
    idx = space.indexer if isinstance(space, SystemConfig) else space
    phi = np.asarray(phi)
    if phi.shape != (idx.size,):
        raise ValueError(f"state has shape {phi.shape}, expected ({idx.size},)")
    return idx, phi.reshape(idx.dims)


def _marginal(psi: np.ndarray, axis: int) -> np.ndarray:
    weights = np.abs(psi) ** 2
    others = tuple(a for a in range(psi.ndim) if a != axis)
    # rounding can push a summed probability a few ulps past 1
    return np.minimum(weights.sum(axis=others), 1.0)


def state_probability(space, phi, basis: BasisState) -> float:
    idx, _ = _setup(space, phi)
    return min(float(abs(phi[idx.index_of(basis)]) ** 2), 1.0)


def level_probabilities(space, phi, emitter: int) -> np.ndarray:
    """Presence probability of every level of one emitter (index ``level - 1``)."""
    idx, psi = _setup(space, phi)
    return _marginal(psi, idx.emitter_axis(emitter))


def level_probability(space, phi, emitter: int, level: int) -> float:
    idx, _ = _setup(space, phi)
    digit = idx.check_level(emitter, level)
    return float(level_probabilities(idx, phi, emitter)[digit])


def photon_distribution(space, phi, mode: int) -> np.ndarray:
    idx, psi = _setup(space, phi)
    return _marginal(psi, idx.mode_axis(mode))


def photon_probability(space, phi, mode: int, count: int) -> float:
    dist = photon_distribution(space, phi, mode)
    if not 0 <= count < dist.size:
        raise IndexError(f"mode {mode}: photon number {count} outside 0..{dist.size - 1}")
    return float(dist[count])


def expected_photon_number(space, phi, mode: int) -> float:
    dist = photon_distribution(space, phi, mode)
    return float(np.dot(np.arange(dist.size), dist))


def expect_annihilation(space, phi, mode: int) -> complex:
    """``<a_nu> = sum sqrt(f) conj(phi(.., f-1, ..)) phi(.., f, ..)``."""
    idx, psi = _setup(space, phi)
    axis = idx.mode_axis(mode)
    cap = idx.photon_caps[mode]
    if cap == 0:
        return 0j
    lower = np.take(psi, np.arange(cap), axis=axis)
    upper = np.take(psi, np.arange(1, cap + 1), axis=axis)
    shape = [1] * psi.ndim
    shape[axis] = cap
    bose = np.sqrt(np.arange(1, cap + 1, dtype=float)).reshape(shape)
    return complex(np.sum(np.conj(lower) * bose * upper))


def expect_ladder(space, phi, emitter: int, s: int, k: int) -> complex:
    """``<sigma_{s,k}>`` for the operator taking ``emitter`` from level ``k`` to ``s``."""
    idx, psi = _setup(space, phi)
    if s == k:
        raise ValueError("ladder operator needs two distinct levels")
    ds = idx.check_level(emitter, s)
    dk = idx.check_level(emitter, k)
    axis = idx.emitter_axis(emitter)
    return complex(np.vdot(np.take(psi, ds, axis=axis), np.take(psi, dk, axis=axis)))


def expect_ladder_commutator(space, phi, emitter: int, s: int, k: int) -> float:
    """``<[sigma_{s,k}, sigma_{s,k}^dagger]> = P(level s) - P(level k)``."""
    idx, psi = _setup(space, phi)
    if s == k:
        raise ValueError("ladder operator needs two distinct levels")
    ds = idx.check_level(emitter, s)
    dk = idx.check_level(emitter, k)
    probs = level_probabilities(idx, phi, emitter)
    return float(probs[ds] - probs[dk])


def expect_operator(phi: np.ndarray, op: np.ndarray) -> complex:
    """``<phi|op|phi>`` for a dense operator."""
    return complex(np.vdot(phi, op @ phi))


def unwrap_phase(values) -> np.ndarray:
    """Continuous phase of a complex time series (nearest-branch continuation)."""
    return np.unwrap(np.angle(np.asarray(values)))
