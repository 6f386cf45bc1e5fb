"""Dense generalized Jaynes-Cummings-Paul Hamiltonian on the flat basis.

``H = H0 + H_field + H_dd`` in rad/s (hbar = 1):

* ``H0``: level energies plus ``Omega_nu * f_nu`` for every mode.
* ``H_field``: for each coupling ``kappa`` on levels ``i < j`` of emitter ``n``
  and mode ``nu``, ``(kappa sigma_ji + conj(kappa) sigma_ij)(a + a^dagger)``.
  With ``rwa=True`` only ``kappa sigma_ji a`` and its adjoint
  ``conj(kappa) sigma_ij a^dagger`` survive.
* ``H_dd``: ``(J sigma^n_ij + conj(J) sigma^n_ji)(sigma^m_pq + sigma^m_qp)``.

``sigma_sk`` moves an emitter from level ``k`` to level ``s``.
"""

from __future__ import annotations

import numpy as np

from .hilbert import SystemConfig
from .units import rabi_frequency  # noqa: F401  (re-exported)

HERMITIAN_RTOL = 1e-12


class HermiticityError(ArithmeticError):
    pass


def check_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> float:
    """Return ``max|H - H^dagger|`` or raise if it exceeds ``rtol * max|H|``."""
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    scale = float(np.max(np.abs(h))) if h.size else 0.0
    if dev > rtol * scale:
        raise HermiticityError(f"matrix is not Hermitian: max|H - H^+| = {dev:.3e}")
    return dev


def build_h0(config: SystemConfig) -> np.ndarray:
    idx = config.indexer
    digits = idx.digit_table()
    diag = np.zeros(idx.size)
    for n, em in enumerate(config.emitters):
        diag += np.asarray(em.energies)[digits[:, n]]
    for nu, mode in enumerate(config.modes):
        diag += mode.frequency * digits[:, idx.n_emitters + nu]
    return np.diag(diag).astype(np.complex128)


def _transitions(digits, strides, axis, src, dst):
    """Flat (source, target) indices for basis states with digit ``src`` on ``axis``."""
    sel = np.nonzero(digits[:, axis] == src)[0]
    return sel, sel + (dst - src) * strides[axis]


def build_h_re(config: SystemConfig) -> np.ndarray:
    idx = config.indexer
    digits = idx.digit_table()
    h = np.zeros((idx.size, idx.size), dtype=np.complex128)
    for (n, i, j, nu), kappa in sorted(config.field_couplings.items()):
        kappa = complex(kappa)
        if kappa == 0:
            continue
        ax = idx.mode_axis(nu)
        cap = idx.photon_caps[nu]
        # each product: (emitter digit from -> to, photon shift, coefficient)
        products = [(i - 1, j - 1, -1, kappa), (j - 1, i - 1, +1, kappa.conjugate())]
        if not config.rwa:
            products += [(i - 1, j - 1, +1, kappa), (j - 1, i - 1, -1, kappa.conjugate())]
        for lev_from, lev_to, shift, coeff in products:
            src, dst = _transitions(digits, idx.strides, n, lev_from, lev_to)
            f = digits[src, ax]
            ok = (f + shift >= 0) & (f + shift <= cap)
            src, dst, f = src[ok], dst[ok] + shift * idx.strides[ax], f[ok]
            bose = np.sqrt(f if shift < 0 else f + 1)
            h[dst, src] += coeff * bose
    return h


def build_h_rr(config: SystemConfig) -> np.ndarray:
    idx = config.indexer
    digits = idx.digit_table()
    h = np.zeros((idx.size, idx.size), dtype=np.complex128)
    for (n, m, i, j, p, q), strength in sorted(config.dipole_dipole.items()):
        strength = complex(strength)
        if strength == 0:
            continue
        # sigma^n_ij lowers j -> i with J, sigma^n_ji raises with conj(J)
        first = [(j - 1, i - 1, strength), (i - 1, j - 1, strength.conjugate())]
        second = [(q - 1, p - 1), (p - 1, q - 1)]
        for a_from, a_to, coeff in first:
            for b_from, b_to in second:
                sel = np.nonzero((digits[:, n] == a_from) & (digits[:, m] == b_from))[0]
                dst = sel + (a_to - a_from) * idx.strides[n] + (b_to - b_from) * idx.strides[m]
                h[dst, sel] += coeff
    return h


def build_full(config: SystemConfig) -> np.ndarray:
    h = build_h0(config) + build_h_re(config) + build_h_rr(config)
    check_hermitian(h)
    return h
