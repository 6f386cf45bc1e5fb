"""Exact time evolution through the eigendecomposition of H.

``phi(t) = R exp(-i D t) R^dagger phi(0)`` with ``H = R diag(D) R^dagger``.
Every time point is computed directly from ``t = 0``, so there is no
step-to-step error accumulation. :func:`evolve_rk4` integrates the same
Schrodinger equation with classical Runge-Kutta and serves as an independent
check of the spectral path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hamiltonian import check_hermitian
from .jacobi import jacobi_eigh

RESIDUAL_RTOL = 1e-9


class EigenResidualError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SpectralPropagator:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]

    def residual(self, h: np.ndarray) -> float:
        """``max|H R - R diag(D)|`` relative to ``max|H|``."""
        r = self.eigenvectors
        dev = np.max(np.abs(h @ r - r * self.eigenvalues))
        return float(dev / max(np.max(np.abs(h)), np.finfo(float).tiny))

    def unitarity_error(self) -> float:
        r = self.eigenvectors
        return float(np.max(np.abs(r.conj().T @ r - np.eye(self.dimension))))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_start .. t_end`` with ``steps`` intervals (``steps + 1`` points).

    ``omega_ref`` (rad/s) converts to the normalized time ``tau = omega_ref * t``.
    """

    t_end: float
    steps: int
    t_start: float = 0.0
    omega_ref: float | None = None

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("steps must be a positive integer")

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.steps) + 1)

    def normalized(self) -> np.ndarray:
        omega = 1.0 if self.omega_ref is None else self.omega_ref
        return omega * self.times()


def diagonalize(h: np.ndarray, *, check: bool = True) -> SpectralPropagator:
    """Jacobi eigendecomposition of a Hermitian Hamiltonian.

    Raises :class:`~multicqed.hamiltonian.HermiticityError` for non-Hermitian
    input, :class:`~multicqed.jacobi.JacobiConvergenceError` when the sweep cap
    is hit, and :class:`EigenResidualError` if ``check`` is set and the
    reconstruction residual exceeds ``1e-9 * max|H|``.
    """
    h = np.asarray(h)
    check_hermitian(h)
    w, r, sweeps = jacobi_eigh(h)
    prop = SpectralPropagator(w, r, sweeps)
    if check and h.size:
        res = prop.residual(h)
        if res > RESIDUAL_RTOL:
            raise EigenResidualError(f"eigen-residual {res:.3e} exceeds {RESIDUAL_RTOL:g}")
    return prop


def evolve(prop: SpectralPropagator, phi0: np.ndarray, t: float) -> np.ndarray:
    phi0 = np.asarray(phi0, dtype=np.complex128)
    if phi0.shape != (prop.dimension,):
        raise ValueError(
            f"state has shape {phi0.shape}, propagator dimension is {prop.dimension}"
        )
    r = prop.eigenvectors
    coeffs = r.conj().T @ phi0
    return r @ (np.exp(-1j * prop.eigenvalues * t) * coeffs)


def evolve_series(
    prop: SpectralPropagator, phi0: np.ndarray, grid: TimeGrid | Sequence[float]
) -> list[np.ndarray]:
    """States at every grid time; each equals ``evolve(prop, phi0, t)`` bit for bit."""
    times = grid.times() if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)
    return [evolve(prop, phi0, float(t)) for t in times]


def evolve_rk4(h: np.ndarray, phi0: np.ndarray, t: float, steps: int) -> np.ndarray:
    """Classical RK4 on ``dphi/dt = -i H phi`` with ``steps`` equal steps.

    No renormalization is applied. Accuracy needs ``max|H| * t / steps`` small;
    ``<= 0.01`` gives roughly ``1e-6`` or better over thousands of periods.
    """
    h = np.asarray(h, dtype=np.complex128)
    phi = np.array(phi0, dtype=np.complex128)
    if steps < 1:
        raise ValueError("steps must be positive")
    dt = t / steps
    m = -1j * dt * h
    for _ in range(steps):
        k1 = m @ phi
        k2 = m @ (phi + 0.5 * k1)
        k3 = m @ (phi + 0.5 * k2)
        k4 = m @ (phi + k3)
        phi = phi + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return phi


def rk4_steps_for(h: np.ndarray, t: float, h_dt: float = 0.01) -> int:
    """Smallest step count with ``max|H| * dt <= h_dt``."""
    return max(1, int(np.ceil(np.max(np.abs(h)) * abs(t) / h_dt)))
