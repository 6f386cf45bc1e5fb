"""Multipartite configuration and the mixed-radix flat basis.

A basis ket is ``|r_1 .. r_k>|f_1 .. f_m>``: one level per emitter followed by
one photon number per mode. Flat indices use the digit order
``[r_1, ..., r_k, f_1, ..., f_m]`` with the last digit varying fastest, which
is also NumPy's C order, so a state vector reshapes to ``indexer.dims``
without copying.

Emitter levels are numbered from 1 (level 1 is the first listed level);
photon numbers start at 0. Emitter and mode positions are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class ConfigError(ValueError):
    """Invalid physical configuration."""


@dataclass(frozen=True)
class EmitterSpec:
    """One emitter: level energies in rad/s and optional labels."""

    energies: tuple[float, ...]
    labels: tuple[str, ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        if len(self.energies) < 2:
            raise ConfigError(f"emitter {self.name!r} needs at least 2 levels")
        if not all(math.isfinite(e) for e in self.energies):
            raise ConfigError(f"emitter {self.name!r} has non-finite level energies")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
            if len(self.labels) != len(self.energies):
                raise ConfigError(
                    f"emitter {self.name!r}: {len(self.labels)} labels for "
                    f"{len(self.energies)} levels"
                )
            if len(set(self.labels)) != len(self.labels):
                raise ConfigError(f"emitter {self.name!r}: duplicate level labels")

    @property
    def level_count(self) -> int:
        return len(self.energies)

    def level_number(self, level: int | str) -> int:
        """1-based level number from a number or a label."""
        if isinstance(level, str):
            if self.labels is None or level not in self.labels:
                raise ConfigError(f"emitter {self.name!r} has no level labelled {level!r}")
            return self.labels.index(level) + 1
        level = int(level)
        if not 1 <= level <= self.level_count:
            raise ConfigError(
                f"emitter {self.name!r}: level {level} outside 1..{self.level_count}"
            )
        return level

    def level_label(self, level: int) -> str:
        return self.labels[level - 1] if self.labels else str(level)


@dataclass(frozen=True)
class ModeSpec:
    """One cavity mode: angular frequency (rad/s) and photon cap."""

    frequency: float
    photon_cap: int
    name: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise ConfigError(f"mode {self.name!r}: frequency must be positive")
        if int(self.photon_cap) != self.photon_cap or self.photon_cap < 0:
            raise ConfigError(f"mode {self.name!r}: photon cap must be a nonnegative integer")
        object.__setattr__(self, "photon_cap", int(self.photon_cap))


@dataclass(frozen=True)
class BasisState:
    """``levels`` are 1-based emitter levels, ``photons`` are occupation numbers."""

    levels: tuple[int, ...] = ()
    photons: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(r) for r in self.levels))
        object.__setattr__(self, "photons", tuple(int(f) for f in self.photons))


class StateIndexer:
    """Bijection between :class:`BasisState` and flat indices."""

    def __init__(self, level_counts: Sequence[int], photon_caps: Sequence[int]):
        self.level_counts = tuple(int(b) for b in level_counts)
        self.photon_caps = tuple(int(n) for n in photon_caps)
        self.dims = self.level_counts + tuple(n + 1 for n in self.photon_caps)
        if not self.dims:
            raise ConfigError("need at least one emitter or mode")
        self.n_emitters = len(self.level_counts)
        self.n_modes = len(self.photon_caps)
        self.size = math.prod(self.dims)
        strides = [1] * len(self.dims)
        for a in range(len(self.dims) - 2, -1, -1):
            strides[a] = strides[a + 1] * self.dims[a + 1]
        self.strides = tuple(strides)

    def __repr__(self):
        return f"StateIndexer(dims={self.dims})"

    def __eq__(self, other):
        return isinstance(other, StateIndexer) and self.dims == other.dims and (
            self.n_emitters == other.n_emitters
        )

    def __hash__(self):
        return hash((self.dims, self.n_emitters))

    def mode_axis(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise IndexError(f"mode {mode} out of range 0..{self.n_modes - 1}")
        return self.n_emitters + mode

    def emitter_axis(self, emitter: int) -> int:
        if not 0 <= emitter < self.n_emitters:
            raise IndexError(f"emitter {emitter} out of range 0..{self.n_emitters - 1}")
        return emitter

    def check_level(self, emitter: int, level: int) -> int:
        """Validate a 1-based level and return its 0-based digit."""
        axis = self.emitter_axis(emitter)
        if not 1 <= level <= self.level_counts[axis]:
            raise IndexError(
                f"emitter {emitter}: level {level} outside 1..{self.level_counts[axis]}"
            )
        return level - 1

    def digits_of(self, state: BasisState) -> tuple[int, ...]:
        if len(state.levels) != self.n_emitters or len(state.photons) != self.n_modes:
            raise IndexError(
                f"basis state has {len(state.levels)} levels and {len(state.photons)} "
                f"photon numbers; expected {self.n_emitters} and {self.n_modes}"
            )
        digits = []
        for n, r in enumerate(state.levels):
            if not 1 <= r <= self.level_counts[n]:
                raise IndexError(
                    f"emitter {n}: level {r} outside 1..{self.level_counts[n]}"
                )
            digits.append(r - 1)
        for nu, f in enumerate(state.photons):
            if not 0 <= f <= self.photon_caps[nu]:
                raise IndexError(
                    f"mode {nu}: photon number {f} outside 0..{self.photon_caps[nu]}"
                )
            digits.append(f)
        return tuple(digits)

    def index_of(self, state: BasisState) -> int:
        return sum(d * s for d, s in zip(self.digits_of(state), self.strides))

    def state_of(self, index: int) -> BasisState:
        index = int(index)
        if not 0 <= index < self.size:
            raise IndexError(f"index {index} outside 0..{self.size - 1}")
        digits = []
        for s in self.strides:
            d, index = divmod(index, s)
            digits.append(d)
        k = self.n_emitters
        return BasisState(tuple(d + 1 for d in digits[:k]), tuple(digits[k:]))

    def digit_table(self) -> np.ndarray:
        """``(size, k + m)`` array of 0-based digits for every flat index."""
        grids = np.indices(self.dims).reshape(len(self.dims), -1)
        return grids.T.copy()


@dataclass
class SystemConfig:
    """Full physical description of a multipartite cavity-QED system.

    Parameters
    ----------
    emitters, modes
        Ordered partitions.
    field_couplings
        ``(emitter, i, j, mode) -> strength`` in rad/s with 1-based levels and
        ``i < j``. The strength is the product of the dipole matrix element and
        the mode coupling; the pair enters the Hamiltonian as
        ``(kappa sigma_ji + conj(kappa) sigma_ij)(a + a^dagger)``.
    dipole_dipole
        ``(n, m, i, j, p, q) -> strength`` with ``n < m``, ``i < j``, ``p < q``;
        enters as ``(J sigma^n_ij + conj(J) sigma^n_ji)(sigma^m_pq + sigma^m_qp)``.
    rwa
        Keep only the excitation-conserving light-emitter products.
    """

    emitters: list[EmitterSpec] = field(default_factory=list)
    modes: list[ModeSpec] = field(default_factory=list)
    field_couplings: dict[tuple[int, int, int, int], complex] = field(default_factory=dict)
    dipole_dipole: dict[tuple[int, int, int, int, int, int], complex] = field(
        default_factory=dict
    )
    rwa: bool = False

    def __post_init__(self):
        self.emitters = list(self.emitters)
        self.modes = list(self.modes)
        self.validate()

    def validate(self) -> None:
        k, m = len(self.emitters), len(self.modes)
        if k + m < 1:
            raise ConfigError("need at least one emitter or mode")
        for key, kappa in self.field_couplings.items():
            if len(key) != 4:
                raise ConfigError(f"field coupling key {key!r} must be (emitter, i, j, mode)")
            n, i, j, nu = key
            if not 0 <= n < k:
                raise ConfigError(f"field coupling {key}: no emitter {n}")
            if not 0 <= nu < m:
                raise ConfigError(f"field coupling {key}: no mode {nu}")
            b = self.emitters[n].level_count
            if not (1 <= i < j <= b):
                raise ConfigError(f"field coupling {key}: need 1 <= i < j <= {b}")
            if not np.isfinite(complex(kappa)):
                raise ConfigError(f"field coupling {key}: strength must be finite")
        for key, strength in self.dipole_dipole.items():
            if len(key) != 6:
                raise ConfigError(f"dipole-dipole key {key!r} must be (n, m, i, j, p, q)")
            n, mm, i, j, p, q = key
            if n == mm:
                raise ConfigError(f"dipole-dipole {key}: emitter {n} paired with itself")
            if not (0 <= n < mm < k):
                raise ConfigError(f"dipole-dipole {key}: need 0 <= n < m < {k}")
            if not 1 <= i < j <= self.emitters[n].level_count:
                raise ConfigError(f"dipole-dipole {key}: bad level pair ({i}, {j})")
            if not 1 <= p < q <= self.emitters[mm].level_count:
                raise ConfigError(f"dipole-dipole {key}: bad level pair ({p}, {q})")
            if not np.isfinite(complex(strength)):
                raise ConfigError(f"dipole-dipole {key}: strength must be finite")

    @property
    def indexer(self) -> StateIndexer:
        return StateIndexer(
            [e.level_count for e in self.emitters], [md.photon_cap for md in self.modes]
        )

    def emitter_names(self) -> list[str]:
        return [e.name or f"emitter{n + 1}" for n, e in enumerate(self.emitters)]

    def mode_names(self) -> list[str]:
        return [md.name or f"mode{nu + 1}" for nu, md in enumerate(self.modes)]

    def partition_names(self) -> list[str]:
        return self.emitter_names() + self.mode_names()

    def emitter_position(self, ref: int | str) -> int:
        if isinstance(ref, str):
            names = self.emitter_names()
            if ref not in names:
                raise ConfigError(f"unknown emitter {ref!r}; known: {names}")
            return names.index(ref)
        if not 0 <= ref < len(self.emitters):
            raise ConfigError(f"emitter index {ref} out of range")
        return int(ref)

    def mode_position(self, ref: int | str) -> int:
        if isinstance(ref, str):
            names = self.mode_names()
            if ref not in names:
                raise ConfigError(f"unknown mode {ref!r}; known: {names}")
            return names.index(ref)
        if not 0 <= ref < len(self.modes):
            raise ConfigError(f"mode index {ref} out of range")
        return int(ref)

    def partition_position(self, ref: int | str) -> int:
        """Axis of an emitter or mode in the flat-index digit order."""
        if isinstance(ref, int):
            if not 0 <= ref < len(self.emitters) + len(self.modes):
                raise ConfigError(f"partition index {ref} out of range")
            return ref
        names = self.partition_names()
        if ref not in names:
            raise ConfigError(f"unknown partition {ref!r}; known: {names}")
        return names.index(ref)

    def basis(self, levels: Sequence[int | str] = (), photons: Sequence[int] = ()) -> BasisState:
        """BasisState from level numbers or labels."""
        if len(levels) != len(self.emitters):
            raise ConfigError(f"expected {len(self.emitters)} emitter levels, got {len(levels)}")
        numbers = tuple(e.level_number(r) for e, r in zip(self.emitters, levels))
        state = BasisState(numbers, tuple(photons))
        try:
            self.indexer.digits_of(state)
        except IndexError as exc:
            raise ConfigError(str(exc)) from None
        return state


def dimension(config: SystemConfig) -> int:
    """Hilbert-space dimension ``prod(B_n) * prod(N_nu + 1)``."""
    return config.indexer.size


def index_of(state: BasisState, idx: StateIndexer) -> int:
    return idx.index_of(state)


def state_of(index: int, idx: StateIndexer) -> BasisState:
    return idx.state_of(index)

