"""Spinful emitters and polarized modes, expanded into a scalar configuration.

Every spinful emitter level ``i`` becomes two scalar levels ``i:up`` and
``i:down`` (ordered ``1:up, 1:down, 2:up, 2:down, ...``), and every polarized
mode becomes two scalar modes ``nu:up`` and ``nu:down``. Light-emitter
couplings are restricted by a spin selection mask: for ``i < j`` only

* ``i:up <-> j:down`` with the ``up`` mode, and
* ``i:down <-> j:up`` with the ``down`` mode

are accepted. The expanded config then goes through the ordinary Hamiltonian,
propagator and observables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .hilbert import BasisState, ConfigError, EmitterSpec, ModeSpec, SystemConfig

UP = "up"
DOWN = "down"
SPINS = (UP, DOWN)

# (lower-level spin, upper-level spin) allowed for each mode polarization
ALLOWED = {UP: (UP, DOWN), DOWN: (DOWN, UP)}


class SpinSelectionError(ConfigError):
    """A coupling violates the spin selection mask."""


def spin_level(level: int, spin: str) -> int:
    """Expanded 1-based level number of spinful level ``level`` (1-based)."""
    if spin not in SPINS:
        raise ConfigError(f"spin must be 'up' or 'down', got {spin!r}")
    return 2 * level - 1 if spin == UP else 2 * level


def spin_mode(mode: int, spin: str) -> int:
    """Expanded 0-based mode position of polarized mode ``mode``."""
    if spin not in SPINS:
        raise ConfigError(f"spin must be 'up' or 'down', got {spin!r}")
    return 2 * mode + (0 if spin == UP else 1)


@dataclass(frozen=True)
class SpinfulEmitterSpec:
    energies_up: tuple[float, ...]
    energies_down: tuple[float, ...]
    labels: tuple[str, ...] | None = None
    name: str = ""

    def __post_init__(self):
        up = tuple(float(e) for e in self.energies_up)
        down = tuple(float(e) for e in self.energies_down)
        object.__setattr__(self, "energies_up", up)
        object.__setattr__(self, "energies_down", down)
        if len(up) != len(down):
            raise ConfigError(f"spinful emitter {self.name!r}: spin branches differ in length")
        if len(up) < 1:
            raise ConfigError(f"spinful emitter {self.name!r}: no levels")
        if not all(math.isfinite(e) for e in up + down):
            raise ConfigError(f"spinful emitter {self.name!r}: non-finite energies")
        if self.labels is not None and len(self.labels) != len(up):
            raise ConfigError(f"spinful emitter {self.name!r}: label count mismatch")

    @property
    def level_count(self) -> int:
        return len(self.energies_up)

    def level_number(self, level: int | str) -> int:
        if isinstance(level, str):
            if self.labels is None or level not in self.labels:
                raise ConfigError(f"emitter {self.name!r} has no level labelled {level!r}")
            return list(self.labels).index(level) + 1
        if not 1 <= level <= self.level_count:
            raise ConfigError(f"emitter {self.name!r}: level {level} out of range")
        return int(level)

    def expand(self) -> EmitterSpec:
        energies, labels = [], []
        for i in range(self.level_count):
            base = self.labels[i] if self.labels else str(i + 1)
            energies += [self.energies_up[i], self.energies_down[i]]
            labels += [f"{base}:{UP}", f"{base}:{DOWN}"]
        return EmitterSpec(tuple(energies), tuple(labels), self.name)


@dataclass(frozen=True)
class SpinfulModeSpec:
    frequency_up: float
    frequency_down: float
    cap_up: int
    cap_down: int
    name: str = ""

    def expand(self) -> list[ModeSpec]:
        base = self.name or "mode"
        return [
            ModeSpec(self.frequency_up, self.cap_up, f"{base}:{UP}"),
            ModeSpec(self.frequency_down, self.cap_down, f"{base}:{DOWN}"),
        ]


@dataclass
class SpinfulConfig:
    """Spin-resolved system description.

    ``field_couplings`` maps ``(emitter, i, spin_i, j, spin_j, mode, mode_spin)``
    to a complex strength (rad/s), with 1-based spinful levels ``i < j``.
    ``dipole_dipole`` uses expanded level numbers (see :func:`spin_level`) and
    is passed through unchanged.
    """

    emitters: list[SpinfulEmitterSpec] = field(default_factory=list)
    modes: list[SpinfulModeSpec] = field(default_factory=list)
    field_couplings: dict[tuple, complex] = field(default_factory=dict)
    dipole_dipole: dict[tuple[int, int, int, int, int, int], complex] = field(
        default_factory=dict
    )
    rwa: bool = False

    def __post_init__(self):
        for key in self.field_couplings:
            check_selection(key, self)


def check_selection(key: tuple, config: SpinfulConfig | None = None) -> None:
    """Raise :class:`SpinSelectionError` unless the coupling passes the mask."""
    if len(key) != 7:
        raise ConfigError(
            f"spin coupling key {key!r} must be (emitter, i, spin_i, j, spin_j, mode, mode_spin)"
        )
    n, i, si, j, sj, nu, snu = key
    for s in (si, sj, snu):
        if s not in SPINS:
            raise ConfigError(f"spin coupling {key}: bad spin label {s!r}")
    if not i < j:
        raise ConfigError(f"spin coupling {key}: need lower level first (i < j)")
    if (si, sj) != ALLOWED[snu]:
        raise SpinSelectionError(
            f"spin coupling {describe(key)} violates spin conservation: "
            f"a {snu}-polarized photon only drives {ALLOWED[snu][0]} -> {ALLOWED[snu][1]}"
        )
    if config is not None:
        if not 0 <= n < len(config.emitters):
            raise ConfigError(f"spin coupling {key}: no emitter {n}")
        if not 0 <= nu < len(config.modes):
            raise ConfigError(f"spin coupling {key}: no mode {nu}")
        if j > config.emitters[n].level_count:
            raise ConfigError(f"spin coupling {key}: level {j} out of range")


def describe(key: tuple) -> str:
    n, i, si, j, sj, nu, snu = key
    return f"emitter {n} level {i}:{si} -> {j}:{sj} with mode {nu}:{snu}"


def expand_spin(config: SpinfulConfig) -> SystemConfig:
    emitters = [e.expand() for e in config.emitters]
    modes = [md for spec in config.modes for md in spec.expand()]
    couplings = {}
    for key, kappa in config.field_couplings.items():
        check_selection(key, config)
        n, i, si, j, sj, nu, snu = key
        couplings[(n, spin_level(i, si), spin_level(j, sj), spin_mode(nu, snu))] = kappa
    return SystemConfig(emitters, modes, couplings, dict(config.dipole_dipole), config.rwa)


def total_spin(config: SpinfulConfig, state: BasisState) -> int:
    """Atomic plus photon spin of an expanded basis state, in units of hbar/2.

    Atomic ``up``/``down`` levels count ``+1``/``-1``. Photon spin is counted
    so that the resonant (absorption) terms allowed by the mask conserve the
    total: each photon in an ``up`` mode counts ``-2`` and in a ``down`` mode ``+2``.
    """
    total = 0
    for level in state.levels:
        total += 1 if level % 2 == 1 else -1
    for pos, f in enumerate(state.photons):
        total += -2 * f if pos % 2 == 0 else 2 * f
    return total


def swap_spins(config: SpinfulConfig, state: BasisState) -> BasisState:
    """Basis state with every up/down label exchanged."""
    levels = tuple(r + 1 if r % 2 == 1 else r - 1 for r in state.levels)
    photons: list[int] = []
    for a in range(0, len(state.photons), 2):
        photons += [state.photons[a + 1], state.photons[a]]
    return BasisState(levels, tuple(photons))


def expanded_levels(config: SpinfulConfig, emitter: int, level: int | str) -> Sequence[int]:
    """Both expanded level numbers of one spinful level."""
    base = config.emitters[emitter].level_number(level)
    return spin_level(base, UP), spin_level(base, DOWN)
