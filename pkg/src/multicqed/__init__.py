"""Exact time evolution of emitters coupled to quantized cavity modes."""

from .config import RunSpec, load_config, load_preset, preset_names
from .entanglement import concurrence, max_concurrence, partial_trace, purity
from .hamiltonian import build_full, build_h0, build_h_re, build_h_rr
from .hilbert import BasisState, ConfigError, EmitterSpec, ModeSpec, StateIndexer, SystemConfig
from .propagator import SpectralPropagator, TimeGrid, diagonalize, evolve, evolve_rk4, evolve_series
from .states import coherent_state, fock_state, superposition
from .units import rabi_frequency

__all__ = [
    "BasisState",
    "ConfigError",
    "EmitterSpec",
    "ModeSpec",
    "RunSpec",
    "SpectralPropagator",
    "StateIndexer",
    "SystemConfig",
    "TimeGrid",
    "build_full",
    "build_h0",
    "build_h_re",
    "build_h_rr",
    "coherent_state",
    "concurrence",
    "diagonalize",
    "evolve",
    "evolve_rk4",
    "evolve_series",
    "fock_state",
    "load_config",
    "load_preset",
    "max_concurrence",
    "partial_trace",
    "preset_names",
    "purity",
    "rabi_frequency",
    "superposition",
]
