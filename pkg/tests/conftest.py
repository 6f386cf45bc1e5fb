"""Shared brute-force oracles.

Operators here are assembled as Kronecker products of single-partition
matrices, independently of the index-arithmetic used by the package.
"""

import numpy as np
import pytest
from hypothesis import strategies as st

from multicqed.hilbert import EmitterSpec, ModeSpec, SystemConfig


def partition_dims(config):
    return [e.level_count for e in config.emitters] + [md.photon_cap + 1 for md in config.modes]


def embed(config, axis, local):
    """Full-space operator acting as ``local`` on partition ``axis``."""
    out = np.eye(1)
    for a, d in enumerate(partition_dims(config)):
        out = np.kron(out, local if a == axis else np.eye(d))
    return out


def sigma(config, n, s, k):
    """sigma^n_{s,k} = |s><k| on emitter n (1-based levels)."""
    b = config.emitters[n].level_count
    local = np.zeros((b, b))
    local[s - 1, k - 1] = 1.0
    return embed(config, n, local)


def annihilation(config, nu):
    cap = config.modes[nu].photon_cap
    local = np.diag(np.sqrt(np.arange(1, cap + 1)), k=1)
    return embed(config, len(config.emitters) + nu, local)


def oracle_hamiltonian(config):
    """Term-by-term Kronecker assembly of the full Hamiltonian."""
    dim = int(np.prod(partition_dims(config)))
    h = np.zeros((dim, dim), dtype=complex)
    for n, e in enumerate(config.emitters):
        for i, energy in enumerate(e.energies, start=1):
            h += energy * sigma(config, n, i, i)
    for nu, md in enumerate(config.modes):
        a = annihilation(config, nu)
        h += md.frequency * a.conj().T @ a
    for (n, i, j, nu), kappa in config.field_couplings.items():
        a = annihilation(config, nu)
        up, down = sigma(config, n, j, i), sigma(config, n, i, j)
        if config.rwa:
            h += kappa * up @ a + np.conj(kappa) * down @ a.conj().T
        else:
            h += (kappa * up + np.conj(kappa) * down) @ (a + a.conj().T)
    for (n, m, i, j, p, q), J in config.dipole_dipole.items():
        h += (J * sigma(config, n, i, j) + np.conj(J) * sigma(config, n, j, i)) @ (
            sigma(config, m, p, q) + sigma(config, m, q, p)
        )
    return h


def two_level(kappa=1.0, omega=1.0, cap=1, rwa=False, energy=None):
    """One (g, e) emitter and one mode."""
    energy = omega if energy is None else energy
    return SystemConfig(
        [EmitterSpec((0.0, energy), ("g", "e"), "atom")],
        [ModeSpec(omega, cap, "cav")],
        {(0, 1, 2, 0): kappa},
        rwa=rwa,
    )


@st.composite
def small_configs(draw, max_dim=64, rwa=None):
    """Random systems with dimension <= max_dim and complex couplings."""
    while True:
        k = draw(st.integers(0, 3))
        m = draw(st.integers(0 if k else 1, 2))
        levels = [draw(st.integers(2, 3)) for _ in range(k)]
        caps = [draw(st.integers(0, 3)) for _ in range(m)]
        if np.prod(levels + [c + 1 for c in caps]) <= max_dim:
            break
    real = st.floats(-2.0, 2.0, allow_nan=False)
    cplx = st.builds(complex, real, real)
    emitters = [
        EmitterSpec(tuple(sorted(draw(st.floats(0.0, 5.0)) for _ in range(b))), name=f"e{n}")
        for n, b in enumerate(levels)
    ]
    modes = [ModeSpec(draw(st.floats(0.1, 5.0)), c, f"m{nu}") for nu, c in enumerate(caps)]
    couplings = {}
    for n, b in enumerate(levels):
        for nu in range(m):
            for i in range(1, b + 1):
                for j in range(i + 1, b + 1):
                    if draw(st.booleans()):
                        couplings[(n, i, j, nu)] = draw(cplx)
    dd = {}
    for n in range(k):
        for mm in range(n + 1, k):
            if draw(st.booleans()):
                dd[(n, mm, 1, levels[n], 1, levels[mm])] = draw(cplx)
    use_rwa = draw(st.booleans()) if rwa is None else rwa
    return SystemConfig(emitters, modes, couplings, dd, use_rwa)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
