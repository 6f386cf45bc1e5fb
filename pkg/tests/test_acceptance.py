"""Acceptance suite: one PASS/FAIL line per criterion, printed as it runs and
repeated in the terminal summary."""

import io
import math
import subprocess
import sys
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, random_state, two_level
from multicqed.cli import simulate, write_csv
from multicqed.config import load_preset, preset_names
from multicqed.entanglement import concurrence
from multicqed.hamiltonian import build_full
from multicqed.hilbert import EmitterSpec, ModeSpec, SystemConfig
from multicqed.propagator import diagonalize, evolve, evolve_rk4, evolve_series, rk4_steps_for
from multicqed.states import fock_state, superposition
from multicqed.units import DEBYE, ev_to_rad_s, rabi_frequency

OMEGA_QW = 1.2582e15
OMEGA_QD = 1.5177e15


def report(number, title, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(line, flush=True)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def rel(value, target):
    return abs(value - target) / abs(target)


def test_criterion_01_quantum_well_rabi_frequencies():
    g_h = rabi_frequency(100e3 / 1e-2, 26.15 * DEBYE)
    g_l = rabi_frequency(100e3 / 1e-2, 15.21 * DEBYE)
    checks = [
        rel(g_h, 8.2640e12) <= 1e-3,
        rel(g_l, 4.8067e12) <= 1e-3,
        rel(g_h / OMEGA_QW, 0.0066) <= 0.05,
        rel(g_l / OMEGA_QW, 0.0038) <= 0.05,
    ]
    detail = (
        f"G_h={g_h:.5e} ({rel(g_h, 8.2640e12):.3%} off), G_l={g_l:.5e} ({rel(g_l, 4.8067e12):.3%} off), "
        f"ratios {g_h / OMEGA_QW:.4f}/{g_l / OMEGA_QW:.4f}"
    )
    report(1, "quantum-well Rabi frequencies", all(checks), detail)


def test_criterion_02_quantum_dot_rabi_frequency_and_ev_conversion():
    g = rabi_frequency(10e3 / 1e-2, 192 * DEBYE)
    ev = ev_to_rad_s(1.0)
    parts = {
        "G": rel(g, 6.0676e12) <= 1e-3,
        "ratio": rel(g / OMEGA_QD, 0.004) <= 0.05,
        "1 eV/hbar": rel(ev, 1.5177e15) <= 1e-3,
    }
    detail = (
        f"G={g:.5e} ({rel(g, 6.0676e12):.3%} off), ratio {g / OMEGA_QD:.4f}, "
        f"1 eV/hbar={ev:.6e} ({rel(ev, 1.5177e15):.3%} off, limit 0.1%); "
        f"failing parts: {[k for k, v in parts.items() if not v] or 'none'}"
    )
    report(2, "quantum-dot Rabi frequency and eV conversion", all(parts.values()), detail)


def test_criterion_03_exactness_on_ultrastrong_quantum_well():
    spec = load_preset("qw3-ultrastrong")
    start = time.perf_counter()
    h = build_full(spec.config)
    prop = diagonalize(h)
    times = np.linspace(0.0, spec.grid.t_end, 10_000)
    states = evolve_series(prop, spec.initial, times)
    norms = np.array([np.linalg.norm(phi) for phi in states])
    energies = np.array([np.vdot(phi, h @ phi).real for phi in states])
    elapsed = time.perf_counter() - start
    cycles = times[-1] * OMEGA_QW / (2 * math.pi)
    norm_err = np.max(np.abs(norms - 1))
    drift = np.max(np.abs(energies - energies[0])) / abs(energies[0])
    ok = cycles >= 100 and norm_err <= 1e-9 and drift <= 1e-8 and elapsed < 10
    detail = (
        f"{len(times)} points over {cycles:.1f} cycles, max|norm-1|={norm_err:.2e}, "
        f"energy drift={drift:.2e}, {elapsed:.2f} s"
    )
    report(3, "norm and energy conservation", ok, detail)


def test_criterion_04_analytic_rabi_oscillation():
    kappa = 6.0676e12
    config = two_level(kappa=kappa, omega=OMEGA_QD, cap=1, rwa=True)
    prop = diagonalize(build_full(config))
    phi0 = fock_state(config, config.basis(["e"], [0]))
    target = config.indexer.index_of(config.basis(["g"], [1]))
    times = np.linspace(0.0, 10 * math.pi / kappa, 1000)
    err = max(abs(abs(evolve(prop, phi0, t)[target]) ** 2 - math.sin(kappa * t) ** 2) for t in times)
    report(4, "resonant two-level Rabi oscillation", err <= 1e-10, f"max error {err:.2e} over 1000 times")


def _random_config(rng, dims):
    """Emitters ``dims[:-1]`` and one mode of size ``dims[-1]``, all couplings complex."""
    emitters = [EmitterSpec(tuple(np.sort(rng.uniform(0, 3, b)))) for b in dims[:-1]]
    modes = [ModeSpec(float(rng.uniform(0.5, 2.0)), dims[-1] - 1)]
    couplings = {
        (n, i, j, 0): complex(*rng.normal(size=2))
        for n, b in enumerate(dims[:-1])
        for i in range(1, b + 1)
        for j in range(i + 1, b + 1)
    }
    dd = {(0, 1, 1, 2, 1, 2): complex(*rng.normal(size=2))} if len(dims) > 2 else {}
    return SystemConfig(emitters, modes, couplings, dd)


def test_criterion_05_runge_kutta_oracle():
    rows = []
    worst = 0.0
    systems = []
    for name in ("qw3-weak", "qw3-strong", "qw3-ultrastrong", "spin-lambda"):
        spec = load_preset(name)
        omega = spec.config.modes[0].frequency
        systems.append((name, build_full(spec.config), spec.initial, 50 * 2 * math.pi / omega))
    config = two_level(kappa=0.3, omega=1.0, cap=4)
    systems.append(("two-level", build_full(config), random_state(np.random.default_rng(2), 10), 50 * 2 * math.pi))
    rng = np.random.default_rng(4)
    for dims in ([3, 4], [2, 3, 6], [2, 2, 2, 8]):
        h = build_full(_random_config(rng, dims))
        label = "random-" + "x".join(map(str, dims))
        systems.append((label, h, random_state(rng, h.shape[0]), 50 * 2 * math.pi / np.abs(h).max()))
    for name, h, phi0, t in systems:
        assert h.shape[0] <= 64
        steps = rk4_steps_for(h, t, 0.01)
        exact = evolve(diagonalize(h), phi0, t)
        err = np.abs(evolve_rk4(h, phi0, t, steps) - exact).max()
        worst = max(worst, err)
        rows.append(f"{name}={err:.1e}")

    # convergence order on the ultrastrong well over 5 optical cycles
    spec = load_preset("qw3-ultrastrong")
    h = build_full(spec.config)
    t = 5 * 2 * math.pi / OMEGA_QW
    exact = evolve(diagonalize(h), spec.initial, t)
    h_dt = np.array([0.1, 0.05, 0.025])
    errs = [np.abs(evolve_rk4(h, spec.initial, t, rk4_steps_for(h, t, x)) - exact).max() for x in h_dt]
    order = np.polyfit(np.log(h_dt), np.log(errs), 1)[0]
    ok = worst <= 1e-6 and abs(order - 4.0) <= 0.3
    detail = f"max error {worst:.2e} ({', '.join(rows)}); fitted order {order:.3f}"
    report(5, "spectral vs Runge-Kutta", ok, detail)


def _time_averaged_counter_rotating(name, rwa):
    spec = load_preset(name)
    spec = spec.with_overrides(rwa=rwa)
    config = spec.config
    prop = diagonalize(build_full(config))
    phi0 = fock_state(config, config.basis(["lh"], [1]))
    target = config.indexer.index_of(config.basis(["e"], [2]))
    times = np.linspace(0.0, 100 * 2 * math.pi / OMEGA_QW, 4001)
    probs = np.array([abs(evolve(prop, phi0, t)[target]) ** 2 for t in times])
    return probs


def test_criterion_06_counter_rotating_population():
    weak = _time_averaged_counter_rotating("qw3-weak", rwa=False).mean()
    ultra = _time_averaged_counter_rotating("qw3-ultrastrong", rwa=False).mean()
    rwa_max = max(
        _time_averaged_counter_rotating(name, rwa=True).max()
        for name in ("qw3-weak", "qw3-ultrastrong")
    )
    ratio = ultra / weak
    ok = ratio >= 100 and rwa_max == 0.0
    detail = f"<P(e,2)> weak {weak:.2e}, ultrastrong {ultra:.2e}, ratio {ratio:.2e}; max under RWA {rwa_max}"
    report(6, "counter-rotating population growth", ok, detail)


def _oracle_concurrence(phi, dims, members):
    # brute force: explicit density matrix, reduced by contracting B indices
    rho = np.outer(phi, phi.conj()).reshape(dims + dims)
    k = len(dims)
    b = [x for x in range(k) if x not in members]
    letters = "abcdefghijklmnopqrstuvwxyz"
    left = [letters[x] for x in range(k)]
    right = [letters[x + k] for x in range(k)]
    for x in b:
        right[x] = left[x]
    out = "".join(left[x] for x in members) + "".join(right[x] for x in members)
    rho_a = np.einsum("".join(left) + "".join(right) + "->" + out, rho)
    d = int(np.prod([dims[x] for x in members]))
    rho_a = rho_a.reshape(d, d)
    return math.sqrt(max(2 * (1 - np.trace(rho_a @ rho_a).real), 0.0))


def test_criterion_07_concurrence():
    config = two_level(cap=1)
    bell = superposition(config, [(1, config.basis(["g"], [1])), (1, config.basis(["e"], [0]))])
    bell_c = concurrence(config, bell, [0])
    rng = np.random.default_rng(3)
    product_max = 0.0
    oracle_err = 0.0
    cases = 0
    for dims in ([2, 2], [3, 9], [2, 2, 2, 8], [2, 3, 2, 5], [4, 4, 4]):
        n_em = len(dims) - 1
        cfg = SystemConfig(
            [EmitterSpec(tuple(range(d))) for d in dims[:n_em]], [ModeSpec(1.0, dims[-1] - 1)]
        )
        for _ in range(20):
            factors = [rng.normal(size=d) + 1j * rng.normal(size=d) for d in dims]
            prod = factors[0]
            for f in factors[1:]:
                prod = np.kron(prod, f)
            prod /= np.linalg.norm(prod)
            phi = random_state(rng, int(np.prod(dims)))
            for r in range(1, len(dims)):
                members = sorted(rng.choice(len(dims), size=r, replace=False).tolist())
                product_max = max(product_max, concurrence(cfg, prod, members))
                oracle_err = max(
                    oracle_err, abs(concurrence(cfg, phi, members) - _oracle_concurrence(phi, dims, members))
                )
                cases += 1
    ok = abs(bell_c - 1) <= 1e-12 and product_max <= 1e-12 and oracle_err <= 1e-10
    detail = (
        f"Bell {bell_c:.15f}, product max {product_max:.1e}, "
        f"random-state oracle max error {oracle_err:.1e} over {cases} splits"
    )
    report(7, "concurrence", ok, detail)


def test_criterion_08_six_dot_scale():
    spec = load_preset("qd6-strong").with_overrides(steps=1999)
    start = time.perf_counter()
    result = simulate(spec)
    elapsed = time.perf_counter() - start
    d = result.diagnostics
    ok = elapsed < 60 and d["eigen_residual"] <= 1e-9 and len(result.times) == 2000
    detail = (
        f"dimension {d['dimension']}, {len(result.times)} points x {len(result.columns)} columns "
        f"in {elapsed:.1f} s, eigen-residual {d['eigen_residual']:.2e}, sweeps {d['jacobi_sweeps']}"
    )
    report(8, "six-dot scale run", ok, detail)


def _dominant(values, times):
    spectrum = np.abs(np.fft.rfft(values - values.mean())) ** 2
    k = int(np.argmax(spectrum[1:]) + 1)
    period = (times[-1] - times[0]) * (len(times) / (len(times) - 1)) / k
    return spectrum[k] / spectrum.sum(), period


def test_criterion_09_spin_preset_oscillation():
    result = simulate(load_preset("spin-lambda"))
    share, period = _dominant(result.columns["P_ground"], result.times)
    c_share, c_period = _dominant(result.columns["C_qd"], result.times)
    ok = share >= 0.9 and 50e-12 <= period <= 200e-12 and abs(c_period - period) <= 0.2 * period
    detail = (
        f"ground-state probability: {share:.2%} of spectral energy in one bin, period {period * 1e12:.1f} ps; "
        f"concurrence period {c_period * 1e12:.1f} ps"
    )
    report(9, "spin preset oscillation", ok, detail)


def test_criterion_10_determinism():
    identical = []
    for name in preset_names():
        outputs = []
        for _ in range(2):
            buf = io.StringIO()
            write_csv(simulate(load_preset(name)), buf)
            outputs.append(buf.getvalue().encode())
        identical.append(outputs[0] == outputs[1])
    # separate processes through the command line
    cmd = [sys.executable, "-m", "multicqed.cli", "run", "--preset", "qw3-strong", "--quiet"]
    runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    ok = all(identical) and runs[0] == runs[1]
    detail = f"{sum(identical)}/{len(identical)} presets identical in-process, CLI processes identical: {runs[0] == runs[1]}"
    report(10, "byte-identical CSV", ok, detail)
