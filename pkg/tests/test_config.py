import textwrap

import numpy as np
import pytest
from scipy import constants

from multicqed.config import (
    ConfigParseError,
    load_config,
    load_preset,
    parse_document,
    preset_names,
)
from multicqed.hilbert import ConfigError
from multicqed.units import DEBYE, rabi_frequency

EV = constants.e / constants.hbar

BASE = """
schema_version: 1
name: demo
system:
  emitters:
    - name: atom
      levels: [g, e]
      energies: [0 eV, 1 eV]
  modes:
    - name: cav
      frequency: 1 eV
      photon_cap: 3
  field_couplings:
    - emitter: atom
      levels: [g, e]
      mode: cav
      strength: 10 meV
initial:
  kind: fock
  levels: [e]
  photons: [0]
time:
  t_max: 1 ps
  steps: 10
"""


def write(tmp_path, text):
    path = tmp_path / "run.yaml"
    path.write_text(textwrap.dedent(text))
    return path


def test_preset_names():
    assert preset_names() == [
        "qd6-strong",
        "qd6-ultrastrong",
        "qd6-weak",
        "qw3-strong",
        "qw3-ultrastrong",
        "qw3-weak",
        "spin-lambda",
    ]


def test_qw3_preset_contents():
    config = load_preset("qw3-weak").config
    e = config.emitters[0]
    assert e.labels == ("lh", "hh", "e")
    np.testing.assert_allclose(e.energies, [0.0, 0.030 * EV, 0.829 * EV], rtol=1e-15)
    assert config.modes[0].frequency == 1.2582e15
    assert config.modes[0].photon_cap == 8
    assert (0, 1, 2, 0) not in config.field_couplings
    assert config.indexer.size == 27


def test_qd6_preset_contents():
    config = load_preset("qd6-weak").config
    assert len(config.emitters) == 6
    for e in config.emitters:
        np.testing.assert_allclose(e.energies, [0.0, EV], rtol=1e-15)
    assert config.modes[0].frequency == 1.5177e15
    assert config.modes[0].photon_cap == 8
    assert config.indexer.size == 576


@pytest.mark.parametrize(
    "name, field, dipoles",
    [
        ("qw3-weak", 1e7, {(1, 3): 15.21, (2, 3): 26.15}),
        ("qw3-strong", 1e8, {(1, 3): 15.21, (2, 3): 26.15}),
        ("qw3-ultrastrong", 1e9, {(1, 3): 15.21, (2, 3): 26.15}),
        ("qd6-weak", 1e6, {(1, 2): 192.0}),
        ("qd6-strong", 1e7, {(1, 2): 192.0}),
        ("qd6-ultrastrong", 1e8, {(1, 2): 192.0}),
    ],
)
def test_preset_couplings_are_rabi_frequencies(name, field, dipoles):
    config = load_preset(name).config
    assert config.field_couplings
    for (n, i, j, nu), kappa in config.field_couplings.items():
        expected = rabi_frequency(field, dipoles[(i, j)] * DEBYE)
        assert kappa == pytest.approx(expected, rel=1e-14)


def test_all_presets_load_and_have_columns():
    for name in preset_names():
        spec = load_preset(name)
        assert spec.columns
        assert np.linalg.norm(spec.initial) == pytest.approx(1.0, abs=1e-14)
        assert spec.grid.steps >= 1


def test_base_document(tmp_path):
    spec = load_config(write(tmp_path, BASE))
    assert spec.name == "demo"
    assert spec.config.field_couplings[(0, 1, 2, 0)] == pytest.approx(0.01 * EV)
    assert spec.grid.t_end == pytest.approx(1e-12)
    assert spec.grid.omega_ref == pytest.approx(EV)
    names = [c.name for c in spec.columns]
    assert names == ["C_atom"]
    assert spec.initial[spec.config.indexer.index_of(spec.config.basis(["e"], [0]))] == 1.0


def test_photon_number_above_cap(tmp_path):
    path = write(tmp_path, BASE.replace("photons: [0]", "photons: [4]"))
    with pytest.raises(ConfigError, match=r"initial\.photons\[0\].*exceeds the cap 3"):
        load_config(path)


def test_parse_error_reports_position(tmp_path):
    path = write(tmp_path, BASE.replace("  steps: 10", "  steps: [10"))
    with pytest.raises(ConfigParseError, match=r"line \d+, column \d+"):
        load_config(path)


def test_unknown_key_strict_and_lenient(tmp_path):
    path = write(tmp_path, BASE.replace("  steps: 10", "  steps: 10\n  stepz: 3"))
    with pytest.raises(ConfigError, match="time: unknown key.*stepz"):
        load_config(path)
    assert load_config(path, strict=False).grid.steps == 10


@pytest.mark.parametrize(
    "old, new, match",
    [
        ("strength: 10 meV", "strength: 10 parsecs", r"system\.field_couplings\[0\]\.strength"),
        ("levels: [g, e]\n      mode", "levels: [e, g]\n      mode", r"field_couplings\[0\]\.levels"),
        ("mode: cav", "mode: nope", r"field_couplings\[0\]\.mode"),
        ("schema_version: 1", "schema_version: 2", "schema_version"),
        ("  kind: fock", "  kind: thermal", r"initial\.kind"),
        ("  t_max: 1 ps", "  t_max: -1 ps", r"time\.t_max"),
        ("  steps: 10", "  steps: 0", r"time\.steps"),
        ("      photon_cap: 3", "", r"modes\[0\]\.photon_cap"),
        ("levels: [e]", "levels: [x]", r"initial\.levels"),
    ],
)
def test_validation_errors_name_key(tmp_path, old, new, match):
    assert old in BASE
    with pytest.raises(ConfigError, match=match):
        load_config(write(tmp_path, BASE.replace(old, new, 1)))


def test_rabi_coupling_and_complex_strength(tmp_path):
    text = BASE.replace("strength: 10 meV", "rabi: {field: 100 kV/cm, dipole: 26.15 D}")
    spec = load_config(write(tmp_path, text))
    assert spec.config.field_couplings[(0, 1, 2, 0)] == pytest.approx(rabi_frequency(1e7, 26.15 * DEBYE))
    text = BASE.replace("strength: 10 meV", 'strength: "(3+4j) meV"')
    spec = load_config(write(tmp_path, text))
    assert spec.config.field_couplings[(0, 1, 2, 0)] == pytest.approx((3 + 4j) * 1e-3 * EV)


def test_coherent_and_superposition_initial(tmp_path):
    text = BASE.replace(
        "  kind: fock\n  levels: [e]\n  photons: [0]",
        "  kind: coherent\n  alpha: [[0.5, 0.5]]\n  emitter_amplitudes:\n"
        "    - {levels: [g], amplitude: 1}\n    - {levels: [e], amplitude: [0, 1]}",
    )
    spec = load_config(write(tmp_path, text))
    assert np.linalg.norm(spec.initial) == pytest.approx(1.0)
    text = BASE.replace(
        "  kind: fock\n  levels: [e]\n  photons: [0]",
        "  kind: superposition\n  terms:\n    - {weight: 1, levels: [g], photons: [1]}\n"
        "    - {weight: 1, levels: [e], photons: [0]}",
    )
    spec = load_config(write(tmp_path, text))
    assert np.count_nonzero(spec.initial) == 2


def test_observable_selection(tmp_path):
    text = BASE + textwrap.dedent(
        """
        observables:
          level_probabilities: all
          state_probabilities:
            - {name: P_g1, levels: [g], photons: [1]}
          photon_numbers: [cav]
          annihilation: all
          ladder: [[atom, g, e]]
          commutators: [[atom, g, e]]
          concurrence: [[cav]]
        """
    )
    spec = load_config(write(tmp_path, text))
    assert [c.name for c in spec.columns] == [
        "P_atom_g",
        "P_atom_e",
        "P_g1",
        "n_cav",
        "a_cav",
        "sigma_atom_g_e",
        "comm_atom_g_e",
        "C_cav",
    ]


def test_exactly_one_system_section():
    with pytest.raises(ConfigError, match="exactly one"):
        parse_document({"schema_version": 1, "initial": {}, "time": {}})


def test_overrides():
    spec = load_preset("qw3-weak")
    changed = spec.with_overrides(t_max=1e-13, steps=5, rwa=True, bipartition=["cav"])
    assert changed.config.rwa and not spec.config.rwa
    assert changed.grid.steps == 5 and changed.grid.t_end == 1e-13
    assert [c.name for c in changed.columns if c.kind == "concurrence"] == ["C_cav"]


SPIN = """
schema_version: 1
spin_system:
  emitters:
    - name: qd
      levels: [g, e]
      energies_up: [0 eV, 1 eV]
      energies_down: [1 ueV, 1 eV]
  modes:
    - name: cav
      frequency_up: 1 eV
      frequency_down: 1 eV
      photon_cap_up: 1
      photon_cap_down: 1
  field_couplings:
    - {emitter: qd, lower: "g:up", upper: "e:down", mode: "cav:up", strength: 1 meV}
initial:
  kind: fock
  levels: ["g:up"]
  photons: [1, 0]
time:
  t_max: 1 ps
  steps: 4
"""


def test_spin_section(tmp_path):
    spec = load_config(write(tmp_path, SPIN))
    assert spec.spin_config is not None
    assert spec.config.indexer.dims == (4, 2, 2)
    assert spec.config.mode_names() == ["cav:up", "cav:down"]


def test_spin_selection_violation_names_term(tmp_path):
    text = SPIN.replace('upper: "e:down"', 'upper: "e:up"')
    with pytest.raises(ConfigError, match=r"field_couplings\[0\].*violates spin conservation"):
        load_config(write(tmp_path, text))
