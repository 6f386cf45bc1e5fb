"""Run configuration files.

A run file is YAML with ``schema_version: 1``. Physical quantities are written
as ``"<number> <unit>"`` strings (see :mod:`multicqed.units`). A complete
annotated example ships with every preset under ``multicqed/presets``; the
grammar is documented in the README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import spin as spinmod
from .hilbert import BasisState, ConfigError, EmitterSpec, ModeSpec, SystemConfig
from .propagator import TimeGrid
from .states import coherent_state, fock_state, superposition
from .units import UnitError, parse_quantity, rabi_frequency

SCHEMA_VERSION = 1
PRESET_DIR = Path(__file__).with_name("presets")


class ConfigParseError(ConfigError):
    """The file is not valid YAML."""


@dataclass(frozen=True)
class Column:
    """One CSV output quantity.

    ``kind`` is one of ``level``, ``level_group``, ``state``, ``photons``,
    ``annihilation``, ``ladder``, ``commutator``, ``concurrence``; ``args``
    holds the resolved 0-based positions and 1-based levels.
    """

    kind: str
    name: str
    args: tuple = ()


@dataclass
class RunSpec:
    name: str
    config: SystemConfig
    initial: np.ndarray
    initial_description: str
    grid: TimeGrid
    columns: list[Column]
    spin_config: spinmod.SpinfulConfig | None = None
    description: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)
    output: str | None = None

    def with_overrides(
        self,
        *,
        t_max: float | None = None,
        steps: int | None = None,
        rwa: bool | None = None,
        bipartition: list[str] | None = None,
    ) -> "RunSpec":
        """Copy with CLI-style overrides applied."""
        config = self.config
        if rwa is not None and rwa != config.rwa:
            config = SystemConfig(
                config.emitters, config.modes, config.field_couplings, config.dipole_dipole, rwa
            )
        grid = self.grid
        if t_max is not None or steps is not None:
            grid = TimeGrid(
                t_end=grid.t_end if t_max is None else t_max,
                steps=grid.steps if steps is None else steps,
                t_start=grid.t_start,
                omega_ref=grid.omega_ref,
            )
        columns = self.columns
        if bipartition is not None:
            members = tuple(sorted(config.partition_position(p) for p in bipartition))
            names = config.partition_names()
            conc = Column("concurrence", "C_" + "+".join(names[a] for a in members), (members,))
            columns = [c for c in columns if c.kind != "concurrence"] + [conc]
        return RunSpec(
            self.name,
            config,
            self.initial,
            self.initial_description,
            grid,
            columns,
            self.spin_config,
            self.description,
            dict(self.metadata),
            self.output,
        )


class _Node:
    """Mapping wrapper that tracks its key path and unknown keys."""

    def __init__(self, data, path: str, strict: bool):
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'document'}: expected a mapping, got {type(data).__name__}")
        self.data = data
        self.path = path
        self.strict = strict
        self.used: set[str] = set()

    def key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def has(self, name: str) -> bool:
        return name in self.data

    def get(self, name: str, default=...):
        self.used.add(name)
        if name not in self.data:
            if default is ...:
                raise ConfigError(f"{self.key(name)}: required key missing")
            return default
        return self.data[name]

    def child(self, name: str, default=...):
        value = self.get(name, default)
        if value is None:
            return None
        return _Node(value, self.key(name), self.strict)

    def items(self, name: str, default=...):
        value = self.get(name, default)
        if value is None:
            return []
        if not isinstance(value, list):
            raise ConfigError(f"{self.key(name)}: expected a list")
        return value

    def finish(self) -> None:
        extra = sorted(set(self.data) - self.used)
        if extra and self.strict:
            raise ConfigError(f"{self.path or 'document'}: unknown key(s) {extra}")


def _quantity(node: _Node, name: str, dimension: str, *, allow_complex=False, default=...):
    raw = node.get(name, default)
    if raw is default and default is not ...:
        return default
    try:
        return parse_quantity(raw, dimension, allow_complex=allow_complex)
    except UnitError as exc:
        raise ConfigError(f"{node.key(name)}: {exc}") from None


def _complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"{where}: cannot read complex number {value!r}")


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}")
    return value


def _emitter_ref(config_names: list[str], ref, where: str) -> int:
    if isinstance(ref, str):
        if ref not in config_names:
            raise ConfigError(f"{where}: unknown emitter {ref!r}; known {config_names}")
        return config_names.index(ref)
    idx = _int(ref, where, 1)
    if idx > len(config_names):
        raise ConfigError(f"{where}: emitter {idx} out of range")
    return idx - 1


def _level(spec, ref, where: str) -> int:
    try:
        return spec.level_number(ref)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _coupling_strength(node: _Node) -> complex:
    if node.has("strength") == node.has("rabi"):
        raise ConfigError(f"{node.path}: give exactly one of 'strength' or 'rabi'")
    if node.has("strength"):
        return _quantity(node, "strength", "frequency", allow_complex=True)
    rabi = node.child("rabi")
    value = rabi_frequency(_quantity(rabi, "field", "field"), _quantity(rabi, "dipole", "dipole"))
    rabi.finish()
    return value


def _parse_system(node: _Node) -> SystemConfig:
    rwa = node.get("rwa", False)
    if not isinstance(rwa, bool):
        raise ConfigError(f"{node.key('rwa')}: expected true or false")
    emitters = []
    for n, raw in enumerate(node.items("emitters", [])):
        e = _Node(raw, f"{node.key('emitters')}[{n}]", node.strict)
        energies = e.items("energies")
        values = []
        for a, q in enumerate(energies):
            try:
                values.append(parse_quantity(q, "frequency"))
            except UnitError as exc:
                raise ConfigError(f"{e.key('energies')}[{a}]: {exc}") from None
        labels = e.get("levels", None)
        try:
            emitters.append(
                EmitterSpec(tuple(values), tuple(labels) if labels else None, str(e.get("name", f"emitter{n + 1}")))
            )
        except ConfigError as exc:
            raise ConfigError(f"{e.path}: {exc}") from None
        e.finish()
    modes = []
    for nu, raw in enumerate(node.items("modes", [])):
        md = _Node(raw, f"{node.key('modes')}[{nu}]", node.strict)
        try:
            modes.append(
                ModeSpec(
                    _quantity(md, "frequency", "frequency"),
                    _int(md.get("photon_cap"), md.key("photon_cap"), 0),
                    str(md.get("name", f"mode{nu + 1}")),
                )
            )
        except ConfigError as exc:
            raise ConfigError(f"{md.path}: {exc}") from None
        md.finish()
    e_names = [e.name for e in emitters]
    m_names = [md.name for md in modes]
    couplings: dict = {}
    for c, raw in enumerate(node.items("field_couplings", [])):
        cn = _Node(raw, f"{node.key('field_couplings')}[{c}]", node.strict)
        n = _emitter_ref(e_names, cn.get("emitter"), cn.key("emitter"))
        levels = cn.items("levels")
        if len(levels) != 2:
            raise ConfigError(f"{cn.key('levels')}: expected [lower, upper]")
        i, j = (_level(emitters[n], lv, cn.key("levels")) for lv in levels)
        if not i < j:
            raise ConfigError(f"{cn.key('levels')}: lower level must come first")
        nu = _emitter_ref(m_names, cn.get("mode"), cn.key("mode"))
        key = (n, i, j, nu)
        if key in couplings:
            raise ConfigError(f"{cn.path}: duplicate coupling")
        couplings[key] = _coupling_strength(cn)
        cn.finish()
    dd: dict = {}
    for c, raw in enumerate(node.items("dipole_dipole", [])):
        dn = _Node(raw, f"{node.key('dipole_dipole')}[{c}]", node.strict)
        pair = dn.items("emitters")
        if len(pair) != 2:
            raise ConfigError(f"{dn.key('emitters')}: expected two emitters")
        n, m = (_emitter_ref(e_names, x, dn.key("emitters")) for x in pair)
        if n == m:
            raise ConfigError(f"{dn.key('emitters')}: emitter paired with itself")
        if n > m:
            raise ConfigError(f"{dn.key('emitters')}: list the earlier emitter first")
        lv = dn.items("levels")
        if len(lv) != 2 or any(not isinstance(x, list) or len(x) != 2 for x in lv):
            raise ConfigError(f"{dn.key('levels')}: expected [[i, j], [p, q]]")
        i, j = (_level(emitters[n], x, dn.key("levels")) for x in lv[0])
        p, q = (_level(emitters[m], x, dn.key("levels")) for x in lv[1])
        dd[(n, m, i, j, p, q)] = _quantity(dn, "strength", "frequency", allow_complex=True)
        dn.finish()
    node.finish()
    try:
        return SystemConfig(emitters, modes, couplings, dd, rwa)
    except ConfigError as exc:
        raise ConfigError(f"{node.path}: {exc}") from None


def _split_spin(label: str, where: str) -> tuple[str, str]:
    if not isinstance(label, str) or ":" not in label:
        raise ConfigError(f"{where}: expected '<name>:up' or '<name>:down', got {label!r}")
    base, s = label.rsplit(":", 1)
    if s not in spinmod.SPINS:
        raise ConfigError(f"{where}: spin must be 'up' or 'down', got {s!r}")
    return base, s


def _parse_spin_system(node: _Node) -> spinmod.SpinfulConfig:
    rwa = node.get("rwa", False)
    if not isinstance(rwa, bool):
        raise ConfigError(f"{node.key('rwa')}: expected true or false")
    emitters = []
    for n, raw in enumerate(node.items("emitters", [])):
        e = _Node(raw, f"{node.key('emitters')}[{n}]", node.strict)
        branches = {}
        for s in spinmod.SPINS:
            vals = []
            for a, q in enumerate(e.items(f"energies_{s}")):
                try:
                    vals.append(parse_quantity(q, "frequency"))
                except UnitError as exc:
                    raise ConfigError(f"{e.key('energies_' + s)}[{a}]: {exc}") from None
            branches[s] = tuple(vals)
        labels = e.get("levels", None)
        emitters.append(
            spinmod.SpinfulEmitterSpec(
                branches["up"], branches["down"], tuple(labels) if labels else None,
                str(e.get("name", f"emitter{n + 1}")),
            )
        )
        e.finish()
    modes = []
    for nu, raw in enumerate(node.items("modes", [])):
        md = _Node(raw, f"{node.key('modes')}[{nu}]", node.strict)
        modes.append(
            spinmod.SpinfulModeSpec(
                _quantity(md, "frequency_up", "frequency"),
                _quantity(md, "frequency_down", "frequency"),
                _int(md.get("photon_cap_up"), md.key("photon_cap_up"), 0),
                _int(md.get("photon_cap_down"), md.key("photon_cap_down"), 0),
                str(md.get("name", f"mode{nu + 1}")),
            )
        )
        md.finish()
    e_names = [e.name for e in emitters]
    m_names = [md.name for md in modes]
    couplings = {}
    for c, raw in enumerate(node.items("field_couplings", [])):
        cn = _Node(raw, f"{node.key('field_couplings')}[{c}]", node.strict)
        n = _emitter_ref(e_names, cn.get("emitter"), cn.key("emitter"))
        lo, s_lo = _split_spin(cn.get("lower"), cn.key("lower"))
        hi, s_hi = _split_spin(cn.get("upper"), cn.key("upper"))
        mode, s_mode = _split_spin(cn.get("mode"), cn.key("mode"))
        i = _level(emitters[n], lo, cn.key("lower"))
        j = _level(emitters[n], hi, cn.key("upper"))
        nu = _emitter_ref(m_names, mode, cn.key("mode"))
        key = (n, i, s_lo, j, s_hi, nu, s_mode)
        try:
            spinmod.check_selection(key)
        except ConfigError as exc:
            raise type(exc)(f"{cn.path}: {exc}") from None
        couplings[key] = _coupling_strength(cn)
        cn.finish()
    dd = {}
    for c, raw in enumerate(node.items("dipole_dipole", [])):
        dn = _Node(raw, f"{node.key('dipole_dipole')}[{c}]", node.strict)
        pair = dn.items("emitters")
        if len(pair) != 2:
            raise ConfigError(f"{dn.key('emitters')}: expected two emitters")
        n, m = (_emitter_ref(e_names, x, dn.key("emitters")) for x in pair)
        if n >= m:
            raise ConfigError(f"{dn.key('emitters')}: need two distinct emitters, earlier first")
        lv = dn.items("levels")
        nums = []
        for who, pair_levels in zip((n, m), lv):
            for label in pair_levels:
                base, s = _split_spin(label, dn.key("levels"))
                nums.append(spinmod.spin_level(_level(emitters[who], base, dn.key("levels")), s))
        if len(nums) != 4:
            raise ConfigError(f"{dn.key('levels')}: expected [[i, j], [p, q]]")
        dd[(n, m, *nums)] = _quantity(dn, "strength", "frequency", allow_complex=True)
        dn.finish()
    node.finish()
    return spinmod.SpinfulConfig(emitters, modes, couplings, dd, rwa)


def _levels(config: SystemConfig, raw, where: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or len(raw) != len(config.emitters):
        raise ConfigError(f"{where}: expected {len(config.emitters)} emitter levels")
    return tuple(_level(e, r, where) for e, r in zip(config.emitters, raw))


def _basis(config: SystemConfig, node: _Node, levels_key="levels", photons_key="photons") -> BasisState:
    levels = _levels(config, node.get(levels_key, []), node.key(levels_key))
    photons = node.get(photons_key, [])
    if not isinstance(photons, list) or len(photons) != len(config.modes):
        raise ConfigError(f"{node.key(photons_key)}: expected {len(config.modes)} photon numbers")
    for nu, f in enumerate(photons):
        _int(f, f"{node.key(photons_key)}[{nu}]", 0)
        cap = config.modes[nu].photon_cap
        if f > cap:
            raise ConfigError(
                f"{node.key(photons_key)}[{nu}]: {f} photons exceeds the cap {cap} "
                f"of mode {config.mode_names()[nu]!r}"
            )
    return BasisState(levels, tuple(photons))


def _parse_initial(config: SystemConfig, node: _Node) -> tuple[np.ndarray, str]:
    kind = node.get("kind")
    if kind == "fock":
        basis = _basis(config, node)
        desc = f"fock levels={list(basis.levels)} photons={list(basis.photons)}"
        state = fock_state(config, basis)
    elif kind == "coherent":
        alphas = [_complex(a, node.key("alpha")) for a in node.items("alpha")]
        if len(alphas) != len(config.modes):
            raise ConfigError(f"{node.key('alpha')}: expected {len(config.modes)} amplitudes")
        if node.has("emitter_amplitudes"):
            table = {}
            for a, raw in enumerate(node.items("emitter_amplitudes")):
                tn = _Node(raw, f"{node.key('emitter_amplitudes')}[{a}]", node.strict)
                levels = _levels(config, tn.get("levels"), tn.key("levels"))
                table[levels] = table.get(levels, 0) + _complex(tn.get("amplitude"), tn.key("amplitude"))
                tn.finish()
            emitter_state = table
        else:
            emitter_state = _levels(config, node.get("levels", []), node.key("levels"))
        try:
            state = coherent_state(config, alphas, emitter_state)
        except ValueError as exc:
            raise ConfigError(f"{node.path}: {exc}") from None
        desc = f"coherent alpha={[str(a) for a in alphas]}"
    elif kind == "superposition":
        terms = []
        for a, raw in enumerate(node.items("terms")):
            tn = _Node(raw, f"{node.key('terms')}[{a}]", node.strict)
            terms.append((_complex(tn.get("weight", 1.0), tn.key("weight")), _basis(config, tn)))
            tn.finish()
        if not terms:
            raise ConfigError(f"{node.key('terms')}: need at least one term")
        try:
            state = superposition(config, terms)
        except ValueError as exc:
            raise ConfigError(f"{node.path}: {exc}") from None
        desc = f"superposition of {len(terms)} basis states"
    else:
        raise ConfigError(f"{node.key('kind')}: expected fock, coherent or superposition, got {kind!r}")
    node.finish()
    return state, desc


def _all_or_list(node: _Node, name: str):
    value = node.get(name, None)
    if value is None or value is False:
        return []
    if value == "all" or value is True:
        return "all"
    if not isinstance(value, list):
        raise ConfigError(f"{node.key(name)}: expected 'all' or a list")
    return value


def _parse_observables(config: SystemConfig, node: _Node | None) -> list[Column]:
    e_names = config.emitter_names()
    m_names = config.mode_names()
    if node is None:
        node = _Node({}, "observables", True)
    cols: list[Column] = []

    levels = _all_or_list(node, "level_probabilities")
    if levels == "all":
        levels = [[name, lab] for n, name in enumerate(e_names)
                  for lab in range(1, config.emitters[n].level_count + 1)]
    for a, item in enumerate(levels):
        where = f"{node.key('level_probabilities')}[{a}]"
        if not isinstance(item, list) or len(item) != 2:
            raise ConfigError(f"{where}: expected [emitter, level]")
        n = _emitter_ref(e_names, item[0], where)
        lv = _level(config.emitters[n], item[1], where)
        cols.append(Column("level", f"P_{e_names[n]}_{config.emitters[n].level_label(lv)}", (n, lv)))

    for a, raw in enumerate(node.items("level_groups", [])):
        gn = _Node(raw, f"{node.key('level_groups')}[{a}]", node.strict)
        n = _emitter_ref(e_names, gn.get("emitter"), gn.key("emitter"))
        lvs = tuple(_level(config.emitters[n], x, gn.key("levels")) for x in gn.items("levels"))
        cols.append(Column("level_group", str(gn.get("name")), (n, lvs)))
        gn.finish()

    for a, raw in enumerate(node.items("state_probabilities", [])):
        sn = _Node(raw, f"{node.key('state_probabilities')}[{a}]", node.strict)
        basis = _basis(config, sn)
        cols.append(Column("state", str(sn.get("name")), (basis,)))
        sn.finish()

    for key, kind, prefix in (("photon_numbers", "photons", "n_"), ("annihilation", "annihilation", "a_")):
        modes = _all_or_list(node, key)
        if modes == "all":
            modes = list(m_names)
        for a, ref in enumerate(modes):
            nu = _emitter_ref(m_names, ref, f"{node.key(key)}[{a}]")
            cols.append(Column(kind, prefix + m_names[nu], (nu,)))

    for key, kind, prefix in (("ladder", "ladder", "sigma_"), ("commutators", "commutator", "comm_")):
        for a, item in enumerate(node.items(key, [])):
            where = f"{node.key(key)}[{a}]"
            if not isinstance(item, list) or len(item) != 3:
                raise ConfigError(f"{where}: expected [emitter, s, k]")
            n = _emitter_ref(e_names, item[0], where)
            s = _level(config.emitters[n], item[1], where)
            k = _level(config.emitters[n], item[2], where)
            if s == k:
                raise ConfigError(f"{where}: levels must differ")
            em = config.emitters[n]
            cols.append(Column(kind, f"{prefix}{e_names[n]}_{em.level_label(s)}_{em.level_label(k)}", (n, s, k)))

    names = config.partition_names()
    splits = node.get("concurrence", None)
    if splits is None:
        splits = [e_names] if config.emitters and config.modes else []
    if not isinstance(splits, list):
        raise ConfigError(f"{node.key('concurrence')}: expected a list of partition lists")
    for a, members in enumerate(splits):
        where = f"{node.key('concurrence')}[{a}]"
        if not isinstance(members, list) or not members:
            raise ConfigError(f"{where}: expected a nonempty list of partitions")
        try:
            pos = tuple(sorted(config.partition_position(x) for x in members))
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        if len(pos) >= len(names):
            raise ConfigError(f"{where}: subsystem A must be a proper subset")
        cols.append(Column("concurrence", "C_" + "+".join(names[x] for x in pos), (pos,)))
    node.finish()
    return cols


def parse_document(doc: Any, *, strict: bool = True, source: str = "<config>") -> RunSpec:
    root = _Node(doc, "", strict)
    version = root.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    name = str(root.get("name", Path(source).stem))
    description = str(root.get("description", ""))
    if root.has("system") == root.has("spin_system"):
        raise ConfigError("document: give exactly one of 'system' or 'spin_system'")
    spin_config = None
    if root.has("system"):
        config = _parse_system(root.child("system"))
    else:
        spin_config = _parse_spin_system(root.child("spin_system"))
        config = spinmod.expand_spin(spin_config)

    initial, desc = _parse_initial(config, root.child("initial"))

    tn = root.child("time")
    t_max = _quantity(tn, "t_max", "time")
    steps = _int(tn.get("steps"), tn.key("steps"), 1)
    if tn.has("omega_ref"):
        omega_ref = _quantity(tn, "omega_ref", "frequency")
    else:
        omega_ref = config.modes[0].frequency if config.modes else None
    if not (isinstance(t_max, float | int) and math.isfinite(t_max) and t_max > 0):
        raise ConfigError("time.t_max: must be positive")
    tn.finish()
    grid = TimeGrid(t_end=float(t_max), steps=steps, omega_ref=omega_ref)

    obs = root.child("observables", None)
    columns = _parse_observables(config, obs)
    if not columns:
        raise ConfigError("observables: nothing to compute")

    metadata = root.get("metadata", {}) or {}
    if not isinstance(metadata, dict):
        raise ConfigError("metadata: expected a mapping")
    output = root.get("output", None)
    root.finish()
    return RunSpec(name, config, initial, desc, grid, columns, spin_config, description, metadata, output)


def load_config(path: str | Path, *, strict: bool = True) -> RunSpec:
    """Read and validate a run file."""
    path = Path(path)
    text = path.read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigParseError(f"{path}: parse error at {where}: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"{path}: parse error: {exc}") from None
    return parse_document(doc, strict=strict, source=str(path))


def preset_path(name: str) -> Path:
    path = PRESET_DIR / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    return path


def preset_names() -> list[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.yaml"))


def load_preset(name: str) -> RunSpec:
    return load_config(preset_path(name))
