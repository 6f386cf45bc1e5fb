"""Physical constants and unit conversion.

The engine works in angular-frequency units with hbar = 1: energies are stored
in rad/s and times in seconds. Everything here converts *into* those units.
"""

from __future__ import annotations

import math
import re

from scipy import constants as _c

HBAR = _c.hbar  # J s
ELEMENTARY_CHARGE = _c.e  # C, also J per eV
SPEED_OF_LIGHT = _c.c  # m/s
DEBYE = 3.33564e-30  # C m


class UnitError(ValueError):
    """A quantity string could not be parsed or has the wrong dimension."""


def ev_to_rad_s(energy_ev: float) -> float:
    return energy_ev * ELEMENTARY_CHARGE / HBAR


def rabi_frequency(field_amplitude: float, dipole_moment: float) -> float:
    """Rabi frequency ``E0 * d / hbar`` in rad/s.

    Parameters
    ----------
    field_amplitude : float
        Electric field amplitude in V/m.
    dipole_moment : float
        Transition dipole moment in C m.
    """
    if field_amplitude < 0 or dipole_moment < 0:
        raise ValueError("field amplitude and dipole moment must be nonnegative")
    return field_amplitude * dipole_moment / HBAR


# dimension -> unit -> converter to SI-internal value
_FREQUENCY = {
    "rad/s": lambda x: x,
    "Hz": lambda x: 2 * math.pi * x,
    "kHz": lambda x: 2 * math.pi * x * 1e3,
    "MHz": lambda x: 2 * math.pi * x * 1e6,
    "GHz": lambda x: 2 * math.pi * x * 1e9,
    "THz": lambda x: 2 * math.pi * x * 1e12,
    "eV": lambda x: x * ELEMENTARY_CHARGE / HBAR,
    "meV": lambda x: x * 1e-3 * ELEMENTARY_CHARGE / HBAR,
    "ueV": lambda x: x * 1e-6 * ELEMENTARY_CHARGE / HBAR,
    "J": lambda x: x / HBAR,
    "nm": lambda x: 2 * math.pi * SPEED_OF_LIGHT / (x * 1e-9),
    "um": lambda x: 2 * math.pi * SPEED_OF_LIGHT / (x * 1e-6),
}
_FIELD = {
    "V/m": lambda x: x,
    "V/cm": lambda x: x * 1e2,
    "kV/cm": lambda x: x * 1e5,
    "MV/cm": lambda x: x * 1e8,
    "MV/m": lambda x: x * 1e6,
}
_DIPOLE = {
    "D": lambda x: x * DEBYE,
    "C*m": lambda x: x,
    "C m": lambda x: x,
    "e*nm": lambda x: x * ELEMENTARY_CHARGE * 1e-9,
}
_TIME = {
    "s": lambda x: x,
    "ms": lambda x: x * 1e-3,
    "us": lambda x: x * 1e-6,
    "ns": lambda x: x * 1e-9,
    "ps": lambda x: x * 1e-12,
    "fs": lambda x: x * 1e-15,
}

DIMENSIONS = {
    "frequency": _FREQUENCY,
    "field": _FIELD,
    "dipole": _DIPOLE,
    "time": _TIME,
}

_QUANTITY = re.compile(r"^\s*(?P<value>\S+|\(.*\))\s+(?P<unit>\S.*?)\s*$")


def parse_quantity(text, dimension: str, *, allow_complex: bool = False):
    """Convert ``"<number> <unit>"`` to the internal unit of ``dimension``.

    ``dimension`` is one of ``frequency`` (rad/s; energies, Hz, and vacuum
    wavelengths are accepted), ``field`` (V/m), ``dipole`` (C m) or ``time`` (s).
    Bare numbers are taken to already be in the internal unit. Complex values
    are written Python-style, e.g. ``"(5+1j) meV"``; wavelengths must be real.

    >>> round(parse_quantity("100 kV/cm", "field"))
    10000000
    """
    table = DIMENSIONS[dimension]
    if isinstance(text, bool):
        raise UnitError(f"expected a {dimension} quantity, got {text!r}")
    if isinstance(text, (int, float, complex)):
        value = text
        if isinstance(value, complex) and not allow_complex:
            raise UnitError(f"complex {dimension} not allowed: {text!r}")
        return value
    if not isinstance(text, str):
        raise UnitError(f"expected a {dimension} quantity, got {text!r}")
    match = _QUANTITY.match(text)
    if match is None:
        try:
            return _number(text.strip(), allow_complex)
        except ValueError:
            raise UnitError(f"cannot parse {dimension} quantity {text!r}") from None
    unit = match["unit"]
    if unit not in table:
        raise UnitError(
            f"unknown {dimension} unit {unit!r} in {text!r}; expected one of {sorted(table)}"
        )
    try:
        value = _number(match["value"], allow_complex)
    except ValueError:
        raise UnitError(f"cannot parse number in {text!r}") from None
    if isinstance(value, complex) and unit in ("nm", "um"):
        raise UnitError(f"wavelength must be real: {text!r}")
    return table[unit](value)


def _number(token: str, allow_complex: bool):
    try:
        return float(token)
    except ValueError:
        if not allow_complex:
            raise
    value = complex(token.replace(" ", ""))
    return value.real if value.imag == 0 else value
