"""Frequency-dependent circuit primitives: microstrip lines, shorted stubs,
DC-block capacitors with parasitics, and RF-choke inductors.

Microstrip characteristic impedance and effective permittivity use the
Hammerstad-Jensen quasi-static closed forms (thin-strip limit, no
dispersion).  Loss combines dielectric loss from tan_delta with simple
skin-effect conductor loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import AbcdMatrix, series_element, shunt_branch_y

C0 = 299792458.0          # vacuum speed of light, m/s
ETA0 = 376.730313668      # vacuum wave impedance, ohms
MU0 = 4e-7 * math.pi
COPPER_SIGMA = 5.8e7      # S/m


@dataclass(frozen=True)
class SubstrateSpec:
    """Laminate parameters.  Defaults are a 30 mil TMM3-class substrate."""

    eps_r: float = 3.45
    tan_delta: float = 0.0020
    height: float = 30 * 25.4e-6
    copper_thickness: float = 17.5e-6
    conductor_sigma: float = COPPER_SIGMA   # math.inf models a perfect conductor

    def __post_init__(self):
        if not (self.eps_r > 1):
            raise ValueError("eps_r must exceed 1")
        if self.tan_delta < 0:
            raise ValueError("tan_delta must be >= 0")
        if not (self.height > 0):
            raise ValueError("substrate height must be positive")


@dataclass(frozen=True)
class MicrostripSpec:
    """Printed line geometry on a substrate."""

    width: float
    length: float
    substrate: SubstrateSpec = SubstrateSpec()

    def __post_init__(self):
        if not (self.width > 0):
            raise ValueError("width must be positive")
        if self.length < 0:
            raise ValueError("length must be >= 0")


@dataclass(frozen=True)
class LumpedCapSpec:
    """Capacitor with series parasitics (equivalent series R and L)."""

    capacitance: float = 7.5e-12
    esl: float = 0.0
    esr: float = 0.0

    def __post_init__(self):
        if not (self.capacitance > 0):
            raise ValueError("capacitance must be positive")
        if self.esl < 0 or self.esr < 0:
            raise ValueError("parasitics must be >= 0")

    @property
    def srf(self) -> float:
        """Self-resonant frequency in Hz (inf when esl = 0)."""
        if self.esl == 0:
            return math.inf
        return 1.0 / (2.0 * math.pi * math.sqrt(self.esl * self.capacitance))


@dataclass(frozen=True)
class LumpedIndSpec:
    """Inductor with parallel winding capacitance and series resistance."""

    inductance: float = 15e-9
    c_par: float = 0.0
    r_series: float = 0.0

    def __post_init__(self):
        if not (self.inductance > 0):
            raise ValueError("inductance must be positive")
        if self.c_par < 0 or self.r_series < 0:
            raise ValueError("parasitics must be >= 0")


def _eps_eff_quasistatic(u: float, eps_r: float) -> float:
    # Hammerstad-Jensen effective permittivity, thin strip.
    a = (
        1.0
        + math.log((u**4 + (u / 52.0) ** 2) / (u**4 + 0.432)) / 49.0
        + math.log(1.0 + (u / 18.1) ** 3) / 18.7
    )
    b = 0.564 * ((eps_r - 0.9) / (eps_r + 3.0)) ** 0.053
    return (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 * (1.0 + 10.0 / u) ** (-a * b)


def _z0_quasistatic(u: float, eps_eff: float) -> float:
    # Hammerstad-Jensen impedance, thin strip, already normalized by eps_eff.
    fu = 6.0 + (2.0 * math.pi - 6.0) * math.exp(-((30.666 / u) ** 0.7528))
    return ETA0 / (2.0 * math.pi * math.sqrt(eps_eff)) * math.log(
        fu / u + math.sqrt(1.0 + (2.0 / u) ** 2)
    )


def microstrip_params(spec: MicrostripSpec, f):
    """Quasi-static line parameters at frequency f (Hz, scalar or array).

    Returns (z0, eps_eff, alpha): characteristic impedance in ohms,
    effective permittivity, and attenuation in nepers/m.  alpha combines
    dielectric loss and skin-effect conductor loss; z0 and eps_eff are
    frequency-independent (no dispersion model).
    """
    if np.any(np.asarray(f) <= 0):
        raise ValueError("frequency must be positive")
    sub = spec.substrate
    u = spec.width / sub.height
    eps_eff = _eps_eff_quasistatic(u, sub.eps_r)
    z0 = _z0_quasistatic(u, eps_eff)

    k0 = 2.0 * np.pi * f / C0
    alpha_d = (
        k0
        * sub.eps_r
        * (eps_eff - 1.0)
        * sub.tan_delta
        / (2.0 * math.sqrt(eps_eff) * (sub.eps_r - 1.0))
    )
    if math.isinf(sub.conductor_sigma):
        alpha_c = 0.0 * k0
    else:
        r_surf = np.sqrt(np.pi * f * MU0 / sub.conductor_sigma)
        alpha_c = r_surf / (z0 * spec.width)
    return z0, eps_eff, alpha_d + alpha_c


def propagation_constant(spec: MicrostripSpec, f):
    """gamma = alpha + j*beta for the line at f."""
    z0, eps_eff, alpha = microstrip_params(spec, f)
    beta = 2.0 * np.pi * np.asarray(f, dtype=float) * math.sqrt(eps_eff) / C0
    return alpha + 1j * beta


def line_abcd(spec: MicrostripSpec, f) -> AbcdMatrix:
    """Lossy transmission-line ABCD: cosh/sinh in gamma*length."""
    z0, eps_eff, alpha = microstrip_params(spec, f)
    beta = 2.0 * np.pi * np.asarray(f, dtype=float) * math.sqrt(eps_eff) / C0
    gl = (alpha + 1j * beta) * spec.length
    ch, sh = np.cosh(gl), np.sinh(gl)
    return AbcdMatrix(a=ch, b=z0 * sh, c=sh / z0, d=ch)


def shorted_stub_impedance(spec: MicrostripSpec, f):
    """Input impedance of a short-terminated stub: Z0*tanh(gamma*l).

    Lossless case reduces to j*Z0*tan(beta*l); at a quarter wavelength the
    tangent blows up and the stub looks open (finite only under loss).
    """
    z0, eps_eff, alpha = microstrip_params(spec, f)
    beta = 2.0 * np.pi * np.asarray(f, dtype=float) * math.sqrt(eps_eff) / C0
    return z0 * np.tanh((alpha + 1j * beta) * spec.length)


def open_stub_impedance(spec: MicrostripSpec, f):
    """Input impedance of an open-terminated stub: Z0/tanh(gamma*l)."""
    z0, eps_eff, alpha = microstrip_params(spec, f)
    beta = 2.0 * np.pi * np.asarray(f, dtype=float) * math.sqrt(eps_eff) / C0
    return z0 / np.tanh((alpha + 1j * beta) * spec.length)


def guided_wavelength(spec: MicrostripSpec, f) -> float:
    """Wavelength on the line at f, using the quasi-static eps_eff."""
    _, eps_eff, _ = microstrip_params(spec, f)
    return C0 / (np.asarray(f, dtype=float) * math.sqrt(eps_eff))


def microstrip_width_for(
    z0_target: float, substrate: SubstrateSpec, u_lo: float = 0.05, u_hi: float = 20.0
) -> float:
    """Line width giving the target characteristic impedance (bisection on w/h)."""
    def z_of(u):
        return _z0_quasistatic(u, _eps_eff_quasistatic(u, substrate.eps_r))

    # z0 decreases monotonically with w/h
    if not (z_of(u_hi) < z0_target < z_of(u_lo)):
        raise ValueError(f"{z0_target} ohm not reachable for w/h in [{u_lo}, {u_hi}]")
    for _ in range(200):
        mid = 0.5 * (u_lo + u_hi)
        if z_of(mid) > z0_target:
            u_lo = mid
        else:
            u_hi = mid
    return 0.5 * (u_lo + u_hi) * substrate.height


def capacitor_impedance(spec: LumpedCapSpec, f):
    """Series R-L-C impedance of a real capacitor."""
    w = 2.0 * np.pi * np.asarray(f, dtype=float)
    return spec.esr + 1j * w * spec.esl + 1.0 / (1j * w * spec.capacitance)


def inductor_impedance(spec: LumpedIndSpec, f):
    """(r + jwL) in parallel with the winding capacitance."""
    w = 2.0 * np.pi * np.asarray(f, dtype=float)
    z_wind = spec.r_series + 1j * w * spec.inductance
    if spec.c_par == 0:
        return z_wind + 0j * w
    y = 1.0 / z_wind + 1j * w * spec.c_par
    return 1.0 / y


def capacitor_abcd(spec: LumpedCapSpec, f, orientation: str = "series") -> AbcdMatrix:
    """Capacitor as a series element or a shunt-to-ground element."""
    z = capacitor_impedance(spec, f)
    if orientation == "series":
        return series_element(z)
    if orientation == "shunt":
        return shunt_branch_y(1.0 / z)
    raise ValueError(f"orientation must be 'series' or 'shunt', got {orientation!r}")


def inductor_abcd(spec: LumpedIndSpec, f, orientation: str = "series") -> AbcdMatrix:
    """Inductor as a series element or a shunt-to-ground element."""
    z = inductor_impedance(spec, f)
    if orientation == "series":
        return series_element(z)
    if orientation == "shunt":
        return shunt_branch_y(1.0 / z)
    raise ValueError(f"orientation must be 'series' or 'shunt', got {orientation!r}")
