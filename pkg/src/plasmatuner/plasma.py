"""Drude plasma model, GDT switch equivalent circuits, and model fitting.

The cold-plasma permittivity and conductivity are

    eps_r = 1 - e^2 n_e / (eps0 m (w^2 + nu^2))
    sigma = e^2 n_e nu / (m (w^2 + nu^2))

with electron density n_e, electron-neutral collision frequency nu, and
stimulus frequency w.  The off-state switch is the bare inter-electrode
capacitance; the on-state is the bulk plasma resistance in series with the
two near-electrode sheath capacitances.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .elements import MicrostripSpec, line_abcd
from .network import NetworkSweep, abcd_to_s, cascade_all, s_to_abcd, series_element


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values."""

    e: float = 1.602176634e-19      # elementary charge, C
    m: float = 9.1093837015e-31     # electron mass, kg
    eps0: float = 8.8541878128e-12  # vacuum permittivity, F/m


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class DrudeParams:
    """Bulk plasma state: electron density (1/m^3) and collision rate (1/s)."""

    n_e: float
    nu_m: float

    def __post_init__(self):
        if self.n_e < 0:
            raise ValueError("electron density must be >= 0")
        if self.nu_m < 0:
            raise ValueError("collision frequency must be >= 0")


# Placeholder discharge parameters, NOT calibrated against any measured cell:
# the gas species, fill pressure and on-state density of commercial GDTs are
# not public.  Chosen so the geometry-derived on resistance of the default
# cell below lands near its nominal r_on; override with fitted values.
UNCALIBRATED_DRUDE_ON = DrudeParams(n_e=8.2e20, nu_m=1e11)


@dataclass(frozen=True)
class PlasmaCellModel:
    """Equivalent-circuit and geometry description of one GDT plasma cell.

    bias_* fields are control-guarantee metadata (the DC breakdown event is
    commanded externally and not simulated on the RF path).
    """

    c_off: float = 0.5e-12
    r_on: float = 1.5
    c_sheath: float = 20e-12
    gap: float = 1.0e-3
    area: float = 3.0e-6
    breakdown_voltage: float = 200.0
    bias_fraction: float = 1.10
    bias_current_limit: float = 100e-6
    drude_on: DrudeParams = UNCALIBRATED_DRUDE_ON

    def __post_init__(self):
        for name in ("c_off", "r_on", "c_sheath", "gap", "area"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive")

    def with_fit(self, fit: "SwitchFitResult") -> "PlasmaCellModel":
        """Copy of this cell with fitted equivalent-circuit values applied."""
        fields = {}
        if fit.c_off is not None:
            fields["c_off"] = fit.c_off
        if fit.r_on is not None:
            fields["r_on"] = fit.r_on
        if fit.c_sheath is not None:
            fields["c_sheath"] = fit.c_sheath
        return replace(self, **fields)


def drude_permittivity(p: DrudeParams, omega) -> float:
    """Relative permittivity of the bulk plasma; always <= 1."""
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("omega must be positive")
    k = CONSTANTS.e**2 / (CONSTANTS.eps0 * CONSTANTS.m)
    return 1.0 - k * p.n_e / (np.asarray(omega) ** 2 + p.nu_m**2)


def drude_conductivity(p: DrudeParams, omega) -> float:
    """Bulk plasma conductivity in S/m; >= 0."""
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("omega must be positive")
    k = CONSTANTS.e**2 / CONSTANTS.m
    return k * p.n_e * p.nu_m / (np.asarray(omega) ** 2 + p.nu_m**2)


def critical_density(omega: float, nu_m: float = 0.0) -> float:
    """Electron density at which the bulk permittivity crosses zero."""
    return CONSTANTS.eps0 * CONSTANTS.m * (omega**2 + nu_m**2) / CONSTANTS.e**2


def bulk_resistance(cell: PlasmaCellModel, drude: DrudeParams, omega) -> float:
    """On-state bulk resistance from geometry: gap / (sigma * area)."""
    sigma = drude_conductivity(drude, omega)
    return cell.gap / (sigma * cell.area)


def switch_impedance(cell: PlasmaCellModel, state: str, f):
    """Two-terminal switch impedance in the given state at frequency f.

    off: the inter-electrode capacitance c_off.
    on:  r_on in series with the two sheath capacitances, 2/(jw c_sheath).
    """
    w = 2.0 * np.pi * np.asarray(f, dtype=float)
    if np.any(w <= 0):
        raise ValueError("frequency must be positive")
    if state == "off":
        return 1.0 / (1j * w * cell.c_off)
    if state == "on":
        return cell.r_on + 2.0 / (1j * w * cell.c_sheath)
    raise ValueError(f"state must be 'on' or 'off', got {state!r}")


class FitConvergenceError(RuntimeError):
    """Damped least squares hit the iteration cap without converging."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class SwitchFitResult:
    """Fit output: recovered equivalent-circuit values and residual norm."""

    c_off: Optional[float]
    r_on: Optional[float]
    c_sheath: Optional[float]
    residual: float
    iterations: int


def _series_model_s(z, z0: float):
    """S-parameters of a series-mounted two-terminal impedance."""
    denom = z + 2.0 * z0
    s11 = z / denom
    s21 = 2.0 * z0 / denom
    return s11, s21


def _switch_s_residual(params_log, state, omega, s_meas, z0):
    # params are log-scaled to keep the step well conditioned across pF..ohm
    if state == "off":
        (c_off,) = np.exp(params_log)
        z = 1.0 / (1j * omega * c_off)
    else:
        r_on, c_sheath = np.exp(params_log)
        z = r_on + 2.0 / (1j * omega * c_sheath)
    s11, s21 = _series_model_s(z, z0)
    # series element is symmetric: model s22 = s11, s12 = s21
    diff = np.stack(
        [
            s_meas[:, 0, 0] - s11,
            s_meas[:, 1, 0] - s21,
            s_meas[:, 0, 1] - s21,
            s_meas[:, 1, 1] - s11,
        ]
    )
    return np.concatenate([diff.real.ravel(), diff.imag.ravel()])


def _damped_least_squares(fun, x0, max_iter=100, tol=1e-14):
    """Minimal Levenberg-Marquardt loop with finite-difference Jacobian."""
    x = np.asarray(x0, dtype=float)
    r = fun(x)
    cost = float(r @ r)
    lam = 1e-3
    for it in range(1, max_iter + 1):
        jac = np.empty((r.size, x.size))
        for j in range(x.size):
            step = 1e-7 * max(abs(x[j]), 1.0)
            xp = x.copy()
            xp[j] += step
            jac[:, j] = (fun(xp) - r) / step
        g = jac.T @ r
        h = jac.T @ jac
        improved = False
        for _ in range(25):
            try:
                dx = np.linalg.solve(h + lam * np.diag(np.diag(h) + 1e-30), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            r_new = fun(x + dx)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                x, r, cost = x + dx, r_new, cost_new
                lam = max(lam / 10.0, 1e-12)
                improved = True
                break
            lam *= 10.0
        if cost < tol or (improved and np.linalg.norm(dx) < 1e-12):
            return x, math.sqrt(cost), it
        if not improved:
            return x, math.sqrt(cost), it
    raise FitConvergenceError("fit did not converge", math.sqrt(cost))


def fit_switch_model(
    measured: NetworkSweep,
    state: str,
    fixture: Optional[MicrostripSpec] = None,
    z0: float = 50.0,
    poor_fit_threshold: float = 0.05,
) -> SwitchFitResult:
    """Least-squares fit of the series-mounted switch equivalent circuit.

    Off-state data yields c_off; on-state data yields r_on and c_sheath.
    A fixture line, when given, is assumed on both sides of the cell and is
    de-embedded by cascading inverse fixture matrices.  Initialization is a
    closed-form estimate from the middle frequency point, refined by damped
    least squares over log-scaled parameters.
    """
    if state not in ("on", "off"):
        raise ValueError(f"state must be 'on' or 'off', got {state!r}")
    if len(measured.grid) < 3:
        raise ValueError("need at least 3 frequency points to fit")

    freqs = measured.grid.points
    s_meas = measured.s_array()
    if fixture is not None:
        s_list = measured.s_matrices(z0)
        for i, f in enumerate(freqs):
            fix_inv = line_abcd(fixture, f).inv()
            dut = cascade_all([fix_inv, s_to_abcd(s_list[i]), fix_inv])
            s = abcd_to_s(dut, z0)
            s_meas[i] = [[s.s11, s.s12], [s.s21, s.s22]]

    omega = 2.0 * np.pi * freqs
    mid = len(freqs) // 2
    w_mid = omega[mid]
    s11_mid = s_meas[mid, 0, 0]
    z_mid = 2.0 * z0 * s11_mid / (1.0 - s11_mid)

    if state == "off":
        c_est = -1.0 / (w_mid * z_mid.imag) if z_mid.imag < 0 else 1e-12
        x0 = np.log([max(c_est, 1e-18)])
    else:
        r_est = max(z_mid.real, 1e-3)
        c_est = -2.0 / (w_mid * z_mid.imag) if z_mid.imag < 0 else 10e-12
        x0 = np.log([r_est, max(c_est, 1e-18)])

    def residual(p):
        return _switch_s_residual(p, state, omega, s_meas, z0)

    x, res_norm, iters = _damped_least_squares(residual, x0)
    rms = res_norm / math.sqrt(residual(x).size)
    if rms > poor_fit_threshold:
        warnings.warn(
            f"switch model fit rms residual {rms:.3e} exceeds "
            f"{poor_fit_threshold:.1e}; model may not describe the data",
            stacklevel=2,
        )
    vals = np.exp(x)
    if state == "off":
        return SwitchFitResult(
            c_off=float(vals[0]), r_on=None, c_sheath=None,
            residual=res_norm, iterations=iters,
        )
    return SwitchFitResult(
        c_off=None, r_on=float(vals[0]), c_sheath=float(vals[1]),
        residual=res_norm, iterations=iters,
    )
