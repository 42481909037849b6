"""Quasi-static switching-transient simulation.

The electron density of each transitioning cell relaxes exponentially
toward its commanded state; at every time step the tuner is re-evaluated
in the frequency domain at the CW stimulus frequency and the output
envelope |s21(t)| is recorded.  The RF period (sub-ns) is far shorter
than the observed transients, so per-step frequency-domain evaluation is
valid (separation of timescales).

During a transition the switch is always the full on-state circuit with a
time-varying bulk conductance in parallel with the off capacitance; at
zero density this reduces exactly to the off-state capacitance, so there
is no discontinuous model change mid-transition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import (
    capacitor_impedance,
    inductor_impedance,
    line_abcd,
    open_stub_impedance,
    shorted_stub_impedance,
)
from .network import abcd_to_s, cascade, shunt_branch_y
from .plasma import DrudeParams, drude_conductivity, switch_impedance
from .tuner import StateWidthError, SwitchState, TunerConfig


class StepSizeError(ValueError):
    """Time step too coarse: dt must be at most min(tau_on, tau_off)/10."""


@dataclass(frozen=True)
class TransientSpec:
    """Exponential density-relaxation surrogate and trace parameters.

    tau values are calibration knobs, not measured constants; the paper's
    scale is reproduced with tau_on near 183 ns and a 5% settling band.
    """

    tau_on: float
    tau_off: float
    n_e_on: float
    f_cw: float
    t_end: float
    dt: float
    settle_fraction: float = 0.05

    def __post_init__(self):
        if not (self.tau_on > 0 and self.tau_off > 0 and self.dt > 0):
            raise ValueError("tau_on, tau_off, dt must be positive")
        if not (self.n_e_on > 0 and self.f_cw > 0 and self.t_end > 0):
            raise ValueError("n_e_on, f_cw, t_end must be positive")
        if not (0.0 < self.settle_fraction < 1.0):
            raise ValueError("settle_fraction must be in (0, 1)")
        if self.dt > min(self.tau_on, self.tau_off) / 10.0:
            raise StepSizeError(
                f"dt = {self.dt} exceeds min(tau)/10 = {min(self.tau_on, self.tau_off) / 10.0}"
            )

    def times(self) -> np.ndarray:
        return np.arange(0.0, self.t_end + 0.5 * self.dt, self.dt)


def density_trajectory(spec: TransientSpec, transition: str, t):
    """Electron density at time t after the bias edge.

    'on'  : n_e_on * (1 - exp(-t/tau_on))
    'off' : n_e_on * exp(-t/tau_off)
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    if transition == "on":
        return spec.n_e_on * (1.0 - np.exp(-t / spec.tau_on))
    if transition == "off":
        return spec.n_e_on * np.exp(-t / spec.tau_off)
    raise ValueError(f"transition must be 'on' or 'off', got {transition!r}")


def _blended_switch_impedance(cell, n_e: np.ndarray, nu_m: float, omega: float):
    """On-state circuit with density-dependent bulk conductance, in
    parallel with the off capacitance.  Reduces to the off capacitance at
    n_e = 0 without any division by a vanishing conductivity."""
    # conductivity is linear in n_e, so scale a unit-density value
    sigma_unit = drude_conductivity(DrudeParams(n_e=1.0, nu_m=nu_m), omega)
    g_bulk = sigma_unit * np.asarray(n_e) * cell.area / cell.gap  # 1/r_on(t)
    z_sheath = 2.0 / (1j * omega * cell.c_sheath)
    y_on_path = g_bulk / (1.0 + g_bulk * z_sheath)
    return 1.0 / (y_on_path + 1j * omega * cell.c_off)


@dataclass(frozen=True)
class EnvelopeTrace:
    """|s21| envelope samples plus the steady-state value it relaxes to."""

    times: np.ndarray
    envelope: np.ndarray
    final_value: float


def _bias_node_impedance(stub, f):
    """Choke in parallel with (DC block + stub), seen from the switch."""
    if stub.termination == "short":
        z_stub = shorted_stub_impedance(stub.stub_line, f)
    else:
        z_stub = open_stub_impedance(stub.stub_line, f)
    z_tail = capacitor_impedance(stub.dc_block, f) + z_stub
    z_choke = inductor_impedance(stub.bias_choke, f)
    return z_choke * z_tail / (z_choke + z_tail)


def _s21_magnitude(cfg, branch_z, f):
    total = line_abcd(cfg.main_sections[0], f)
    for i in range(cfg.stub_count):
        total = cascade(total, shunt_branch_y(1.0 / branch_z[i]))
        total = cascade(total, line_abcd(cfg.main_sections[i + 1], f))
    return np.abs(abcd_to_s(total, cfg.z0).s21)


def envelope_trace(
    cfg: TunerConfig, from_state: SwitchState, to_state: SwitchState, spec: TransientSpec
) -> EnvelopeTrace:
    """Output envelope |s21(t)| at f_cw while switching between two states.

    Bits that differ between the states follow the density relaxation;
    all other switches stay in their steady model.
    """
    if from_state.width != cfg.stub_count or to_state.width != cfg.stub_count:
        raise StateWidthError("state words must match the stub count")
    f = spec.f_cw
    omega = 2.0 * np.pi * f
    t = spec.times()

    # per-stub branch impedance over time (scalar when the stub is steady)
    branch_z = []
    final_z = []
    for i, stub in enumerate(cfg.stubs):
        b_from, b_to = from_state.bit(i), to_state.bit(i)
        z_node = _bias_node_impedance(stub, f)
        if b_from == b_to:
            z_sw = switch_impedance(stub.switch, "on" if b_to else "off", f)
            z_sw_final = z_sw
        else:
            n_e = density_trajectory(spec, "on" if b_to else "off", t)
            nu_m = stub.switch.drude_on.nu_m
            z_sw = _blended_switch_impedance(stub.switch, n_e, nu_m, omega)
            n_end = np.asarray(spec.n_e_on if b_to else 0.0)
            z_sw_final = _blended_switch_impedance(stub.switch, n_end, nu_m, omega)
        branch_z.append(z_sw + z_node)
        final_z.append(z_sw_final + z_node)

    envelope = _s21_magnitude(cfg, branch_z, f) * np.ones_like(t)
    final_value = float(_s21_magnitude(cfg, final_z, f))
    return EnvelopeTrace(times=t, envelope=envelope, final_value=final_value)


def tuning_time(trace: EnvelopeTrace, spec: TransientSpec):
    """First time after which the envelope stays inside the settling band
    around its final value for the remainder of the trace.

    The band is the classic step-response settling band: settle_fraction
    times the envelope excursion |final - initial|.  A pure exponential
    with constant tau therefore settles at tau*ln(1/settle_fraction),
    about 3*tau at the default 5%, in either direction.

    Returns None when the trace never settles within its span (reported,
    not raised).
    """
    band = spec.settle_fraction * abs(trace.final_value - float(trace.envelope[0]))
    outside = np.abs(trace.envelope - trace.final_value) > band
    if not np.any(outside):
        return float(trace.times[0])
    last_bad = int(np.nonzero(outside)[0][-1])
    if last_bad == len(trace.times) - 1:
        return None
    return float(trace.times[last_bad + 1])
