"""Configuration files: INI-style sections with unit-suffixed values.

Component values carry their units directly ("7.5pF", "15nH", "30mil",
"3GHz") and are normalized to SI on read.  Sections mirror the domain
types; [tuner] wires component ids together, so every referenced id must
resolve to a section.

    [substrate]
    eps_r = 3.45
    tan_delta = 0.0020
    height = 30mil
    copper_thickness = 17.5um

    [capacitor C1]
    capacitance = 7.5pF
    ...

    [tuner]
    z0 = 50ohm
    sections = main1, main2, main3
    stubs = S1, S2
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from typing import Optional

from .elements import LumpedCapSpec, LumpedIndSpec, MicrostripSpec, SubstrateSpec
from .network import FrequencyGrid
from .plasma import DrudeParams, PlasmaCellModel, UNCALIBRATED_DRUDE_ON
from .synth import SynthBounds, SynthTargets
from .transient import TransientSpec
from .tuner import StubBranch, TunerConfig


class ConfigError(ValueError):
    """Malformed configuration file or dangling component reference."""


_UNIT_SCALE = {
    "": 1.0,
    "db": 1.0,
    # frequency
    "hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9,
    # time
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12,
    # length
    "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "mil": 25.4e-6,
    # area
    "m2": 1.0, "cm2": 1e-4, "mm2": 1e-6, "um2": 1e-12,
    # capacitance
    "f": 1.0, "uf": 1e-6, "nf": 1e-9, "pf": 1e-12, "ff": 1e-15,
    # inductance
    "h": 1.0, "mh": 1e-3, "uh": 1e-6, "nh": 1e-9, "ph": 1e-12,
    # resistance / voltage / current
    "ohm": 1.0, "kohm": 1e3,
    "v": 1.0, "kv": 1e3,
    "a": 1.0, "ma": 1e-3, "ua": 1e-6,
    # number density
    "/m3": 1.0, "/cm3": 1e6,
}

_QUANTITY_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([a-zA-Z/0-9]*)\s*$")


def parse_quantity(text: str) -> float:
    """Number with optional unit suffix, normalized to SI."""
    m = _QUANTITY_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse quantity {text!r}")
    value, unit = m.groups()
    key = unit.lower()
    if key not in _UNIT_SCALE:
        raise ConfigError(f"unknown unit {unit!r} in {text!r}")
    return float(value) * _UNIT_SCALE[key]


@dataclass(frozen=True)
class ArtifactConfig:
    """Everything a command needs: component library, tuner, sweep, and the
    optional transient/synthesis sections."""

    substrate: SubstrateSpec
    capacitors: dict
    inductors: dict
    cells: dict
    lines: dict
    tuner: Optional[TunerConfig]
    grid: Optional[FrequencyGrid]
    transient: Optional[TransientSpec]
    synth_targets: Optional[SynthTargets]
    synth_bounds: Optional[SynthBounds]
    synth_options: dict


def _get(section, key, parser_section_name, default=None, required=False):
    if key in section:
        return parse_quantity(section[key])
    if required:
        raise ConfigError(f"[{parser_section_name}] is missing required key {key!r}")
    return default


def _split_ids(text: str):
    return [t.strip() for t in text.split(",") if t.strip()]


def load_config(path) -> ArtifactConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")

    substrate = SubstrateSpec()
    if cp.has_section("substrate"):
        sec = cp["substrate"]
        kwargs = dict(
            eps_r=_get(sec, "eps_r", "substrate", 3.45),
            tan_delta=_get(sec, "tan_delta", "substrate", 0.0020),
            height=_get(sec, "height", "substrate", 30 * 25.4e-6),
            copper_thickness=_get(sec, "copper_thickness", "substrate", 17.5e-6),
        )
        if "conductor_sigma" in sec:
            kwargs["conductor_sigma"] = parse_quantity(sec["conductor_sigma"])
        substrate = SubstrateSpec(**kwargs)

    capacitors, inductors, cells, lines, stubs_raw = {}, {}, {}, {}, {}
    for name in cp.sections():
        parts = name.split(None, 1)
        kind = parts[0].lower()
        ident = parts[1] if len(parts) > 1 else None
        sec = cp[name]
        if kind == "capacitor" and ident:
            capacitors[ident] = LumpedCapSpec(
                capacitance=_get(sec, "capacitance", name, required=True),
                esl=_get(sec, "esl", name, 0.0),
                esr=_get(sec, "esr", name, 0.0),
            )
        elif kind == "inductor" and ident:
            inductors[ident] = LumpedIndSpec(
                inductance=_get(sec, "inductance", name, required=True),
                c_par=_get(sec, "c_par", name, 0.0),
                r_series=_get(sec, "r_series", name, 0.0),
            )
        elif kind == "cell" and ident:
            drude = UNCALIBRATED_DRUDE_ON
            if "n_e_on" in sec or "nu_m" in sec:
                drude = DrudeParams(
                    n_e=_get(sec, "n_e_on", name, UNCALIBRATED_DRUDE_ON.n_e),
                    nu_m=_get(sec, "nu_m", name, UNCALIBRATED_DRUDE_ON.nu_m),
                )
            cells[ident] = PlasmaCellModel(
                c_off=_get(sec, "c_off", name, required=True),
                r_on=_get(sec, "r_on", name, required=True),
                c_sheath=_get(sec, "c_sheath", name, required=True),
                gap=_get(sec, "gap", name, 1.0e-3),
                area=_get(sec, "area", name, 3.0e-6),
                breakdown_voltage=_get(sec, "breakdown_voltage", name, 200.0),
                bias_fraction=_get(sec, "bias_fraction", name, 1.10),
                bias_current_limit=_get(sec, "bias_current_limit", name, 100e-6),
                drude_on=drude,
            )
        elif kind == "line" and ident:
            lines[ident] = MicrostripSpec(
                width=_get(sec, "width", name, required=True),
                length=_get(sec, "length", name, required=True),
                substrate=substrate,
            )
        elif kind == "stub" and ident:
            stubs_raw[ident] = dict(sec)

    def resolve(table, ident, kind, context):
        if ident not in table:
            raise ConfigError(f"{context} references unknown {kind} {ident!r}")
        return table[ident]

    tuner = None
    if cp.has_section("tuner"):
        sec = cp["tuner"]
        section_ids = _split_ids(sec.get("sections", ""))
        stub_ids = _split_ids(sec.get("stubs", ""))
        if not section_ids or not stub_ids:
            raise ConfigError("[tuner] needs both 'sections' and 'stubs' id lists")
        main_sections = tuple(resolve(lines, i, "line", "[tuner] sections") for i in section_ids)
        branches = []
        cursor = 0.0
        for k, sid in enumerate(stub_ids):
            if sid not in stubs_raw:
                raise ConfigError(f"[tuner] stubs references unknown stub {sid!r}")
            raw = stubs_raw[sid]
            for key in ("line", "switch", "dc_block", "bias_choke"):
                if key not in raw:
                    raise ConfigError(f"[stub {sid}] is missing required key {key!r}")
            cursor += main_sections[k].length
            position = parse_quantity(raw["position"]) if "position" in raw else cursor
            branches.append(
                StubBranch(
                    stub_line=resolve(lines, raw["line"], "line", f"[stub {sid}]"),
                    switch=resolve(cells, raw["switch"], "cell", f"[stub {sid}]"),
                    dc_block=resolve(capacitors, raw["dc_block"], "capacitor", f"[stub {sid}]"),
                    bias_choke=resolve(inductors, raw["bias_choke"], "inductor", f"[stub {sid}]"),
                    position=position,
                    termination=raw.get("termination", "short"),
                )
            )
        try:
            tuner = TunerConfig(
                main_sections=main_sections,
                stubs=tuple(branches),
                z0=_get(sec, "z0", "tuner", 50.0),
            )
        except ValueError as exc:
            raise ConfigError(f"[tuner] invalid: {exc}") from exc

    grid = None
    if cp.has_section("sweep"):
        sec = cp["sweep"]
        try:
            grid = FrequencyGrid.linspace(
                _get(sec, "start", "sweep", required=True),
                _get(sec, "stop", "sweep", required=True),
                int(_get(sec, "points", "sweep", required=True)),
            )
        except ValueError as exc:
            raise ConfigError(f"[sweep] invalid: {exc}") from exc

    transient = None
    if cp.has_section("transient"):
        sec = cp["transient"]
        try:
            transient = TransientSpec(
                tau_on=_get(sec, "tau_on", "transient", required=True),
                tau_off=_get(sec, "tau_off", "transient", required=True),
                n_e_on=_get(sec, "n_e_on", "transient", required=True),
                f_cw=_get(sec, "f_cw", "transient", required=True),
                t_end=_get(sec, "t_end", "transient", required=True),
                dt=_get(sec, "dt", "transient", required=True),
                settle_fraction=_get(sec, "settle_fraction", "transient", 0.05),
            )
        except ValueError as exc:
            raise ConfigError(f"[transient] invalid: {exc}") from exc

    synth_targets = None
    synth_bounds = None
    synth_options = {}
    if cp.has_section("synth"):
        sec = cp["synth"]
        try:
            synth_targets = SynthTargets(
                f_lo=_get(sec, "f_lo", "synth", required=True),
                f_hi=_get(sec, "f_hi", "synth", required=True),
                gain_floor_db=_get(sec, "gain_floor", "synth", required=True),
                min_state_separation=_get(sec, "min_state_separation", "synth", 0.0),
                stub_count=int(_get(sec, "stub_count", "synth", 2)),
            )
            synth_bounds = SynthBounds(
                section_length=(
                    _get(sec, "section_min", "synth", 2e-3),
                    _get(sec, "section_max", "synth", 25e-3),
                ),
                stub_length=(
                    _get(sec, "stub_min", "synth", 2e-3),
                    _get(sec, "stub_max", "synth", 20e-3),
                ),
            )
        except ValueError as exc:
            raise ConfigError(f"[synth] invalid: {exc}") from exc
        synth_options = {
            "grid_points": int(_get(sec, "grid_points", "synth", 31)),
            "max_evals": int(_get(sec, "max_evals", "synth", 20000)),
        }

    return ArtifactConfig(
        substrate=substrate,
        capacitors=capacitors,
        inductors=inductors,
        cells=cells,
        lines=lines,
        tuner=tuner,
        grid=grid,
        transient=transient,
        synth_targets=synth_targets,
        synth_bounds=synth_bounds,
        synth_options=synth_options,
    )


def _fmt(value: float, unit: str = "") -> str:
    return f"{value!r}{unit}"


def write_tuner_config(cfg: TunerConfig, path, grid: Optional[FrequencyGrid] = None) -> None:
    """Emit a TunerConfig as a loadable config file (deterministic bytes)."""
    sub = cfg.main_sections[0].substrate
    out = []
    out.append("[substrate]")
    out.append(f"eps_r = {sub.eps_r!r}")
    out.append(f"tan_delta = {sub.tan_delta!r}")
    out.append(f"height = {sub.height!r}m")
    out.append(f"copper_thickness = {sub.copper_thickness!r}m")
    if sub.conductor_sigma != SubstrateSpec().conductor_sigma:
        out.append(f"conductor_sigma = {sub.conductor_sigma!r}")
    out.append("")

    caps, inds, cells, line_specs = [], [], [], []

    def intern(pool, item):
        for k, existing in enumerate(pool):
            if existing == item:
                return k
        pool.append(item)
        return len(pool) - 1

    section_ids = [f"main{intern(line_specs, sec) + 1}" for sec in cfg.main_sections]
    stub_line_ids, stub_entries = [], []
    for i, stub in enumerate(cfg.stubs):
        line_id = f"main{intern(line_specs, stub.stub_line) + 1}"
        stub_line_ids.append(line_id)
        stub_entries.append(
            dict(
                line=line_id,
                switch=f"GDT{intern(cells, stub.switch) + 1}",
                dc_block=f"C{intern(caps, stub.dc_block) + 1}",
                bias_choke=f"L{intern(inds, stub.bias_choke) + 1}",
                position=stub.position,
                termination=stub.termination,
            )
        )

    for k, spec in enumerate(line_specs):
        out.append(f"[line main{k + 1}]")
        out.append(f"width = {spec.width!r}m")
        out.append(f"length = {spec.length!r}m")
        out.append("")
    for k, cap in enumerate(caps):
        out.append(f"[capacitor C{k + 1}]")
        out.append(f"capacitance = {cap.capacitance!r}F")
        out.append(f"esl = {cap.esl!r}H")
        out.append(f"esr = {cap.esr!r}ohm")
        out.append("")
    for k, ind in enumerate(inds):
        out.append(f"[inductor L{k + 1}]")
        out.append(f"inductance = {ind.inductance!r}H")
        out.append(f"c_par = {ind.c_par!r}F")
        out.append(f"r_series = {ind.r_series!r}ohm")
        out.append("")
    for k, cell in enumerate(cells):
        out.append(f"[cell GDT{k + 1}]")
        out.append(f"c_off = {cell.c_off!r}F")
        out.append(f"r_on = {cell.r_on!r}ohm")
        out.append(f"c_sheath = {cell.c_sheath!r}F")
        out.append(f"gap = {cell.gap!r}m")
        out.append(f"area = {cell.area!r}m2")
        out.append(f"breakdown_voltage = {cell.breakdown_voltage!r}V")
        out.append(f"bias_fraction = {cell.bias_fraction!r}")
        out.append(f"bias_current_limit = {cell.bias_current_limit!r}A")
        out.append(f"n_e_on = {cell.drude_on.n_e!r}/m3")
        out.append(f"nu_m = {cell.drude_on.nu_m!r}")
        out.append("")
    for i, entry in enumerate(stub_entries):
        out.append(f"[stub S{i + 1}]")
        out.append(f"line = {entry['line']}")
        out.append(f"switch = {entry['switch']}")
        out.append(f"dc_block = {entry['dc_block']}")
        out.append(f"bias_choke = {entry['bias_choke']}")
        out.append(f"position = {entry['position']!r}m")
        out.append(f"termination = {entry['termination']}")
        out.append("")

    out.append("[tuner]")
    out.append(f"z0 = {cfg.z0!r}ohm")
    out.append(f"sections = {', '.join(section_ids)}")
    out.append(f"stubs = {', '.join(f'S{i + 1}' for i in range(len(cfg.stubs)))}")
    out.append("")
    if grid is not None:
        out.append("[sweep]")
        out.append(f"start = {grid.points[0]!r}Hz")
        out.append(f"stop = {grid.points[-1]!r}Hz")
        out.append(f"points = {len(grid)}")
        out.append("")
    with open(path, "w") as fh:
        fh.write("\n".join(out))
