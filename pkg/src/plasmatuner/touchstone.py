"""Touchstone v1.1 two-port reader/writer.

Only the 2-port S-parameter layout is handled: an option line
"# <unit> S <RI|MA|DB> R <resistance>" followed by 9-column data rows
(frequency + four complex pairs in S11 S21 S12 S22 order).  Angles are
degrees; DB magnitudes are 20*log10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import FrequencyGrid, NetworkSweep, SMatrix2

FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
FORMATS = ("RI", "MA", "DB")


class TouchstoneParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _pair_to_complex(a: float, b: float, fmt: str) -> complex:
    if fmt == "RI":
        return complex(a, b)
    if fmt == "MA":
        return a * complex(math.cos(math.radians(b)), math.sin(math.radians(b)))
    return 10.0 ** (a / 20.0) * complex(math.cos(math.radians(b)), math.sin(math.radians(b)))


def _complex_to_pair(z: complex, fmt: str):
    if fmt == "RI":
        return z.real, z.imag
    mag = abs(z)
    ang = math.degrees(math.atan2(z.imag, z.real))
    if fmt == "MA":
        return mag, ang
    return 20.0 * math.log10(mag) if mag > 0 else -math.inf, ang


@dataclass(frozen=True)
class TouchstoneFile:
    """Parsed file: option-line fields, raw comment lines, and the sweep."""

    unit: str
    parameter: str
    format: str
    resistance: float
    comments: tuple
    sweep: NetworkSweep

    @classmethod
    def read(cls, path) -> "TouchstoneFile":
        unit, fmt, resistance = "ghz", "MA", 50.0
        parameter = "S"
        comments = []
        freqs = []
        mats = []
        option_seen = False
        with open(path, "r") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("!"):
                    comments.append(line[1:].strip())
                    continue
                if line.startswith("#"):
                    if option_seen:
                        continue  # v1.1: later option lines are ignored
                    tokens = line[1:].split()
                    if len(tokens) > 5:
                        raise TouchstoneParseError("too many option-line tokens", line_no)
                    defaults = ["ghz", "s", "ma", "r", "50"]
                    defaults[: len(tokens)] = [t.lower() for t in tokens]
                    unit, parameter, fmt, r_kw, resistance = defaults
                    if r_kw != "r":
                        raise TouchstoneParseError(
                            f"expected 'R' before the reference resistance, got {r_kw!r}",
                            line_no,
                        )
                    if unit not in FREQ_UNITS:
                        raise TouchstoneParseError(f"unknown frequency unit {unit!r}", line_no)
                    if parameter != "s":
                        raise TouchstoneParseError(
                            f"only S-parameters are supported, got {parameter!r}", line_no
                        )
                    fmt = fmt.upper()
                    if fmt not in FORMATS:
                        raise TouchstoneParseError(f"unknown format {fmt!r}", line_no)
                    try:
                        resistance = float(resistance)
                    except ValueError:
                        raise TouchstoneParseError(
                            f"bad reference resistance {resistance!r}", line_no
                        ) from None
                    parameter = "S"
                    option_seen = True
                    continue
                if not option_seen:
                    raise TouchstoneParseError("data before option line", line_no)
                if "!" in line:
                    line = line[: line.index("!")].strip()
                    if not line:
                        continue
                fields = line.split()
                if len(fields) != 9:
                    raise TouchstoneParseError(
                        f"expected 9 columns for a 2-port row, got {len(fields)}", line_no
                    )
                try:
                    vals = [float(x) for x in fields]
                except ValueError:
                    raise TouchstoneParseError(f"non-numeric data: {line!r}", line_no) from None
                f_hz = vals[0] * FREQ_UNITS[unit]
                if freqs and f_hz <= freqs[-1]:
                    raise TouchstoneParseError(
                        f"frequency {f_hz} Hz not strictly increasing", line_no
                    )
                freqs.append(f_hz)
                s11 = _pair_to_complex(vals[1], vals[2], fmt)
                s21 = _pair_to_complex(vals[3], vals[4], fmt)
                s12 = _pair_to_complex(vals[5], vals[6], fmt)
                s22 = _pair_to_complex(vals[7], vals[8], fmt)
                mats.append(SMatrix2(s11=s11, s12=s12, s21=s21, s22=s22, z0=resistance))
        if not option_seen:
            raise TouchstoneParseError("missing option line", 1)
        if not freqs:
            raise TouchstoneParseError("file contains no data rows", 1)
        sweep = NetworkSweep(grid=FrequencyGrid(np.array(freqs)), params=tuple(mats))
        return cls(
            unit=unit,
            parameter=parameter,
            format=fmt,
            resistance=resistance,
            comments=tuple(comments),
            sweep=sweep,
        )


def read_touchstone(path) -> NetworkSweep:
    """Read a 2-port .s2p file into a NetworkSweep (any format, any unit)."""
    return TouchstoneFile.read(path).sweep


def write_touchstone(
    sweep: NetworkSweep, path, format: str = "RI", comments=()
) -> None:
    """Write a sweep as Touchstone v1.1 in GHz.  Deterministic: identical
    sweeps produce byte-identical files."""
    fmt = format.upper()
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    if len(sweep.grid) == 0:
        raise ValueError("refusing to write an empty sweep")
    mats = sweep.s_matrices()
    z0 = mats[0].z0
    lines = [f"! {c}" for c in comments]
    lines.append(f"# GHz S {fmt} R {z0:g}")
    for f_hz, s in zip(sweep.grid.points, mats):
        cols = [repr(float(f_hz / 1e9))]
        for z in (s.s11, s.s21, s.s12, s.s22):
            a, b = _complex_to_pair(complex(z), fmt)
            cols.append(repr(float(a)))
            cols.append(repr(float(b)))
        lines.append(" ".join(cols))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
