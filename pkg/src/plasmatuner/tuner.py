"""Switched-stub tuner composition, state enumeration, and tuning metrics.

A tuner is a main microstrip line with shunt stub branches, each branch
connected through a plasma switch with its DC bias network.  Every on/off
combination of the n switches is one tuning state, so an n-stub tuner has
2^n states, encoded as a binary word whose most significant bit is the
stub closest to port 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .elements import (
    LumpedCapSpec,
    LumpedIndSpec,
    MicrostripSpec,
    capacitor_impedance,
    inductor_impedance,
    line_abcd,
    open_stub_impedance,
    shorted_stub_impedance,
)
from .network import (
    FrequencyGrid,
    SMatrix2,
    abcd_to_s,
    cascade,
    shunt_branch_y,
)
from .plasma import PlasmaCellModel, switch_impedance


class StateWidthError(ValueError):
    """Switch-state word width does not match the stub count."""


class TotalReflectionError(ValueError):
    """|s11| >= 1: no power enters the network, power gain is undefined."""


@dataclass(frozen=True)
class SwitchState:
    """n-bit switching word, e.g. '01': MSB is the stub closest to port 1,
    1 = switch closed (plasma on), 0 = open."""

    bits: str

    def __post_init__(self):
        if not self.bits or any(ch not in "01" for ch in self.bits):
            raise ValueError(f"state word must be a non-empty 0/1 string, got {self.bits!r}")

    @property
    def width(self) -> int:
        return len(self.bits)

    def bit(self, stub_index: int) -> int:
        """State of the stub at stub_index, counting 0 from port 1."""
        return int(self.bits[stub_index])

    def __str__(self) -> str:
        return self.bits

    @classmethod
    def all_states(cls, n: int) -> list["SwitchState"]:
        """All 2^n states in ascending binary order ('00', '01', '10', ...)."""
        if n < 1:
            raise ValueError("need at least one stub")
        return [cls(format(word, f"0{n}b")) for word in range(2**n)]


@dataclass(frozen=True)
class StubBranch:
    """One stub branch: switch in series with the DC block and the stub,
    bias choke shunting the switch-stub node to RF ground."""

    stub_line: MicrostripSpec
    switch: PlasmaCellModel
    dc_block: LumpedCapSpec
    bias_choke: LumpedIndSpec
    position: float
    termination: str = "short"

    def __post_init__(self):
        if self.position < 0:
            raise ValueError("stub position must be >= 0")
        if self.termination not in ("short", "open"):
            raise ValueError(f"termination must be 'short' or 'open', got {self.termination!r}")


@dataclass(frozen=True)
class TunerConfig:
    """Main-line sections interleaved with stub branches.

    len(main_sections) == len(stubs) + 1, and the cumulative section
    lengths must land on the stub positions (the sections partition the
    main line where the branches attach).
    """

    main_sections: tuple
    stubs: tuple
    z0: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "main_sections", tuple(self.main_sections))
        object.__setattr__(self, "stubs", tuple(self.stubs))
        if len(self.stubs) < 1:
            raise ValueError("tuner needs at least one stub")
        if len(self.main_sections) != len(self.stubs) + 1:
            raise ValueError(
                f"{len(self.stubs)} stubs require {len(self.stubs) + 1} main sections, "
                f"got {len(self.main_sections)}"
            )
        if not (self.z0 > 0):
            raise ValueError("z0 must be positive")
        total = sum(sec.length for sec in self.main_sections)
        cursor = 0.0
        tol = 1e-9 * max(total, 1e-3)
        prev = -1.0
        for i, stub in enumerate(self.stubs):
            cursor += self.main_sections[i].length
            if abs(stub.position - cursor) > tol:
                raise ValueError(
                    f"stub {i} position {stub.position} does not match the section "
                    f"partition point {cursor}"
                )
            if stub.position <= prev:
                raise ValueError("stubs must be ordered by strictly increasing position")
            prev = stub.position
        if self.stubs[-1].position > total + tol:
            raise ValueError("stub position lies beyond the main line")

    @property
    def stub_count(self) -> int:
        return len(self.stubs)

    @property
    def main_length(self) -> float:
        return sum(sec.length for sec in self.main_sections)

    def states(self) -> list[SwitchState]:
        return SwitchState.all_states(self.stub_count)


def branch_input_impedance(stub: StubBranch, state_bit: int, f):
    """Impedance looking from the main line into one stub branch.

    Series path: switch -> bias node -> DC block -> stub; the bias choke
    shunts the bias node to ground (ideal DC source behind it).
    """
    z_switch = switch_impedance(stub.switch, "on" if state_bit else "off", f)
    if stub.termination == "short":
        z_stub = shorted_stub_impedance(stub.stub_line, f)
    else:
        z_stub = open_stub_impedance(stub.stub_line, f)
    z_tail = capacitor_impedance(stub.dc_block, f) + z_stub
    z_choke = inductor_impedance(stub.bias_choke, f)
    z_node = z_choke * z_tail / (z_choke + z_tail)
    return z_switch + z_node


def state_network(cfg: TunerConfig, state: SwitchState, f) -> SMatrix2:
    """Two-port S-matrix of the tuner in one switching state.

    Cascades the main-line sections with a shunt branch at each stub
    position.  f may be a scalar or an array for a whole sweep.
    """
    if state.width != cfg.stub_count:
        raise StateWidthError(
            f"state word {state} has {state.width} bits for {cfg.stub_count} stubs"
        )
    total = line_abcd(cfg.main_sections[0], f)
    for i, stub in enumerate(cfg.stubs):
        z_branch = branch_input_impedance(stub, state.bit(i), f)
        total = cascade(total, shunt_branch_y(1.0 / z_branch))
        total = cascade(total, line_abcd(cfg.main_sections[i + 1], f))
    return abcd_to_s(total, cfg.z0)


def power_gain(s: SMatrix2):
    """Ratio of power dissipated in a matched load to power accepted at the
    input: G = |s21|^2 / (1 - |s11|^2).  Linear; use gain_db for decibels."""
    refl = np.abs(s.s11) ** 2
    if np.any(refl >= 1.0):
        raise TotalReflectionError("|s11| >= 1, no power accepted")
    return np.abs(s.s21) ** 2 / (1.0 - refl)


def gain_db(s: SMatrix2):
    return 10.0 * np.log10(power_gain(s))


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """All pairwise Euclidean distances between complex points."""
    pts = np.asarray(points)
    n = pts.size
    if n < 2:
        return np.array([])
    iu, ju = np.triu_indices(n, k=1)
    return np.abs(pts[iu] - pts[ju])


def convex_hull_area(points) -> float:
    """Area of the convex hull of complex points (monotone chain + shoelace).

    Degenerate sets (fewer than 3 distinct points, or all collinear) have
    zero area.
    """
    pts = sorted({(complex(p).real, complex(p).imag) for p in np.asarray(points).ravel()})
    if len(pts) < 3:
        return 0.0

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return 0.0
    area = 0.0
    for (x1, y1), (x2, y2) in zip(hull, hull[1:] + hull[:1]):
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


@dataclass(frozen=True)
class CoverageMetrics:
    """Spread of the state constellation at one frequency."""

    min_pairwise_distance: float
    max_pairwise_distance: float
    hull_area: float


@dataclass(frozen=True)
class CoverageReport:
    """Input reflection coefficients of every state over a frequency grid.

    gamma has shape (n_states, n_freq); metrics holds one CoverageMetrics
    per grid point.
    """

    grid: FrequencyGrid
    states: tuple
    gamma: np.ndarray
    metrics: tuple

    def points_at(self, freq_index: int) -> list:
        """(state, gamma) pairs at one grid index."""
        return [(st, complex(self.gamma[k, freq_index])) for k, st in enumerate(self.states)]


def coverage(cfg: TunerConfig, grid: FrequencyGrid) -> CoverageReport:
    """Matched-load input reflection (s11) for every state and frequency,
    with per-frequency spread metrics."""
    states = cfg.states()
    gamma = np.empty((len(states), len(grid)), dtype=complex)
    for k, st in enumerate(states):
        s = state_network(cfg, st, grid.points)
        gamma[k, :] = s.s11
    metrics = []
    for j in range(len(grid)):
        d = pairwise_distances(gamma[:, j])
        metrics.append(
            CoverageMetrics(
                min_pairwise_distance=float(d.min()) if d.size else 0.0,
                max_pairwise_distance=float(d.max()) if d.size else 0.0,
                hull_area=convex_hull_area(gamma[:, j]),
            )
        )
    return CoverageReport(grid=grid, states=tuple(states), gamma=gamma, metrics=tuple(metrics))


@dataclass(frozen=True)
class BandExtent:
    """Largest contiguous interval where the worst-state gain clears the floor."""

    f_lo: float
    f_hi: float
    fractional_bw: float


def min_state_gain_db(cfg: TunerConfig, grid: FrequencyGrid) -> np.ndarray:
    """Worst power gain over all states at each grid frequency, in dB."""
    worst = np.full(len(grid), np.inf)
    for st in cfg.states():
        s = state_network(cfg, st, grid.points)
        worst = np.minimum(worst, gain_db(s))
    return worst


def band_extent(
    cfg: TunerConfig, grid: FrequencyGrid, gain_floor_db: float
) -> Optional[BandExtent]:
    """Largest contiguous grid interval with min-over-states gain above the
    floor; None when no grid point qualifies."""
    if not (gain_floor_db < 0):
        raise ValueError("gain floor must be negative dB")
    ok = min_state_gain_db(cfg, grid) >= gain_floor_db
    best = None
    start = None
    for j, flag in enumerate(np.append(ok, False)):
        if flag and start is None:
            start = j
        elif not flag and start is not None:
            if best is None or (j - 1 - start) > (best[1] - best[0]):
                best = (start, j - 1)
            start = None
    if best is None:
        return None
    f_lo = float(grid.points[best[0]])
    f_hi = float(grid.points[best[1]])
    center = 0.5 * (f_lo + f_hi)
    return BandExtent(f_lo=f_lo, f_hi=f_hi, fractional_bw=(f_hi - f_lo) / center)
