"""Tuner geometry synthesis against band, gain-floor, and coverage targets.

The search variables are the main-line section lengths and the stub
lengths; substrate, line widths, switch models, and bias components stay
fixed.  The objective is a sum of hinge penalties over the frequency grid,
zero exactly when every target is met, minimized by a seeded
rand/1/bin differential-evolution search (derivative-free: the objective
is non-smooth through the hinges and the min-over-states).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .elements import (
    LumpedCapSpec,
    LumpedIndSpec,
    MicrostripSpec,
    SubstrateSpec,
    microstrip_width_for,
)
from .network import FrequencyGrid
from .plasma import PlasmaCellModel
from .tuner import (
    BandExtent,
    StubBranch,
    SwitchState,
    TunerConfig,
    band_extent,
    pairwise_distances,
    state_network,
)

INFEASIBLE_PENALTY = 1e6


@dataclass(frozen=True)
class SynthTargets:
    """Band edges, worst-state gain floor (dB), and minimum constellation
    separation in the reflection plane."""

    f_lo: float
    f_hi: float
    gain_floor_db: float
    min_state_separation: float
    stub_count: int = 2

    def __post_init__(self):
        if not (0 < self.f_lo < self.f_hi):
            raise ValueError("need 0 < f_lo < f_hi")
        if not (self.gain_floor_db < 0):
            raise ValueError("gain floor must be negative dB")
        if not (0 <= self.min_state_separation < 2):
            raise ValueError("state separation must be in [0, 2)")
        if self.stub_count < 1:
            raise ValueError("need at least one stub")


@dataclass(frozen=True)
class SynthBounds:
    """Search box: (lo, hi) in meters for every section and stub length."""

    section_length: tuple = (2e-3, 25e-3)
    stub_length: tuple = (2e-3, 20e-3)

    def __post_init__(self):
        for lo, hi in (self.section_length, self.stub_length):
            if not (0 < lo < hi) or not np.isfinite(hi):
                raise ValueError("bounds must be finite with 0 < lo < hi")

    def box(self, stub_count: int):
        n_sec = stub_count + 1
        lower = np.array([self.section_length[0]] * n_sec + [self.stub_length[0]] * stub_count)
        upper = np.array([self.section_length[1]] * n_sec + [self.stub_length[1]] * stub_count)
        return lower, upper


@dataclass(frozen=True)
class SynthTemplate:
    """Fixed hardware the search cannot change: substrate, line widths,
    switch model, and the bias network parts."""

    substrate: SubstrateSpec = SubstrateSpec()
    switch: PlasmaCellModel = PlasmaCellModel()
    dc_block: LumpedCapSpec = LumpedCapSpec(capacitance=7.5e-12, esl=0.35e-9, esr=0.08)
    bias_choke: LumpedIndSpec = LumpedIndSpec(inductance=15e-9, c_par=0.08e-12, r_series=0.15)
    z0: float = 50.0
    main_width: Optional[float] = None   # None: synthesize for z0 on the substrate
    stub_width: Optional[float] = None
    termination: str = "short"

    def widths(self):
        w_main = self.main_width
        if w_main is None:
            w_main = microstrip_width_for(self.z0, self.substrate)
        w_stub = self.stub_width if self.stub_width is not None else w_main
        return w_main, w_stub


def build_config(lengths: np.ndarray, template: SynthTemplate, stub_count: int) -> TunerConfig:
    """Decode a parameter vector [sections..., stubs...] into a TunerConfig."""
    lengths = np.asarray(lengths, dtype=float)
    if lengths.size != 2 * stub_count + 1:
        raise ValueError(f"expected {2 * stub_count + 1} lengths, got {lengths.size}")
    w_main, w_stub = template.widths()
    sections = tuple(
        MicrostripSpec(width=w_main, length=float(l), substrate=template.substrate)
        for l in lengths[: stub_count + 1]
    )
    stubs = []
    position = 0.0
    for i in range(stub_count):
        position += sections[i].length
        stubs.append(
            StubBranch(
                stub_line=MicrostripSpec(
                    width=w_stub,
                    length=float(lengths[stub_count + 1 + i]),
                    substrate=template.substrate,
                ),
                switch=template.switch,
                dc_block=template.dc_block,
                bias_choke=template.bias_choke,
                position=position,
                termination=template.termination,
            )
        )
    return TunerConfig(main_sections=sections, stubs=tuple(stubs), z0=template.z0)


def objective(
    cfg: TunerConfig,
    targets: SynthTargets,
    grid: FrequencyGrid,
    gain_weight: float = 1.0,
    separation_weight: float = 10.0,
) -> float:
    """Hinge penalty summed over the grid; 0 exactly when the worst-state
    gain clears the floor and the state constellation stays separated."""
    if grid.points[0] > targets.f_lo or grid.points[-1] < targets.f_hi:
        raise ValueError("grid must span [f_lo, f_hi]")
    states = SwitchState.all_states(cfg.stub_count)
    gamma = np.empty((len(states), len(grid)), dtype=complex)
    worst_gain = np.full(len(grid), np.inf)
    for k, st in enumerate(states):
        s = state_network(cfg, st, grid.points)
        refl = np.abs(s.s11) ** 2
        if not np.all(np.isfinite(refl)) or np.any(refl >= 1.0):
            return INFEASIBLE_PENALTY
        g_db = 10.0 * np.log10(np.abs(s.s21) ** 2 / (1.0 - refl))
        worst_gain = np.minimum(worst_gain, g_db)
        gamma[k, :] = s.s11
    total = gain_weight * float(np.sum(np.maximum(0.0, targets.gain_floor_db - worst_gain)))
    for j in range(len(grid)):
        d = pairwise_distances(gamma[:, j])
        min_d = float(d.min()) if d.size else 0.0
        total += separation_weight * max(0.0, targets.min_state_separation - min_d)
    return total


def differential_evolution(
    fn: Callable[[np.ndarray], float],
    lower: np.ndarray,
    upper: np.ndarray,
    seed: int,
    max_evals: int = 20000,
    pop_factor: int = 15,
    mutation: float = 0.7,
    crossover: float = 0.9,
    tol: float = 0.0,
    tie_break: Optional[Callable[[np.ndarray], float]] = None,
):
    """Seeded rand/1/bin differential evolution over a box.

    Deterministic for a given seed.  Candidates with equal cost are ranked
    by tie_break (default: sum of the parameters, biasing toward shorter
    total line length).  Returns (best_x, best_cost, evaluations).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    dim = lower.size
    if tie_break is None:
        tie_break = lambda x: float(np.sum(x))
    rng = np.random.default_rng(seed)
    pop_size = max(pop_factor * dim, 8)
    pop = rng.uniform(lower, upper, size=(pop_size, dim))
    cost = np.array([fn(x) for x in pop])
    ties = np.array([tie_break(x) for x in pop])
    evals = pop_size

    def better(c1, t1, c2, t2):
        return c1 < c2 or (c1 == c2 and t1 < t2)

    i_best = int(np.lexsort((ties, cost))[0])
    best_x, best_cost, best_tie = pop[i_best].copy(), float(cost[i_best]), float(ties[i_best])

    while evals < max_evals and best_cost > tol:
        for i in range(pop_size):
            if evals >= max_evals or best_cost <= tol:
                break
            choices = rng.choice(pop_size - 1, size=3, replace=False)
            r1, r2, r3 = [c + 1 if c >= i else c for c in choices]
            mutant = pop[r1] + mutation * (pop[r2] - pop[r3])
            mutant = np.clip(mutant, lower, upper)
            mask = rng.random(dim) < crossover
            mask[rng.integers(dim)] = True
            trial = np.where(mask, mutant, pop[i])
            c = fn(trial)
            t = tie_break(trial)
            evals += 1
            if better(c, t, cost[i], ties[i]):
                pop[i], cost[i], ties[i] = trial, c, t
                if better(c, t, best_cost, best_tie):
                    best_x, best_cost, best_tie = trial.copy(), float(c), float(t)
    return best_x, best_cost, evals


@dataclass(frozen=True)
class AchievedMetrics:
    """What the synthesized geometry actually does on the synthesis grid."""

    band: Optional[BandExtent]
    worst_gain_db: float
    min_separation: float


@dataclass(frozen=True)
class SynthResult:
    config: TunerConfig
    objective_value: float
    achieved: AchievedMetrics
    evaluations: int
    seed: int
    converged: bool
    lengths: np.ndarray = field(repr=False, default=None)


def _achieved(cfg: TunerConfig, targets: SynthTargets, grid: FrequencyGrid) -> AchievedMetrics:
    states = cfg.states()
    gamma = np.empty((len(states), len(grid)), dtype=complex)
    worst = np.full(len(grid), np.inf)
    for k, st in enumerate(states):
        s = state_network(cfg, st, grid.points)
        refl = np.abs(s.s11) ** 2
        g_db = np.where(refl < 1.0, 10.0 * np.log10(np.abs(s.s21) ** 2 / (1.0 - refl)), -np.inf)
        worst = np.minimum(worst, g_db)
        gamma[k, :] = s.s11
    min_sep = min(
        float(pairwise_distances(gamma[:, j]).min()) if len(states) > 1 else 0.0
        for j in range(len(grid))
    )
    return AchievedMetrics(
        band=band_extent(cfg, grid, targets.gain_floor_db),
        worst_gain_db=float(worst.min()),
        min_separation=min_sep,
    )


def synthesize(
    targets: SynthTargets,
    bounds: SynthBounds,
    seed: int,
    template: SynthTemplate = SynthTemplate(),
    grid_points: int = 31,
    max_evals: int = 20000,
    objective_fn: Optional[Callable[[TunerConfig], float]] = None,
) -> SynthResult:
    """Search the bounds box for a geometry meeting the targets.

    Deterministic for a given (targets, bounds, seed).  objective_fn
    replaces the default hinge objective when supplied (it receives the
    decoded TunerConfig).  Results with nonzero objective after the
    evaluation budget are returned flagged unconverged.
    """
    grid = FrequencyGrid.linspace(targets.f_lo, targets.f_hi, grid_points)
    lower, upper = bounds.box(targets.stub_count)

    if objective_fn is None:
        def fn(x):
            return objective(build_config(x, template, targets.stub_count), targets, grid)
    else:
        def fn(x):
            return objective_fn(build_config(x, template, targets.stub_count))

    best_x, best_cost, evals = differential_evolution(
        fn, lower, upper, seed=seed, max_evals=max_evals
    )
    cfg = build_config(best_x, template, targets.stub_count)
    return SynthResult(
        config=cfg,
        objective_value=float(best_cost),
        achieved=_achieved(cfg, targets, grid),
        evaluations=evals,
        seed=seed,
        converged=bool(best_cost <= 0.0),
        lengths=best_x,
    )
