"""Command-line entry points: simulate, coverage, transient, fit, synth.

All outputs are deterministic for a fixed config and seed; rerunning a
command rewrites byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ArtifactConfig, ConfigError, load_config, write_tuner_config
from .network import NetworkSweep
from .synth import synthesize
from .touchstone import read_touchstone, write_touchstone
from .transient import envelope_trace, tuning_time
from .tuner import SwitchState, coverage, gain_db, state_network
from .plasma import fit_switch_model

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _require(cfg: ArtifactConfig, attr: str, section: str):
    value = getattr(cfg, attr)
    if value is None:
        raise ConfigError(f"config is missing the [{section}] section")
    return value


def _state_list(cfg_tuner, state_arg):
    if state_arg is None:
        return cfg_tuner.states()
    return [SwitchState(state_arg)]


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    tuner = _require(cfg, "tuner", "tuner")
    grid = _require(cfg, "grid", "sweep")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_rows = ["frequency_hz,state,s11_db,s21_db,gain_db"]
    for st in _state_list(tuner, args.state):
        mats = [state_network(tuner, st, f) for f in grid.points]
        sweep = NetworkSweep(grid=grid, params=tuple(mats))
        ts_path = out / f"state_{st}.s2p"
        write_touchstone(sweep, ts_path, format=args.format,
                         comments=(f"switched-stub tuner state {st}",))
        s = state_network(tuner, st, grid.points)
        g = gain_db(s)
        for j, f_hz in enumerate(grid.points):
            s11_db = 20.0 * np.log10(abs(complex(s.s11[j]))) if abs(complex(s.s11[j])) > 0 else -np.inf
            s21_db = 20.0 * np.log10(abs(complex(s.s21[j])))
            csv_rows.append(f"{f_hz!r},{st},{s11_db!r},{s21_db!r},{g[j]!r}")
        print(f"wrote {ts_path}")
    gains_path = out / "gains.csv"
    gains_path.write_text("\n".join(csv_rows) + "\n")
    print(f"wrote {gains_path}")
    return 0


def _smith_svg(report, path):
    """Static scatter of the state constellation on the unit reflection disc."""
    size, r = 480, 200
    cx = cy = size // 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="#333"/>',
        f'<line x1="{cx - r}" y1="{cy}" x2="{cx + r}" y2="{cy}" stroke="#bbb"/>',
        f'<line x1="{cx}" y1="{cy - r}" x2="{cx}" y2="{cy + r}" stroke="#bbb"/>',
    ]
    n_freq = len(report.grid)
    for j in range(n_freq):
        color = _PALETTE[j % len(_PALETTE)]
        for st, g in report.points_at(j):
            x = cx + g.real * r
            y = cy - g.imag * r
            parts.append(
                f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="{color}" '
                f'fill-opacity="0.8"><title>state {st} @ {report.grid.points[j]:.4g} Hz'
                f"</title></circle>"
            )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def cmd_coverage(args) -> int:
    cfg = load_config(args.config)
    tuner = _require(cfg, "tuner", "tuner")
    grid = _require(cfg, "grid", "sweep")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = coverage(tuner, grid)
    rows = ["frequency_hz,state,gamma_re,gamma_im"]
    for j, f_hz in enumerate(grid.points):
        for st, g in report.points_at(j):
            rows.append(f"{f_hz!r},{st},{g.real!r},{g.imag!r}")
    pts_path = out / "coverage_points.csv"
    pts_path.write_text("\n".join(rows) + "\n")
    rows = ["frequency_hz,min_pairwise_distance,max_pairwise_distance,hull_area"]
    for j, f_hz in enumerate(grid.points):
        m = report.metrics[j]
        rows.append(
            f"{f_hz!r},{m.min_pairwise_distance!r},{m.max_pairwise_distance!r},{m.hull_area!r}"
        )
    met_path = out / "coverage_metrics.csv"
    met_path.write_text("\n".join(rows) + "\n")
    print(f"wrote {pts_path}")
    print(f"wrote {met_path}")
    if args.svg:
        svg_path = out / "coverage_smith.svg"
        _smith_svg(report, svg_path)
        print(f"wrote {svg_path}")
    return 0


def cmd_transient(args) -> int:
    cfg = load_config(args.config)
    tuner = _require(cfg, "tuner", "tuner")
    spec = _require(cfg, "transient", "transient")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace = envelope_trace(tuner, SwitchState(args.from_state), SwitchState(args.to_state), spec)
    rows = ["time_s,envelope"]
    for t, e in zip(trace.times, trace.envelope):
        rows.append(f"{t!r},{e!r}")
    env_path = out / f"envelope_{args.from_state}_to_{args.to_state}.csv"
    env_path.write_text("\n".join(rows) + "\n")
    t_tune = tuning_time(trace, spec)
    summary = ["from_state,to_state,tuning_time_s,settled,final_envelope"]
    if t_tune is None:
        summary.append(f"{args.from_state},{args.to_state},,false,{trace.final_value!r}")
        print("did not settle within t_end")
    else:
        summary.append(
            f"{args.from_state},{args.to_state},{t_tune!r},true,{trace.final_value!r}"
        )
        print(f"tuning time: {t_tune!r} s")
    sum_path = out / f"transient_{args.from_state}_to_{args.to_state}.csv"
    sum_path.write_text("\n".join(summary) + "\n")
    print(f"wrote {env_path}")
    print(f"wrote {sum_path}")
    return 0


def cmd_fit(args) -> int:
    sweep = read_touchstone(args.touchstone)
    fixture = None
    if args.fixture:
        if not args.config:
            raise ConfigError("--fixture needs --config to resolve the line id")
        cfg = load_config(args.config)
        if args.fixture not in cfg.lines:
            raise ConfigError(f"unknown fixture line {args.fixture!r}")
        fixture = cfg.lines[args.fixture]
    result = fit_switch_model(sweep, args.state, fixture=fixture)
    rows = ["parameter,value,unit"]
    if result.c_off is not None:
        rows.append(f"c_off,{result.c_off!r},F")
    if result.r_on is not None:
        rows.append(f"r_on,{result.r_on!r},ohm")
    if result.c_sheath is not None:
        rows.append(f"c_sheath,{result.c_sheath!r},F")
    rows.append(f"residual,{result.residual!r},")
    rows.append(f"iterations,{result.iterations},")
    text = "\n".join(rows) + "\n"
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"fit_{args.state}.csv").write_text(text)
        print(f"wrote {out / f'fit_{args.state}.csv'}")
    return 0


def cmd_synth(args) -> int:
    cfg = load_config(args.config)
    targets = _require(cfg, "synth_targets", "synth")
    bounds = _require(cfg, "synth_bounds", "synth")
    result = synthesize(
        targets,
        bounds,
        seed=args.seed,
        grid_points=cfg.synth_options.get("grid_points", 31),
        max_evals=cfg.synth_options.get("max_evals", 20000),
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "synthesized_tuner.cfg"
    from .network import FrequencyGrid

    grid = FrequencyGrid.linspace(targets.f_lo, targets.f_hi, cfg.synth_options.get("grid_points", 31))
    write_tuner_config(result.config, cfg_path, grid=grid)
    band = result.achieved.band
    rows = [
        "metric,value",
        f"objective,{result.objective_value!r}",
        f"evaluations,{result.evaluations}",
        f"seed,{result.seed}",
        f"converged,{str(result.converged).lower()}",
        f"worst_gain_db,{result.achieved.worst_gain_db!r}",
        f"min_separation,{result.achieved.min_separation!r}",
        f"band_f_lo_hz,{band.f_lo!r}" if band else "band_f_lo_hz,",
        f"band_f_hi_hz,{band.f_hi!r}" if band else "band_f_hi_hz,",
        f"fractional_bw,{band.fractional_bw!r}" if band else "fractional_bw,",
    ]
    met_path = out / "synth_metrics.csv"
    met_path.write_text("\n".join(rows) + "\n")
    print(f"objective: {result.objective_value!r} after {result.evaluations} evaluations")
    print(f"wrote {cfg_path}")
    print(f"wrote {met_path}")
    return 0 if result.converged else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plasmatuner",
        description="Plasma-switched stub impedance tuner simulator and synthesizer",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="per-state S-parameters over the sweep grid")
    sim.add_argument("--config", required=True)
    sim.add_argument("--state", default=None, help="one state word, e.g. 01 (default: all)")
    sim.add_argument("--out", default=".")
    sim.add_argument("--format", default="RI", choices=("RI", "MA", "DB"))
    sim.set_defaults(func=cmd_simulate)

    cov = sub.add_parser("coverage", help="reflection constellation and spread metrics")
    cov.add_argument("--config", required=True)
    cov.add_argument("--out", default=".")
    cov.add_argument("--svg", action="store_true", help="also write a static scatter SVG")
    cov.set_defaults(func=cmd_coverage)

    tr = sub.add_parser("transient", help="state-change envelope and tuning time")
    tr.add_argument("--config", required=True)
    tr.add_argument("--from", dest="from_state", required=True)
    tr.add_argument("--to", dest="to_state", required=True)
    tr.add_argument("--out", default=".")
    tr.set_defaults(func=cmd_transient)

    fit = sub.add_parser("fit", help="fit a switch model to measured two-port data")
    fit.add_argument("touchstone", help="measured .s2p file")
    fit.add_argument("--state", required=True, choices=("on", "off"))
    fit.add_argument("--config", default=None)
    fit.add_argument("--fixture", default=None, help="line id to de-embed from both sides")
    fit.add_argument("--out", default=None)
    fit.set_defaults(func=cmd_fit)

    syn = sub.add_parser("synth", help="search tuner geometry against [synth] targets")
    syn.add_argument("--config", required=True)
    syn.add_argument("--seed", type=int, default=1)
    syn.add_argument("--out", default=".")
    syn.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
