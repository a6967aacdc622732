"""Command-line front end: sweeps, optimization, thresholds, Monte Carlo.

Every command reads a profile (bundled name or path), applies any
``--section.key=value`` overrides, and emits CSV with a fixed column order.
Exit codes: 0 success, 2 configuration error, 3 domain error from the engine.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .channel import db_to_km
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError
from .estimate import infer_mu_mixed
from .montecarlo import SimConfig, empirical_skr, simulate
from .optimize import (
    MU_TOL,
    advantage_report,
    optimize_mu_laser,
    skr_scan,
)
from .photon_stats import QdSourceParams, hybrid_distribution, qd_distribution
from .security import gllp_skr

SCAN_COLUMNS = [
    "db", "km", "mu_laser", "mu_mixed", "ratio", "g2_hybrid",
    "q_tot", "e_tot", "a_fraction", "skr_per_pulse", "skr_per_second", "clamped",
]
OPTIMIZE_COLUMNS = [
    "db", "km", "mu_laser_opt", "ratio_opt", "purity_opt",
    "skr_opt", "skr_qd_only", "skr_laser_only_opt", "crossover",
]
THRESHOLD_COLUMNS = ["brightness", "db", "km", "mu_laser_opt", "ratio_opt", "skr_opt"]
MONTECARLO_COLUMNS = [
    "db", "mu_laser", "q_tot_analytic", "q_tot_hat", "stderr_q",
    "e_tot_analytic", "e_tot_hat", "stderr_e", "skr_analytic", "skr_empirical", "pass",
]


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value == 0.0:
            return "0"
        if abs(value) < 1e-3:
            return f"{value:.9e}"
        return f"{value:.9g}"
    return str(value)


def _write_csv(columns: list[str], rows: list[tuple], out: str | None):
    lines = [",".join(columns)]
    lines.extend(",".join(_format_value(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _clamped(report) -> float:
    if report.clamped:
        return 0.0
    return max(report.skr_per_pulse, 0.0)


def cmd_scan(cfg: RunConfig, args) -> int:
    if not cfg.mu_list:
        raise ConfigError("scan needs a nonempty 'mu' list in [laser]")
    points = skr_scan(cfg.source, cfg.mu_list, cfg.db_grid, cfg.channel, cfg.detector)
    rows = [
        (
            p.attenuation_db, p.km, p.mu_laser, p.mu_mixed, p.mix_ratio, p.g2_hybrid,
            p.report.q_tot, p.report.e_tot, p.report.a_fraction,
            p.report.skr_per_pulse, p.report.skr_per_second, p.report.clamped,
        )
        for p in points
    ]
    _write_csv(SCAN_COLUMNS, rows, args.out or cfg.output)
    return 0


def _optimize_rows(cfg: RunConfig, db_grid) -> list[tuple]:
    laser_only = QdSourceParams(0.0, 0.0)
    qd_dist = qd_distribution(cfg.source)
    rows = []
    for db in db_grid:
        best = optimize_mu_laser(cfg.source, db, cfg.channel, cfg.detector)
        ch = cfg.channel.with_attenuation(db)
        try:
            qd_only = _clamped(gllp_skr(qd_dist, ch, cfg.detector))
        except DomainError:
            qd_only = 0.0
        laser_best = optimize_mu_laser(laser_only, db, cfg.channel, cfg.detector)
        rows.append(
            (
                db, ch.km, best.mu_laser_opt, best.mix_ratio, best.purity_at_opt,
                best.skr_opt, qd_only, laser_best.skr_opt,
                best.mu_laser_opt < MU_TOL,
            )
        )
    return rows


def cmd_optimize(cfg: RunConfig, args) -> int:
    _write_csv(OPTIMIZE_COLUMNS, _optimize_rows(cfg, cfg.db_grid), args.out or cfg.output)
    return 0


def threshold_grid_rows(cfg: RunConfig) -> list[tuple]:
    rows = []
    for brightness in cfg.threshold_brightness:
        qd = QdSourceParams(brightness, cfg.source.g2 if brightness > 0.0 else 0.0)
        for db in cfg.threshold_db:
            best = optimize_mu_laser(qd, db, cfg.channel, cfg.detector)
            rows.append(
                (
                    brightness, db, db_to_km(db, cfg.channel.fiber_alpha),
                    best.mu_laser_opt, best.mix_ratio, best.skr_opt,
                )
            )
    return rows


def cmd_threshold(cfg: RunConfig, args) -> int:
    report = advantage_report(cfg.source, cfg.channel, cfg.detector)
    crossover = "none" if report.crossover_db is None else _format_value(report.crossover_db)
    print(f"crossover_db = {crossover}")
    print(f"unconditional_advantage_brightness = {_format_value(report.unconditional_brightness)}")
    print(f"laser_beat_brightness = {_format_value(report.laser_beat_brightness)}")
    rows = threshold_grid_rows(cfg)
    out = args.out or cfg.output
    if out is None:
        print()
    _write_csv(THRESHOLD_COLUMNS, rows, out)
    return 0


def montecarlo_rows(cfg: RunConfig) -> list[tuple]:
    qd_dist = qd_distribution(cfg.source)
    rows = []
    cell = 0
    for db in cfg.db_grid:
        ch = cfg.channel.with_attenuation(db)
        for mu in cfg.mu_list:
            dist = hybrid_distribution(qd_dist, mu)
            analytic = gllp_skr(dist, ch, cfg.detector)
            tally = simulate(
                SimConfig(cfg.n_pulses, cfg.seed + cell, dist, ch.transmissivity, cfg.detector)
            )
            skr_mc = empirical_skr(tally, cfg.detector, dist) if tally.n_clicks else 0.0
            ok = (
                abs(tally.q_tot_hat - analytic.q_tot) <= 3.0 * tally.stderr_q
                and abs(tally.e_tot_hat - analytic.e_tot) <= 3.0 * tally.stderr_e
            )
            rows.append(
                (
                    db, mu, analytic.q_tot, tally.q_tot_hat, tally.stderr_q,
                    analytic.e_tot, tally.e_tot_hat, tally.stderr_e,
                    analytic.skr_per_pulse, skr_mc, ok,
                )
            )
            cell += 1
    return rows


def cmd_montecarlo(cfg: RunConfig, args) -> int:
    if not cfg.mu_list:
        raise ConfigError("montecarlo needs a nonempty 'mu' list in [laser]")
    _write_csv(MONTECARLO_COLUMNS, montecarlo_rows(cfg), args.out or cfg.output)
    return 0


def _ratio_to_mu(ratio: float, mu_qd: float) -> float:
    if not 0.0 <= ratio < 1.0:
        raise ConfigError(f"mixing ratios must be in [0, 1), got {ratio!r}")
    return ratio * mu_qd / (1.0 - ratio)


def figure_files(cfg: RunConfig, outdir: Path) -> list[Path]:
    """Write one CSV per reproduced figure; returns the paths."""
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, columns: list[str], rows: list[tuple]) -> None:
        path = outdir / name
        _write_csv(columns, rows, str(path))
        written.append(path)

    # Distance scalings for fixed mixing ratios.
    mu_qd, _ = infer_mu_mixed(cfg.source.brightness, cfg.source.g2, 0.0)
    mu_values = [_ratio_to_mu(r, mu_qd) for r in cfg.figure_ratios]
    points = skr_scan(cfg.source, mu_values, cfg.db_grid, cfg.channel, cfg.detector)
    emit(
        "fig2_skr_vs_attenuation.csv",
        ["ratio_label"] + SCAN_COLUMNS,
        [
            (
                cfg.figure_ratios[i % len(mu_values)],
                p.attenuation_db, p.km, p.mu_laser, p.mu_mixed, p.mix_ratio,
                p.g2_hybrid, p.report.q_tot, p.report.e_tot, p.report.a_fraction,
                p.report.skr_per_pulse, p.report.skr_per_second, p.report.clamped,
            )
            for i, p in enumerate(points)
        ],
    )

    # Optimized admixture, purity, and SKR against attenuation.
    emit("fig3_optimized_scaling.csv", OPTIMIZE_COLUMNS, _optimize_rows(cfg, cfg.db_grid))

    # Optimal ratio over the brightness x attenuation plane.
    emit("fig4a_optimal_ratio_grid.csv", THRESHOLD_COLUMNS, threshold_grid_rows(cfg))

    # Optimized distance scaling for a range of misalignment error rates.
    rows = []
    for e_d in cfg.figure_error_rates:
        det = dataclasses.replace(cfg.detector, e_d=e_d)
        for db in cfg.db_grid:
            best = optimize_mu_laser(cfg.source, db, cfg.channel, det)
            rows.append(
                (e_d, db, db_to_km(db, cfg.channel.fiber_alpha),
                 best.mu_laser_opt, best.mix_ratio, best.skr_opt)
            )
    emit(
        "supp_error_rate_sweep.csv",
        ["e_d", "db", "km", "mu_laser_opt", "ratio_opt", "skr_opt"],
        rows,
    )

    # Single-photon-only distance scaling for a range of brightnesses.
    rows = []
    for brightness in cfg.figure_brightness:
        qd = QdSourceParams(brightness, cfg.figure_sweep_g2)
        dist = qd_distribution(qd)
        for db in cfg.db_grid:
            ch = cfg.channel.with_attenuation(db)
            try:
                report = gllp_skr(dist, ch, cfg.detector)
                skr, clamped = report.skr_per_pulse, report.clamped
            except DomainError:
                skr, clamped = 0.0, True
            rows.append((brightness, db, ch.km, skr, clamped))
    emit(
        "supp_brightness_sweep.csv",
        ["brightness", "db", "km", "skr_per_pulse", "clamped"],
        rows,
    )

    # Optimal laser mean photon number for several brightnesses (0 = laser only).
    rows = []
    for brightness in cfg.figure_mu_brightness:
        qd = QdSourceParams(brightness, cfg.source.g2 if brightness > 0.0 else 0.0)
        for db in cfg.db_grid:
            best = optimize_mu_laser(qd, db, cfg.channel, cfg.detector)
            rows.append(
                (brightness, db, db_to_km(db, cfg.channel.fiber_alpha),
                 best.mu_laser_opt, best.skr_opt)
            )
    emit(
        "supp_optimal_mu.csv",
        ["brightness", "db", "km", "mu_laser_opt", "skr_opt"],
        rows,
    )
    return written


def cmd_figures(cfg: RunConfig, args) -> int:
    outdir = Path(args.outdir or cfg.output or "figures")
    for path in figure_files(cfg, outdir):
        print(path)
    return 0


def cmd_plotscript(args) -> int:
    csv_path = Path(args.csv)
    if not csv_path.exists():
        raise ConfigError(f"CSV file not found: {args.csv}")
    header = csv_path.read_text(encoding="utf-8").splitlines()[0].split(",")
    for name in (args.x, args.y):
        if name not in header:
            raise ConfigError(f"column '{name}' not in {args.csv} (has: {', '.join(header)})")
    x_col = header.index(args.x) + 1
    y_col = header.index(args.y) + 1
    script = "\n".join(
        [
            "set datafile separator ','",
            "set key autotitle columnhead",
            f"set xlabel '{args.x}'",
            f"set ylabel '{args.y}'",
            "set logscale y" if args.logy else "unset logscale y",
            f"plot '{csv_path.name}' using {x_col}:{y_col} with lines",
            "pause -1",
        ]
    ) + "\n"
    out = csv_path.with_suffix(csv_path.suffix + ".gp")
    out.write_text(script, encoding="utf-8")
    print(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridqkd",
        description="BB84 secret-key rates for hybrid quantum-dot / laser statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("-c", "--config", default="table1",
                       help="profile name or path (default: table1)")
        p.add_argument("-o", "--out", default=None, help="CSV output path (default: stdout)")

    add_common(sub.add_parser("scan", help="SKR over the attenuation x admixture grid"))
    add_common(sub.add_parser("optimize", help="optimal laser admixture per attenuation"))
    add_common(sub.add_parser("threshold", help="advantage thresholds and ratio grid"))
    add_common(sub.add_parser("montecarlo", help="pulse-level simulation vs analytics"))
    figures = sub.add_parser("figures", help="write one CSV per reproduced figure")
    figures.add_argument("-c", "--config", default="table1")
    figures.add_argument("--outdir", default=None, help="output directory (default: figures)")
    plot = sub.add_parser("plotscript", help="emit a gnuplot script for a CSV")
    plot.add_argument("csv")
    plot.add_argument("--x", default="db")
    plot.add_argument("--y", default="skr_per_pulse")
    plot.add_argument("--logy", action="store_true", default=True)
    plot.add_argument("--no-logy", dest="logy", action="store_false")
    return parser


def _parse_override_tokens(tokens: list[str]) -> dict[tuple[str, str], str]:
    overrides: dict[tuple[str, str], str] = {}
    for token in tokens:
        if not token.startswith("--") or "=" not in token or "." not in token.split("=", 1)[0]:
            raise ConfigError(
                f"unrecognized argument {token!r} (overrides look like --section.key=value)"
            )
        target, value = token[2:].split("=", 1)
        section, key = target.split(".", 1)
        overrides[(section, key)] = value
    return overrides


_COMMANDS = {
    "scan": cmd_scan,
    "optimize": cmd_optimize,
    "threshold": cmd_threshold,
    "montecarlo": cmd_montecarlo,
    "figures": cmd_figures,
}


def main(argv=None) -> int:
    parser = build_parser()
    args, extras = parser.parse_known_args(argv)
    try:
        if args.command == "plotscript":
            if extras:
                raise ConfigError(f"unrecognized arguments: {' '.join(extras)}")
            return cmd_plotscript(args)
        overrides = _parse_override_tokens(extras)
        cfg = load_config(args.config, overrides)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
