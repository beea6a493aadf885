"""Command-line interface.

Subcommands
-----------
sweep       field sweep -> sweep CSV (+ figure, manifest)
trace       time trace at one field -> trace CSV + correlation CSV
correlate   externally recorded two-channel CSV -> correlation CSV
validate    run the acceptance/property checks
init-config write the documented default configuration

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import DEFAULT_CONFIG_YAML, ExperimentConfig, load_config
from .errors import ConfigError, NmorError
from .harness import (
    analyze_external,
    ensure_outdir,
    iter_field_sweep,
    run_time_trace,
    write_correlation_csv,
    write_manifest,
    write_sweep_csv,
    write_trace_csv,
)


def _add_common(parser):
    parser.add_argument("--config", type=Path, default=None,
                        help="YAML config file (defaults are embedded)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default from config)")
    parser.add_argument("--realizations", type=int, default=None,
                        help="override the noise realization count")
    parser.add_argument("--variant", choices=("paper", "derived"), default=None,
                        help="closed-form numerator variant")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmorsim",
        description="Intensity correlations in resonant magneto-optical rotation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="magnetic-field sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="concurrent field points")

    p_trace = sub.add_parser("trace", help="simulated detector traces")
    _add_common(p_trace)
    p_trace.add_argument("--b-field", type=float, required=True,
                         help="magnetic field in gauss")

    p_corr = sub.add_parser("correlate", help="analyze an external recording")
    p_corr.add_argument("input", type=Path, help="CSV with columns t,S1,S2")
    p_corr.add_argument("--out", type=Path, default=Path("nmorsim-out"))
    p_corr.add_argument("--window-us", type=float, default=2.0,
                        help="fluctuation-extraction window")
    p_corr.add_argument("--tau-min-us", type=float, default=None)
    p_corr.add_argument("--tau-max-us", type=float, default=1.5)
    p_corr.add_argument("--s01", type=float, default=None,
                        help="reference level, channel 1")
    p_corr.add_argument("--s02", type=float, default=None,
                        help="reference level, channel 2")
    p_corr.add_argument("--no-plot", action="store_true")

    p_val = sub.add_parser("validate", help="run the acceptance checks")
    p_val.add_argument("--quick", action="store_true",
                       help="skip the long sweep-based checks")
    p_val.add_argument("--only", nargs="*", default=None, metavar="NAME",
                       help="run only the named checks (e.g. C1 C4)")

    p_init = sub.add_parser("init-config", help="write the default config")
    p_init.add_argument("path", nargs="?", type=Path,
                        default=Path("nmorsim.yaml"))
    return parser


def _load(args) -> ExperimentConfig:
    return load_config(args.config) if args.config else ExperimentConfig()


def _run_sweep(args) -> int:
    cfg = _load(args)
    out = ensure_outdir(args.out or cfg.output.dir)
    seed = cfg.seed if args.seed is None else args.seed
    realizations = args.realizations or cfg.noise.realizations
    variant = args.variant or cfg.output.variant
    csv_path = out / "sweep.csv"
    rows = []
    # write incrementally so a mid-sweep failure keeps the partial result
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("b_gauss,omega_cb_mhz,transmission,rotation_rad,"
                 "g2_zero,g2_zero_stderr,g2_analytic\n")
        for row in iter_field_sweep(cfg, seed=seed, realizations=realizations,
                                    variant=variant, jobs=args.jobs):
            rows.append(row)
            fh.write(",".join(f"{v:.12g}" for v in (
                row.b_gauss, row.omega_cb_mhz, row.transmission, row.rotation,
                row.g2_zero, row.g2_zero_stderr, row.g2_analytic)) + "\n")
            fh.flush()
    files = ["sweep.csv"]
    if not args.no_plot:
        from .reports import render_sweep_figure

        render_sweep_figure(rows, out / "sweep.png")
        files.append("sweep.png")
    write_manifest(cfg, out / "manifest.json", seed=seed,
                   realizations=realizations, variant=variant, files=files)
    print(f"wrote {csv_path} ({len(rows)} field points)")
    return 0


def _run_trace(args) -> int:
    cfg = _load(args)
    out = ensure_outdir(args.out or cfg.output.dir)
    seed = cfg.seed if args.seed is None else args.seed
    variant = args.variant or cfg.output.variant
    pair, corr, summary = run_time_trace(cfg, args.b_field, seed=seed,
                                         variant=variant)
    write_trace_csv(pair, out / "trace.csv")
    files = ["trace.csv"]
    if corr is not None:
        write_correlation_csv(corr, out / "trace_correlation.csv")
        files.append("trace_correlation.csv")
    if not args.no_plot:
        from .reports import render_trace_figure

        render_trace_figure(pair, corr, out / "trace.png")
        files.append("trace.png")
    write_manifest(cfg, out / "manifest.json", seed=seed,
                   realizations=1, variant=variant, files=files)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _run_correlate(args) -> int:
    out = ensure_outdir(args.out)
    window = args.window_us * 1e-6
    tau_max = args.tau_max_us * 1e-6
    tau_min = -tau_max if args.tau_min_us is None else args.tau_min_us * 1e-6
    refs = None
    if (args.s01 is None) != (args.s02 is None):
        raise ConfigError("provide both --s01 and --s02 or neither")
    if args.s01 is not None:
        refs = (args.s01, args.s02)
    _, corr, summary = analyze_external(args.input, window, tau_min, tau_max,
                                        refs=refs)
    write_correlation_csv(corr, out / "correlation.csv")
    if not args.no_plot:
        from .reports import render_correlation_figure

        render_correlation_figure(corr, out / "correlation.png")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _run_validate(args) -> int:
    from .validation import run_validation

    results = run_validation(names=args.only, quick=args.quick)
    for res in results:
        print(res.line())
    failures = [r for r in results if not r.passed]
    print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    return 0 if not failures else 3


def _run_init_config(args) -> int:
    args.path.write_text(DEFAULT_CONFIG_YAML, encoding="utf-8")
    print(f"wrote {args.path}")
    return 0


_HANDLERS = {
    "sweep": _run_sweep,
    "trace": _run_trace,
    "correlate": _run_correlate,
    "validate": _run_validate,
    "init-config": _run_init_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NmorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
