"""Command line front end: simulate, detect, analyze, compare.

Exit status is 0 on success, 1 for bad input data and 2 for bad
configuration or usage.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import channel_sim
from .analysis import anova_by, compare_methods, stationarity_report
from .baselines import METHODS, BaselineConfig, run_baseline
from .detector import K_MODES, NORMALIZATIONS, detect_stream
from .errors import ConfigurationError, InputError
from .reports import RunConfig, dump_json, summary_document, write_boxplot_csv, write_events_csv
from .trace import parse_labels_csv, parse_trace_csv, write_labels_csv, write_trace_csv

log = logging.getLogger("rssi_outliers")

K_MODE_ALIASES = {"literal": "paper_literal", "derived": "derivation_consistent"}


def labels_path(trace_path) -> Path:
    p = Path(trace_path)
    return p.with_name(p.stem + ".labels.csv")


def _parse_inject(text: str):
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        t, sep, off = part.partition(":")
        if not sep:
            raise ConfigurationError(f"--inject entry {part!r} is not time:offset")
        try:
            out.append((float(t), float(off)))
        except ValueError:
            raise ConfigurationError(f"--inject entry {part!r} is not numeric") from None
    return tuple(out)


def _parse_alpha(text: str):
    if text == "calibrated":
        return {"mode": "calibrated"}
    kind, sep, value = text.partition(":")
    if kind == "fixed" and sep:
        try:
            return {"mode": "fixed", "fixed_alpha": float(value)}
        except ValueError:
            pass
    raise ConfigurationError(f"--alpha must be 'calibrated' or 'fixed:<value>', got {text!r}")


def cmd_simulate(args) -> None:
    if args.suite:
        out = Path(args.suite)
        out.mkdir(parents=True, exist_ok=True)
        presets = args.preset.split(",") if args.preset != "all" else list(channel_sim.ENV_PRESETS)[:5]
        radios = args.radio.split(",") if args.radio != "all" else list(channel_sim.RADIO_PROFILES)
        _check_names(presets, radios)
        for sim in channel_sim.benchmark_suite(presets, radios, args.seed, args.duration, args.inject_rate):
            stem = f"{sim.params.radio}_{sim.params.environment}"
            write_trace_csv(sim.trace, out / f"{stem}.csv")
            write_labels_csv(sim.labels, out / f"{stem}.labels.csv")
        return
    if not args.output:
        raise ConfigurationError("simulate needs -o/--output or --suite")
    _check_names([args.preset], [args.radio])
    params = channel_sim.channel_for(
        channel_sim.ENV_PRESETS[args.preset],
        channel_sim.RADIO_PROFILES[args.radio],
        args.duration,
        _parse_inject(args.inject or ""),
    )
    sim = channel_sim.simulate_trace(params, channel_sim.derive_seed(args.preset, args.radio, args.seed))
    write_trace_csv(sim.trace, args.output)
    write_labels_csv(sim.labels, labels_path(args.output))


def _check_names(presets, radios):
    for p in presets:
        if p not in channel_sim.ENV_PRESETS:
            raise ConfigurationError(f"unknown preset {p!r}; choose from {', '.join(channel_sim.ENV_PRESETS)}")
    for r in radios:
        if r not in channel_sim.RADIO_PROFILES:
            raise ConfigurationError(f"unknown radio {r!r}; choose from {', '.join(channel_sim.RADIO_PROFILES)}")


def _run_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    det = cfg.detector
    changes = {}
    if getattr(args, "delta", None) is not None:
        changes["delta"] = args.delta
    if getattr(args, "k_mode", None) is not None:
        changes["k_mode"] = K_MODE_ALIASES.get(args.k_mode, args.k_mode)
    if getattr(args, "warmup", None) is not None:
        changes["warmup"] = args.warmup
    if getattr(args, "normalize", None) is not None:
        changes["normalization"] = args.normalize
    if getattr(args, "alpha", None) is not None:
        changes["alpha_policy"] = replace(det.alpha_policy, **_parse_alpha(args.alpha))
    if changes:
        det = replace(det, **changes)
        baselines = [replace(b, warmup=det.warmup) for b in cfg.baselines]
        cfg = RunConfig(det, baselines)
    return cfg


def _read_trace(path):
    trace = parse_trace_csv(path)
    if trace.errors:
        for err in trace.errors:
            print(f"{path}:{err.line}: {err.message}", file=sys.stderr)
    return trace


def cmd_detect(args) -> None:
    cfg = _run_config(args)
    trace = _read_trace(args.input)
    if args.method == "adaptive_ema":
        result = detect_stream(trace, cfg.detector)
    else:
        match = [b for b in cfg.baselines if b.method == args.method]
        base = match[0] if match else BaselineConfig(args.method, warmup=cfg.detector.warmup)
        result = run_baseline(trace, base)
    if args.output:
        write_events_csv(result.events, args.output, with_method=args.method != "adaptive_ema")
    if args.summary:
        doc = summary_document(result.summary, result.warnings)
        doc["method"] = args.method
        dump_json(doc, args.summary)


def cmd_analyze(args) -> None:
    trace = _read_trace(args.input)
    doc = {}
    if args.stationarity:
        try:
            windows = [float(w) for w in args.stationarity.split(",") if w.strip()]
        except ValueError:
            raise ConfigurationError("--stationarity expects comma-separated seconds") from None
        doc["stationarity"] = {
            node: stationarity_report(link.values, link.timestamps, windows).to_json()
            for node, link in trace.links().items()
        }
    if args.anova_by:
        result, groups = anova_by(trace, args.anova_by)
        doc["anova"] = {"by": args.anova_by, "groups": groups, **result.to_json()}
    dump_json(doc, args.output)


def cmd_compare(args) -> None:
    cfg = _run_config(args)
    suite = Path(args.suite)
    if not suite.is_dir():
        raise InputError(f"suite directory {suite} does not exist")
    traces = []
    for path in sorted(suite.glob("*.csv")):
        if path.name.endswith(".labels.csv"):
            continue
        trace = _read_trace(path)
        lab = labels_path(path)
        trace.labels = parse_labels_csv(lab) if lab.exists() else None
        traces.append(trace)
    report = compare_methods(traces, cfg.detector, cfg.baselines)
    dump_json(report.to_json(), args.output)
    if args.plot_data:
        write_boxplot_csv(report.boxplot_rows(), args.plot_data)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rssi-outliers", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="generate a synthetic trace and its labels")
    p.add_argument("--preset", default="RV", help="environment preset, comma list with --suite, or 'all'")
    p.add_argument("--radio", default="CC2538", help="radio profile, comma list with --suite, or 'all'")
    p.add_argument("--duration", type=float, default=300.0, help="seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject", help="outliers as time_s:offset_db,...")
    p.add_argument("--inject-rate", type=float, default=0.01, help="fraction of samples injected with --suite")
    p.add_argument("--suite", help="write the benchmark suite into this directory")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="flag outliers in a trace")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--config")
    p.add_argument("--method", default="adaptive_ema", choices=("adaptive_ema",) + METHODS)
    p.add_argument("--delta", type=float)
    p.add_argument("--k-mode", choices=tuple(K_MODE_ALIASES) + K_MODES)
    p.add_argument("--alpha", help="'calibrated' or 'fixed:<value>'")
    p.add_argument("--warmup", type=int)
    p.add_argument("--normalize", choices=NORMALIZATIONS)
    p.add_argument("-o", "--output", help="events CSV")
    p.add_argument("--summary", help="summary JSON")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("analyze", help="stationarity and ANOVA report")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--stationarity", help="window sizes in seconds, e.g. 30,60,90,120,150")
    p.add_argument("--anova-by", choices=("environment", "radio", "node_id"))
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="score all methods on a labelled suite")
    p.add_argument("--suite", required=True, help="directory of trace CSVs with .labels.csv siblings")
    p.add_argument("--config")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--plot-data", help="box-plot CSV")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
