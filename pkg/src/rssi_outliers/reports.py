"""Writers for events and reports, and the reader for the run configuration file.

JSON documents carry ``schema_version`` and CSV files open with a
``# schema_version=...`` comment; readers accept any minor version of the
supported major version. Column orders:

events CSV
    timestamp_ms, node_id, rssi_dbm, ema_prev_dbm, z_dbm, threshold_dbm, k
    (baseline events append a ``method`` column)
boxplot CSV
    method, radio, env, rate

Configuration file (``key = value`` lines in sections, ``#`` comments)::

    [detector]
    delta = 0.05
    k_mode = derivation_consistent     # or paper_literal
    warmup = 50
    exclude_outliers_from_stats = true
    normalization = none               # zscore, minmax
    sigma_estimator = online           # closed_form

    [alpha]
    mode = calibrated                  # or fixed
    fixed_alpha = 0.5
    pilot_alpha = 0.5
    clamp_lo = 0.05
    clamp_hi = 0.95
    tol = 0.001
    max_iter = 20

    [baselines]
    methods = basic_ema, zscore, moving_average, mad
    window = 50
    basic_ema_alpha = 0.5
    basic_ema_threshold = 2.0
    zscore_threshold = 3.0
    moving_average_threshold = 3.0
    mad_threshold = 3.0
"""
from __future__ import annotations

import configparser
import csv
import json
import math
import os
from dataclasses import replace

from .baselines import METHODS, BaselineConfig
from .detector import DetectorConfig, LinkSummary, OutlierEvent
from .ema import AlphaPolicy
from .errors import ConfigurationError, FormatError
from .trace import SCHEMA_VERSION

EVENT_COLUMNS = ("timestamp_ms", "node_id", "rssi_dbm", "ema_prev_dbm", "z_dbm", "threshold_dbm", "k")
BOXPLOT_COLUMNS = ("method", "radio", "env", "rate")


def _clean(obj):
    """Replace non-finite floats by None so the output is valid JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(doc: dict, dest) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **_clean(doc)}
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)


def load_json(source) -> dict:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    version = str(doc.get("schema_version", ""))
    if version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise FormatError(f"unsupported schema version {version!r}")
    return doc


def summary_document(summary: list[LinkSummary], warnings: list[str] = ()) -> dict:
    return {"links": [s.to_json() for s in summary], "warnings": list(warnings)}


def write_events_csv(events: list[OutlierEvent], dest, with_method: bool = False) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            write_events_csv(events, fh, with_method)
        return
    dest.write(f"# schema_version={SCHEMA_VERSION}\n")
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(EVENT_COLUMNS + (("method",) if with_method else ()))
    for e in events:
        row = [e.timestamp_ms, e.node_id, repr(e.raw_rssi), repr(e.ema_prev), repr(e.z), repr(e.threshold), repr(e.k)]
        if with_method:
            row.append(e.method)
        w.writerow(row)


def write_boxplot_csv(rows, dest) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            write_boxplot_csv(rows, fh)
        return
    dest.write(f"# schema_version={SCHEMA_VERSION}\n")
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(BOXPLOT_COLUMNS)
    for method, radio, env, rate in rows:
        w.writerow([method, radio, env, repr(float(rate))])


def _get(section, key, conv):
    raw = section.get(key)
    if raw is None:
        return None
    try:
        return conv(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"[{section.name}] {key}: {exc}") from None


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_KNOWN_KEYS = {
    "detector": {"delta", "k_mode", "warmup", "exclude_outliers_from_stats", "normalization", "sigma_estimator"},
    "alpha": {"mode", "fixed_alpha", "pilot_alpha", "clamp_lo", "clamp_hi", "tol", "max_iter"},
    "baselines": {"methods", "window", "basic_ema_alpha"} | {f"{m}_threshold" for m in METHODS},
}


class RunConfig:
    """Detector and baseline settings assembled from defaults, a file and overrides."""

    def __init__(self, detector: DetectorConfig | None = None, baselines: list[BaselineConfig] | None = None):
        self.detector = detector or DetectorConfig()
        self.baselines = baselines if baselines is not None else [
            BaselineConfig(m, warmup=self.detector.warmup) for m in METHODS
        ]

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigurationError(f"{path}: {exc}") from None
        for name in parser.sections():
            if name not in _KNOWN_KEYS:
                raise ConfigurationError(f"unknown config section [{name}]")
            extra = set(parser[name]) - _KNOWN_KEYS[name]
            if extra:
                raise ConfigurationError(f"unknown key(s) in [{name}]: {', '.join(sorted(extra))}")
        return cls.from_parser(parser)

    @classmethod
    def from_parser(cls, parser: configparser.ConfigParser) -> "RunConfig":
        det = parser["detector"] if parser.has_section("detector") else {}
        alp = parser["alpha"] if parser.has_section("alpha") else {}
        base = parser["baselines"] if parser.has_section("baselines") else {}
        policy = AlphaPolicy()
        overrides = {}
        if alp:
            lo = _get(alp, "clamp_lo", float)
            hi = _get(alp, "clamp_hi", float)
            fields = {
                "mode": _get(alp, "mode", str),
                "fixed_alpha": _get(alp, "fixed_alpha", float),
                "pilot_alpha": _get(alp, "pilot_alpha", float),
                "tol": _get(alp, "tol", float),
                "max_iter": _get(alp, "max_iter", int),
            }
            if lo is not None or hi is not None:
                fields["clamp"] = (lo if lo is not None else policy.clamp[0], hi if hi is not None else policy.clamp[1])
            policy = replace(policy, **{k: v for k, v in fields.items() if v is not None})
        if det:
            overrides = {
                "delta": _get(det, "delta", float),
                "k_mode": _get(det, "k_mode", str),
                "warmup": _get(det, "warmup", int),
                "exclude_outliers_from_stats": _get(det, "exclude_outliers_from_stats", _bool),
                "normalization": _get(det, "normalization", str),
                "sigma_estimator": _get(det, "sigma_estimator", str),
            }
        detector = DetectorConfig(alpha_policy=policy, **{k: v for k, v in overrides.items() if v is not None})
        baselines = None
        if base:
            methods = [m.strip() for m in (base.get("methods") or ",".join(METHODS)).split(",") if m.strip()]
            window = _get(base, "window", int)
            alpha = _get(base, "basic_ema_alpha", float)
            window = 50 if window is None else window
            alpha = 0.5 if alpha is None else alpha
            baselines = []
            for m in methods:
                if m not in METHODS:
                    raise ConfigurationError(f"unknown baseline method {m!r}")
                baselines.append(BaselineConfig(m, _get(base, f"{m}_threshold", float), window, alpha, detector.warmup))
        return cls(detector, baselines)
