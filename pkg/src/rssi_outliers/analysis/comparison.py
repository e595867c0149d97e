"""Score the adaptive detector and the baselines against injected ground truth."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..baselines import BaselineConfig, default_baselines, run_baseline
from ..detector import DetectorConfig, StreamResult, detect_stream
from ..trace import Label, Trace

log = logging.getLogger(__name__)

ADAPTIVE = "adaptive_ema"


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    radio: str
    environment: str
    node_id: str
    n_scored: int
    n_flags: int
    n_injected: int
    true_positives: int
    detection_rate: float
    precision: float | None
    recall: float | None

    def key(self):
        return (self.method, self.radio, self.environment, self.node_id)


@dataclass(frozen=True)
class MethodStats:
    median: float
    q1: float
    q3: float
    minimum: float
    maximum: float
    n: int

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def methods(self) -> list[str]:
        return sorted({r.method for r in self.rows})

    def rates(self, method: str) -> np.ndarray:
        return np.array([r.detection_rate for r in self.rows if r.method == method])

    def method_stats(self) -> dict[str, MethodStats]:
        out = {}
        for m in self.methods():
            x = self.rates(m)
            q1, med, q3 = np.percentile(x, [25, 50, 75])
            out[m] = MethodStats(float(med), float(q1), float(q3), float(x.min()), float(x.max()), int(x.size))
        return out

    def merge(self, other: "ComparisonReport") -> "ComparisonReport":
        """Union of two reports; the result does not depend on argument order."""
        rows = {r.key(): r for r in self.rows}
        rows.update({r.key(): r for r in other.rows})
        return ComparisonReport(sorted(rows.values(), key=ComparisonRow.key),
                                sorted(set(self.skipped) | set(other.skipped)))

    def to_json(self) -> dict:
        stats = self.method_stats()
        return {
            "rows": [
                {
                    "method": r.method,
                    "radio": r.radio,
                    "environment": r.environment,
                    "node_id": r.node_id,
                    "n_scored": r.n_scored,
                    "n_flags": r.n_flags,
                    "n_injected": r.n_injected,
                    "true_positives": r.true_positives,
                    "detection_rate": r.detection_rate,
                    "precision": r.precision,
                    "recall": r.recall,
                }
                for r in self.rows
            ],
            "methods": {
                m: {"median": s.median, "q1": s.q1, "q3": s.q3, "min": s.minimum, "max": s.maximum, "n": s.n}
                for m, s in stats.items()
            },
            "skipped": self.skipped,
        }

    def boxplot_rows(self) -> list[tuple[str, str, str, float]]:
        return [(r.method, r.radio, r.environment, r.detection_rate) for r in self.rows]


def score(result: StreamResult, trace: Trace, labels: list[Label], method: str, warmup: int) -> list[ComparisonRow]:
    """One row per link of ``result``.

    Labels are matched by timestamp; only labels at or after the warm-up
    sample count as detectable ground truth.
    """
    rows = []
    label_ts = {lab.timestamp_ms for lab in labels}
    links = trace.links()
    for s in result.summary:
        link = links[s.node_id]
        flags = result.flags[s.node_id]
        scored_ts = link.timestamps[warmup:]
        truth = np.isin(scored_ts, list(label_ts)) if label_ts else np.zeros(scored_ts.size, dtype=bool)
        f = flags[warmup:]
        tp = int(np.sum(f & truth))
        n_flags = int(f.sum())
        n_true = int(truth.sum())
        rows.append(ComparisonRow(
            method, link.radio, link.environment, s.node_id, int(scored_ts.size), n_flags, n_true, tp,
            s.rate, tp / n_flags if n_flags else None, tp / n_true if n_true else None,
        ))
    return rows


def compare_methods(traces, detector_config: DetectorConfig = DetectorConfig(),
                    baseline_configs: list[BaselineConfig] | None = None) -> ComparisonReport:
    """Run the adaptive detector and every baseline on each labelled trace.

    ``traces`` holds :class:`Trace` objects (or objects with a ``trace``
    attribute, such as simulator output). Traces whose ``labels`` are
    ``None`` are skipped.
    """
    if baseline_configs is None:
        baseline_configs = default_baselines(detector_config.warmup)
    report = ComparisonReport()
    for i, item in enumerate(traces):
        trace = getattr(item, "trace", item)
        if trace.labels is None:
            msg = f"trace {i} ({trace.radio}/{trace.environment}) has no labels; skipped"
            log.warning(msg)
            report.skipped.append(msg)
            continue
        res = detect_stream(trace, detector_config)
        report.rows.extend(score(res, trace, trace.labels, ADAPTIVE, detector_config.warmup))
        for cfg in baseline_configs:
            res = run_baseline(trace, cfg)
            report.rows.extend(score(res, trace, trace.labels, cfg.method, cfg.warmup))
    report.rows.sort(key=ComparisonRow.key)
    return report


def outlier_rate(flags, warmup: int) -> float:
    """Flags after warm-up divided by the number of post-warm-up samples."""
    f = np.asarray(flags, dtype=bool)
    n = f.size - warmup
    return float(f[warmup:].sum()) / n if n > 0 else 0.0
