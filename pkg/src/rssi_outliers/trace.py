"""RSSI samples and traces with their CSV formats.

Trace CSV::

    # schema_version=1.0            (optional)
    timestamp_ms,node_id,radio,environment,rssi_dbm
    1000,n1,CC2538,RV,-72.0

Labels CSV (ground-truth injections, written next to simulated traces)::

    timestamp_ms,offset_db
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import FormatError, InputError

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
TRACE_COLUMNS = ("timestamp_ms", "node_id", "radio", "environment", "rssi_dbm")
LABEL_COLUMNS = ("timestamp_ms", "offset_db")
RSSI_MIN_DBM = -130.0
RSSI_MAX_DBM = 10.0


@dataclass(frozen=True)
class RssiSample:
    timestamp_ms: int
    node_id: str
    radio: str
    environment: str
    rssi_dbm: float


class Label(NamedTuple):
    timestamp_ms: int
    offset_db: float


class RowError(NamedTuple):
    line: int
    message: str


@dataclass
class Link:
    """Samples of one link as parallel arrays."""

    node_id: str
    timestamps: np.ndarray
    values: np.ndarray
    radio: str = ""
    environment: str = ""

    def __len__(self):
        return len(self.values)

    def samples(self) -> list[RssiSample]:
        return [
            RssiSample(int(t), self.node_id, self.radio, self.environment, float(v))
            for t, v in zip(self.timestamps, self.values)
        ]


class Trace:
    """RSSI samples of one or more links.

    Stored per link as arrays, each link sorted by timestamp. ``labels``
    holds ground-truth injections for simulated traces and is ``None`` for
    field data; ``errors`` lists rows rejected while parsing.
    """

    def __init__(self, links=(), radio="", environment="", labels=None, errors=None):
        self._links: dict[str, Link] = {}
        for link in links:
            if link.node_id in self._links:
                raise InputError(f"duplicate link {link.node_id!r}")
            self._links[link.node_id] = link
        self.radio = radio
        self.environment = environment
        self.labels: list[Label] | None = labels
        self.errors: list[RowError] = list(errors or [])

    def __len__(self):
        return sum(len(link) for link in self._links.values())

    def __repr__(self):
        return f"Trace({len(self._links)} links, {len(self)} samples, radio={self.radio!r}, environment={self.environment!r})"

    @classmethod
    def from_arrays(cls, timestamps, values, node_id="n1", radio="", environment="", labels=None):
        ts = np.asarray(timestamps, dtype=np.int64)
        vals = np.asarray(values, dtype=float)
        if ts.shape != vals.shape:
            raise InputError("timestamps and values differ in length")
        return cls([Link(node_id, ts, vals, radio, environment)], radio, environment, labels)

    @classmethod
    def from_samples(cls, samples, labels=None, errors=None) -> "Trace":
        """Group samples into links; each link is stable-sorted by timestamp."""
        grouped: dict[str, list[RssiSample]] = {}
        for s in samples:
            grouped.setdefault(s.node_id, []).append(s)
        links = []
        for node in sorted(grouped):
            rows = sorted(grouped[node], key=lambda s: s.timestamp_ms)
            links.append(Link(
                node,
                np.array([s.timestamp_ms for s in rows], dtype=np.int64),
                np.array([s.rssi_dbm for s in rows], dtype=float),
                rows[0].radio,
                rows[0].environment,
            ))
        radios = {link.radio for link in links}
        envs = {link.environment for link in links}
        return cls(
            links,
            radios.pop() if len(radios) == 1 else "",
            envs.pop() if len(envs) == 1 else "",
            labels,
            errors,
        )

    @property
    def samples(self) -> list[RssiSample]:
        """All samples ordered by (node_id, timestamp)."""
        out = []
        for node in sorted(self._links):
            out.extend(self._links[node].samples())
        return out

    def links(self) -> dict[str, Link]:
        """Per-link arrays keyed by node id, in node-id order."""
        return {node: self._links[node] for node in sorted(self._links)}

    def map_values(self, fn) -> "Trace":
        """A copy with ``fn`` applied to every link's value array."""
        links = [Link(l.node_id, l.timestamps, np.asarray(fn(l.values), dtype=float), l.radio, l.environment)
                 for l in self._links.values()]
        return Trace(links, self.radio, self.environment, self.labels, self.errors)


def out_of_order_links(samples: Iterable[RssiSample]) -> list[str]:
    """Links whose timestamps decrease somewhere in the given order."""
    last: dict[str, int] = {}
    bad = []
    for s in samples:
        prev = last.get(s.node_id)
        if prev is not None and s.timestamp_ms < prev and s.node_id not in bad:
            bad.append(s.node_id)
        last[s.node_id] = s.timestamp_ms
    return bad


def _check_version(line: str, lineno: int) -> None:
    body = line.lstrip("#").strip()
    if not body.startswith("schema_version"):
        return
    _, _, version = body.partition("=")
    major = version.strip().split(".")[0]
    if major != SCHEMA_VERSION.split(".")[0]:
        raise FormatError(f"unsupported schema version {version.strip()!r}", lineno)


def _read_rows(source, columns):
    """Yield (line number, row dict) after header validation."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8-sig") as fh:
            yield from _read_rows(fh, columns)
        return
    lines = source.read().splitlines()
    start = 0
    while start < len(lines) and lines[start].startswith("#"):
        _check_version(lines[start], start + 1)
        start += 1
    if start >= len(lines):
        raise FormatError("missing header row")
    reader = csv.reader(lines[start:])
    header = [h.strip() for h in next(reader)]
    for col in columns:
        if col not in header:
            raise FormatError(f"missing column {col!r}", start + 1)
    pos = {col: header.index(col) for col in header}
    for offset, row in enumerate(reader, start=start + 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            yield offset, None, f"expected {len(header)} fields, got {len(row)}"
            continue
        yield offset, {col: row[i].strip() for col, i in pos.items()}, None


def parse_trace_csv(source) -> Trace:
    """Read and validate a trace CSV.

    Bad rows are collected in ``Trace.errors`` with their line numbers
    rather than aborting the whole file; a missing column raises
    :class:`FormatError`. Rows out of order are stable-sorted by timestamp
    within their link and a warning is logged.
    """
    samples = []
    errors = []
    for lineno, row, problem in _read_rows(source, TRACE_COLUMNS):
        if problem is not None:
            errors.append(RowError(lineno, problem))
            continue
        try:
            ts = int(row["timestamp_ms"])
        except ValueError:
            errors.append(RowError(lineno, f"non-integer timestamp {row['timestamp_ms']!r}"))
            continue
        try:
            rssi = float(row["rssi_dbm"])
        except ValueError:
            errors.append(RowError(lineno, f"non-numeric rssi {row['rssi_dbm']!r}"))
            continue
        if ts < 0:
            errors.append(RowError(lineno, f"negative timestamp {ts}"))
            continue
        if not math.isfinite(rssi) or not RSSI_MIN_DBM <= rssi <= RSSI_MAX_DBM:
            errors.append(RowError(lineno, f"rssi {rssi} outside [{RSSI_MIN_DBM}, {RSSI_MAX_DBM}] dBm"))
            continue
        if not row["node_id"]:
            errors.append(RowError(lineno, "empty node_id"))
            continue
        samples.append((lineno, RssiSample(ts, row["node_id"], row["radio"], row["environment"], rssi)))
    first: dict[str, RssiSample] = {}
    kept = []
    for lineno, sample in samples:
        head = first.setdefault(sample.node_id, sample)
        if (head.radio, head.environment) != (sample.radio, sample.environment):
            errors.append(RowError(lineno, f"link {sample.node_id} changes radio/environment"))
            continue
        kept.append(sample)
    errors.sort()
    for err in errors:
        log.warning("rejected row at line %d: %s", err.line, err.message)
    for node in out_of_order_links(kept):
        log.warning("link %s: rows out of timestamp order; sorted them", node)
    return Trace.from_samples(kept, errors=errors)


def parse_labels_csv(source) -> list[Label]:
    labels = []
    for lineno, row, problem in _read_rows(source, LABEL_COLUMNS):
        if problem is not None:
            raise FormatError(problem, lineno)
        try:
            labels.append(Label(int(row["timestamp_ms"]), float(row["offset_db"])))
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
    return labels


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace_csv(trace: Trace, dest) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            write_trace_csv(trace, fh)
        return
    dest.write(f"# schema_version={SCHEMA_VERSION}\n")
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for link in trace.links().values():
        for t, v in zip(link.timestamps.tolist(), link.values.tolist()):
            w.writerow([t, link.node_id, link.radio, link.environment, _fmt(v)])


def write_labels_csv(labels: Iterable[Label], dest) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            write_labels_csv(labels, fh)
        return
    dest.write(f"# schema_version={SCHEMA_VERSION}\n")
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(LABEL_COLUMNS)
    for lab in labels:
        w.writerow([lab.timestamp_ms, _fmt(lab.offset_db)])


def trace_to_csv_text(trace: Trace) -> str:
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    return buf.getvalue()
