"""Raw accelerometer file ingestion and per-class signal statistics.

The input is the WISDM-style text format: one reading per line,
`user,activity,timestamp,x,y,z` with an optional trailing semicolon (the
raw file is inconsistent about it).  Malformed lines are rejected with a
categorized reason and never abort the file; blank lines are skipped
without counting toward either tally.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HarLstmError
from .labels import CLASS_NAMES, ActivityLabel

REJECTION_REASONS = (
    "empty_line",
    "wrong_field_count",
    "unknown_activity",
    "non_numeric_value",
    "non_finite_value",
)


class IngestError(HarLstmError):
    pass


class LineRejected(Exception):
    """Raised by parse_line; reason is one of REJECTION_REASONS."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True, slots=True)
class Sample:
    user_id: int
    activity: ActivityLabel
    timestamp: int
    x: float
    y: float
    z: float


@dataclass
class IngestReport:
    path: str
    accepted: int = 0
    rejected: int = 0
    rejection_reasons: dict = field(default_factory=dict)
    per_class_counts: dict = field(default_factory=dict)
    sha256: str = ""


def parse_line(line: str) -> Sample:
    """Parse one record; raises LineRejected(reason) on any defect.

    A user id that is not a positive integer, or a timestamp that is not a
    non-negative integer, counts as non_numeric_value.
    """
    text = line.strip()
    if not text:
        raise LineRejected("empty_line")
    if text.endswith(";"):
        text = text[:-1]
    fields = [f.strip() for f in text.split(",")]
    if len(fields) != 6:
        raise LineRejected("wrong_field_count")
    try:
        activity = ActivityLabel.from_name(fields[1])
    except ValueError:
        raise LineRejected("unknown_activity") from None
    try:
        user_id = int(fields[0])
        timestamp = int(fields[2])
        xyz = [float(f) for f in fields[3:6]]
    except ValueError:
        raise LineRejected("non_numeric_value") from None
    if user_id <= 0 or timestamp < 0:
        raise LineRejected("non_numeric_value")
    if not all(math.isfinite(v) for v in xyz):
        raise LineRejected("non_finite_value")
    return Sample(user_id, activity, timestamp, xyz[0], xyz[1], xyz[2])


def format_sample(s: Sample) -> str:
    """Canonical line form; parse_line(format_sample(s)) == s exactly."""
    return (f"{s.user_id},{s.activity.display_name},{s.timestamp},"
            f"{s.x!r},{s.y!r},{s.z!r};")


def load_dataset(path) -> tuple[list[Sample], IngestReport]:
    """Read every record in file order; returns (samples, report).

    accepted + rejected always equals the number of non-empty lines; the
    report also carries a sha256 of the raw bytes so a run log pins the
    exact input.
    """
    try:
        raw = open(path, "rb").read()
    except OSError as exc:
        raise IngestError(f"cannot read dataset file {path}: {exc}") from exc

    report = IngestReport(
        path=str(path),
        rejection_reasons={},
        per_class_counts={label: 0 for label in ActivityLabel},
        sha256=hashlib.sha256(raw).hexdigest(),
    )
    samples: list[Sample] = []
    for line in raw.decode("utf-8", errors="replace").splitlines():
        if not line.strip():
            continue
        try:
            sample = parse_line(line)
        except LineRejected as rej:
            report.rejected += 1
            report.rejection_reasons[rej.reason] = (
                report.rejection_reasons.get(rej.reason, 0) + 1)
            continue
        samples.append(sample)
        report.accepted += 1
        report.per_class_counts[sample.activity] += 1
    return samples, report


def render_ingest_report(report: IngestReport) -> str:
    lines = [
        f"file: {report.path}",
        f"sha256: {report.sha256}",
        f"accepted: {report.accepted}",
        f"rejected: {report.rejected}",
    ]
    for reason in REJECTION_REASONS:
        if reason in report.rejection_reasons:
            lines.append(f"  {reason}: {report.rejection_reasons[reason]}")
    lines.append("per-class counts:")
    for label in ActivityLabel:
        lines.append(f"  {label.display_name:<12}{report.per_class_counts[label]}")
    return "\n".join(lines)


AXES = ("x", "y", "z")


@dataclass(frozen=True)
class AxisCell:
    mean: float
    std: float
    minimum: float
    maximum: float
    peak_spacing: float  # mean samples between peaks; NaN when < 2 peaks


def _find_peaks(values: np.ndarray) -> np.ndarray:
    """Indices of strict local maxima exceeding mean + 1 std of the run."""
    if len(values) < 3:
        return np.empty(0, dtype=np.int64)
    threshold = values.mean() + values.std()
    inner = values[1:-1]
    hit = (inner > values[:-2]) & (inner > values[2:]) & (inner > threshold)
    return np.nonzero(hit)[0] + 1


def class_stats(samples: list[Sample]) -> dict[tuple[ActivityLabel, str], AxisCell]:
    """Per (class, axis) statistics pooled over contiguous same-class runs.

    Mean/std/min/max are over all of a class's samples; peak spacing pools
    the gaps between consecutive peaks found within each run (peaks are
    never matched across run boundaries).  Classes with fewer than 2
    samples are omitted.
    """
    runs: dict[ActivityLabel, list[np.ndarray]] = {}
    start = 0
    for k in range(1, len(samples) + 1):
        if k == len(samples) or samples[k].activity != samples[start].activity:
            run = samples[start:k]
            arr = np.array([(s.x, s.y, s.z) for s in run])
            runs.setdefault(run[0].activity, []).append(arr)
            start = k

    stats: dict[tuple[ActivityLabel, str], AxisCell] = {}
    for label in ActivityLabel:
        if label not in runs:
            continue
        chunks = runs[label]
        pooled = np.concatenate(chunks, axis=0)
        if pooled.shape[0] < 2:
            continue
        for axis_idx, axis in enumerate(AXES):
            col = pooled[:, axis_idx]
            gaps = []
            for chunk in chunks:
                peaks = _find_peaks(chunk[:, axis_idx])
                if len(peaks) >= 2:
                    gaps.append(np.diff(peaks))
            spacing = float(np.concatenate(gaps).mean()) if gaps else math.nan
            stats[(label, axis)] = AxisCell(
                mean=float(col.mean()),
                std=float(col.std()),
                minimum=float(col.min()),
                maximum=float(col.max()),
                peak_spacing=spacing,
            )
    return stats


def _cell_fields(cell: AxisCell) -> list[str]:
    spacing = "" if math.isnan(cell.peak_spacing) else f"{cell.peak_spacing:.6g}"
    return [f"{cell.mean:.6g}", f"{cell.std:.6g}", f"{cell.minimum:.6g}",
            f"{cell.maximum:.6g}", spacing]


def render_stats_table(stats) -> str:
    header = ["class", "axis", "mean", "std", "min", "max", "peak_spacing"]
    rows = [header]
    for label in ActivityLabel:
        for axis in AXES:
            if (label, axis) in stats:
                cell = _cell_fields(stats[(label, axis)])
                cell[4] = cell[4] or "n/a"
                rows.append([label.display_name, axis] + cell)
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    return "\n".join(
        "  ".join(f"{cell:<{w}}" for cell, w in zip(row, widths)).rstrip()
        for row in rows)


def write_stats_csv(stats, path) -> None:
    with open(path, "w") as fh:
        fh.write("class,axis,mean,std,min,max,peak_spacing\n")
        for label in ActivityLabel:
            for axis in AXES:
                if (label, axis) in stats:
                    fields = _cell_fields(stats[(label, axis)])
                    fh.write(f"{label.display_name},{axis}," + ",".join(fields) + "\n")
