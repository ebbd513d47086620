"""Confusion matrix and per-class diagnostics for a trained model.

The confusion matrix is 6x6 with rows = true class and columns = predicted
class, both in canonical label order.  Precision and recall use the 0/0 ->
0 convention; classes where that was applied are flagged in the report so
the zeros are not mistaken for measurements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor
from .errors import HarLstmError
from .labels import CLASS_NAMES, NUM_CLASSES, ActivityLabel
from .lstm import LstmParams, batched_logits, l2_penalty
from .windowing import SegmentSet


class EvalError(HarLstmError):
    pass


def confusion(true_idx, pred_idx) -> np.ndarray:
    true_idx = np.asarray(true_idx, dtype=np.int64)
    pred_idx = np.asarray(pred_idx, dtype=np.int64)
    if true_idx.shape != pred_idx.shape or true_idx.ndim != 1:
        raise EvalError(f"label lists differ: {true_idx.shape} vs {pred_idx.shape}")
    if len(true_idx) and not (
            (0 <= true_idx).all() and (true_idx < NUM_CLASSES).all()
            and (0 <= pred_idx).all() and (pred_idx < NUM_CLASSES).all()):
        raise EvalError("class index out of range [0, 6)")
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    np.add.at(counts, (true_idx, pred_idx), 1)
    return counts


@dataclass
class EvalReport:
    confusion: np.ndarray  # (6, 6) int64
    accuracy: float
    mean_loss: float
    precision: np.ndarray  # (6,)
    recall: np.ndarray  # (6,)
    undefined_precision: tuple  # class indices where precision was 0/0
    undefined_recall: tuple
    top_confusions: list  # [(true_idx, pred_idx, count)], largest first
    n: int


def evaluate(params: LstmParams, segments: SegmentSet, l2_coeff: float,
             top_k: int = 3, chunk_rows: int = 1024) -> EvalReport:
    """One batched forward pass over the set, assembled into an EvalReport.

    mean_loss is the same regularized quantity the trainer logs, so eval
    numbers line up with training curves.
    """
    if segments.n < 1:
        raise EvalError("cannot evaluate an empty segment set")
    if segments.data.shape[1] != params.cfg.time_steps:
        raise EvalError(
            f"segment length {segments.data.shape[1]} does not match model "
            f"time_steps {params.cfg.time_steps}")
    logits = batched_logits(params, segments.data, chunk_rows)
    pred = tensor.argmax_rows(logits)
    true = tensor.argmax_rows(segments.labels)
    counts = confusion(true, pred)

    accuracy = float(np.trace(counts)) / float(counts.sum())
    mean_loss = tensor.cross_entropy_mean(logits, segments.labels) + l2_penalty(params, l2_coeff)

    diag = np.diag(counts).astype(np.float64)
    col = counts.sum(axis=0).astype(np.float64)
    row = counts.sum(axis=1).astype(np.float64)
    undefined_p = tuple(int(c) for c in range(NUM_CLASSES) if col[c] == 0)
    undefined_r = tuple(int(c) for c in range(NUM_CLASSES) if row[c] == 0)
    precision = np.divide(diag, col, out=np.zeros(NUM_CLASSES), where=col > 0)
    recall = np.divide(diag, row, out=np.zeros(NUM_CLASSES), where=row > 0)

    off = [(int(t), int(p), int(counts[t, p]))
           for t in range(NUM_CLASSES) for p in range(NUM_CLASSES)
           if t != p and counts[t, p] > 0]
    off.sort(key=lambda item: (-item[2], item[0], item[1]))
    return EvalReport(counts, accuracy, mean_loss, precision, recall,
                      undefined_p, undefined_r, off[:top_k], int(counts.sum()))


def render_report(report: EvalReport) -> str:
    """Aligned text: labeled confusion grid plus the summary lines."""
    width = max(max(len(n) for n in CLASS_NAMES),
                len(str(int(report.confusion.max())))) + 2
    lines = ["confusion matrix (rows = true, columns = predicted):"]
    head = " " * width + "".join(f"{n:>{width}}" for n in CLASS_NAMES)
    lines.append(head)
    for t, name in enumerate(CLASS_NAMES):
        row = "".join(f"{int(c):>{width}}" for c in report.confusion[t])
        lines.append(f"{name:<{width}}" + row)
    lines.append("")
    lines.append(f"segments: {report.n}")
    lines.append(f"accuracy: {report.accuracy:.6g}")
    lines.append(f"mean loss: {report.mean_loss:.6g}")
    for c, name in enumerate(CLASS_NAMES):
        p_mark = " (undefined: no predictions)" if c in report.undefined_precision else ""
        r_mark = " (undefined: no true segments)" if c in report.undefined_recall else ""
        lines.append(f"{name}: precision {report.precision[c]:.6g}{p_mark}, "
                     f"recall {report.recall[c]:.6g}{r_mark}")
    if report.top_confusions:
        lines.append("largest confusions:")
        for t, p, count in report.top_confusions:
            lines.append(f"  true {CLASS_NAMES[t]} predicted {CLASS_NAMES[p]}: {count}")
    return "\n".join(lines)


def write_report_csv(report: EvalReport, path) -> None:
    """CSV form: all true,pred,count triples, then a commented summary block."""
    with open(path, "w") as fh:
        fh.write("true,pred,count\n")
        for t in range(NUM_CLASSES):
            for p in range(NUM_CLASSES):
                fh.write(f"{CLASS_NAMES[t]},{CLASS_NAMES[p]},{int(report.confusion[t, p])}\n")
        fh.write(f"# segments,{report.n}\n")
        fh.write(f"# accuracy,{report.accuracy:.6g}\n")
        fh.write(f"# mean_loss,{report.mean_loss:.6g}\n")
        for c in range(NUM_CLASSES):
            p_mark = "undefined" if c in report.undefined_precision else f"{report.precision[c]:.6g}"
            r_mark = "undefined" if c in report.undefined_recall else f"{report.recall[c]:.6g}"
            fh.write(f"# {CLASS_NAMES[c]},precision,{p_mark},recall,{r_mark}\n")
