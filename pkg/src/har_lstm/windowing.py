"""Sliding-window segmentation and seeded train/test/validation splits.

Window starts run 0, step, 2*step, ... while start < len(samples) -
time_steps (exclusive bound), so the final time_steps-sized suffix of an
exactly-aligned stream is not emitted; each window is labeled with the
modal activity of its rows, ties broken toward the lowest class index.
Windows may straddle user or activity boundaries in the input stream; the
modal label absorbs most of that noise but it is a known label-noise
source, not a bug.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import HarLstmError
from .labels import NUM_CLASSES, ActivityLabel
from .wisdm import Sample

CACHE_MAGIC = b"HARSEG1\x00"


class WindowError(HarLstmError):
    pass


class SplitError(HarLstmError):
    pass


class CacheError(HarLstmError):
    pass


@dataclass(frozen=True)
class WindowConfig:
    time_steps: int = 200
    step: int = 20
    features: int = 3

    def __post_init__(self):
        if self.time_steps < 1:
            raise ValueError(f"time_steps must be >= 1, got {self.time_steps}")
        if not 1 <= self.step <= self.time_steps:
            raise ValueError(f"step must be in [1, time_steps], got {self.step}")
        if self.features != 3:
            raise ValueError(f"features is fixed at 3, got {self.features}")


@dataclass
class SegmentSet:
    data: np.ndarray  # (n, time_steps, 3)
    labels: np.ndarray  # (n, 6) one-hot

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError(f"segment data shape {self.data.shape} is not (n, steps, 3)")
        if self.labels.shape != (self.data.shape[0], NUM_CLASSES):
            raise ValueError(f"label shape {self.labels.shape} does not match "
                             f"{self.data.shape[0]} segments")
        if not np.isfinite(self.data).all():
            raise ValueError("segment data contains non-finite values")
        ones = (self.labels == 1.0).sum(axis=1)
        zeros = (self.labels == 0.0).sum(axis=1)
        if not ((ones == 1) & (zeros == NUM_CLASSES - 1)).all():
            raise ValueError("labels must be one-hot rows")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def subset(self, indices: np.ndarray) -> "SegmentSet":
        return SegmentSet(self.data[indices], self.labels[indices])

    def class_counts(self) -> np.ndarray:
        return self.labels.sum(axis=0).astype(np.int64)


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.8
    seed: int = 0
    exact: bool = False  # exact-count shuffled split instead of per-row Bernoulli

    def __post_init__(self):
        if not (math.isfinite(self.train_fraction) and 0.0 < self.train_fraction < 1.0):
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def segment_count(n_samples: int, cfg: WindowConfig) -> int:
    """Closed form for the exclusive-bound loop: floor((n - T - 1)/step) + 1."""
    if n_samples <= cfg.time_steps:
        return 0
    return (n_samples - cfg.time_steps - 1) // cfg.step + 1


def one_hot(label: ActivityLabel) -> np.ndarray:
    vec = np.zeros(NUM_CLASSES)
    vec[int(label)] = 1.0
    return vec


def make_segments(samples: list[Sample], cfg: WindowConfig) -> SegmentSet:
    """Window the ordered sample stream into a SegmentSet.

    Each segment's rows are bit-identical to the source slice; the label is
    the modal activity of the window (np.bincount argmax, so ties resolve
    to the lowest class index).
    """
    n = len(samples)
    if n <= cfg.time_steps:
        raise WindowError(
            f"segment_source_too_short: need more than {cfg.time_steps} samples, got {n}")
    xyz = np.array([(s.x, s.y, s.z) for s in samples])
    activity = np.array([int(s.activity) for s in samples], dtype=np.int64)

    starts = range(0, n - cfg.time_steps, cfg.step)
    data = np.empty((len(starts), cfg.time_steps, 3))
    labels = np.zeros((len(starts), NUM_CLASSES))
    for row, start in enumerate(starts):
        data[row] = xyz[start:start + cfg.time_steps]
        counts = np.bincount(activity[start:start + cfg.time_steps], minlength=NUM_CLASSES)
        labels[row, counts.argmax()] = 1.0
    return SegmentSet(data, labels)


def _split_mask(n: int, cfg: SplitConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    if cfg.exact:
        want = min(max(int(round(n * cfg.train_fraction)), 1), n - 1)
        mask = np.zeros(n, dtype=bool)
        mask[rng.permutation(n)[:want]] = True
        return mask
    return rng.random(n) < cfg.train_fraction


def bernoulli_split(segments: SegmentSet, cfg: SplitConfig) -> tuple[SegmentSet, SegmentSet]:
    """Per-segment seeded coin flip into (train, test); exact partition.

    The default draws one uniform per segment (PCG64, so the same seed
    reproduces the same split anywhere); cfg.exact switches to an exact
    round(n * fraction) shuffled split.
    """
    if segments.n < 2:
        raise SplitError(f"cannot split {segments.n} segment(s)")
    mask = _split_mask(segments.n, cfg)
    n_train = int(mask.sum())
    if n_train == 0 or n_train == segments.n:
        raise SplitError(
            f"degenerate split: {n_train} of {segments.n} segments drawn for train; "
            "reseed or adjust train_fraction")
    idx = np.arange(segments.n)
    return segments.subset(idx[mask]), segments.subset(idx[~mask])


def holdout_validation(train: SegmentSet, cfg: SplitConfig) -> tuple[SegmentSet, SegmentSet]:
    """Carve a validation set out of a training set; same contract as
    bernoulli_split."""
    return bernoulli_split(train, cfg)


def save_segments(path, segments: SegmentSet) -> None:
    """Versioned binary cache: magic, u64 n/time_steps/features, then data
    and labels as little-endian f64 row-major."""
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        n, t_steps, feats = segments.data.shape
        fh.write(struct.pack("<QQQ", n, t_steps, feats))
        fh.write(np.ascontiguousarray(segments.data, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(segments.labels, dtype="<f8").tobytes())


def load_segments(path) -> SegmentSet:
    raw = Path(path).read_bytes()
    head = len(CACHE_MAGIC) + 24
    if len(raw) < head:
        raise CacheError("truncated segment cache: header incomplete")
    if raw[:len(CACHE_MAGIC)] != CACHE_MAGIC:
        raise CacheError("bad magic: not a segment cache")
    n, t_steps, feats = struct.unpack("<QQQ", raw[len(CACHE_MAGIC):head])
    data_bytes = n * t_steps * feats * 8
    label_bytes = n * NUM_CLASSES * 8
    if len(raw) != head + data_bytes + label_bytes:
        raise CacheError(
            f"truncated segment cache: expected {head + data_bytes + label_bytes} bytes, "
            f"got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", count=n * t_steps * feats,
                         offset=head).reshape(n, t_steps, feats).copy()
    labels = np.frombuffer(raw, dtype="<f8", count=n * NUM_CLASSES,
                           offset=head + data_bytes).reshape(n, NUM_CLASSES).copy()
    try:
        return SegmentSet(data, labels)
    except ValueError as exc:
        raise CacheError(f"invalid segment cache contents: {exc}") from exc
