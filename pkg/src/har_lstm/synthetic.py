"""Deterministic synthetic accelerometer corpus in the raw text format.

Stands in for the real recording file in tests and development when no
real capture is available.  Per-class waveforms follow the qualitative
signatures of the real data: gravity sits on the y axis near 9.8, jogging
swings hardest and fastest, sitting rests near x = 3 while standing rests
near x = 0, and walking shares cadence and amplitude ranges with the two
stair classes so a trained model's residual confusion lands inside the
{walking, upstairs, downstairs} group.

Each simulated user performs every activity once, in a seeded shuffled
order, with seeded per-bout gait parameters; everything derives from one
PCG64 stream, so (n_samples, seed) pins the corpus byte for byte.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from .labels import ActivityLabel
from .wisdm import Sample
from .windowing import SegmentSet, WindowConfig, make_segments

SAMPLE_PERIOD_NS = 50_000_000  # ~20 Hz

# per class: cadence range (Hz), amplitude ranges per axis, rest offsets,
# noise sigma, relative strength of the second harmonic
_PROFILES = {
    ActivityLabel.WALKING: dict(
        freq=(1.6, 2.1), amp=((1.5, 3.2), (3.0, 5.5), (2.0, 4.0)),
        offset=(0.0, 9.8, 1.0), noise=0.7, harmonic=0.30),
    ActivityLabel.JOGGING: dict(
        freq=(2.4, 3.1), amp=((6.5, 9.5), (6.5, 9.5), (4.5, 7.0)),
        offset=(0.0, 9.8, -1.5), noise=1.4, harmonic=0.45),
    ActivityLabel.UPSTAIRS: dict(
        freq=(1.35, 1.8), amp=((1.2, 2.6), (3.5, 6.0), (1.5, 3.2)),
        offset=(0.3, 9.8, 0.8), noise=0.9, harmonic=0.35),
    ActivityLabel.DOWNSTAIRS: dict(
        freq=(1.5, 1.95), amp=((1.4, 3.0), (3.2, 5.6), (1.8, 3.6)),
        offset=(-0.2, 9.8, 0.5), noise=1.0, harmonic=0.30),
    ActivityLabel.SITTING: dict(
        freq=None, amp=None, offset=(3.0, 7.5, 4.0), noise=0.22, harmonic=0.0),
    ActivityLabel.STANDING: dict(
        freq=None, amp=None, offset=(0.0, 9.8, 0.8), noise=0.22, harmonic=0.0),
}

# bout length range in samples per class (walking dominates, stairs are
# short, mirroring the real corpus imbalance)
_BOUT_LEN = {
    ActivityLabel.WALKING: (5000, 9000),
    ActivityLabel.JOGGING: (4200, 7800),
    ActivityLabel.UPSTAIRS: (1800, 3600),
    ActivityLabel.DOWNSTAIRS: (1800, 3600),
    ActivityLabel.SITTING: (2200, 4200),
    ActivityLabel.STANDING: (2200, 4200),
}


def _bout_waveform(rng: np.random.Generator, label: ActivityLabel, n: int) -> np.ndarray:
    """(n, 3) trace for one contiguous bout of a single activity."""
    prof = _PROFILES[label]
    out = np.empty((n, 3))
    t = np.arange(n) / 20.0  # seconds
    if prof["freq"] is None:
        # static posture: rest offsets plus a slow drift and jitter
        for axis in range(3):
            base = prof["offset"][axis] + rng.normal(0.0, 0.35)
            drift = 0.15 * np.sin(2 * math.pi * rng.uniform(0.02, 0.05) * t
                                  + rng.uniform(0, 2 * math.pi))
            out[:, axis] = base + drift + rng.normal(0.0, prof["noise"], n)
        return out
    freq = rng.uniform(*prof["freq"])
    for axis in range(3):
        amp = rng.uniform(*prof["amp"][axis])
        phase = rng.uniform(0, 2 * math.pi)
        phase2 = rng.uniform(0, 2 * math.pi)
        wave = np.sin(2 * math.pi * freq * t + phase)
        wave += prof["harmonic"] * np.sin(4 * math.pi * freq * t + phase2)
        out[:, axis] = (prof["offset"][axis] + rng.normal(0.0, 0.3)
                        + amp * wave + rng.normal(0.0, prof["noise"], n))
    return out


def generate_samples(n_samples: int, seed: int = 0, start_user: int = 1) -> list[Sample]:
    """First n_samples readings of the simulated corpus, in temporal order."""
    rng = np.random.default_rng(seed)
    samples: list[Sample] = []
    user = start_user
    while len(samples) < n_samples:
        timestamp = 10**14 + user * 10**12
        program = list(ActivityLabel)
        rng.shuffle(program)
        for label in program:
            length = int(rng.integers(*_BOUT_LEN[label]))
            trace = _bout_waveform(rng, label, length)
            for row in trace:
                samples.append(Sample(user, label, timestamp,
                                      float(row[0]), float(row[1]), float(row[2])))
                timestamp += SAMPLE_PERIOD_NS
                if len(samples) == n_samples:
                    return samples
        user += 1
    return samples


def write_raw_file(path, n_samples: int, seed: int = 0) -> None:
    """Emit the corpus in the raw text format (with trailing semicolons)."""
    with open(path, "w") as fh:
        for s in generate_samples(n_samples, seed):
            fh.write(f"{s.user_id},{s.activity.display_name},{s.timestamp},"
                     f"{s.x:.8g},{s.y:.8g},{s.z:.8g};\n")


def toy_segment_set(n_segments: int, cfg: WindowConfig | None = None,
                    seed: int = 0) -> SegmentSet:
    """Small balanced SegmentSet with pure single-class windows.

    Cycles through the classes, synthesizing one bout per class long enough
    for its share of windows; used by overfit tests that need a memorizable
    set rather than a realistic stream.
    """
    cfg = cfg or WindowConfig()
    rng = np.random.default_rng(seed)
    per_class = [n_segments // 6 + (1 if r < n_segments % 6 else 0) for r in range(6)]
    parts = []
    for label, want in zip(ActivityLabel, per_class):
        if want == 0:
            continue
        length = cfg.time_steps + (want - 1) * cfg.step + 1
        trace = _bout_waveform(rng, label, length)
        run = [Sample(1, label, i * SAMPLE_PERIOD_NS,
                      float(r[0]), float(r[1]), float(r[2]))
               for i, r in enumerate(trace)]
        parts.append(make_segments(run, cfg))
    data = np.concatenate([p.data for p in parts], axis=0)
    labels = np.concatenate([p.labels for p in parts], axis=0)
    return SegmentSet(data[:n_segments], labels[:n_segments])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m har_lstm.synthetic",
        description="write a deterministic synthetic accelerometer file")
    parser.add_argument("out", help="output path")
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    write_raw_file(args.out, args.samples, args.seed)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
