"""Online sliding-window inference over a live sample stream.

A StreamBuffer keeps the most recent time_steps readings in a ring buffer
and emits a prediction whenever samples_seen >= time_steps and
(samples_seen - time_steps) is a multiple of the stride.  Each emission
runs the same forward pass as batch evaluation on the window contents, so
stream and batch predictions over identical windows are bit-identical.

Boundary note: batch segmentation enumerates window starts in
range(0, n - time_steps, step), which excludes a window starting exactly
at n - time_steps; the stream, which cannot know a sample is the last one,
does emit for that window.  The two emission counts therefore differ by
one exactly when step divides (n - time_steps).
"""

from __future__ import annotations

import math

import numpy as np

from . import tensor
from .labels import ActivityLabel
from .lstm import LstmParams, forward


class StreamBuffer:
    def __init__(self, params: LstmParams, step: int = 20):
        if not 1 <= step <= params.cfg.time_steps:
            raise ValueError(f"step must be in [1, {params.cfg.time_steps}], got {step}")
        self.params = params
        self.step = step
        self.time_steps = params.cfg.time_steps
        self.ring = np.zeros((self.time_steps, 3))
        self.samples_seen = 0
        self.rejected = 0

    def push_sample(self, x: float, y: float, z: float):
        """Append one reading; returns (label, probabilities) on emission
        steps, else None.  Non-finite readings are rejected (counted, buffer
        untouched)."""
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            self.rejected += 1
            return None
        self.ring[self.samples_seen % self.time_steps] = (x, y, z)
        self.samples_seen += 1
        if (self.samples_seen >= self.time_steps
                and (self.samples_seen - self.time_steps) % self.step == 0):
            window = self.window()
            logits, _ = forward(self.params, window[None, :, :], want_cache=False)
            probs = tensor.softmax_rows(logits)[0]
            label = ActivityLabel(int(tensor.argmax_rows(logits)[0]))
            return label, probs
        return None

    def window(self) -> np.ndarray:
        """Current window contents, oldest reading first."""
        if self.samples_seen < self.time_steps:
            raise ValueError(
                f"window not full: {self.samples_seen} of {self.time_steps} samples")
        offset = self.samples_seen % self.time_steps
        return np.concatenate((self.ring[offset:], self.ring[:offset]), axis=0)
