"""Dense float64 matrix primitives used by the network.

A "matrix" here is a 2-D float64 numpy array. Every op is deterministic:
identical inputs give bit-identical outputs. matmul accumulates each output
element as a single left-to-right chain over the inner dimension (the same
order as a naive triple loop), which is what makes training runs exactly
reproducible across the compiled and fallback backends.

Softmax and cross-entropy are computed in max-shifted / log-sum-exp form so
they stay finite for arbitrarily large logits.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels


def _check_matrix(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {x.shape}")
    return x


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with a fixed ascending-k summation order per element."""
    a = _check_matrix(a, "a")
    b = _check_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    out = np.empty((a.shape[0], b.shape[1]))
    kernels.matmul_nn(np.ascontiguousarray(a), np.ascontiguousarray(b), out)
    return out


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    # exp of a non-positive argument only, so no overflow at either tail
    x = np.asarray(x, dtype=np.float64)
    ez = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))


def tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise sum; also accepts a 1 x n bias row broadcast over m x n."""
    a = _check_matrix(a, "a")
    b = _check_matrix(b, "b")
    if a.shape != b.shape and not (b.shape == (1, a.shape[1])):
        raise ValueError(f"add shape mismatch: {a.shape} + {b.shape}")
    return a + b


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = _check_matrix(a, "a")
    b = _check_matrix(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"mul shape mismatch: {a.shape} * {b.shape}")
    return a * b


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, max-shifted so extreme logits cannot overflow."""
    logits = _check_matrix(logits, "logits")
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy_rows(logits: np.ndarray, onehot: np.ndarray) -> np.ndarray:
    """Per-row -log softmax(logits)[true class], in log-sum-exp form."""
    logits = _check_matrix(logits, "logits")
    onehot = _check_matrix(onehot, "onehot")
    if logits.shape != onehot.shape:
        raise ValueError(f"cross-entropy shape mismatch: {logits.shape} vs {onehot.shape}")
    row_max = logits.max(axis=1)
    log_sum = np.log(np.exp(logits - row_max[:, None]).sum(axis=1)) + row_max
    true_logit = (logits * onehot).sum(axis=1)
    return log_sum - true_logit


def cross_entropy_mean(logits: np.ndarray, onehot: np.ndarray) -> float:
    """Mean cross-entropy over rows.

    The row losses are reduced with an exactly rounded sum, so the result
    does not depend on row order or on evaluation chunking.
    """
    rows = cross_entropy_rows(logits, onehot)
    return math.fsum(rows.tolist()) / len(rows)


def argmax_rows(m: np.ndarray) -> np.ndarray:
    """Index of each row's maximum; ties resolve to the lowest index."""
    m = _check_matrix(m, "m")
    if m.shape[1] < 1:
        raise ValueError("argmax_rows needs at least one column")
    return np.argmax(m, axis=1)
