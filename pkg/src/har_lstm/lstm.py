"""Stacked-LSTM classifier: forward pass, hand-derived BPTT, loss.

Architecture: a ReLU projection applied to every time step, three (by
default) stacked LSTM layers, and a linear head on the last time step's
top-layer hidden state.  Gate pre-activations are laid out in one
concatenated matrix per layer with fixed column order i, g, f, o
(input gate, candidate, forget gate, output gate); the forget gate gets a
constant bias added inside the sigmoid so early training retains state.

Everything is float64 and deterministic: the same params and batch always
produce bit-identical logits, and each batch row's outputs depend only on
that row.  The concatenated gate weight [x ; h_prev] @ W is applied in two
blocks (x @ W[:in] + h_prev @ W[in:]), which is the same linear map and
lets the whole sequence's input-side product run as one large matrix
multiply per layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import tensor
from .labels import NUM_CLASSES


@dataclass(frozen=True)
class NetConfig:
    features: int = 3
    time_steps: int = 200
    hidden_units: int = 64
    num_layers: int = 3
    classes: int = NUM_CLASSES
    forget_bias: float = 1.0
    init_sigma: float = 0.1

    def __post_init__(self):
        for name in ("features", "time_steps", "hidden_units", "num_layers", "classes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not math.isfinite(self.forget_bias):
            raise ValueError("forget_bias must be finite")
        if not (math.isfinite(self.init_sigma) and self.init_sigma >= 0):
            raise ValueError("init_sigma must be finite and >= 0")


@dataclass
class LstmParams:
    """All trainable arrays. The same container holds gradients and Adam moments.

    Layout per layer l: gate_weights[l] is (in + hidden) x 4*hidden with the
    input-side block in the first `in` rows (in == hidden for every layer,
    since the projection feeds layer 0), gate_biases[l] is 1 x 4*hidden.
    """

    cfg: NetConfig
    hidden_weights: np.ndarray  # (features, hidden)
    hidden_bias: np.ndarray  # (1, hidden)
    gate_weights: list[np.ndarray] = field(default_factory=list)
    gate_biases: list[np.ndarray] = field(default_factory=list)
    output_weights: np.ndarray = None  # (hidden, classes)
    output_bias: np.ndarray = None  # (1, classes)

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        """All arrays in the fixed order used by checkpoints and the optimizer."""
        out = [("hidden_weights", self.hidden_weights), ("hidden_bias", self.hidden_bias)]
        for layer, (w, b) in enumerate(zip(self.gate_weights, self.gate_biases)):
            out.append((f"gate_weights[{layer}]", w))
            out.append((f"gate_biases[{layer}]", b))
        out.append(("output_weights", self.output_weights))
        out.append(("output_bias", self.output_bias))
        return out

    @classmethod
    def zeros(cls, cfg: NetConfig) -> "LstmParams":
        h = cfg.hidden_units
        return cls(
            cfg=cfg,
            hidden_weights=np.zeros((cfg.features, h)),
            hidden_bias=np.zeros((1, h)),
            gate_weights=[np.zeros((2 * h, 4 * h)) for _ in range(cfg.num_layers)],
            gate_biases=[np.zeros((1, 4 * h)) for _ in range(cfg.num_layers)],
            output_weights=np.zeros((h, cfg.classes)),
            output_bias=np.zeros((1, cfg.classes)),
        )

    def copy(self) -> "LstmParams":
        dup = LstmParams.zeros(self.cfg)
        for (_, src), (_, dst) in zip(self.arrays(), dup.arrays()):
            dst[:] = src
        return dup


# Gradients are shape-congruent with the parameters, so they share the container.
Gradients = LstmParams


def init_params(cfg: NetConfig, seed) -> LstmParams:
    """Seeded Gaussian init: hidden_bias centered at 1.0, everything else at 0.

    Arrays are drawn in `arrays()` order from one PCG64 stream, so a seed
    pins every weight bit-for-bit.
    """
    rng = np.random.default_rng(seed)
    h, s = cfg.hidden_units, cfg.init_sigma
    return LstmParams(
        cfg=cfg,
        hidden_weights=rng.normal(0.0, s, (cfg.features, h)),
        hidden_bias=rng.normal(1.0, s, (1, h)),
        gate_weights=[rng.normal(0.0, s, (2 * h, 4 * h)) for _ in range(cfg.num_layers)],
        gate_biases=[rng.normal(0.0, s, (1, 4 * h)) for _ in range(cfg.num_layers)],
        output_weights=rng.normal(0.0, s, (h, cfg.classes)),
        output_bias=rng.normal(0.0, s, (1, cfg.classes)),
    )


class CellStep(NamedTuple):
    """Per-step intermediates needed by the backward recurrences."""

    i: np.ndarray
    g: np.ndarray
    f: np.ndarray
    o: np.ndarray
    c: np.ndarray


def lstm_cell_step(weights, bias, x_t, h_prev, c_prev, forget_bias=1.0):
    """One LSTM cell step; returns (h, c, cache).

    weights is (in + hidden) x 4*hidden, bias is 1 x 4*hidden, gate column
    order i, g, f, o.  i = sigmoid(zi), g = tanh(zg),
    f = sigmoid(zf + forget_bias), o = sigmoid(zo);
    c = f*c_prev + i*g, h = o*tanh(c).
    """
    in_dim = x_t.shape[1]
    hidden = h_prev.shape[1]
    if weights.shape != (in_dim + hidden, 4 * hidden):
        raise ValueError(
            f"gate weights shape {weights.shape} does not match "
            f"input {in_dim} + hidden {hidden}"
        )
    z = tensor.matmul(x_t, weights[:in_dim]) + tensor.matmul(h_prev, weights[in_dim:]) + bias
    i = tensor.sigmoid(z[:, :hidden])
    g = np.tanh(z[:, hidden:2 * hidden])
    f = tensor.sigmoid(z[:, 2 * hidden:3 * hidden] + forget_bias)
    o = tensor.sigmoid(z[:, 3 * hidden:])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c, CellStep(i, g, f, o, c)


@dataclass
class LayerCache:
    # each (time_steps, batch, hidden)
    i: np.ndarray
    g: np.ndarray
    f: np.ndarray
    o: np.ndarray
    c: np.ndarray
    h: np.ndarray


@dataclass
class ForwardCache:
    """Every intermediate BPTT needs, in time-major layout."""

    x_time_major: np.ndarray  # (time_steps, batch, features)
    proj: np.ndarray  # (time_steps, batch, hidden), post-ReLU
    layers: list[LayerCache]
    logits: np.ndarray  # (batch, classes)


def _check_batch(cfg: NetConfig, batch: np.ndarray) -> np.ndarray:
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 3 or batch.shape[1] != cfg.time_steps or batch.shape[2] != cfg.features:
        raise ValueError(
            f"batch shape {batch.shape} does not match "
            f"(B, {cfg.time_steps}, {cfg.features})"
        )
    if not np.isfinite(batch).all():
        raise ValueError("non-finite values in input batch")
    return batch


def forward(params: LstmParams, batch: np.ndarray, want_cache: bool = True):
    """Run the network on a (B, time_steps, features) batch.

    Returns (logits, cache); cache is None when want_cache is False, which
    skips retaining gate activations (evaluation path).
    """
    cfg = params.cfg
    batch = _check_batch(cfg, batch)
    bsz = batch.shape[0]
    t_steps, hidden = cfg.time_steps, cfg.hidden_units

    xt = np.ascontiguousarray(batch.transpose(1, 0, 2))  # time-major
    proj_flat = tensor.relu(
        tensor.matmul(xt.reshape(t_steps * bsz, cfg.features), params.hidden_weights)
        + params.hidden_bias
    )
    layer_in = proj_flat.reshape(t_steps, bsz, hidden)

    layer_caches: list[LayerCache] = []
    for w, b in zip(params.gate_weights, params.gate_biases):
        in_dim = layer_in.shape[2]
        # input-side product for the whole sequence in one multiply
        xw = tensor.matmul(layer_in.reshape(t_steps * bsz, in_dim), w[:in_dim])
        xw = xw.reshape(t_steps, bsz, 4 * hidden)
        w_rec = np.ascontiguousarray(w[in_dim:])

        h = np.zeros((bsz, hidden))
        c = np.zeros((bsz, hidden))
        h_seq = np.empty((t_steps, bsz, hidden))
        if want_cache:
            cache = LayerCache(*(np.empty((t_steps, bsz, hidden)) for _ in range(5)), h_seq)
        for t in range(t_steps):
            z = xw[t] + tensor.matmul(h, w_rec) + b
            i = tensor.sigmoid(z[:, :hidden])
            g = np.tanh(z[:, hidden:2 * hidden])
            f = tensor.sigmoid(z[:, 2 * hidden:3 * hidden] + cfg.forget_bias)
            o = tensor.sigmoid(z[:, 3 * hidden:])
            c = f * c + i * g
            h = o * np.tanh(c)
            h_seq[t] = h
            if want_cache:
                cache.i[t] = i
                cache.g[t] = g
                cache.f[t] = f
                cache.o[t] = o
                cache.c[t] = c
        if want_cache:
            layer_caches.append(cache)
        layer_in = h_seq

    logits = tensor.matmul(layer_in[t_steps - 1], params.output_weights) + params.output_bias
    if not want_cache:
        return logits, None
    return logits, ForwardCache(xt, proj_flat.reshape(t_steps, bsz, hidden), layer_caches, logits)


def batched_logits(params: LstmParams, data: np.ndarray, chunk_rows: int = 1024) -> np.ndarray:
    """Logits for an arbitrarily large segment tensor, evaluated in chunks.

    Chunking never changes a bit of the result: every op is row-independent.
    """
    n = data.shape[0]
    pieces = []
    for start in range(0, n, chunk_rows):
        pieces.append(forward(params, data[start:start + chunk_rows], want_cache=False)[0])
    return np.concatenate(pieces, axis=0) if len(pieces) > 1 else pieces[0]


def _t_contig(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a.T)


def backward(params: LstmParams, cache: ForwardCache, dlogits: np.ndarray) -> Gradients:
    """Exact gradient of sum(logits * dlogits) w.r.t. every parameter array.

    Standard LSTM BPTT: the recurrences run backward through hidden and
    cell state for each layer, top layer first; parameter gradients are then
    formed as whole-sequence matrix products.  The ReLU subgradient at 0
    is taken as 0.
    """
    cfg = params.cfg
    t_steps, hidden, bsz = cfg.time_steps, cfg.hidden_units, dlogits.shape[0]
    if cache.logits.shape != dlogits.shape:
        raise ValueError(
            f"dlogits shape {dlogits.shape} does not match cached logits {cache.logits.shape}"
        )

    grads = LstmParams.zeros(cfg)
    top = cache.layers[-1]

    grads.output_weights[:] = tensor.matmul(_t_contig(top.h[t_steps - 1]), dlogits)
    grads.output_bias[:] = dlogits.sum(axis=0, keepdims=True)

    # incoming dL/dh per step for the current layer; top layer only hears
    # from the head at the last step
    dh_in = np.zeros((t_steps, bsz, hidden))
    dh_in[t_steps - 1] = tensor.matmul(dlogits, _t_contig(params.output_weights))

    for layer in range(cfg.num_layers - 1, -1, -1):
        lc = cache.layers[layer]
        w = params.gate_weights[layer]
        in_dim = w.shape[0] - hidden
        w_rec_t = _t_contig(w[in_dim:])

        dz_all = np.empty((t_steps, bsz, 4 * hidden))
        dc = np.zeros((bsz, hidden))
        dh_rec = np.zeros((bsz, hidden))
        for t in range(t_steps - 1, -1, -1):
            i, g, f, o, c = lc.i[t], lc.g[t], lc.f[t], lc.o[t], lc.c[t]
            tanh_c = np.tanh(c)
            dh = dh_in[t] + dh_rec
            dc_tot = dc + dh * o * (1.0 - tanh_c * tanh_c)
            c_prev = lc.c[t - 1] if t > 0 else 0.0
            dz = dz_all[t]
            dz[:, :hidden] = (dc_tot * g) * (i * (1.0 - i))
            dz[:, hidden:2 * hidden] = (dc_tot * i) * (1.0 - g * g)
            dz[:, 2 * hidden:3 * hidden] = (dc_tot * c_prev) * (f * (1.0 - f))
            dz[:, 3 * hidden:] = (dh * tanh_c) * (o * (1.0 - o))
            dc = dc_tot * f
            dh_rec = tensor.matmul(dz, w_rec_t)

        layer_in = cache.proj if layer == 0 else cache.layers[layer - 1].h
        h_prev = np.empty_like(lc.h)
        h_prev[0] = 0.0
        h_prev[1:] = lc.h[:t_steps - 1]

        dz_flat = dz_all.reshape(t_steps * bsz, 4 * hidden)
        gw = grads.gate_weights[layer]
        gw[:in_dim] = tensor.matmul(_t_contig(layer_in.reshape(t_steps * bsz, in_dim)), dz_flat)
        gw[in_dim:] = tensor.matmul(_t_contig(h_prev.reshape(t_steps * bsz, hidden)), dz_flat)
        grads.gate_biases[layer][:] = dz_flat.sum(axis=0, keepdims=True)

        dh_in = tensor.matmul(dz_flat, _t_contig(w[:in_dim])).reshape(t_steps, bsz, in_dim)

    # dh_in now carries the gradient w.r.t. the ReLU projection outputs
    proj_flat = cache.proj.reshape(t_steps * bsz, hidden)
    dpre = np.where(proj_flat > 0.0, dh_in.reshape(t_steps * bsz, hidden), 0.0)
    x_flat = cache.x_time_major.reshape(t_steps * bsz, cfg.features)
    grads.hidden_weights[:] = tensor.matmul(_t_contig(x_flat), dpre)
    grads.hidden_bias[:] = dpre.sum(axis=0, keepdims=True)
    return grads


def l2_penalty(params: LstmParams, l2_coeff: float) -> float:
    """l2_coeff * sum over every trainable array of (sum of squares) / 2."""
    total = 0.0
    for _, arr in params.arrays():
        total += float(np.sum(arr * arr))
    return l2_coeff * total / 2.0


def loss_and_grads(params: LstmParams, batch, onehot, l2_coeff: float):
    """L2-regularized mean softmax cross-entropy with its exact gradients.

    Returns (loss, accuracy, grads).  The penalty covers every trainable
    array, weights and biases alike, and its gradient contribution is
    l2_coeff * w per array.
    """
    onehot = np.asarray(onehot, dtype=np.float64)
    logits, cache = forward(params, batch, want_cache=True)
    if onehot.shape != logits.shape:
        raise ValueError(f"label shape {onehot.shape} does not match logits {logits.shape}")
    bsz = logits.shape[0]

    loss = tensor.cross_entropy_mean(logits, onehot) + l2_penalty(params, l2_coeff)
    accuracy = float(np.mean(tensor.argmax_rows(logits) == tensor.argmax_rows(onehot)))

    dlogits = (tensor.softmax_rows(logits) - onehot) / bsz
    grads = backward(params, cache, dlogits)
    if l2_coeff != 0.0:
        for (_, garr), (_, warr) in zip(grads.arrays(), params.arrays()):
            garr += l2_coeff * warr
    return loss, accuracy, grads


def dataset_metrics(params: LstmParams, data, onehot, l2_coeff: float,
                    chunk_rows: int = 1024) -> tuple[float, float]:
    """(loss, accuracy) over a whole segment set, forward passes only.

    Bit-identical to loss_and_grads' loss on the same rows: the per-row
    losses are reduced with an exactly rounded sum, so neither chunking nor
    row order can change the value.
    """
    onehot = np.asarray(onehot, dtype=np.float64)
    logits = batched_logits(params, data, chunk_rows)
    loss = tensor.cross_entropy_mean(logits, onehot) + l2_penalty(params, l2_coeff)
    accuracy = float(np.mean(tensor.argmax_rows(logits) == tensor.argmax_rows(onehot)))
    return loss, accuracy
