"""Binary model checkpoints.

Layout: 8-byte magic, u16 format version, u32 metadata length, UTF-8 JSON
metadata (network dimensions, class order, gate column order, seed), then
every parameter array in the fixed `arrays()` order as u64 rows, u64 cols,
and row-major little-endian float64 payload.  All integers little-endian.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import HarLstmError
from .labels import CLASS_NAMES
from .lstm import LstmParams, NetConfig

MAGIC = b"HARLSTM1"
FORMAT_VERSION = 1
GATE_ORDER = "i,g,f,o"


class CheckpointError(HarLstmError):
    pass


def save_checkpoint(path, params: LstmParams, init_seed=None,
                    class_order=CLASS_NAMES) -> None:
    cfg = params.cfg
    meta = {
        "features": cfg.features,
        "time_steps": cfg.time_steps,
        "hidden_units": cfg.hidden_units,
        "num_layers": cfg.num_layers,
        "classes": cfg.classes,
        "forget_bias": cfg.forget_bias,
        "init_sigma": cfg.init_sigma,
        "class_order": list(class_order),
        "gate_order": GATE_ORDER,
        "init_seed": init_seed,
    }
    blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for _, arr in params.arrays():
            rows, cols = arr.shape
            fh.write(struct.pack("<QQ", rows, cols))
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[LstmParams, dict]:
    """Read a checkpoint; returns (params, metadata dict).

    Raises CheckpointError with a distinct message for a bad magic, an
    unsupported version, truncation, or a shape mismatch.
    """
    raw = Path(path).read_bytes()
    pos = 0

    def take(n: int, what: str) -> bytes:
        nonlocal pos
        if pos + n > len(raw):
            raise CheckpointError(f"truncated checkpoint: {what} cut short at byte {pos}")
        piece = raw[pos:pos + n]
        pos += n
        return piece

    if take(8, "magic") != MAGIC:
        raise CheckpointError("bad magic: not a model checkpoint")
    (version,) = struct.unpack("<H", take(2, "version"))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} "
                              f"(this build reads version {FORMAT_VERSION})")
    (meta_len,) = struct.unpack("<I", take(4, "metadata length"))
    try:
        meta = json.loads(take(meta_len, "metadata").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"corrupt checkpoint metadata: {exc}") from exc

    try:
        cfg = NetConfig(
            features=meta["features"],
            time_steps=meta["time_steps"],
            hidden_units=meta["hidden_units"],
            num_layers=meta["num_layers"],
            classes=meta["classes"],
            forget_bias=meta["forget_bias"],
            init_sigma=meta["init_sigma"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"invalid checkpoint metadata: {exc}") from exc

    params = LstmParams.zeros(cfg)
    for name, arr in params.arrays():
        rows, cols = struct.unpack("<QQ", take(16, f"{name} header"))
        if (rows, cols) != arr.shape:
            raise CheckpointError(
                f"shape mismatch in {name}: file has ({rows}, {cols}), "
                f"metadata implies {arr.shape}")
        payload = take(rows * cols * 8, f"{name} data")
        values = np.frombuffer(payload, dtype="<f8").reshape(rows, cols)
        if not np.isfinite(values).all():
            raise CheckpointError(f"non-finite values in {name}")
        arr[:] = values
    if pos != len(raw):
        raise CheckpointError(f"trailing data: {len(raw) - pos} unexpected bytes at end")
    return params, meta
