"""Backend selection for the matrix-multiply kernel.

The compiled Cython kernel is preferred; the pure-numpy fallback is used
when the extension is unavailable or when HAR_LSTM_BACKEND=fallback is set.
Both produce bit-identical results, so switching backends never changes a
single output bit, only speed.
"""

import os

from . import fallback

try:
    from . import _gemm as compiled
except ImportError:  # extension not built; pure-python install
    compiled = None

_BACKENDS = {"fallback": fallback}
if compiled is not None:
    _BACKENDS["compiled"] = compiled

_env = os.environ.get("HAR_LSTM_BACKEND", "")
if _env and _env not in ("compiled", "fallback"):
    raise ValueError(f"HAR_LSTM_BACKEND must be 'compiled' or 'fallback', got {_env!r}")
if _env == "compiled" and compiled is None:
    raise ImportError("HAR_LSTM_BACKEND=compiled but the extension is not built")

_active = _BACKENDS.get(_env) or (compiled if compiled is not None else fallback)


def backend_name() -> str:
    return "compiled" if _active is compiled else "fallback"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    """Switch the active backend at runtime (used by tests and benchmarks)."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = _BACKENDS[name]


def matmul_nn(a, b, out) -> None:
    _active.matmul_nn(a, b, out)
