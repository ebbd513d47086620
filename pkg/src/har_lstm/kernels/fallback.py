"""Pure-numpy matrix multiply with the same summation order as the kernel.

Accumulates rank-1 updates over the inner dimension in ascending order, so
each output element sees the exact rounding sequence of a naive triple
loop.  Roughly an order of magnitude slower than the compiled kernel; it
exists so the package still runs where the extension cannot be built.
"""

import numpy as np


def matmul_nn(a: np.ndarray, b: np.ndarray, out: np.ndarray) -> None:
    m, kk = a.shape
    n = b.shape[1]
    if b.shape[0] != kk or out.shape != (m, n):
        raise ValueError("kernel shape mismatch")
    out[:] = 0.0
    tmp = np.empty((m, n))
    for k in range(kk):
        np.multiply(a[:, k, None], b[k, None, :], out=tmp)
        out += tmp
