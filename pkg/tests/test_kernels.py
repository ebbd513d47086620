"""Backend equivalence: the compiled kernel, the pure-numpy fallback, and a
naive triple-loop oracle must agree to the bit, because every output
element is accumulated in the same left-to-right order in all three."""

import numpy as np
import pytest

from har_lstm import kernels


def naive_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # deliberately the dumbest possible implementation: one scalar chain
    # per output element, ascending k
    m, kk = a.shape
    n = b.shape[1]
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for k in range(kk):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


def run_backend(name, a, b):
    out = np.empty((a.shape[0], b.shape[1]))
    old = kernels.backend_name()
    kernels.set_backend(name)
    try:
        kernels.matmul_nn(a, b, out)
    finally:
        kernels.set_backend(old)
    return out


def test_backends_available():
    names = kernels.available_backends()
    assert "fallback" in names
    assert kernels.backend_name() in names


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("gpu")


@pytest.mark.parametrize("seed", range(8))
def test_all_backends_bit_identical_to_naive_oracle(seed):
    rng = np.random.default_rng(seed)
    m, k, n = (int(v) for v in rng.integers(1, 33, 3))
    scale = 10.0 ** rng.integers(-3, 4)
    a = np.ascontiguousarray(rng.normal(0, scale, (m, k)))
    b = np.ascontiguousarray(rng.normal(0, scale, (k, n)))
    want = naive_matmul(a, b)
    for name in kernels.available_backends():
        got = run_backend(name, a, b)
        assert np.array_equal(got, want), f"{name} differs at ({m},{k},{n})"


def test_block_boundary_shapes():
    # sizes straddling the compiled kernel's accumulator tile width
    rng = np.random.default_rng(99)
    for n in (31, 32, 33, 63, 64, 65, 96):
        a = rng.normal(size=(7, 19))
        b = rng.normal(size=(19, n))
        want = naive_matmul(a, b)
        for name in kernels.available_backends():
            assert np.array_equal(run_backend(name, a, b), want), (name, n)


def test_kernel_shape_mismatch():
    a = np.zeros((3, 4))
    b = np.zeros((5, 2))
    out = np.zeros((3, 2))
    with pytest.raises(ValueError):
        kernels.matmul_nn(a, b, out)
    with pytest.raises(ValueError):
        kernels.matmul_nn(a, np.zeros((4, 2)), np.zeros((3, 3)))


def test_deterministic_repeat():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(17, 23))
    b = rng.normal(size=(23, 11))
    first = run_backend(kernels.backend_name(), a, b)
    second = run_backend(kernels.backend_name(), a, b)
    assert np.array_equal(first, second)
