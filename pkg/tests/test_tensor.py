import math

import numpy as np
import pytest

from har_lstm import tensor
from tests.test_kernels import naive_matmul


def test_matmul_hand_values():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([[5.0], [6.0]])
    assert np.array_equal(tensor.matmul(a, b), [[17.0], [39.0]])


def test_matmul_identity():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6))
    assert np.array_equal(tensor.matmul(np.eye(6), a), a)
    assert np.array_equal(tensor.matmul(a, np.eye(6)), a)


def test_matmul_matches_naive_oracle():
    rng = np.random.default_rng(1)
    for _ in range(10):
        m, k, n = (int(v) for v in rng.integers(1, 20, 3))
        a = rng.normal(size=(m, k))
        b = rng.normal(size=(k, n))
        assert np.array_equal(tensor.matmul(a, b), naive_matmul(a, b))


def test_matmul_accepts_noncontiguous():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(8, 10))[:, ::2]  # strided view
    b = rng.normal(size=(5, 4))
    assert np.array_equal(tensor.matmul(a, b),
                          naive_matmul(np.ascontiguousarray(a), b))


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ValueError, match=r"\(2, 3\).*\(4, 5\)"):
        tensor.matmul(np.zeros((2, 3)), np.zeros((4, 5)))


def test_matmul_distributes_over_add():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(5, 7))
    b = rng.normal(size=(7, 4))
    c = rng.normal(size=(7, 4))
    left = tensor.matmul(a, b + c)
    right = tensor.matmul(a, b) + tensor.matmul(a, c)
    assert np.allclose(left, right, atol=1e-9)


def test_relu():
    x = np.array([[-3.0, 0.0, 3.0, -0.0]])
    assert np.array_equal(tensor.relu(x), [[0.0, 0.0, 3.0, 0.0]])


def test_sigmoid_values():
    assert tensor.sigmoid(np.array([[0.0]]))[0, 0] == 0.5
    # reference value computed from 1/(1+e^-1)
    assert abs(tensor.sigmoid(np.array([[1.0]]))[0, 0] - 0.7310585786300049) < 1e-15
    big = tensor.sigmoid(np.array([[1000.0, -1000.0]]))
    assert big[0, 0] == 1.0 and big[0, 1] == 0.0
    assert np.isfinite(tensor.sigmoid(np.array([[709.0, -745.0]]))).all()


def test_sigmoid_symmetry():
    rng = np.random.default_rng(4)
    x = rng.normal(0, 50, (3, 9))
    s = tensor.sigmoid(x)
    assert np.allclose(s + tensor.sigmoid(-x), 1.0, atol=1e-15)
    assert ((s >= 0) & (s <= 1)).all()


def test_add_broadcast_and_errors():
    m = np.ones((3, 4))
    row = np.arange(4.0).reshape(1, 4)
    assert np.array_equal(tensor.add(m, row), m + row)
    assert np.array_equal(tensor.add(m, np.ones((3, 4))), m + 1)
    with pytest.raises(ValueError):
        tensor.add(m, np.ones((2, 4)))
    with pytest.raises(ValueError):
        tensor.mul(m, np.ones((1, 4)))  # mul does not broadcast


def test_softmax_uniform_row():
    out = tensor.softmax_rows(np.zeros((2, 6)))
    assert np.array_equal(out, np.full((2, 6), 1.0 / 6.0))


def test_softmax_extreme_logits():
    out = tensor.softmax_rows(np.array([[1000.0, 0.0, -1000.0]]))
    assert np.isfinite(out).all()
    assert abs(out[0, 0] - 1.0) < 1e-12
    assert out[0, 2] == 0.0


def test_softmax_shift_invariance_and_row_sums():
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.uniform(-1000.0, 1000.0, (4, 6))
        s = tensor.softmax_rows(x)
        assert np.abs(s.sum(axis=1) - 1.0).max() < 1e-12
        shifted = tensor.softmax_rows(x + 7.0)
        assert np.abs(shifted - s).max() < 1e-12


def test_cross_entropy_confident():
    logits = np.zeros((1, 6))
    logits[0, 2] = 100.0
    onehot = np.zeros((1, 6))
    onehot[0, 2] = 1.0
    assert tensor.cross_entropy_mean(logits, onehot) < 1e-10


def test_cross_entropy_uniform_is_ln6():
    onehot = np.zeros((3, 6))
    onehot[:, 4] = 1.0
    loss = tensor.cross_entropy_mean(np.zeros((3, 6)), onehot)
    assert abs(loss - math.log(6.0)) < 1e-12


def test_cross_entropy_matches_bruteforce_oracle():
    rng = np.random.default_rng(6)
    for _ in range(10):
        logits = rng.normal(0, 3, (8, 6))
        onehot = np.zeros((8, 6))
        onehot[np.arange(8), rng.integers(0, 6, 8)] = 1.0
        # brute force: explicit softmax then log at moderate logits
        probs = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
        want = -np.log(probs[onehot == 1.0]).mean()
        got = tensor.cross_entropy_mean(logits, onehot)
        assert abs(got - want) < 1e-10
        assert got >= 0.0


def test_cross_entropy_nonnegative_fuzz():
    rng = np.random.default_rng(7)
    for _ in range(50):
        logits = rng.uniform(-1000, 1000, (5, 6))
        onehot = np.zeros((5, 6))
        onehot[np.arange(5), rng.integers(0, 6, 5)] = 1.0
        loss = tensor.cross_entropy_mean(logits, onehot)
        assert math.isfinite(loss) and loss >= 0.0


def test_cross_entropy_shape_mismatch():
    with pytest.raises(ValueError):
        tensor.cross_entropy_mean(np.zeros((2, 6)), np.zeros((3, 6)))


def test_argmax_rows_tie_rule():
    m = np.array([[0.1, 0.7, 0.2],
                  [0.5, 0.5, 0.0],
                  [2.0, 2.0, 2.0]])
    assert tensor.argmax_rows(m).tolist() == [1, 0, 0]


def test_ops_referentially_transparent():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(5, 6))
    for op in (tensor.relu, tensor.sigmoid, tensor.tanh, tensor.softmax_rows):
        assert np.array_equal(op(x), op(x))
