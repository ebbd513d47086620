import numpy as np
import pytest

from har_lstm.labels import ActivityLabel
from har_lstm.windowing import (
    CacheError,
    SegmentSet,
    SplitConfig,
    SplitError,
    WindowConfig,
    WindowError,
    bernoulli_split,
    holdout_validation,
    load_segments,
    make_segments,
    one_hot,
    save_segments,
    segment_count,
)
from har_lstm.wisdm import Sample


def stream(labels, rng=None):
    rng = rng or np.random.default_rng(0)
    return [Sample(1, lab, i, *rng.normal(0, 3, 3)) for i, lab in enumerate(labels)]


def brute_force_windows(samples, cfg):
    """Independent enumerator: list every (start, rows, modal label)."""
    out = []
    start = 0
    while start < len(samples) - cfg.time_steps:
        window = samples[start:start + cfg.time_steps]
        freq = {}
        for s in window:
            freq[int(s.activity)] = freq.get(int(s.activity), 0) + 1
        best = min(sorted(freq), key=lambda k: (-freq[k], k))
        rows = np.array([(s.x, s.y, s.z) for s in window])
        out.append((start, rows, best))
        start += cfg.step
    return out


def test_ten_segments_from_400_samples():
    cfg = WindowConfig(time_steps=200, step=20)
    segs = make_segments(stream([ActivityLabel.WALKING] * 400), cfg)
    assert segs.n == 10
    assert segment_count(400, cfg) == 10


def test_segments_match_bruteforce_enumerator():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(30, 400))
        t_steps = int(rng.integers(2, min(n, 60)))
        step = int(rng.integers(1, t_steps + 1))
        cfg = WindowConfig(time_steps=t_steps, step=step)
        labels = [ActivityLabel(int(rng.integers(0, 6))) for _ in range(n)]
        samples = stream(labels, rng)
        if n <= t_steps:
            continue
        want = brute_force_windows(samples, cfg)
        segs = make_segments(samples, cfg)
        assert segs.n == len(want) == segment_count(n, cfg)
        for row, (start, rows, best) in enumerate(want):
            assert np.array_equal(segs.data[row], rows)
            assert segs.labels[row].argmax() == best


def test_window_rows_bit_identical_to_source():
    samples = stream([ActivityLabel.JOGGING] * 50)
    cfg = WindowConfig(time_steps=10, step=3)
    segs = make_segments(samples, cfg)
    xyz = np.array([(s.x, s.y, s.z) for s in samples])
    assert np.array_equal(segs.data[4], xyz[12:22])


def test_modal_label_majority_and_tie():
    cfg = WindowConfig(time_steps=200, step=200)
    mix = [ActivityLabel.WALKING] * 150 + [ActivityLabel.JOGGING] * 50
    segs = make_segments(stream(mix + mix[:10]), cfg)
    assert segs.labels[0].argmax() == int(ActivityLabel.WALKING)
    # 100/100 tie: Sitting (index 2) beats Standing (index 3)
    tie = [ActivityLabel.STANDING] * 100 + [ActivityLabel.SITTING] * 100
    segs = make_segments(stream(tie + tie[:10]), cfg)
    assert segs.labels[0].argmax() == int(ActivityLabel.SITTING)


def test_source_too_short():
    with pytest.raises(WindowError, match="segment_source_too_short"):
        make_segments(stream([ActivityLabel.WALKING] * 200), WindowConfig())


def test_one_hot():
    assert one_hot(ActivityLabel.DOWNSTAIRS).tolist() == [1, 0, 0, 0, 0, 0]
    assert one_hot(ActivityLabel.WALKING).tolist() == [0, 0, 0, 0, 0, 1]
    for label in ActivityLabel:
        assert one_hot(label).sum() == 1.0


def test_window_config_invariants():
    with pytest.raises(ValueError):
        WindowConfig(time_steps=0)
    with pytest.raises(ValueError):
        WindowConfig(time_steps=10, step=11)
    with pytest.raises(ValueError):
        WindowConfig(time_steps=10, step=0)
    with pytest.raises(ValueError):
        WindowConfig(features=4)


def test_split_config_invariants():
    with pytest.raises(ValueError):
        SplitConfig(train_fraction=0.0)
    with pytest.raises(ValueError):
        SplitConfig(train_fraction=1.0)
    with pytest.raises(ValueError):
        SplitConfig(train_fraction=float("nan"))


def random_segment_set(rng, n):
    data = rng.normal(size=(n, 5, 3))
    labels = np.zeros((n, 6))
    labels[np.arange(n), rng.integers(0, 6, n)] = 1.0
    return SegmentSet(data, labels)


def test_split_is_partition():
    rng = np.random.default_rng(1)
    segs = random_segment_set(rng, 200)
    train, test = bernoulli_split(segs, SplitConfig(0.8, seed=5))
    assert train.n + test.n == 200
    joined = np.concatenate([train.data, test.data])
    # every original row appears exactly once across the two sides
    seen = {tuple(row) for row in joined.reshape(200, -1)}
    original = {tuple(row) for row in segs.data.reshape(200, -1)}
    assert seen == original


def test_split_deterministic_and_seed_sensitive():
    rng = np.random.default_rng(2)
    segs = random_segment_set(rng, 300)
    a1, b1 = bernoulli_split(segs, SplitConfig(0.8, seed=9))
    a2, b2 = bernoulli_split(segs, SplitConfig(0.8, seed=9))
    a3, _ = bernoulli_split(segs, SplitConfig(0.8, seed=10))
    assert np.array_equal(a1.data, a2.data)
    assert np.array_equal(b1.labels, b2.labels)
    assert a1.n != a3.n or not np.array_equal(a1.data, a3.data)


def test_split_binomial_bound():
    rng = np.random.default_rng(3)
    segs = random_segment_set(rng, 10000)
    train, _ = bernoulli_split(segs, SplitConfig(0.8, seed=4))
    # +-2 sigma of Binomial(10000, 0.8)
    assert 7800 <= train.n <= 8200


def test_split_degenerate_raises():
    rng = np.random.default_rng(4)
    segs = random_segment_set(rng, 3)
    with pytest.raises(SplitError, match="reseed"):
        bernoulli_split(segs, SplitConfig(1e-12, seed=0))
    with pytest.raises(SplitError):
        bernoulli_split(random_segment_set(rng, 1), SplitConfig(0.5, seed=0))


def test_exact_split_counts():
    rng = np.random.default_rng(5)
    segs = random_segment_set(rng, 10)
    train, test = bernoulli_split(segs, SplitConfig(0.8, seed=0, exact=True))
    assert (train.n, test.n) == (8, 2)
    train, test = bernoulli_split(random_segment_set(rng, 1000),
                                  SplitConfig(0.8, seed=0, exact=True))
    assert train.n == 800


def test_holdout_validation_same_contract():
    rng = np.random.default_rng(6)
    segs = random_segment_set(rng, 500)
    t1, v1 = holdout_validation(segs, SplitConfig(0.8, seed=77))
    t2, v2 = holdout_validation(segs, SplitConfig(0.8, seed=77))
    assert np.array_equal(t1.data, t2.data)
    assert t1.n + v1.n == 500
    assert 300 < t1.n < 500 and v1.n > 0


def test_segment_set_validation():
    data = np.zeros((2, 4, 3))
    good = np.zeros((2, 6))
    good[:, 1] = 1.0
    SegmentSet(data, good)
    bad = good.copy()
    bad[0, 2] = 1.0  # two ones
    with pytest.raises(ValueError, match="one-hot"):
        SegmentSet(data, bad)
    bad = good.copy()
    bad[0, 1] = 0.7
    with pytest.raises(ValueError, match="one-hot"):
        SegmentSet(data, bad)
    nan_data = data.copy()
    nan_data[1, 2, 0] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        SegmentSet(nan_data, good)
    with pytest.raises(ValueError):
        SegmentSet(data, good[:1])


def test_subset_and_class_counts():
    rng = np.random.default_rng(8)
    segs = random_segment_set(rng, 40)
    sub = segs.subset(np.array([3, 5, 7]))
    assert sub.n == 3
    assert np.array_equal(sub.data[1], segs.data[5])
    assert segs.class_counts().sum() == 40


def test_cache_roundtrip(tmp_path):
    rng = np.random.default_rng(9)
    segs = random_segment_set(rng, 17)
    path = tmp_path / "segments.bin"
    save_segments(path, segs)
    loaded = load_segments(path)
    assert np.array_equal(loaded.data, segs.data)
    assert np.array_equal(loaded.labels, segs.labels)


def test_cache_errors(tmp_path):
    rng = np.random.default_rng(10)
    segs = random_segment_set(rng, 5)
    path = tmp_path / "segments.bin"
    save_segments(path, segs)
    raw = path.read_bytes()

    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"WRONGMAG" + raw[8:])
    with pytest.raises(CacheError, match="magic"):
        load_segments(bad)

    short = tmp_path / "short.bin"
    short.write_bytes(raw[:len(raw) // 2])
    with pytest.raises(CacheError, match="truncated"):
        load_segments(short)

    head = tmp_path / "head.bin"
    head.write_bytes(raw[:10])
    with pytest.raises(CacheError, match="truncated"):
        load_segments(head)

    # valid container but corrupt labels
    import struct
    n, t_steps, feats = 2, 3, 3
    data = np.zeros((n, t_steps, feats))
    labels = np.full((n, 6), 0.5)
    blob = (b"HARSEG1\x00" + struct.pack("<QQQ", n, t_steps, feats)
            + data.tobytes() + labels.tobytes())
    corrupt = tmp_path / "corrupt.bin"
    corrupt.write_bytes(blob)
    with pytest.raises(CacheError, match="invalid segment cache"):
        load_segments(corrupt)
