"""Compare the compiled matmul kernel against the pure-numpy fallback.

Times raw matrix products at the shapes this network actually hits, plus a
full forward/backward pass, under each available backend.  Both backends
are bit-identical by contract (the suite enforces it); this script only
reports speed.

Usage: python3 benchmarks/bench_kernels.py [--repeats N] [--quick]
"""

import argparse
import time

import numpy as np

from har_lstm import kernels
from har_lstm.lstm import NetConfig, backward, forward, init_params

# (m, k, n): rows x inner x cols.  The first three mirror the input
# projection, one gate matmul at desk scale, and one at full scale; the
# large square is a raw throughput reference.
MATMUL_SHAPES = [
    (12800, 3, 64),     # input projection, batch 64 x 200 steps
    (64, 128, 256),     # per-step gate product, hidden 64
    (1024, 64, 6),      # output layer, batch 1024
    (512, 512, 512),    # square reference
]


def time_call(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_matmul(repeats: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'shape':>22} {'backend':>9} {'best time':>12} {'GFLOP/s':>9}")
    for m, k, n in MATMUL_SHAPES:
        a = rng.normal(size=(m, k))
        b = rng.normal(size=(k, n))
        out = np.empty((m, n))
        flops = 2.0 * m * k * n
        for name in kernels.available_backends():
            kernels.set_backend(name)
            kernels.matmul_nn(a, b, out)  # warm up
            best = time_call(lambda: kernels.matmul_nn(a, b, out), repeats)
            print(f"{f'{m}x{k}x{n}':>22} {name:>9} {best * 1e3:>10.2f}ms"
                  f" {flops / best / 1e9:>9.2f}")


def bench_network(repeats: int, quick: bool) -> None:
    cfg = NetConfig(hidden_units=32 if quick else 64)
    params = init_params(cfg, 0)
    rng = np.random.default_rng(1)
    batch = 16 if quick else 64
    data = rng.normal(size=(batch, cfg.time_steps, 3))
    dlogits = rng.normal(size=(batch, cfg.classes)) / batch

    print(f"\nforward+backward, batch {batch}, hidden {cfg.hidden_units}, "
          f"{cfg.num_layers} layers, {cfg.time_steps} steps")
    for name in kernels.available_backends():
        kernels.set_backend(name)

        def run():
            _, cache = forward(params, data)
            backward(params, cache, dlogits)

        run()  # warm up
        best = time_call(run, repeats)
        print(f"  {name:>9}: {best:.3f} s per step "
              f"({batch / best:.1f} segments/s)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--quick", action="store_true",
                        help="smaller network pass for a fast smoke run")
    args = parser.parse_args(argv)
    print(f"backends available: {', '.join(kernels.available_backends())}")
    bench_matmul(args.repeats)
    bench_network(max(2, args.repeats // 2), args.quick)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
