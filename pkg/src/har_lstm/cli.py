"""The har-lstm command line: inspect, train, eval, predict.

Exit codes: 0 success, 1 usage error (bad flags or flag values, usage text
printed), 2 data or model error (unreadable file, bad checkpoint, training
divergence).  Every run logs its fully resolved configuration first, so a
result is reproducible from its log alone.  HAR_LOG=debug|info controls
verbosity only, never results.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path

from . import __version__, kernels
from .errors import HarLstmError
from .evaluation import evaluate, render_report, write_report_csv
from .checkpoint import load_checkpoint
from .lstm import NetConfig
from .stream import StreamBuffer
from .training import TrainConfig, train
from .windowing import (
    SplitConfig,
    WindowConfig,
    bernoulli_split,
    load_segments,
    make_segments,
    save_segments,
)
from .wisdm import class_stats, load_dataset, render_ingest_report, render_stats_table

log = logging.getLogger("har_lstm.cli")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so main() owns the exit code
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="har-lstm",
                     description="activity recognition over raw accelerometer streams")
    parser.add_argument("--version", action="version", version=f"har-lstm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    inspect = sub.add_parser("inspect", help="parse a raw file and print signal statistics")
    inspect.add_argument("--data", required=True, help="raw accelerometer text file")
    inspect.add_argument("--stats-csv", default=None, help="also write the stats table as CSV")

    tr = sub.add_parser("train", help="ingest, segment, split, and train a model")
    tr.add_argument("--data", required=True, help="raw accelerometer text file")
    tr.add_argument("--model", required=True, help="checkpoint output path")
    tr.add_argument("--metrics", default=None,
                    help="metrics CSV path (default: alongside the checkpoint)")
    tr.add_argument("--cache", default=None,
                    help="segment cache file to reuse (created when absent)")
    tr.add_argument("--seed", type=int, default=42)
    tr.add_argument("--epochs", type=int, default=500)
    tr.add_argument("--batch-size", type=int, default=1024)
    tr.add_argument("--lr", type=float, default=0.0025)
    tr.add_argument("--l2", type=float, default=0.0015)
    tr.add_argument("--hidden", type=int, default=64)
    tr.add_argument("--layers", type=int, default=3)
    tr.add_argument("--time-steps", type=int, default=200)
    tr.add_argument("--step", type=int, default=20)
    tr.add_argument("--train-frac", type=float, default=0.8)
    tr.add_argument("--init-sigma", type=float, default=0.1)
    tr.add_argument("--log-every", type=int, default=10)
    tr.add_argument("--no-shuffle", action="store_true",
                    help="fixed batch order instead of a per-epoch shuffle")
    tr.add_argument("--exact-split", action="store_true",
                    help="exact-count shuffled split instead of per-segment draws")

    ev = sub.add_parser("eval", help="evaluate a checkpoint against a labeled raw file")
    ev.add_argument("--data", required=True)
    ev.add_argument("--model", required=True)
    ev.add_argument("--step", type=int, default=20)
    ev.add_argument("--l2", type=float, default=0.0015)
    ev.add_argument("--csv", default=None, help="also write the report as CSV")

    pred = sub.add_parser("predict", help="stream x,y,z lines through a trained model")
    pred.add_argument("--model", required=True)
    pred.add_argument("--data", default=None,
                      help="file of x,y,z lines (default: standard input)")
    pred.add_argument("--step", type=int, default=20, help="emission stride in samples")
    return parser


def _banner(args: argparse.Namespace) -> None:
    log.info("har-lstm %s (backend: %s)", __version__, kernels.backend_name())
    shown = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    log.info("configuration: %s",
             ", ".join(f"{k}={v!r}" for k, v in shown.items()))


def cmd_inspect(args) -> int:
    samples, report = load_dataset(args.data)
    print(render_ingest_report(report))
    print()
    stats = class_stats(samples)
    print(render_stats_table(stats))
    if args.stats_csv:
        from .wisdm import write_stats_csv
        write_stats_csv(stats, args.stats_csv)
        log.info("stats CSV written to %s", args.stats_csv)
    return 0


def _load_segments_cached(args, window_cfg: WindowConfig):
    if args.cache and Path(args.cache).exists():
        log.info("loading segment cache %s", args.cache)
        return load_segments(args.cache)
    samples, report = load_dataset(args.data)
    log.info("ingested %d samples (%d rejected) from %s",
             report.accepted, report.rejected, args.data)
    segments = make_segments(samples, window_cfg)
    if args.cache:
        save_segments(args.cache, segments)
        log.info("segment cache written to %s", args.cache)
    return segments


def cmd_train(args) -> int:
    try:
        window_cfg = WindowConfig(time_steps=args.time_steps, step=args.step)
        split_cfg = SplitConfig(train_fraction=args.train_frac, seed=args.seed,
                                exact=args.exact_split)
        net_cfg = NetConfig(time_steps=args.time_steps, hidden_units=args.hidden,
                            num_layers=args.layers, init_sigma=args.init_sigma)
        metrics = args.metrics or str(Path(args.model).with_suffix(".metrics.csv"))
        train_cfg = TrainConfig(
            epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr,
            l2_coeff=args.l2, seed=args.seed, shuffle=not args.no_shuffle,
            log_every=args.log_every, checkpoint_path=args.model, metrics_path=metrics)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    segments = _load_segments_cached(args, window_cfg)
    log.info("segments: %d (class counts %s)", segments.n,
             segments.class_counts().tolist())
    train_set, test_set = bernoulli_split(segments, split_cfg)
    log.info("split: %d train / %d test", train_set.n, test_set.n)

    _, history = train(net_cfg, train_cfg, train_set.data, train_set.labels,
                       test_set.data, test_set.labels)
    last = history[-1]
    log.info("final: train loss %.6g, train accuracy %.6g, "
             "test loss %.6g, test accuracy %.6g",
             last.train_loss, last.train_accuracy, last.test_loss, last.test_accuracy)
    log.info("checkpoint written to %s, metrics to %s", args.model, metrics)
    return 0


def cmd_eval(args) -> int:
    params, meta = load_checkpoint(args.model)
    try:
        window_cfg = WindowConfig(time_steps=params.cfg.time_steps, step=args.step)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    samples, report = load_dataset(args.data)
    log.info("ingested %d samples (%d rejected)", report.accepted, report.rejected)
    segments = make_segments(samples, window_cfg)
    report_out = evaluate(params, segments, args.l2)
    print(render_report(report_out))
    if args.csv:
        write_report_csv(report_out, args.csv)
        log.info("report CSV written to %s", args.csv)
    return 0


def cmd_predict(args) -> int:
    params, _ = load_checkpoint(args.model)
    try:
        buf = StreamBuffer(params, step=args.step)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    if args.data is None:
        ctx = contextlib.nullcontext(sys.stdin)
    else:
        try:
            ctx = open(args.data)
        except OSError as exc:
            raise HarLstmError(f"cannot read stream file {args.data}: {exc}") from exc
    malformed = 0
    emitted = 0
    with ctx as fh:
        for line in fh:
            text = line.strip().rstrip(";")
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 3:
                malformed += 1
                continue
            try:
                x, y, z = (float(p) for p in parts)
            except ValueError:
                malformed += 1
                continue
            result = buf.push_sample(x, y, z)
            if result is not None:
                label, probs = result
                emitted += 1
                print(f"{buf.samples_seen - 1},{label.display_name},"
                      + ",".join(f"{p:.6g}" for p in probs))
    log.info("%d predictions from %d samples (%d malformed lines, "
             "%d non-finite samples rejected)",
             emitted, buf.samples_seen, malformed, buf.rejected)
    return 0


_COMMANDS = {"inspect": cmd_inspect, "train": cmd_train,
             "eval": cmd_eval, "predict": cmd_predict}


def _setup_logging() -> None:
    wanted = os.environ.get("HAR_LOG", "info").lower()
    level = {"debug": logging.DEBUG, "info": logging.INFO}.get(wanted)
    if level is None:
        level = logging.INFO
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr)
    if wanted not in ("debug", "info"):
        log.warning("unknown HAR_LOG value %r, using info", wanted)


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if not exc.code else int(exc.code)
    _banner(args)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (HarLstmError, OSError) as exc:
        log.error("error: %s", exc)
        return 2


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
