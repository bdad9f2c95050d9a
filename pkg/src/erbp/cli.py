"""Command line entry point: ``erbp {train,eval,first-spike,oracle}``."""
import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .config import ConfigError, dump_config, load_config, parse_pairs
from .data import load_mnist

log = logging.getLogger("erbp")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")
    common.add_argument("--model", choices=("continuous", "quantized", "refnet"))
    common.add_argument("--rule", choices=("erbp", "perbp", "bp", "rbp"))
    common.add_argument("--arch", help="layer sizes, e.g. 784-100-10")
    common.add_argument("--seed", type=int)
    common.add_argument("--epochs", type=int)
    common.add_argument("--subset", type=int, metavar="N", help="use the first N training samples")
    common.add_argument("--test-subset", type=int, metavar="N", help="use the first N test samples")
    common.add_argument("--out", default="runs/latest", metavar="DIR")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="erbp", description="eRBP spiking network simulator")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("train", parents=[common], help="train and evaluate per epoch")
    ev = sub.add_parser("eval", parents=[common], help="rate-based test error of a checkpoint")
    fs = sub.add_parser("first-spike", parents=[common], help="first-spike error and SynOps curve")
    for sp in (ev, fs):
        sp.add_argument("--checkpoint", help="weights from a previous train run (default: fresh net)")
        sp.add_argument("--spike-log", type=int, default=0, metavar="N",
                        help="also write the spikes of the first N test samples to spikes.bin")
    sub.add_parser("oracle", parents=[common], help="dense BP/RBP reference network")
    return p


def _config(args):
    over = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        over.update(parse_pairs([item.split("=", 1)]))
    for key in ("model", "rule", "arch", "seed", "epochs"):
        value = getattr(args, key)
        if value is not None:
            over[key] = value
    if args.subset is not None:
        over["n_train"] = args.subset
    if args.test_subset is not None:
        over["n_test"] = args.test_subset
    if args.command == "oracle":
        over.setdefault("model", "refnet")
        if "rule" not in over:
            over["rule"] = "bp"
    return load_config(args.config, over)


def _write(out, name, data):
    path = out / name
    if isinstance(data, bytes):
        path.write_bytes(data)
    else:
        path.write_text(data)
    return path


def _load_net(cfg, path):
    if path is None:
        return harness.build_network(cfg)
    dims, weights = harness.load_weights(Path(path).read_bytes())
    if tuple(dims) != cfg.dims:
        raise ConfigError(f"checkpoint has architecture {dims}, config says {cfg.arch}")
    return harness.build_network(cfg, weights)


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        cfg = _config(args)
    except (ConfigError, OSError) as e:
        print(f"erbp: {e}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "config.txt", dump_config(cfg))
    mnist = load_mnist()
    train = harness.select(mnist.train, cfg.n_train)
    test = harness.select(mnist.test, cfg.n_test)

    if args.command == "oracle":
        if cfg.model != "refnet":
            print("erbp: oracle runs the refnet model", file=sys.stderr)
            return 2
        _, metrics, timing = harness.train_refnet(cfg, train, test)
        _emit(out, metrics, timing)
        return 0

    if cfg.model == "refnet":
        print("erbp: use the oracle subcommand for the dense reference network", file=sys.stderr)
        return 2

    if args.command == "train":
        net = harness.build_network(cfg)
        _, metrics, timing = harness.train_spiking(cfg, train, test, net=net)
        name = "checkpoint.bin" if cfg.model == "quantized" else "weights.npz"
        _write(out, name, harness.checkpoint_of(net))
        _emit(out, metrics, timing)
        return 0

    try:
        net = _load_net(cfg, args.checkpoint)
    except (ConfigError, ValueError) as e:
        print(f"erbp: {e}", file=sys.stderr)
        return 2
    metrics = harness.Metrics(n_layers=len(cfg.dims))
    if args.command == "eval":
        ev = harness.evaluate_rate(net, test, cfg.t_test, cfg.workers)
        metrics.epochs.append({
            "epoch": 0, "samples_seen": 0, "train_error": None, "test_error": ev.error,
            "synops_per_sample": ev.synops_per_sample, "spikes_per_sample": ev.spikes_per_sample,
        })
    else:
        fs = harness.evaluate_first_spike(net, test, cfg.t_test, cfg.first_spike_offset(),
                                          cfg.k_max, cfg.prestim, cfg.seed)
        metrics.first_spike = fs.curve
        metrics.no_spike = fs.no_spike
        metrics.full_window_error = fs.full_window_error
        _write(out, "first_spike.csv", metrics.first_spike_csv())
    if args.spike_log:
        records, synops = harness.collect_spike_log(net, test.subset(args.spike_log), cfg.t_test)
        harness.write_spike_log(out / "spikes.bin", records)
        log.info("spike log: %d records, %d SynOps", len(records), synops)
    _emit(out, metrics, {})
    return 0


def _emit(out, metrics, timing):
    _write(out, "metrics.csv", metrics.to_csv())
    _write(out, "metrics.json", metrics.to_json())
    # wall-clock lives apart from the metrics so those stay byte-reproducible
    _write(out, "timing.json", json.dumps(timing, indent=2, sort_keys=True) + "\n")
    for row in metrics.epochs:
        print(f"epoch {row['epoch']}: test error {row['test_error']:.4f}")
    if metrics.first_spike:
        first = metrics.first_spike[0]
        print(f"first-spike error {first['error']:.4f} at {first['synops']:.0f} SynOps; "
              f"full window {metrics.full_window_error:.4f}; no spike {metrics.no_spike}")


if __name__ == "__main__":
    sys.exit(main())
