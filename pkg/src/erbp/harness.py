"""Training and evaluation protocols for the spiking networks.

Training presents each sample for ``t_train`` ms with its label train and
keeps plasticity off for the first ``gate`` ms of every sample.  Network
state carries over from one sample to the next.  Evaluation runs on clones
with plasticity and error neurons off, so it never changes the weights.
"""
import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import refnet, rng
from .data import Dataset
from .quantized import QuantNetwork, checkpoint_bytes
from .snn import LAYER_ERR_NEG, LAYER_ERR_POS, LOG_DTYPE, ST_SYNOPS, ContinuousNetwork

log = logging.getLogger(__name__)

EPOCH_FIELDS = ("epoch", "samples_seen", "train_error", "test_error", "synops_per_sample")
FIRST_SPIKE_FIELDS = ("k", "error", "synops", "n_with_spikes")


@dataclass
class Metrics:
    n_layers: int
    epochs: list = field(default_factory=list)  # one dict per epoch
    first_spike: list = field(default_factory=list)  # one dict per k
    no_spike: int = 0  # first-spike samples without any output spike
    full_window_error: float = None  # count-based error of the first-spike runs

    def csv_fields(self):
        return EPOCH_FIELDS + tuple(f"spikes_l{i}" for i in range(self.n_layers))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_fields())
        for row in self.epochs:
            w.writerow([row[k] for k in EPOCH_FIELDS] + list(row["spikes_per_sample"]))
        return buf.getvalue()

    def first_spike_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIRST_SPIKE_FIELDS)
        for row in self.first_spike:
            w.writerow([row[k] for k in FIRST_SPIKE_FIELDS])
        return buf.getvalue()

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def build_network(cfg, weights=None):
    dims = cfg.dims
    if cfg.model == "continuous":
        net = ContinuousNetwork(dims, cfg.sim_config(), seed=cfg.seed)
        if weights is not None:
            net.set_weights(weights)
        return net
    if cfg.model == "quantized":
        return QuantNetwork(dims, cfg.quant_params(), seed=cfg.seed, weights=weights)
    raise ValueError(f"no spiking network for model {cfg.model!r}")


def _steps(net, ms):
    if isinstance(net, QuantNetwork):
        return net.params.steps(ms)
    return int(round(ms / net.cfg.dt))


@dataclass
class EvalResult:
    error: float
    predictions: np.ndarray
    spikes_per_sample: list
    synops_per_sample: float


def _synops(net, res):
    return int(res.stats[6] if isinstance(net, QuantNetwork) else res.stats[ST_SYNOPS])


def _eval_shard(net, images, t_test):
    preds = np.zeros(len(images), dtype=np.int64)
    spikes = np.zeros(len(net.dims), dtype=np.int64)
    synops = 0
    for i, img in enumerate(images):
        r = net.run(img, label=-1, duration=t_test, learn=False)
        preds[i] = int(np.argmax(r.counts))  # ties go to the lowest class index
        spikes += r.layer_spikes
        synops += _synops(net, r)
    return preds, spikes, synops


def _shards(n, workers):
    bounds = np.linspace(0, n, workers + 1).astype(int)
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def evaluate_rate(net, dataset, t_test=500.0, workers=1):
    """Misclassified fraction with the class decided by output spike counts.

    Each shard runs on its own clone; shard ``s`` starts its clock where a
    sequential pass would, so results only depend on ``workers``.
    """
    n = len(dataset)
    if n == 0:
        return EvalResult(0.0, np.zeros(0, dtype=np.int64), [0.0] * len(net.dims), 0.0)
    n_steps = _steps(net, t_test)
    jobs = []
    for a, b in _shards(n, workers):
        c = net.clone()
        c.t = net.t + a * n_steps
        jobs.append((c, dataset.images[a:b]))
    if len(jobs) == 1:
        parts = [_eval_shard(jobs[0][0], jobs[0][1], t_test)]
    else:
        with ThreadPoolExecutor(len(jobs)) as ex:
            parts = list(ex.map(lambda j: _eval_shard(j[0], j[1], t_test), jobs))
    preds = np.concatenate([p[0] for p in parts])
    spikes = sum(p[1] for p in parts)
    synops = sum(p[2] for p in parts)
    err = int(np.sum(preds != dataset.labels)) / n
    return EvalResult(err, preds, (spikes / n).tolist(), synops / n)


def majority(classes, n_cls):
    """Most frequent class; ties go to the class that reached the count first."""
    counts = np.zeros(n_cls, dtype=np.int64)
    best, best_n = -1, 0
    for c in classes:
        counts[c] += 1
        if counts[c] > best_n:
            best, best_n = int(c), int(counts[c])
    return best


def random_pattern(seed, index, n):
    """Uniform-noise image used to scramble network state before a sample."""
    return rng.uniform_array(seed, rng.PATTERN, index, n)


@dataclass
class FirstSpikeResult:
    curve: list  # dicts with k, error, synops, n_with_spikes
    no_spike: int
    full_window_error: float
    per_sample: list  # (classes, synops) per sample, for inspection


def evaluate_first_spike(net, dataset, t_test=500.0, offset=8.0, k_max=20, prestim=100.0,
                         seed=0):
    """Error and SynOps when classifying by the first ``k`` output spikes after ``offset`` ms.

    Before each sample the network sees ``prestim`` ms of a random pattern.
    Samples with no output spike in the window count as errors.  When fewer
    than ``k`` spikes occur, all of them are used.
    """
    n = len(dataset)
    n_cls = net.dims[-1]
    c = net.clone()
    wrong = np.zeros(k_max, dtype=np.int64)
    syn_sum = np.zeros(k_max)
    syn_n = np.zeros(k_max, dtype=np.int64)
    full_wrong = 0
    no_spike = 0
    per_sample = []
    for i in range(n):
        if prestim > 0:
            c.run(random_pattern(seed, i, net.dims[0]), label=-1, duration=prestim)
        r = c.run(dataset.images[i], label=-1, duration=t_test, offset=offset, max_first=k_max)
        label = int(dataset.labels[i])
        full_wrong += int(np.argmax(r.counts)) != label
        cls = r.first_classes
        per_sample.append((cls.tolist(), r.first_synops.tolist()))
        if cls.size == 0:
            no_spike += 1
            wrong += 1
            continue
        for k in range(1, k_max + 1):
            m = min(k, cls.size)
            wrong[k - 1] += majority(cls[:m], n_cls) != label
            syn_sum[k - 1] += r.first_synops[m - 1]
            syn_n[k - 1] += 1
    curve = []
    for k in range(1, k_max + 1):
        curve.append({
            "k": k,
            "error": int(wrong[k - 1]) / n if n else 0.0,
            "synops": float(syn_sum[k - 1] / syn_n[k - 1]) if syn_n[k - 1] else 0.0,
            "n_with_spikes": int(syn_n[k - 1]),
        })
    return FirstSpikeResult(curve, no_spike, full_wrong / n if n else 0.0, per_sample)


def train_spiking(cfg, train, test, net=None, on_epoch=None):
    """Run the presentation protocol; returns ``(net, metrics, timing)``."""
    net = net or build_network(cfg)
    metrics = Metrics(n_layers=len(cfg.dims))
    timing = {"epochs": []}
    seen = 0
    for ep in range(cfg.epochs):
        t0 = time.perf_counter()
        order = np.arange(len(train))
        if cfg.order == "shuffled":
            order = np.random.default_rng([cfg.seed, ep]).permutation(len(train))
        wrong = 0
        for i in order:
            label = int(train.labels[i])
            r = net.run(train.images[i], label=label, duration=cfg.t_train, learn=True, gate=cfg.gate)
            wrong += int(np.argmax(r.counts)) != label
            seen += 1
        t1 = time.perf_counter()
        ev = evaluate_rate(net, test, cfg.t_test, cfg.workers)
        row = {
            "epoch": ep + 1,
            "samples_seen": seen,
            "train_error": wrong / len(train) if len(train) else 0.0,
            "test_error": ev.error,
            "synops_per_sample": ev.synops_per_sample,
            "spikes_per_sample": ev.spikes_per_sample,
        }
        metrics.epochs.append(row)
        timing["epochs"].append({"train_s": t1 - t0, "eval_s": time.perf_counter() - t1})
        log.info("epoch %d: train %.4f test %.4f", ep + 1, row["train_error"], ev.error)
        if on_epoch is not None:
            on_epoch(net, row)
    return net, metrics, timing


def train_refnet(cfg, train, test):
    net = refnet.DenseNet.create(cfg.dims, seed=cfg.seed)
    metrics = Metrics(n_layers=len(cfg.dims))
    seen = 0
    t0 = time.perf_counter()

    def record(net_, hist):
        nonlocal seen
        seen += len(train)
        metrics.epochs.append({
            "epoch": len(metrics.epochs) + 1,
            "samples_seen": seen,
            "train_error": hist.train_error[-1],
            "test_error": hist.test_error[-1],
            "synops_per_sample": 0.0,
            "spikes_per_sample": [0.0] * len(cfg.dims),
        })

    for _ in range(cfg.epochs):
        _, hist = refnet.sgd_train(net, train, cfg.rule, lr=cfg.lr, batch=cfg.batch, epochs=1,
                                   test=test, seed=cfg.seed + len(metrics.epochs))
        record(net, hist)
    return net, metrics, {"total_s": time.perf_counter() - t0}


def select(dataset, n):
    return dataset if n == 0 else dataset.subset(n)


def checkpoint_of(net):
    """Checkpoint bytes for a quantized net; ``.npz`` bytes for a continuous one."""
    if isinstance(net, QuantNetwork):
        return checkpoint_bytes(net.dims, net.weights)
    buf = io.BytesIO()
    arrays = {f"W{i}": w for i, w in enumerate(net.weights)}
    np.savez(buf, dims=np.array(net.dims), **arrays)
    return buf.getvalue()


def load_weights(data):
    """Inverse of :func:`checkpoint_of`: returns ``(dims, weights)``."""
    from .quantized import MAGIC, parse_checkpoint

    if data[:8] == MAGIC:
        return parse_checkpoint(data)
    with np.load(io.BytesIO(data)) as z:
        dims = [int(d) for d in z["dims"]]
        return dims, [z[f"W{i}"] for i in range(len(dims) - 1)]


# Spike logs: packed little-endian records (step u32, neuron u32, layer u8).

def write_spike_log(path, records):
    np.ascontiguousarray(records, dtype=LOG_DTYPE).tofile(path)


def read_spike_log(path):
    return np.fromfile(path, dtype=LOG_DTYPE)


def recount_synops(records, dims):
    """SynOps implied by a spike log: each spike of layer ``l`` reaches ``dims[l+1]`` targets."""
    fan = np.zeros(256, dtype=np.int64)
    fan[: len(dims) - 1] = dims[1:]
    fan[LAYER_ERR_POS] = fan[LAYER_ERR_NEG] = 0
    return int(fan[records["layer"].astype(np.int64)].sum())


def collect_spike_log(net, dataset, t_test=500.0):
    """Evaluation spikes of every sample in ``dataset`` with steps counted from the first onset."""
    c = net.clone()
    n_steps = _steps(net, t_test)
    parts = []
    synops = 0
    for i in range(len(dataset)):
        r = c.run(dataset.images[i], label=-1, duration=t_test, log=True)
        rec = r.log.copy()
        rec["step"] += i * n_steps
        parts.append(rec)
        synops += _synops(net, r)
    records = np.concatenate(parts) if parts else np.zeros(0, dtype=LOG_DTYPE)
    return records, synops


def dataset_of(images, labels, split="test"):
    return Dataset(np.asarray(images, dtype=float), np.asarray(labels, dtype=np.int64), split)
