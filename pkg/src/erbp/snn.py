"""Compiled continuous-time eRBP network.

The whole per-sample time loop runs inside one numba kernel.  Layer
conventions follow :mod:`erbp.continuous`: weights are stored as
``(n_pre, n_post)`` so the fan-out of a spike is a contiguous row, and
every random draw comes from the counter-based generator in
:mod:`erbp.rng` keyed by the global step.
"""
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from numba.typed import List

from . import rng
from .continuous import (
    PA_PER_NA,
    DataEncoderParams,
    ErrorParams,
    NeuronParams,
    NoiseParams,
    hazard_rate,
    hold_steps,
)
from .plasticity import PlasticityConfig

# layer tags used in spike logs
LAYER_DATA = 0
LAYER_ERR_POS = 250
LAYER_ERR_NEG = 251

# indices into the per-call statistics vector
ST_COMPARISONS = 0
ST_ADDITIONS = 1
ST_GATE_WINDOW_UPDATES = 2
ST_ERR_POS = 3
ST_ERR_NEG = 4
ST_SYNOPS = 5
ST_LOG_OVERFLOW = 6
N_STATS = 7


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.1  # ms
    neuron: NeuronParams = field(default_factory=NeuronParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    encoder: DataEncoderParams = field(default_factory=DataEncoderParams)
    error: ErrorParams = field(default_factory=ErrorParams)
    plasticity: PlasticityConfig = field(default_factory=PlasticityConfig)
    label_period: float = 4.0  # ms between label spikes
    error_bias: float = 0.0  # mV per step; >0 enables the label-gated negative bias
    init_scale: float = 6.0  # U(sqrt(scale / (rows + cols))) initial weights


@dataclass
class SampleResult:
    counts: np.ndarray  # output spikes per class
    layer_spikes: np.ndarray  # spikes per layer incl. data layer
    first_classes: np.ndarray  # classes of output spikes after the offset, in order
    first_steps: np.ndarray  # step (relative to onset) of those spikes
    first_synops: np.ndarray  # cumulative SynOps at each of those spikes
    stats: np.ndarray
    log: np.ndarray = None  # structured spike log, if requested


LOG_DTYPE = np.dtype([("step", "<u4"), ("neuron", "<u4"), ("layer", "u1")])


@njit(cache=True, nogil=True)
def _run(Ws, Gs, Vs, Us, Is, refrs, drefr, p_data, vpos, vneg, epos, eneg,
         bufs, nbuf, t0, n_steps, seed, dt, C, g_V, g_U, V_T, hold, syn_decay,
         kick_bg, p_bg, p_thr, blank, d_hold, label, label_period, w_L, V_T_E,
         err_bias, kick_E, fb_gain, eta, b_min, b_max, learn, error_on, gate_steps,
         offset_steps, counts, layer_spikes, f_cls, f_step, f_syn, n_first, stats,
         log_step, log_neuron, log_layer, n_log, do_log):
    n_w = len(Ws)
    n_in = p_data.shape[0]
    n_cls = vpos.shape[0]
    synops = 0
    nf = 0
    nl = 0
    uleak = 1.0 - dt * g_U / C
    vleak = dt / C
    for s in range(n_steps):
        t = t0 + s
        # data layer
        nb = 0
        b0 = bufs[0]
        for j in range(n_in):
            if drefr[j] > 0:
                drefr[j] -= 1
                continue
            if rng.uniform(seed, rng.DATA, t, j) < p_data[j]:
                b0[nb] = j
                nb += 1
                drefr[j] = d_hold
        nbuf[0] = nb
        layer_spikes[0] += nb
        if do_log:
            for a in range(nb):
                if nl < log_step.shape[0]:
                    log_step[nl] = t
                    log_neuron[nl] = b0[a]
                    log_layer[nl] = 0
                    nl += 1
                else:
                    stats[ST_LOG_OVERFLOW] = 1
        # feed-forward layers
        for li in range(n_w):
            W = Ws[li]
            V = Vs[li]
            U = Us[li]
            I = Is[li]
            refr = refrs[li]
            n_post = V.shape[0]
            pre = bufs[li]
            npre = nbuf[li]
            is_out = li == n_w - 1
            for i in range(n_post):
                I[i] *= syn_decay
            synops += npre * n_post
            for a in range(npre):
                j = pre[a]
                if blank:
                    for i in range(n_post):
                        if rng.bernoulli(seed, rng.BLANKOUT + 16 * li, t, j * n_post + i, p_thr):
                            I[i] += W[j, i]
                else:
                    for i in range(n_post):
                        I[i] += W[j, i]
            if error_on:
                for i in range(n_post):
                    U[i] *= uleak
                if is_out:
                    for k in range(n_cls):
                        if epos[k]:
                            U[k] += kick_E
                        if eneg[k]:
                            U[k] -= kick_E
                else:
                    G = Gs[li]
                    for k in range(n_cls):
                        if epos[k]:
                            for i in range(n_post):
                                U[i] += fb_gain * G[i, k]
                        if eneg[k]:
                            for i in range(n_post):
                                U[i] -= fb_gain * G[i, k]
            out = bufs[li + 1]
            nout = 0
            off = li << 20
            for i in range(n_post):
                if refr[i] > 0:
                    refr[i] -= 1
                    V[i] = 0.0
                    continue
                v = V[i] + vleak * (-g_V * V[i] + PA_PER_NA * I[i])
                if kick_bg > 0.0:
                    if rng.uniform(seed, rng.BACKGROUND, t, off + i) < p_bg:
                        if rng.uniform(seed, rng.BACKGROUND_SIGN, t, off + i) < 0.5:
                            v += kick_bg
                        else:
                            v -= kick_bg
                if v >= V_T:
                    v = 0.0
                    refr[i] = hold
                    out[nout] = i
                    nout += 1
                V[i] = v
            nbuf[li + 1] = nout
            layer_spikes[li + 1] += nout
            if do_log:
                for a in range(nout):
                    if nl < log_step.shape[0]:
                        log_step[nl] = t
                        log_neuron[nl] = out[a]
                        log_layer[nl] = li + 1
                        nl += 1
                    else:
                        stats[ST_LOG_OVERFLOW] = 1
            if is_out:
                for a in range(nout):
                    k = out[a]
                    counts[k] += 1
                    if s >= offset_steps and nf < f_cls.shape[0]:
                        f_cls[nf] = k
                        f_step[nf] = s
                        f_syn[nf] = synops
                        nf += 1
        # error layer; its spikes reach the dendrites on the next step
        if error_on:
            outb = bufs[n_w]
            nout = nbuf[n_w]
            lab_spk = label >= 0 and t % label_period == 0
            for k in range(n_cls):
                sp = 0.0
                for a in range(nout):
                    if outb[a] == k:
                        sp = 1.0
                sl = 1.0 if (lab_spk and k == label) else 0.0
                bias = 0.0
                if err_bias > 0.0:
                    bias = -err_bias
                    if label >= 0:
                        bias += err_bias
                vp = vpos[k] + w_L * (sp - sl) + bias
                vn = vneg[k] - w_L * (sp - sl) + bias
                if vp < 0.0:
                    vp = 0.0
                if vn < 0.0:
                    vn = 0.0
                epos[k] = vp > V_T_E
                eneg[k] = vn > V_T_E
                if epos[k]:
                    vp -= V_T_E
                    stats[ST_ERR_POS] += 1
                if eneg[k]:
                    vn -= V_T_E
                    stats[ST_ERR_NEG] += 1
                vpos[k] = vp
                vneg[k] = vn
                if do_log:
                    if epos[k] or eneg[k]:
                        if nl < log_step.shape[0]:
                            log_step[nl] = t
                            log_neuron[nl] = k
                            log_layer[nl] = LAYER_ERR_POS if epos[k] else LAYER_ERR_NEG
                            nl += 1
                        else:
                            stats[ST_LOG_OVERFLOW] = 1
        # plasticity, after integration, on this step's presynaptic spikes
        if learn:
            in_window = s < gate_steps
            for li in range(n_w):
                W = Ws[li]
                U = Us[li]
                I = Is[li]
                n_post = U.shape[0]
                pre = bufs[li]
                for a in range(nbuf[li]):
                    j = pre[a]
                    for i in range(n_post):
                        if blank:
                            if not rng.bernoulli(seed, rng.BLANKOUT + 16 * li, t, j * n_post + i, p_thr):
                                continue
                        stats[ST_COMPARISONS] += 2
                        if b_min < I[i] and I[i] < b_max:
                            if in_window:
                                stats[ST_GATE_WINDOW_UPDATES] += 1
                            else:
                                W[j, i] += eta * U[i]
                                stats[ST_ADDITIONS] += 1
    n_first[0] = nf
    n_log[0] = nl
    stats[ST_SYNOPS] += synops


def _init_uniform(rng_, rows, cols, scale):
    b = np.sqrt(scale / (rows + cols))
    return rng_.uniform(-b, b, size=(rows, cols))


class ContinuousNetwork:
    """Feed-forward eRBP network with one error-coding layer.

    ``dims`` lists layer sizes from the data layer to the prediction layer,
    e.g. ``(784, 100, 10)``.  State persists across calls to :meth:`run`.
    """

    def __init__(self, dims, cfg=None, seed=0):
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) < 2:
            raise ValueError("need at least a data and a prediction layer")
        self.cfg = cfg or SimConfig()
        self.seed = int(seed)
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        init = np.random.default_rng([self.seed, rng.INIT])
        n_cls = self.dims[-1]
        weights = [_init_uniform(init, a, b, self.cfg.init_scale) for a, b in zip(self.dims[:-1], self.dims[1:])]
        # one feedback matrix per hidden layer; the prediction layer is wired one-to-one
        fb = [_init_uniform(init, n, 2 * n_cls, 6.0)[:, :n_cls].copy() for n in self.dims[1:-1]]
        fb.append(np.zeros((1, 1)))
        self.W = List([np.ascontiguousarray(w) for w in weights])
        self.G = List([np.ascontiguousarray(g) for g in fb])
        self.t = 0
        self.reset_state()

    def reset_state(self):
        layers = self.dims[1:]
        self.V = List([np.zeros(n) for n in layers])
        self.U = List([np.zeros(n) for n in layers])
        self.I = List([np.zeros(n) for n in layers])
        self.refr = List([np.zeros(n, dtype=np.int64) for n in layers])
        self.drefr = np.zeros(self.dims[0], dtype=np.int64)
        n_cls = self.dims[-1]
        self.vpos = np.zeros(n_cls)
        self.vneg = np.zeros(n_cls)
        self.epos = np.zeros(n_cls, dtype=np.bool_)
        self.eneg = np.zeros(n_cls, dtype=np.bool_)
        self._bufs = List([np.zeros(n, dtype=np.int64) for n in self.dims])
        self._nbuf = np.zeros(len(self.dims), dtype=np.int64)

    @property
    def weights(self):
        return list(self.W)

    @property
    def feedback(self):
        return list(self.G)[:-1]

    def set_weights(self, weights):
        for li, w in enumerate(weights):
            if w.shape != self.W[li].shape:
                raise ValueError(f"layer {li}: expected {self.W[li].shape}, got {w.shape}")
            self.W[li][...] = w

    def clone(self):
        other = object.__new__(ContinuousNetwork)
        other.dims = self.dims
        other.cfg = self.cfg
        other.seed = self.seed
        other.t = self.t
        other.W = List([w.copy() for w in self.W])
        other.G = List([g.copy() for g in self.G])
        other.V = List([v.copy() for v in self.V])
        other.U = List([v.copy() for v in self.U])
        other.I = List([v.copy() for v in self.I])
        other.refr = List([v.copy() for v in self.refr])
        other.drefr = self.drefr.copy()
        other.vpos, other.vneg = self.vpos.copy(), self.vneg.copy()
        other.epos, other.eneg = self.epos.copy(), self.eneg.copy()
        other._bufs = List([np.zeros(n, dtype=np.int64) for n in self.dims])
        other._nbuf = np.zeros(len(self.dims), dtype=np.int64)
        return other

    def fanout(self):
        """SynOps caused by one spike of each layer (the last layer has none)."""
        return list(self.dims[1:]) + [0]

    def run(self, image, label=-1, duration=250.0, learn=False, gate=50.0, offset=0.0,
            max_first=64, log=False, error_on=None):
        """Present ``image`` for ``duration`` ms and return a :class:`SampleResult`.

        ``label < 0`` presents no label.  Plasticity, when ``learn`` is set,
        stays off for the first ``gate`` ms.  Output spikes at or after
        ``offset`` ms are recorded in order (up to ``max_first``).
        """
        cfg = self.cfg
        nrn = cfg.neuron
        dt = cfg.dt
        n_steps = int(round(duration / dt))
        image = np.asarray(image, dtype=float).reshape(-1)
        if image.shape[0] != self.dims[0]:
            raise ValueError(f"image has {image.shape[0]} pixels, network expects {self.dims[0]}")
        p_data = hazard_rate(image, cfg.encoder) * dt * 1e-3
        if error_on is None:
            error_on = learn or label >= 0
        n_cls = self.dims[-1]
        counts = np.zeros(n_cls, dtype=np.int64)
        layer_spikes = np.zeros(len(self.dims), dtype=np.int64)
        f_cls = np.zeros(max_first, dtype=np.int64)
        f_step = np.zeros(max_first, dtype=np.int64)
        f_syn = np.zeros(max_first, dtype=np.int64)
        n_first = np.zeros(1, dtype=np.int64)
        stats = np.zeros(N_STATS, dtype=np.int64)
        if log:
            min_isi = max(1, hold_steps(min(nrn.tau_refr, cfg.encoder.tau_refr_data), dt))
            cap = sum(self.dims) * (n_steps // min_isi + 1) + 2 * n_cls * n_steps
        else:
            cap = 0
        log_step = np.zeros(cap, dtype=np.int64)
        log_neuron = np.zeros(cap, dtype=np.int64)
        log_layer = np.zeros(cap, dtype=np.int64)
        n_log = np.zeros(1, dtype=np.int64)
        noise = cfg.noise
        p_thr = rng.bernoulli_threshold(noise.p_blankout)
        pl = cfg.plasticity
        _run(self.W, self.G, self.V, self.U, self.I, self.refr, self.drefr, p_data,
             self.vpos, self.vneg, self.epos, self.eneg, self._bufs, self._nbuf,
             self.t, n_steps, self.seed, dt, nrn.C, nrn.g_V, nrn.g_U, nrn.V_T,
             hold_steps(nrn.tau_refr, dt), 1.0 - dt / nrn.tau_syn,
             nrn.kick(noise.sigma_w), noise.bg_rate * dt * 1e-3, p_thr, noise.p_blankout < 1.0,
             hold_steps(cfg.encoder.tau_refr_data, dt) - 1, int(label),
             hold_steps(cfg.label_period, dt), nrn.kick(cfg.error.w_L), cfg.error.V_T_E,
             cfg.error_bias, nrn.kick(cfg.error.w_E), nrn.kick(1.0), pl.eta, pl.b_min, pl.b_max,
             bool(learn and pl.enabled), bool(error_on), int(round(gate / dt)),
             int(round(offset / dt)), counts, layer_spikes, f_cls, f_step, f_syn, n_first,
             stats, log_step, log_neuron, log_layer, n_log, bool(log))
        if stats[ST_LOG_OVERFLOW]:
            raise RuntimeError("spike log capacity exceeded")
        t_start = self.t
        self.t += n_steps
        nf = int(n_first[0])
        res = SampleResult(counts, layer_spikes, f_cls[:nf].copy(), f_step[:nf].copy(),
                           f_syn[:nf].copy(), stats)
        if log:
            nl = int(n_log[0])
            out = np.zeros(nl, dtype=LOG_DTYPE)
            out["step"] = log_step[:nl] - t_start
            out["neuron"] = log_neuron[:nl]
            out["layer"] = log_layer[:nl]
            res.log = out
        return res
