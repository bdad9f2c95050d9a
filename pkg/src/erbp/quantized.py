"""Bit-accurate fixed-point emulation of a digital eRBP learning core.

States are signed 16-bit with saturating arithmetic, weights signed 8-bit,
and every coupling is a power-of-two shift applied with
:func:`erbp.fixedpoint.diamond`.  The integer path is exact, so a seed and a
parameter set fix every weight bit on any platform.

Per step ``t`` (all right-hand sides read the state at ``t``)::

    V <- V - m(a_V <> V, V) + a_IV <> I + b_V         (held at V_reset while refractory)
    U <- U - m(a_U <> U, U) + sum_k g_U <> wE_ik (sE+_k - sE-_k)
    I <- I - m(a_syn <> I, I) + sum_j xi * (g_I <> w_ij) s_j
    w_ij <- clip(w_ij + (eta <> U_i) * [b_min < I_i < b_max] * xi * s_j, -128, 127)

A neuron spikes when ``V >= V_T`` and is reset to ``V_reset``.  Error
neurons leak with ``a_E`` (default ``a_V``), integrate ``(g_E <> w_L)(s^P - s^L)``, are clamped
at zero and reset by subtracting ``V_T^E``.
"""
import struct
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from numba import njit
from numba.typed import List

from . import rng
from .fixedpoint import (
    STATE_MAX, STATE_MIN, WEIGHT_MAX, WEIGHT_MIN, check_shift, diamond, leak_m,
)

MAGIC = b"ERBPQ001"


@dataclass(frozen=True)
class QuantParams:
    # state couplings
    a_V: int = -3
    a_U: int = -7
    a_syn: int = -6
    a_IV: int = 4
    # weight gains; g_V is carried for completeness (no weight targets V directly)
    g_V: int = -3
    g_U: int = 3
    g_I: int = 0
    g_E: int = 4
    V_T: int = 32767
    V_T_E: int = 1025
    V_reset: int = 32766
    b_V: int = 1000
    tau_refr: int = 39  # steps
    label_period: int = 40  # steps between label spikes
    a_E: Optional[int] = None  # error-neuron leak; None = a_V
    eta: int = -10
    p_blankout: float = 0.6
    b_min: int = -2560
    b_max: int = 2560
    w_L: int = 65  # label/prediction weight onto error neurons
    w_E: int = 64  # error neuron weight onto prediction dendrites
    data_rate: float = 25.0  # spikes per 1000 steps at full intensity
    init_gain: float = 200.0  # initial weights U(+-init_gain * sqrt(6 / (rows + cols)))
    fb_gain: float = 100.0  # feedback weights U(+-fb_gain * sqrt(6 / (rows + cols)))
    dt: float = 1.0 / 6.0  # ms per step; 1500 steps per 250 ms sample

    def __post_init__(self):
        for name in ("a_V", "a_U", "a_syn", "a_IV", "g_V", "g_U", "g_I", "g_E", "eta"):
            check_shift(getattr(self, name))
        if self.a_E is not None:
            check_shift(self.a_E)
        for name in ("V_T", "V_T_E", "V_reset", "b_V", "b_min", "b_max"):
            v = getattr(self, name)
            if not STATE_MIN <= v <= STATE_MAX:
                raise ValueError(f"{name}={v} does not fit a signed 16-bit state")
        for name in ("w_L", "w_E"):
            if not WEIGHT_MIN <= getattr(self, name) <= WEIGHT_MAX:
                raise ValueError(f"{name} does not fit a signed 8-bit weight")
        if not self.V_reset < self.V_T:
            raise ValueError("V_reset must be below V_T")
        if self.tau_refr < 0 or self.label_period < 1:
            raise ValueError("tau_refr must be >= 0 and label_period >= 1")
        if not self.b_min < self.b_max:
            raise ValueError("b_min must be smaller than b_max")
        if not 0.0 < self.p_blankout <= 1.0:
            raise ValueError("p_blankout must be in (0, 1]")

    @property
    def a_err(self):
        return self.a_V if self.a_E is None else self.a_E

    def steps(self, ms):
        return int(round(ms / self.dt))


@dataclass
class QuantLayerState:
    V: np.ndarray
    U: np.ndarray
    I: np.ndarray
    refr: np.ndarray

    @classmethod
    def zeros(cls, n):
        z = lambda: np.zeros(n, dtype=np.int64)  # noqa: E731
        return cls(z(), z(), z(), z())

    def copy(self):
        return QuantLayerState(self.V.copy(), self.U.copy(), self.I.copy(), self.refr.copy())


@njit(cache=True)
def _sat(x, sat):
    if x > STATE_MAX:
        sat[0] += 1
        return STATE_MAX
    if x < STATE_MIN:
        sat[0] += 1
        return STATE_MIN
    return x


@njit(cache=True)
def _leak(a, x):
    return x - leak_m(diamond(a, x), x)


@njit(cache=True)
def _integrate_layer(V, U, I, refr, pre, npre, W, fbw, epos, eneg, one_to_one, a_V, a_U,
                     a_syn, a_IV, g_U, g_I, V_T, V_reset, b_V, tau_refr, blank, p_thr,
                     seed, t, li, out, sat):
    """Advance one layer from t to t+1; returns the number of spikes written to ``out``."""
    n_post = V.shape[0]
    n_cls = epos.shape[0]
    # V reads I[t]
    nout = 0
    for i in range(n_post):
        if refr[i] > 0:
            refr[i] -= 1
            V[i] = V_reset
            continue
        v = _sat(_leak(a_V, V[i]) + diamond(a_IV, I[i]) + b_V, sat)
        if v >= V_T:
            v = V_reset
            refr[i] = tau_refr
            out[nout] = i
            nout += 1
        V[i] = v
    for i in range(n_post):
        u = _leak(a_U, U[i])
        if one_to_one:
            if epos[i]:
                u += diamond(g_U, fbw[i, 0])
            if eneg[i]:
                u -= diamond(g_U, fbw[i, 0])
        else:
            for k in range(n_cls):
                if epos[k]:
                    u += diamond(g_U, fbw[i, k])
                if eneg[k]:
                    u -= diamond(g_U, fbw[i, k])
        U[i] = _sat(u, sat)
        I[i] = _leak(a_syn, I[i])
    for a in range(npre):
        j = pre[a]
        for i in range(n_post):
            if blank and not rng.bernoulli(seed, rng.BLANKOUT + 16 * li, t, j * n_post + i, p_thr):
                continue
            I[i] += diamond(g_I, W[j, i])
    for i in range(n_post):
        I[i] = _sat(I[i], sat)
    return nout


@njit(cache=True)
def _error_layer(vpos, vneg, spos, sneg, pred, lab, a_V, drive, V_T_E):
    for k in range(vpos.shape[0]):
        d = drive * (pred[k] - lab[k])
        vp = _leak(a_V, vpos[k]) + d
        vn = _leak(a_V, vneg[k]) - d
        if vp < 0:
            vp = 0
        if vn < 0:
            vn = 0
        if vp > STATE_MAX:
            vp = STATE_MAX
        if vn > STATE_MAX:
            vn = STATE_MAX
        spos[k] = vp >= V_T_E
        sneg[k] = vn >= V_T_E
        if spos[k]:
            vp -= V_T_E
        if sneg[k]:
            vn -= V_T_E
        vpos[k] = vp
        vneg[k] = vn


@njit(cache=True)
def _plasticity(W, pre, npre, U, I, eta, b_min, b_max, blank, p_thr, seed, t, li, in_window, stats):
    n_post = U.shape[0]
    for a in range(npre):
        j = pre[a]
        for i in range(n_post):
            if blank and not rng.bernoulli(seed, rng.BLANKOUT + 16 * li, t, j * n_post + i, p_thr):
                continue
            stats[0] += 2
            if b_min < I[i] and I[i] < b_max:
                if in_window:
                    stats[2] += 1
                    continue
                w = W[j, i] + diamond(eta, U[i])
                if w > WEIGHT_MAX:
                    w = WEIGHT_MAX
                elif w < WEIGHT_MIN:
                    w = WEIGHT_MIN
                W[j, i] = w
                stats[1] += 1


@njit(cache=True, nogil=True)
def _run(Ws, Fs, Vs, Us, Is, refrs, spk, nspk, vpos, vneg, epos, eneg, data_thr, t0, n_steps,
         seed, a_V, a_U, a_syn, a_IV, g_U, g_I, g_E, V_T, V_reset, b_V, tau_refr, a_E, V_T_E, w_L,
         eta, b_min, b_max, blank, p_thr, label, label_period, learn, error_on, gate_steps,
         offset_steps, counts, layer_spikes, f_cls, f_step, f_syn, n_first, stats, sat,
         log_step, log_neuron, log_layer, n_log, do_log):
    n_w = len(Ws)
    n_in = data_thr.shape[0]
    n_cls = epos.shape[0]
    synops = 0
    nf = 0
    nl = 0
    pred = np.zeros(n_cls, dtype=np.int64)
    lab = np.zeros(n_cls, dtype=np.int64)
    drive = diamond(g_E, w_L)
    new_pos = np.zeros(n_cls, dtype=np.bool_)
    new_neg = np.zeros(n_cls, dtype=np.bool_)
    silent = np.zeros(n_cls, dtype=np.bool_)
    for s in range(n_steps):
        t = t0 + s
        # spikes emitted at step t: data drawn now, other layers carried from t-1 -> t
        nd = 0
        b0 = spk[0]
        for j in range(n_in):
            if data_thr[j] > 0 and rng.bernoulli(seed, rng.DATA, t, j, data_thr[j]):
                b0[nd] = j
                nd += 1
        nspk[0] = nd
        for li in range(n_w + 1):
            n = nspk[li]
            layer_spikes[li] += n
            if li < n_w:
                synops += n * Vs[li].shape[0]
            if do_log:
                for a in range(n):
                    if nl < log_step.shape[0]:
                        log_step[nl] = t
                        log_neuron[nl] = spk[li][a]
                        log_layer[nl] = li
                        nl += 1
                    else:
                        stats[3] = 1
        outb = spk[n_w]
        for a in range(nspk[n_w]):
            k = outb[a]
            counts[k] += 1
            if s >= offset_steps and nf < f_cls.shape[0]:
                f_cls[nf] = k
                f_step[nf] = s
                f_syn[nf] = synops
                nf += 1
        # plasticity reads U[t], I[t] and the presynaptic spikes of step t
        if learn:
            for li in range(n_w):
                _plasticity(Ws[li], spk[li], nspk[li], Us[li], Is[li], eta, b_min, b_max,
                            blank, p_thr, seed, t, li, s < gate_steps, stats)
        # error neurons read the prediction and label spikes of step t
        if error_on:
            for k in range(n_cls):
                pred[k] = 0
                lab[k] = 0
            for a in range(nspk[n_w]):
                pred[outb[a]] = 1
            if label >= 0 and t % label_period == 0:
                lab[label] = 1
            _error_layer(vpos, vneg, new_pos, new_neg, pred, lab, a_E, drive, V_T_E)
        # layers: state t -> t+1; new spikes overwrite the buffers top-down so each
        # layer still reads its presynaptic spikes of step t
        for li in range(n_w - 1, -1, -1):
            ep = epos if error_on else silent
            en = eneg if error_on else silent
            nspk[li + 1] = _integrate_layer(
                Vs[li], Us[li], Is[li], refrs[li], spk[li], nspk[li], Ws[li], Fs[li], ep, en,
                li == n_w - 1, a_V, a_U, a_syn, a_IV, g_U, g_I, V_T, V_reset, b_V, tau_refr,
                blank, p_thr, seed, t, li, spk[li + 1], sat)
        if error_on:
            for k in range(n_cls):
                epos[k] = new_pos[k]
                eneg[k] = new_neg[k]
                if epos[k]:
                    stats[4] += 1
                if eneg[k]:
                    stats[5] += 1
    n_first[0] = nf
    n_log[0] = nl
    stats[6] += synops


def init_weights(seed, layer, rows, cols, bound):
    """Integer uniform weights in [-bound, bound] from the counter-based generator."""
    bound = int(bound)
    if bound == 0:
        return np.zeros((rows, cols), dtype=np.int64)
    idx = np.arange(rows * cols)
    u = np.array([rng.hash4(seed, rng.INIT, layer, int(i)) for i in idx], dtype=np.uint64)
    w = (u % np.uint64(2 * bound + 1)).astype(np.int64) - bound
    return w.reshape(rows, cols)


@dataclass
class QuantResult:
    counts: np.ndarray
    layer_spikes: np.ndarray
    first_classes: np.ndarray
    first_steps: np.ndarray
    first_synops: np.ndarray
    stats: np.ndarray  # comparisons, additions, gate-window updates, log overflow, E+, E-, synops
    saturations: int = 0
    log: np.ndarray = None


class QuantNetwork:
    """Feed-forward quantized eRBP network; weights stored (n_pre, n_post) as int8 values."""

    def __init__(self, dims, params=None, seed=0, weights=None):
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) < 2:
            raise ValueError("need at least a data and a prediction layer")
        self.params = params or QuantParams()
        self.seed = int(seed)
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        p = self.params
        n_cls = self.dims[-1]
        if weights is None:
            weights = []
            for li, (a, b) in enumerate(zip(self.dims[:-1], self.dims[1:])):
                bound = min(WEIGHT_MAX, round(p.init_gain * np.sqrt(6.0 / (a + b))))
                weights.append(init_weights(self.seed, li, a, b, bound))
        fbs = []
        for li, n in enumerate(self.dims[1:-1]):
            bound = min(WEIGHT_MAX, round(p.fb_gain * np.sqrt(6.0 / (n + 2 * n_cls))))
            fbs.append(init_weights(self.seed, 1000 + li, n, n_cls, bound))
        # eta is a shift, so the descent sign lives here: E+ (prediction above label) lowers U
        fbs.append(np.full((n_cls, 1), -p.w_E, dtype=np.int64))
        self.W = List([np.array(w, dtype=np.int64, order="C") for w in weights])
        for li, w in enumerate(self.W):
            if w.shape != (self.dims[li], self.dims[li + 1]):
                raise ValueError(f"layer {li}: weight shape {w.shape} does not match dims")
            if w.min(initial=0) < WEIGHT_MIN or w.max(initial=0) > WEIGHT_MAX:
                raise ValueError("weights must fit in signed 8 bits")
        self.F = List(fbs)
        self.t = 0
        self.reset_state()

    def reset_state(self):
        layers = self.dims[1:]
        self.V = List([np.zeros(n, dtype=np.int64) for n in layers])
        self.U = List([np.zeros(n, dtype=np.int64) for n in layers])
        self.I = List([np.zeros(n, dtype=np.int64) for n in layers])
        self.refr = List([np.zeros(n, dtype=np.int64) for n in layers])
        n_cls = self.dims[-1]
        self.vpos = np.zeros(n_cls, dtype=np.int64)
        self.vneg = np.zeros(n_cls, dtype=np.int64)
        self.epos = np.zeros(n_cls, dtype=np.bool_)
        self.eneg = np.zeros(n_cls, dtype=np.bool_)
        self._spk = List([np.zeros(n, dtype=np.int64) for n in self.dims])
        self._nspk = np.zeros(len(self.dims), dtype=np.int64)

    @property
    def weights(self):
        return list(self.W)

    @property
    def feedback(self):
        return list(self.F)[:-1]

    def clone(self):
        other = object.__new__(QuantNetwork)
        other.dims, other.params, other.seed, other.t = self.dims, self.params, self.seed, self.t
        other.W = List([w.copy() for w in self.W])
        other.F = List([f.copy() for f in self.F])
        other.V = List([v.copy() for v in self.V])
        other.U = List([v.copy() for v in self.U])
        other.I = List([v.copy() for v in self.I])
        other.refr = List([v.copy() for v in self.refr])
        other.vpos, other.vneg = self.vpos.copy(), self.vneg.copy()
        other.epos, other.eneg = self.epos.copy(), self.eneg.copy()
        other._spk = List([v.copy() for v in self._spk])
        other._nspk = self._nspk.copy()
        return other

    def data_thresholds(self, image):
        image = np.asarray(image, dtype=float).reshape(-1)
        if image.shape[0] != self.dims[0]:
            raise ValueError(f"image has {image.shape[0]} pixels, network expects {self.dims[0]}")
        if image.size and (image.min() < 0.0 or image.max() > 1.0):
            raise ValueError("pixel intensities must lie in [0, 1]")
        p = self.params.data_rate * 1e-3 * image
        return np.array([rng.bernoulli_threshold(min(1.0, x)) for x in p], dtype=np.int64)

    def run(self, image, label=-1, duration=250.0, learn=False, gate=50.0, offset=0.0,
            max_first=64, log=False, error_on=None):
        """Same protocol as :meth:`erbp.snn.ContinuousNetwork.run`; times in ms."""
        p = self.params
        n_steps = p.steps(duration)
        thr = self.data_thresholds(image)
        if error_on is None:
            error_on = learn or label >= 0
        n_cls = self.dims[-1]
        counts = np.zeros(n_cls, dtype=np.int64)
        layer_spikes = np.zeros(len(self.dims), dtype=np.int64)
        f_cls = np.zeros(max_first, dtype=np.int64)
        f_step = np.zeros(max_first, dtype=np.int64)
        f_syn = np.zeros(max_first, dtype=np.int64)
        n_first = np.zeros(1, dtype=np.int64)
        stats = np.zeros(7, dtype=np.int64)
        sat = np.zeros(1, dtype=np.int64)
        cap = 0
        if log:
            # data neurons have no refractory period; others fire at most once per tau_refr + 1
            cap = self.dims[0] * n_steps + sum(self.dims[1:]) * (n_steps // (p.tau_refr + 1) + 1)
        log_step = np.zeros(cap, dtype=np.int64)
        log_neuron = np.zeros(cap, dtype=np.int64)
        log_layer = np.zeros(cap, dtype=np.int64)
        n_log = np.zeros(1, dtype=np.int64)
        _run(self.W, self.F, self.V, self.U, self.I, self.refr, self._spk, self._nspk,
             self.vpos, self.vneg, self.epos, self.eneg, thr, self.t, n_steps, self.seed,
             p.a_V, p.a_U, p.a_syn, p.a_IV, p.g_U, p.g_I, p.g_E, p.V_T, p.V_reset, p.b_V,
             p.tau_refr, p.a_err, p.V_T_E, p.w_L, p.eta, p.b_min, p.b_max, p.p_blankout < 1.0,
             rng.bernoulli_threshold(p.p_blankout), int(label), p.label_period,
             bool(learn), bool(error_on), p.steps(gate) if learn else 0, p.steps(offset),
             counts, layer_spikes, f_cls, f_step, f_syn, n_first, stats, sat,
             log_step, log_neuron, log_layer, n_log, bool(log))
        if stats[3]:
            raise RuntimeError("spike log capacity exceeded")
        t_start = self.t
        self.t += n_steps
        nf = int(n_first[0])
        res = QuantResult(counts, layer_spikes, f_cls[:nf].copy(), f_step[:nf].copy(),
                          f_syn[:nf].copy(), stats, int(sat[0]))
        if log:
            from .snn import LOG_DTYPE

            nl = int(n_log[0])
            out = np.zeros(nl, dtype=LOG_DTYPE)
            out["step"] = log_step[:nl] - t_start
            out["neuron"] = log_neuron[:nl]
            out["layer"] = log_layer[:nl]
            res.log = out
        return res


# Single-step reference operations (plain numpy/python, used by tests).

def qstep_hidden(state, in_spikes, err_pos, err_neg, W, W_E, params=QuantParams(), seed=0,
                 step=0, layer_id=0):
    """One step of a quantized hidden layer.  ``W`` is (n_pre, n_post), ``W_E`` (n_post, n_cls).

    Returns ``(new_state, spikes)``.
    """
    p = params
    s = state.copy()
    in_spikes = np.asarray(in_spikes, dtype=bool)
    W = np.asarray(W, dtype=np.int64)
    if W.shape != (in_spikes.shape[0], s.V.shape[0]):
        raise ValueError(f"weight shape {W.shape} does not match layer sizes")
    spikes = np.zeros(s.V.shape[0], dtype=bool)
    for i in range(s.V.shape[0]):
        if s.refr[i] > 0:
            s.refr[i] -= 1
            s.V[i] = p.V_reset
            continue
        v = _clip16(s.V[i] - leak_m(diamond(p.a_V, s.V[i]), s.V[i]) + diamond(p.a_IV, s.I[i]) + p.b_V)
        if v >= p.V_T:
            spikes[i] = True
            v = p.V_reset
            s.refr[i] = p.tau_refr
        s.V[i] = v
    ep = np.asarray(err_pos, dtype=np.int64)
    en = np.asarray(err_neg, dtype=np.int64)
    for i in range(s.U.shape[0]):
        u = s.U[i] - leak_m(diamond(p.a_U, s.U[i]), s.U[i])
        for k in range(ep.shape[0]):
            u += diamond(p.g_U, int(W_E[i, k])) * (int(ep[k]) - int(en[k]))
        s.U[i] = _clip16(u)
        s.I[i] = s.I[i] - leak_m(diamond(p.a_syn, s.I[i]), s.I[i])
    thr = rng.bernoulli_threshold(p.p_blankout)
    n_post = s.V.shape[0]
    for j in np.flatnonzero(in_spikes):
        for i in range(n_post):
            if p.p_blankout < 1.0 and not rng.bernoulli(seed, rng.BLANKOUT + 16 * layer_id, step, j * n_post + i, thr):
                continue
            s.I[i] += diamond(p.g_I, int(W[j, i]))
    s.I[:] = np.clip(s.I, STATE_MIN, STATE_MAX)
    return s, spikes


def qstep_error(v_pos, v_neg, pred_spikes, label_spikes, params=QuantParams()):
    """One step of the quantized error pairs; returns ``(v_pos, v_neg, s_pos, s_neg)``."""
    p = params
    vp = np.array(v_pos, dtype=np.int64)
    vn = np.array(v_neg, dtype=np.int64)
    sp = np.zeros(vp.shape[0], dtype=bool)
    sn = np.zeros(vp.shape[0], dtype=bool)
    _error_layer(vp, vn, sp, sn, np.asarray(pred_spikes, dtype=np.int64),
                 np.asarray(label_spikes, dtype=np.int64), p.a_err, diamond(p.g_E, p.w_L), p.V_T_E)
    return vp, vn, sp, sn


def qdata_spikes(pixels, rate_scale, seed, step):
    """Bernoulli approximation of Poisson trains with ``rate_scale * d`` spikes per 1000 steps."""
    pixels = np.asarray(pixels, dtype=float)
    if pixels.size and (pixels.min() < 0.0 or pixels.max() > 1.0):
        raise ValueError("pixel intensities must lie in [0, 1]")
    out = np.zeros(pixels.shape[0], dtype=bool)
    for j, d in enumerate(pixels):
        thr = rng.bernoulli_threshold(min(1.0, rate_scale * 1e-3 * d))
        out[j] = thr > 0 and rng.bernoulli(seed, rng.DATA, step, j, thr)
    return out


def _clip16(x):
    return int(min(max(int(x), STATE_MIN), STATE_MAX))


# Checkpoints: MAGIC, u32 layer count, u32 dims, then for each weight matrix its
# n_pre rows of n_post signed bytes (row j = fan-out of presynaptic neuron j).

def checkpoint_bytes(dims, weights):
    dims = [int(d) for d in dims]
    if len(weights) != len(dims) - 1:
        raise ValueError("need one weight matrix per consecutive layer pair")
    out = bytearray(MAGIC)
    out += struct.pack("<I", len(dims))
    out += struct.pack(f"<{len(dims)}I", *dims)
    for li, w in enumerate(weights):
        w = np.asarray(w)
        if w.shape != (dims[li], dims[li + 1]):
            raise ValueError(f"layer {li}: weight shape {w.shape} does not match dims")
        if w.min(initial=0) < WEIGHT_MIN or w.max(initial=0) > WEIGHT_MAX:
            raise ValueError("weights must fit in signed 8 bits")
        out += w.astype("<i1").tobytes()
    return bytes(out)


def write_checkpoint(path, dims, weights):
    data = checkpoint_bytes(dims, weights)
    with open(path, "wb") as f:
        f.write(data)
    return data


def parse_checkpoint(data):
    if data[:8] != MAGIC:
        raise ValueError("not an ERBPQ001 checkpoint")
    (n,) = struct.unpack_from("<I", data, 8)
    dims = list(struct.unpack_from(f"<{n}I", data, 12))
    off = 12 + 4 * n
    weights = []
    for a, b in zip(dims[:-1], dims[1:]):
        size = a * b
        if off + size > len(data):
            raise ValueError("checkpoint truncated")
        weights.append(np.frombuffer(data, dtype="<i1", count=size, offset=off).astype(np.int64).reshape(a, b))
        off += size
    if off != len(data):
        raise ValueError("trailing bytes in checkpoint")
    return dims, weights


def read_checkpoint(path):
    with open(path, "rb") as f:
        return parse_checkpoint(f.read())


def params_dict(params):
    return asdict(params)
