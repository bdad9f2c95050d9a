"""Continuous-time (forward Euler) spiking neurons used by eRBP.

Units: time in ms, potentials in mV, currents and weights in nA,
capacitance in pF, conductances in nS.  A weight ``w`` delivered as a
delta pulse to a compartment of capacitance ``C`` moves it by
``1000 * w / C`` mV.

These functions advance one layer by one time step and are the readable
reference for the compiled network kernel in :mod:`erbp.snn`.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from . import rng

PA_PER_NA = 1000.0


@dataclass(frozen=True)
class NeuronParams:
    C: float = 1.0  # pF
    g_V: float = 1.0  # nS
    g_U: float = 5.0  # nS
    V_T: float = 100.0  # mV
    tau_refr: float = 3.9  # ms
    tau_syn: float = 4.0  # ms

    def __post_init__(self):
        for name in ("C", "g_V", "g_U", "V_T", "tau_refr", "tau_syn"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def tau_m(self):
        return self.C / self.g_V

    def kick(self, w):
        """Potential jump (mV) caused by a delta pulse of weight ``w`` (nA)."""
        return PA_PER_NA * w / self.C


@dataclass(frozen=True)
class NoiseParams:
    sigma_w: float = 50e-3  # nA, additive Poisson amplitude
    bg_rate: float = 1000.0  # Hz
    p_blankout: float = 1.0  # probability a presynaptic spike is transmitted

    def __post_init__(self):
        if not 0.0 < self.p_blankout <= 1.0:
            raise ValueError("p_blankout must be in (0, 1]")
        if self.sigma_w < 0 or self.bg_rate < 0:
            raise ValueError("sigma_w and bg_rate must be non-negative")


ERBP_NOISE = NoiseParams(sigma_w=50e-3, p_blankout=1.0)
PERBP_NOISE = NoiseParams(sigma_w=0.0, p_blankout=0.65)


@dataclass(frozen=True)
class DataEncoderParams:
    beta: float = 0.5
    gamma: float = -0.215
    tau_refr_data: float = 4.0  # ms

    def __post_init__(self):
        if not self.tau_refr_data > 0:
            raise ValueError("tau_refr_data must be positive")


@dataclass(frozen=True)
class ErrorParams:
    w_L: float = 90e-3  # nA, label/prediction weight onto error neurons
    w_E: float = 90e-3  # nA, error neuron weight onto prediction dendrites
    V_T_E: float = 100.0  # mV


@dataclass
class LayerState:
    V: np.ndarray
    U: np.ndarray
    I: np.ndarray
    refr: np.ndarray  # remaining hold steps

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n), np.zeros(n), np.zeros(n, dtype=np.int64))

    def copy(self):
        return LayerState(self.V.copy(), self.U.copy(), self.I.copy(), self.refr.copy())


@dataclass
class ErrorLayerState:
    V_pos: np.ndarray
    V_neg: np.ndarray

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n))


@dataclass
class FeedbackMatrix:
    """Random error-to-dendrite weights, one row per hidden neuron.

    Positive and negative error neurons use the same magnitudes with
    opposite signs, so the summed weight each neuron receives is zero.
    """
    g_pos: np.ndarray
    g_neg: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.g_neg is None:
            self.g_neg = self.g_pos.copy()
        if self.g_pos.shape != self.g_neg.shape:
            raise ValueError("g_pos and g_neg must have the same shape")

    @classmethod
    def random(cls, n_hidden, n_classes, seed=0, scale=6.0):
        bound = math.sqrt(scale / (n_hidden + 2 * n_classes))
        g = np.random.default_rng(seed).uniform(-bound, bound, size=(n_hidden, n_classes))
        return cls(g, g.copy())

    def net_weight(self):
        # per neuron: sum of +g over E+ synapses and -g over E- synapses
        return self.g_pos.sum(axis=1) - self.g_neg.sum(axis=1)


def hold_steps(tau_refr, dt):
    return int(round(tau_refr / dt))


def _integrate_soma(state, params, noise, seed, step, dt, stream_offset=0):
    n = state.V.shape[0]
    spikes = np.zeros(n, dtype=bool)
    p_bg = noise.bg_rate * dt * 1e-3
    kick = params.kick(noise.sigma_w)
    hold = hold_steps(params.tau_refr, dt)
    for i in range(n):
        if state.refr[i] > 0:
            state.refr[i] -= 1
            state.V[i] = 0.0
            continue
        v = state.V[i] + dt / params.C * (-params.g_V * state.V[i] + PA_PER_NA * state.I[i])
        if kick > 0 and rng.uniform(seed, rng.BACKGROUND, step, stream_offset + i) < p_bg:
            sign = 1.0 if rng.uniform(seed, rng.BACKGROUND_SIGN, step, stream_offset + i) < 0.5 else -1.0
            v += sign * kick
        if v >= params.V_T:
            spikes[i] = True
            v = 0.0
            state.refr[i] = hold
        state.V[i] = v
    return spikes


def _integrate_current(state, in_spikes, W, params, noise, seed, step, dt, layer_id=0):
    state.I *= 1.0 - dt / params.tau_syn
    pre = np.flatnonzero(in_spikes)
    if noise.p_blankout >= 1.0:
        if pre.size:
            state.I += W[pre].sum(axis=0)
        return None
    thr = rng.bernoulli_threshold(noise.p_blankout)
    n_post = W.shape[1]
    passed = np.zeros((pre.size, n_post), dtype=bool)
    for a, j in enumerate(pre):
        for i in range(n_post):
            if rng.bernoulli(seed, rng.BLANKOUT + 16 * layer_id, step, j * n_post + i, thr):
                passed[a, i] = True
                state.I[i] += W[j, i]
    return passed


def step_hidden(state, in_spikes, err_pos, err_neg, W, fb, params=NeuronParams(),
                noise=NoiseParams(), seed=0, step=0, dt=0.1, layer_id=0):
    """Advance a hidden layer by one step.

    ``W`` has shape (n_pre, n_post).  Returns ``(new_state, spikes, passed)``;
    ``passed`` is the per-synapse blank-out mask of this step (``None`` when
    every spike is transmitted).
    """
    in_spikes = np.asarray(in_spikes, dtype=bool)
    if W.shape != (in_spikes.shape[0], state.V.shape[0]):
        raise ValueError(f"weight shape {W.shape} does not match layer sizes")
    if fb.g_pos.shape != (state.V.shape[0], np.shape(err_pos)[0]):
        raise ValueError("feedback matrix does not match layer and error sizes")
    s = state.copy()
    passed = _integrate_current(s, in_spikes, W, params, noise, seed, step, dt, layer_id)
    s.U += dt / params.C * (-params.g_U * s.U)
    drive = fb.g_pos @ np.asarray(err_pos, dtype=float) - fb.g_neg @ np.asarray(err_neg, dtype=float)
    s.U += params.kick(drive)
    spikes = _integrate_soma(s, params, noise, seed, step, dt, stream_offset=layer_id << 20)
    return s, spikes, passed


def step_prediction(state, in_spikes, err_pos, err_neg, W, w_E=90e-3, params=NeuronParams(),
                    noise=NoiseParams(), seed=0, step=0, dt=0.1, layer_id=0):
    """Same as :func:`step_hidden` with one-to-one error wiring per class."""
    in_spikes = np.asarray(in_spikes, dtype=bool)
    if W.shape != (in_spikes.shape[0], state.V.shape[0]):
        raise ValueError(f"weight shape {W.shape} does not match layer sizes")
    if np.shape(err_pos)[0] != state.V.shape[0]:
        raise ValueError("one error pair per prediction neuron is required")
    s = state.copy()
    passed = _integrate_current(s, in_spikes, W, params, noise, seed, step, dt, layer_id)
    s.U += dt / params.C * (-params.g_U * s.U)
    s.U += params.kick(w_E * (np.asarray(err_pos, dtype=float) - np.asarray(err_neg, dtype=float)))
    spikes = _integrate_soma(s, params, noise, seed, step, dt, stream_offset=layer_id << 20)
    return s, spikes, passed


def step_error(state, pred_spikes, label_spikes, w_L, V_T_E, bias=0.0):
    """Non-leaky integrate-and-fire error pair.

    ``w_L`` is the potential jump per spike in the error neurons' own units.
    Potentials are clamped at zero and reset by subtracting the threshold.
    """
    diff = np.asarray(pred_spikes, dtype=float) - np.asarray(label_spikes, dtype=float)
    v_pos = np.maximum(state.V_pos + w_L * diff + bias, 0.0)
    v_neg = np.maximum(state.V_neg - w_L * diff + bias, 0.0)
    s_pos = v_pos > V_T_E
    s_neg = v_neg > V_T_E
    v_pos = np.where(s_pos, v_pos - V_T_E, v_pos)
    v_neg = np.where(s_neg, v_neg - V_T_E, v_neg)
    return ErrorLayerState(v_pos, v_neg), s_pos, s_neg


def hazard_rate(pixels, enc=DataEncoderParams()):
    """Firing rate (Hz) of a data neuron outside its refractory period."""
    return 1e3 / enc.tau_refr_data * np.exp(enc.beta * np.asarray(pixels, dtype=float) + enc.gamma)


def data_spikes(pixels, last_spike, t, enc=DataEncoderParams(), seed=0, step=0, dt=0.1):
    """One step of the hazard-function encoder.

    ``last_spike`` holds each neuron's last spike time in ms (``-inf`` if
    none) and is updated in place.
    """
    pixels = np.asarray(pixels, dtype=float)
    if pixels.size and (pixels.min() < 0.0 or pixels.max() > 1.0):
        raise ValueError("pixel intensities must lie in [0, 1]")
    p = hazard_rate(pixels, enc) * dt * 1e-3
    # small tolerance so t - t' == tau is not lost to rounding
    ready = (t - last_spike) >= enc.tau_refr_data - 1e-9
    u = rng.uniform_array(seed, rng.DATA, step, pixels.shape[0])
    spikes = ready & (u < p)
    last_spike[spikes] = t
    return spikes


def label_spikes(label, step, period_steps, n_classes=10):
    """Regular label train on a global clock: one spike every ``period_steps``."""
    if not 0 <= label < n_classes:
        raise ValueError(f"label {label} outside [0, {n_classes})")
    out = np.zeros(n_classes, dtype=bool)
    out[label] = step % period_steps == 0
    return out


def predicted_rate(mu, sigma_ou, tau_refr):
    """Stationary rate (Hz) under the diffusion approximation.

    ``mu`` is the mean free membrane potential relative to threshold and
    ``sigma_ou`` its standard deviation (same units); ``tau_refr`` in ms.
    """
    if not sigma_ou > 0:
        raise ValueError("sigma_ou must be positive")
    x = np.asarray(mu, dtype=float) / (sigma_ou * math.sqrt(2.0))
    erf = np.vectorize(math.erf, otypes=[float])(x)
    out = 1e3 / tau_refr * 0.5 * (1.0 + erf)
    return float(out) if np.ndim(out) == 0 else out


def gaussian_derivative(mu, sigma_ou):
    mu = np.asarray(mu, dtype=float)
    out = np.exp(-mu**2 / (2 * sigma_ou**2)) / (sigma_ou * math.sqrt(2 * math.pi))
    return float(out) if np.ndim(out) == 0 else out


def ou_stats(mu_I, w_bg, rate_bg, params=NeuronParams()):
    """Mean and std (mV) of the free membrane potential, relative to threshold,
    when the synaptic current is ``mu_I`` plus balanced Poisson background of
    weight ``w_bg`` (nA) at ``rate_bg`` (Hz) filtered by the synapse.

    Valid when the membrane follows the current, i.e. ``tau_syn >> tau_m``.
    """
    nu = rate_bg * 1e-3  # per ms
    var_I = w_bg**2 * nu * params.tau_syn / 2.0
    scale = PA_PER_NA / params.g_V
    if params.tau_syn < 5 * params.tau_m:
        raise ValueError("diffusion approximation needs tau_syn >> tau_m")
    # the membrane low-pass filter shrinks the current variance slightly
    filt = params.tau_syn / (params.tau_syn + params.tau_m)
    return scale * mu_I - params.V_T, scale * math.sqrt(var_I * filt)


@njit(cache=True)
def _noisy_neuron(mu_I, sd_I, w_bg, p_bg, n_steps, n_trials, dt, C, g_V, V_T, syn_decay, hold, seed):
    n = 0
    for k in range(n_trials):
        # start each trial from the stationary current distribution (Box-Muller)
        u1 = 1.0 - rng.uniform(seed, rng.PATTERN, k, 0)
        u2 = rng.uniform(seed, rng.PATTERN, k, 1)
        I = mu_I + sd_I * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        V = 0.0
        refr = 0
        for s in range(n_steps):
            t = k * n_steps + s
            # background spikes reach the synapse, not the membrane
            I = mu_I + (I - mu_I) * syn_decay
            if rng.uniform(seed, rng.BACKGROUND, t, 0) < p_bg:
                if rng.uniform(seed, rng.BACKGROUND_SIGN, t, 0) < 0.5:
                    I += w_bg
                else:
                    I -= w_bg
            if refr > 0:
                refr -= 1
                V = 0.0
                continue
            V += dt / C * (-g_V * V + PA_PER_NA * I)
            if V >= V_T:
                n += 1
                V = 0.0
                refr = hold
    return n


def simulate_rate(mu_I, w_bg, rate_bg, params=NeuronParams(), duration=100.0, trials=1000,
                  dt=0.01, seed=0):
    """Firing rate (Hz) of one neuron whose synaptic current relaxes to ``mu_I``
    and receives balanced Poisson background of weight ``w_bg`` at ``rate_bg`` Hz.

    The rate is averaged over ``trials`` independent runs of ``duration`` ms,
    each starting from the stationary distribution of the current.  The
    setting matches :func:`ou_stats`, so the two can be compared.
    """
    p_bg = rate_bg * dt * 1e-3
    if not 0.0 <= p_bg <= 1.0:
        raise ValueError("background rate too high for this dt")
    sd_I = w_bg * math.sqrt(rate_bg * 1e-3 * params.tau_syn / 2.0)
    n_steps = int(round(duration / dt))
    n = _noisy_neuron(float(mu_I), sd_I, float(w_bg), p_bg, n_steps, int(trials), dt, params.C,
                      params.g_V, params.V_T, 1.0 - dt / params.tau_syn,
                      hold_steps(params.tau_refr, dt), int(seed))
    return n / (trials * duration * 1e-3)


def with_noise(noise, **kw):
    return replace(noise, **kw)
