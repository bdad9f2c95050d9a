import numpy as np
import pytest

from erbp.continuous import (
    DataEncoderParams, ErrorLayerState, FeedbackMatrix, LayerState, NoiseParams, data_spikes,
    label_spikes, step_error, step_hidden, step_prediction,
)
from erbp.plasticity import PlasticityConfig, erbp_update
from erbp.snn import LOG_DTYPE, ContinuousNetwork, SimConfig


def _reference_run(net, image, label, n_steps):
    """Loop over the single-step operations with the network's own parameters."""
    cfg = net.cfg
    nrn, noise, dt = cfg.neuron, cfg.noise, cfg.dt
    W = [w.copy() for w in net.weights]
    fbs = [FeedbackMatrix(g.copy(), g.copy()) for g in net.feedback]
    states = [LayerState.zeros(n) for n in net.dims[1:]]
    err = ErrorLayerState.zeros(net.dims[-1])
    ep = np.zeros(net.dims[-1], dtype=bool)
    en = ep.copy()
    last = np.full(net.dims[0], -np.inf)
    counts = np.zeros(net.dims[-1], dtype=np.int64)
    period = int(round(cfg.label_period / dt))
    for t in range(n_steps):
        spikes = [data_spikes(image, last, t * dt, cfg.encoder, net.seed, t, dt)]
        masks = []
        for li, st in enumerate(states):
            if li == len(states) - 1:
                st, s, m = step_prediction(st, spikes[-1], ep, en, W[li], cfg.error.w_E, nrn, noise,
                                           net.seed, t, dt, li)
            else:
                st, s, m = step_hidden(st, spikes[-1], ep, en, W[li], fbs[li], nrn, noise,
                                       net.seed, t, dt, li)
            states[li] = st
            spikes.append(s)
            masks.append(m)
        counts += spikes[-1]
        err, ep, en = step_error(err, spikes[-1], label_spikes(label, t, period),
                                 nrn.kick(cfg.error.w_L), cfg.error.V_T_E)
        for li, st in enumerate(states):
            m = masks[li]
            W[li] = erbp_update(W[li], spikes[li], st.U, st.I, cfg.plasticity,
                                mask=None if m is None else m)
    return W, counts, states


@pytest.mark.parametrize("noise", [NoiseParams(sigma_w=50e-3, p_blankout=1.0),
                                   NoiseParams(sigma_w=0.0, p_blankout=0.65)])
def test_kernel_matches_reference_ops(noise):
    cfg = SimConfig(noise=noise, encoder=DataEncoderParams(beta=5.0, gamma=-5.0),
                    plasticity=PlasticityConfig(eta=-1e-4))
    net = ContinuousNetwork((30, 12, 10), cfg, seed=3)
    net.W[0][...] *= 4.0  # enough drive for hidden and output spikes
    net.W[1][...] *= 4.0
    image = np.linspace(0, 1, 30)
    w0 = [w.copy() for w in net.weights]
    ref = ContinuousNetwork((30, 12, 10), cfg, seed=3)
    ref.set_weights(w0)
    n_steps = 800
    res = net.run(image, label=4, duration=n_steps * cfg.dt, learn=True, gate=0.0)
    W, counts, states = _reference_run(ref, image, 4, n_steps)
    assert res.counts.sum() > 0 and res.layer_spikes[1] > 0
    assert res.counts.tolist() == counts.tolist()
    for a, b, c in zip(net.weights, W, w0):
        assert np.allclose(a, b, rtol=0, atol=1e-9)
        assert not np.array_equal(a, c)
    for li, st in enumerate(states):
        assert np.allclose(net.V[li], st.V, atol=1e-6)
        assert np.allclose(net.I[li], st.I, atol=1e-9)
        assert np.allclose(net.U[li], st.U, atol=1e-6)


def test_state_persists_and_clock_advances():
    net = ContinuousNetwork((20, 5, 10), seed=0)
    net.run(np.ones(20), duration=10.0)
    assert net.t == 100
    c = net.clone()
    a = net.run(np.ones(20), duration=10.0)
    b = c.run(np.ones(20), duration=10.0)
    assert a.counts.tolist() == b.counts.tolist() and a.layer_spikes.tolist() == b.layer_spikes.tolist()


def test_log_matches_counts():
    net = ContinuousNetwork((20, 5, 10), SimConfig(encoder=DataEncoderParams(beta=5.0, gamma=-5.0)), seed=1)
    net.W[0][...] *= 5.0
    net.W[1][...] *= 5.0
    res = net.run(np.ones(20), label=2, duration=30.0, log=True)
    assert res.log.dtype == LOG_DTYPE and LOG_DTYPE.itemsize == 9
    layers = res.log["layer"]
    assert np.bincount(layers[layers < 3], minlength=3).tolist() == res.layer_spikes.tolist()
    assert int(np.sum(layers == 250)) == res.stats[3] and int(np.sum(layers == 251)) == res.stats[4]
    assert res.log["step"].max() < 300


def test_shape_errors():
    net = ContinuousNetwork((20, 5, 10), seed=0)
    with pytest.raises(ValueError):
        net.run(np.ones(19))
    with pytest.raises(ValueError):
        net.set_weights([np.zeros((5, 5)), np.zeros((5, 10))])
    with pytest.raises(ValueError):
        ContinuousNetwork((20,))
