import math

import numpy as np
import pytest

from erbp.continuous import (
    DataEncoderParams, ErrorLayerState, FeedbackMatrix, LayerState, NeuronParams, NoiseParams,
    data_spikes, gaussian_derivative, hazard_rate, label_spikes, ou_stats, predicted_rate,
    step_error, step_hidden, step_prediction,
)

QUIET = NoiseParams(sigma_w=0.0, p_blankout=1.0)
P = NeuronParams()


def _hidden(n=3, n_in=2, n_cls=2):
    st = LayerState.zeros(n)
    W = np.zeros((n_in, n))
    fb = FeedbackMatrix(np.zeros((n, n_cls)))
    return st, W, fb


def test_params_validation():
    with pytest.raises(ValueError):
        NeuronParams(C=0.0)
    with pytest.raises(ValueError):
        NoiseParams(p_blankout=0.0)
    with pytest.raises(ValueError):
        NoiseParams(sigma_w=-1.0)
    with pytest.raises(ValueError):
        DataEncoderParams(tau_refr_data=0.0)


def test_leak_step():
    st, W, fb = _hidden(1)
    st.V[0] = 50.0
    s, spk, _ = step_hidden(st, [0, 0], [0, 0], [0, 0], W, fb, P, QUIET)
    assert s.V[0] == pytest.approx(45.0)
    assert not spk.any()
    assert st.V[0] == 50.0  # input state untouched


def test_threshold_reset_and_refractory():
    st, W, fb = _hidden(1)
    st.V[0] = 100.0
    st.I[0] = 0.1 / (1 - 0.1 / P.tau_syn)  # after decay the drive holds V exactly at threshold
    s, spk, _ = step_hidden(st, [0, 0], [0, 0], [0, 0], W, fb, P, QUIET)
    assert spk[0] and s.V[0] == 0.0
    times = [0]
    s.I[0] = 5.0
    for k in range(1, 200):
        s, spk, _ = step_hidden(s, [0, 0], [0, 0], [0, 0], W, fb, P, QUIET, step=k)
        s.I[0] = 5.0
        if spk[0]:
            times.append(k)
        elif k - times[-1] <= 39:
            assert s.V[0] == 0.0
    gaps = np.diff(times)
    assert gaps.min() * 0.1 >= P.tau_refr


def test_quiet_no_input_decays_deterministically():
    st, W, fb = _hidden(3)
    st.V[:] = [10.0, -20.0, 99.0]
    st.I[:] = [0.01, 0.0, -0.02]
    a, b = st, st
    for k in range(50):
        a, sa, _ = step_hidden(a, [0, 0], [0, 0], [0, 0], W, fb, P, QUIET, step=k)
        b, sb, _ = step_hidden(b, [0, 0], [0, 0], [0, 0], W, fb, P, QUIET, step=k)
        assert not sa.any()
    assert np.array_equal(a.V, b.V) and np.all(np.abs(a.V) < np.abs(st.V))


def test_input_spike_adds_weight():
    st, W, fb = _hidden(2)
    W[1] = [0.3, -0.2]
    s, _, passed = step_hidden(st, [0, 1], [0, 0], [0, 0], W, fb, P, QUIET)
    assert passed is None
    assert np.allclose(s.I, [0.3, -0.2])


def test_blankout_fraction():
    n = 400
    st = LayerState.zeros(n)
    W = np.ones((1, n))
    fb = FeedbackMatrix(np.zeros((n, 1)))
    noise = NoiseParams(sigma_w=0.0, p_blankout=0.65)
    total = 0
    for k in range(50):
        _, _, passed = step_hidden(st, [1], [0], [0], W, fb, P, noise, step=k)
        total += passed.sum()
    frac = total / (50 * n)
    assert abs(frac - 0.65) < 5 * math.sqrt(0.65 * 0.35 / (50 * n))


def test_background_kicks():
    n = 2000
    st = LayerState.zeros(n)
    W = np.zeros((1, n))
    fb = FeedbackMatrix(np.zeros((n, 1)))
    s, _, _ = step_hidden(st, [0], [0], [0], W, fb, P, NoiseParams(sigma_w=0.05))
    kicked = s.V != 0
    # 1 kHz over 0.1 ms: each neuron kicked with probability 0.1, by +-50 mV
    assert abs(kicked.mean() - 0.1) < 0.03
    assert set(np.abs(s.V[kicked]).round(9)) == {50.0}
    assert 0.3 < (s.V[kicked] > 0).mean() < 0.7


def test_hidden_feedback_and_shapes():
    st, W, _ = _hidden(2, n_cls=2)
    fb = FeedbackMatrix.random(2, 2, seed=0)
    s, _, _ = step_hidden(st, [0, 0], [1, 0], [0, 0], W, fb, P, QUIET)
    assert np.allclose(s.U, 1000 * fb.g_pos[:, 0])
    with pytest.raises(ValueError):
        step_hidden(st, [0, 0, 0], [0, 0], [0, 0], W, fb, P, QUIET)


def test_feedback_zero_sum():
    fb = FeedbackMatrix.random(50, 10, seed=3)
    assert np.array_equal(fb.net_weight() - (fb.g_pos.sum(1) - fb.g_neg.sum(1)), np.zeros(50))
    assert not np.any(fb.net_weight())
    assert np.array_equal(fb.g_pos, fb.g_neg)


def test_prediction_one_to_one():
    st = LayerState.zeros(3)
    W = np.zeros((2, 3))
    s, _, _ = step_prediction(st, [0, 0], [0, 1, 0], [0, 0, 0], W, 0.09, P, QUIET)
    assert s.U[1] == pytest.approx(90.0) and s.U[0] == 0 and s.U[2] == 0
    s2, _, _ = step_prediction(s, [0, 0], [0, 0, 0], [0, 0, 0], W, 0.09, P, QUIET)
    assert s2.U[1] == pytest.approx(90.0 * (1 - 0.1 * P.g_U / P.C))
    s3, _, _ = step_prediction(st, [0, 0], [1, 1, 1], [1, 1, 1], W, 0.09, P, QUIET)
    assert not s3.U.any()
    with pytest.raises(ValueError):
        step_prediction(st, [0, 0], [0, 1], [0, 0], W, 0.09, P, QUIET)


def test_error_examples():
    z = ErrorLayerState.zeros(2)
    s, sp, sn = step_error(z, [1, 0], [0, 0], 90.0, 100.0)
    assert s.V_pos.tolist() == [90.0, 0.0] and s.V_neg.tolist() == [0.0, 0.0]
    s = ErrorLayerState(np.array([60.0]), np.array([0.0]))
    s, sp, _ = step_error(s, [1], [0], 50.0, 100.0)
    assert sp[0] and s.V_pos[0] == pytest.approx(10.0)


def test_error_silence_and_clamp():
    rng = np.random.default_rng(0)
    s = ErrorLayerState.zeros(10)
    for _ in range(1000):
        spikes = rng.random(10) < 0.3
        s, sp, sn = step_error(s, spikes, spikes, 90.0, 100.0)
        assert not sp.any() and not sn.any()
    assert not s.V_pos.any() and not s.V_neg.any()
    for _ in range(1000):
        s, _, _ = step_error(s, rng.random(10) < 0.3, rng.random(10) < 0.3, 90.0, 100.0)
        assert (s.V_pos >= 0).all() and (s.V_neg >= 0).all()


def test_hazard_values():
    enc = DataEncoderParams()
    assert hazard_rate(0.0, enc) == pytest.approx(250 * math.exp(-0.215))
    assert hazard_rate(0.0, enc) == pytest.approx(201.6, abs=0.05)
    assert hazard_rate(1.0, enc) == pytest.approx(332.5, abs=0.1)


def test_data_refractory_and_rate():
    enc = DataEncoderParams()
    n, steps = 200, 4000
    last = np.full(n, -np.inf)
    pixels = np.linspace(0, 1, n)
    spikes = np.zeros((steps, n), dtype=bool)
    for k in range(steps):
        spikes[k] = data_spikes(pixels, last, k * 0.1, enc, seed=1, step=k)
    for j in range(n):
        t = np.flatnonzero(spikes[:, j])
        assert np.all(np.diff(t) >= 40)
    # with dead time: rate = h / (1 + h * tau)
    h = hazard_rate(pixels, enc) * 1e-3
    expect = h / (1 + h * 4.0) * 1e3
    measured = spikes.sum(0) / (steps * 0.1e-3)
    assert abs(measured.mean() / expect.mean() - 1) < 0.03
    with pytest.raises(ValueError):
        data_spikes([1.2], np.zeros(1), 0.0)


def test_label_train():
    times = [k for k in range(121) if label_spikes(3, k, 40)[3]]
    assert times == [0, 40, 80, 120]
    assert not any(label_spikes(3, k, 40)[[0, 1, 2, 4]].any() for k in range(121))
    # the clock is global so consecutive samples of one label continue the train
    assert label_spikes(3, 160, 40)[3]
    with pytest.raises(ValueError):
        label_spikes(10, 0, 40)


def test_predicted_rate():
    assert predicted_rate(0.0, 1.0, 3.9) == pytest.approx(1e3 / (2 * 3.9))
    assert predicted_rate(1e3, 1.0, 3.9) == pytest.approx(1e3 / 3.9)
    mus = np.linspace(-5, 5, 41)
    r = predicted_rate(mus, 1.0, 3.9)
    assert np.all(np.diff(r) > 0) and r.min() > 0 and r.max() < 1e3 / 3.9
    assert predicted_rate(1.0, 2.0, 3.9) == pytest.approx(1e3 / 3.9 * 0.5 * (1 + math.erf(0.5 / math.sqrt(2))))
    with pytest.raises(ValueError):
        predicted_rate(0.0, 0.0, 3.9)


def test_gaussian_derivative():
    s = 2.0
    assert gaussian_derivative(0.0, s) == pytest.approx(1 / (s * math.sqrt(2 * math.pi)))
    assert gaussian_derivative(3.0, s) == gaussian_derivative(-3.0, s)
    assert gaussian_derivative(s, s) == pytest.approx(math.exp(-0.5) / (s * math.sqrt(2 * math.pi)))


def test_ou_stats_regime():
    with pytest.raises(ValueError):
        ou_stats(0.1, 0.05, 1000.0, NeuronParams())
    mu, sd = ou_stats(0.1, 0.05, 1000.0, NeuronParams(g_V=5.0, tau_syn=50.0))
    assert mu == pytest.approx(1000 * 0.1 / 5.0 - 100.0) and sd > 0
