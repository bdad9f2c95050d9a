import numpy as np
import pytest

from erbp.data import Dataset
from erbp.refnet import (
    DenseNet, bp_grads, error_rate, forward, loss, one_hot, phi, phi_prime, rbp_grads,
    sgd_train, write_curve_csv,
)


def test_phi_examples():
    assert phi(0.5) == 0.5 and phi(-1.0) == 0.0 and phi(2.0) == 1.0
    assert phi_prime(np.array([0.0, 0.5, 1.0])).tolist() == [0.0, 1.0, 0.0]


def test_identity_forward():
    net = DenseNet((3, 3), [np.eye(3)])
    x = np.array([[0.1, 0.7, 1.0]])
    assert np.array_equal(forward(net, x)[1][-1], x)


def test_forward_matches_independent_matmul():
    net = DenseNet.create((20, 15, 10), seed=4)
    x = np.random.default_rng(1).uniform(size=(7, 20))
    h = np.minimum(np.maximum(np.einsum("ij,bj->bi", net.weights[0], x), 0), 1)
    y = np.minimum(np.maximum(np.einsum("ij,bj->bi", net.weights[1], h), 0), 1)
    assert np.max(np.abs(forward(net, x)[1][-1] - y)) < 1e-12


def test_forward_shape_error():
    with pytest.raises(ValueError):
        forward(DenseNet.create((4, 2)), np.zeros((1, 5)))


def test_zero_error_zero_grads():
    net = DenseNet.create((6, 5, 3), seed=0)
    x = np.random.default_rng(0).uniform(size=(4, 6))
    t = forward(net, x)[1][-1]
    for g in bp_grads(net, x, t) + rbp_grads(net, x, t):
        assert not np.any(g)


def test_shallow_gradient_formula():
    net = DenseNet.create((5, 3), seed=2)
    x = np.random.default_rng(2).uniform(size=(1, 5))
    t = one_hot([1], 3)
    pre, acts = forward(net, x)
    e = acts[-1] - t
    expect = (phi_prime(pre[0]) * e).T @ x
    assert np.allclose(bp_grads(net, x, t)[0], expect)


def test_rbp_equals_bp_with_transposes():
    rng = np.random.default_rng(5)
    for dims in [(8, 6, 4), (12, 7, 3)]:
        net = DenseNet.create(dims, seed=1)
        net.feedback = [net.weights[1].T.copy()]
        x = rng.uniform(size=(10, dims[0]))
        t = one_hot(rng.integers(0, dims[-1], 10), dims[-1])
        bp = bp_grads(net, x, t)
        rbp = rbp_grads(net, x, t, gate=(0.0, 1.0), project="delta")
        for a, b in zip(bp, rbp):
            assert np.allclose(a, b, atol=1e-14)


def test_lr_zero_keeps_weights():
    ds = Dataset(np.random.default_rng(0).uniform(size=(50, 8)), np.arange(50) % 10)
    net = DenseNet.create((8, 6, 10), seed=0)
    before = [w.copy() for w in net.weights]
    sgd_train(net, ds, "bp", lr=0.0, batch=10, epochs=2)
    assert all(np.array_equal(a, b) for a, b in zip(before, net.weights))
    with pytest.raises(ValueError):
        sgd_train(net, ds, "adam")


def test_loss_decreases_smoke():
    rng = np.random.default_rng(0)
    x = rng.uniform(size=(60, 10))
    lab = (x[:, 0] > 0.5).astype(int)
    ds = Dataset(x, lab)
    ok = 0
    for seed in range(3):
        net = DenseNet.create((10, 8, 10), seed=seed)
        _, hist = sgd_train(net, ds, "bp", lr=0.1, batch=10, epochs=8, seed=seed)
        ok += all(b <= a + 1e-12 for a, b in zip(hist.loss, hist.loss[1:]))
    assert ok >= 2


def test_error_rate_and_csv(tmp_path):
    ds = Dataset(np.eye(10)[:, :10], np.arange(10))
    net = DenseNet((10, 10), [np.eye(10)])
    assert error_rate(net, ds) == 0.0
    _, hist = sgd_train(net, ds, "rbp", lr=0.0, batch=5, epochs=2, test=ds)
    write_curve_csv(tmp_path / "c.csv", hist)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "epoch,train_error,test_error,loss" and len(lines) == 3
    assert loss(net, ds.images, one_hot(ds.labels, 10)) == 0.0
