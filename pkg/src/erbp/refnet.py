"""Dense (non-spiking) reference networks trained with BP or direct random BP.

Activations use the hard-saturating linear unit ``clamp(x, 0, 1)``, the rate
counterpart of an integrate-and-fire neuron with an absolute refractory
period.  Its derivative is the open-interval indicator ``0 < x < 1``.

Random BP replaces that derivative by a boxcar gate ``lo < x < hi``, the
same piecewise-constant stand-in the spiking rule applies to the synaptic
current.  With ``gate=(0, 1)`` it reduces to the exact derivative.
"""
from dataclasses import dataclass, field

import numpy as np


def phi(x):
    return np.clip(x, 0.0, 1.0)


def phi_prime(x):
    return ((x > 0.0) & (x < 1.0)).astype(np.float64)


def boxcar(x, lo, hi):
    return ((x > lo) & (x < hi)).astype(np.float64)


# wide enough that silent units keep learning, as the spiking gate does
DEFAULT_GATE = (-0.5, 1.0)


def init_bound(fan_in, fan_out, scale=6.0):
    return np.sqrt(scale / (fan_in + fan_out))


@dataclass
class DenseNet:
    dims: tuple
    weights: list  # W[l] has shape (dims[l+1], dims[l])
    feedback: list = field(default_factory=list)  # G[l] has shape (dims[l+1], dims[-1]) for hidden l

    @classmethod
    def create(cls, dims, seed=0):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 2:
            raise ValueError("need at least an input and an output layer")
        rng = np.random.default_rng(seed)
        weights = []
        for n_in, n_out in zip(dims[:-1], dims[1:]):
            b = init_bound(n_in, n_out)
            weights.append(rng.uniform(-b, b, size=(n_out, n_in)))
        n_cls = dims[-1]
        feedback = []
        for n_h in dims[1:-1]:
            b = init_bound(n_h, n_cls)
            feedback.append(rng.uniform(-b, b, size=(n_h, n_cls)))
        return cls(dims, weights, feedback)

    def copy(self):
        return DenseNet(self.dims, [w.copy() for w in self.weights], [g.copy() for g in self.feedback])


def forward(net, x):
    """Return ``(pre_activations, activations)``; ``activations[0]`` is the input."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != net.dims[0]:
        raise ValueError(f"input has {x.shape[-1]} features, network expects {net.dims[0]}")
    acts = [x]
    pres = []
    for w in net.weights:
        a = acts[-1] @ w.T
        pres.append(a)
        acts.append(phi(a))
    return pres, acts


def predict(net, x):
    return np.argmax(forward(net, x)[1][-1], axis=-1)


def one_hot(labels, n):
    out = np.zeros((len(labels), n))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def loss(net, x, targets):
    y = forward(net, x)[1][-1]
    return 0.5 * np.sum((y - targets) ** 2) / max(1, np.atleast_2d(x).shape[0])


def bp_grads(net, x, targets):
    """Exact gradients of ``0.5 * sum(e**2)``, averaged over the batch."""
    x = np.atleast_2d(x)
    targets = np.atleast_2d(targets)
    pres, acts = forward(net, x)
    n = x.shape[0]
    delta = (acts[-1] - targets) * phi_prime(pres[-1])
    grads = [None] * len(net.weights)
    for l in range(len(net.weights) - 1, -1, -1):
        grads[l] = delta.T @ acts[l] / n
        if l:
            delta = (delta @ net.weights[l]) * phi_prime(pres[l - 1])
    return grads


def rbp_grads(net, x, targets, gate=DEFAULT_GATE, project="error"):
    """Direct random BP updates (same sign convention as gradients).

    Every hidden layer receives the output error through its own fixed
    random matrix.  ``project="delta"`` sends the output-layer delta
    (gated error) instead of the raw error.
    """
    x = np.atleast_2d(x)
    targets = np.atleast_2d(targets)
    pres, acts = forward(net, x)
    n = x.shape[0]
    lo, hi = gate
    err = acts[-1] - targets
    top = err * boxcar(pres[-1], lo, hi)
    signal = err if project == "error" else top
    grads = [None] * len(net.weights)
    grads[-1] = top.T @ acts[-2] / n
    for l in range(len(net.weights) - 1):
        delta = (signal @ net.feedback[l].T) * boxcar(pres[l], lo, hi)
        grads[l] = delta.T @ acts[l] / n
    return grads


def error_rate(net, dataset, batch=1000):
    wrong = 0
    for s in range(0, len(dataset), batch):
        wrong += int(np.sum(predict(net, dataset.images[s:s + batch]) != dataset.labels[s:s + batch]))
    return wrong / max(1, len(dataset))


@dataclass
class TrainHistory:
    train_error: list = field(default_factory=list)
    test_error: list = field(default_factory=list)
    loss: list = field(default_factory=list)


def sgd_train(net, train, rule="bp", lr=0.4, batch=100, epochs=1, test=None, seed=0,
              callback=None):
    """Minibatch SGD with ``rule`` in {"bp", "rbp"}; updates ``net`` in place.

    ``lr`` scales the gradient of the squared error averaged over the batch
    and the output units, so the step applied is ``lr * 2 / n_out`` times
    the gradient of ``0.5 * sum(e**2)``.
    """
    if rule not in ("bp", "rbp"):
        raise ValueError(f"unknown rule {rule!r}")
    grad_fn = bp_grads if rule == "bp" else rbp_grads
    rng = np.random.default_rng(seed)
    hist = TrainHistory()
    n_cls = net.dims[-1]
    step = lr * 2.0 / n_cls
    for _ in range(epochs):
        order = rng.permutation(len(train))
        for s in range(0, len(order), batch):
            idx = order[s:s + batch]
            x = train.images[idx]
            t = one_hot(train.labels[idx], n_cls)
            grads = grad_fn(net, x, t)
            if callback is not None:
                callback(net, x, t, grads)
            for w, g in zip(net.weights, grads):
                w -= step * g
        hist.train_error.append(error_rate(net, train))
        hist.loss.append(loss(net, train.images, one_hot(train.labels, n_cls)))
        if test is not None:
            hist.test_error.append(error_rate(net, test))
    return net, hist


def alignment_fraction(net, dataset, lr=0.4, batch=100, epochs=5, measure_epochs=1, seed=1):
    """Train with RBP for ``epochs``, then keep training for ``measure_epochs``
    and report the fraction of those later steps where every hidden-layer RBP
    update has a positive dot product with the BP gradient."""
    hits = []

    def check(net_, x, t, grads):
        true = bp_grads(net_, x, t)
        ok = all(float(np.sum(g * b)) > 0.0 for g, b in zip(grads[:-1], true[:-1]))
        hits.append(ok)

    sgd_train(net, dataset, "rbp", lr=lr, batch=batch, epochs=epochs, seed=seed)
    sgd_train(net, dataset, "rbp", lr=lr, batch=batch, epochs=measure_epochs, seed=seed + 1,
              callback=check)
    return float(np.mean(hits)) if hits else 0.0


def write_curve_csv(path, hist):
    with open(path, "w") as f:
        f.write("epoch,train_error,test_error,loss\n")
        for i, tr in enumerate(hist.train_error):
            te = hist.test_error[i] if i < len(hist.test_error) else ""
            f.write(f"{i + 1},{tr:.6f},{te if te == '' else f'{te:.6f}'},{hist.loss[i]:.6f}\n")
