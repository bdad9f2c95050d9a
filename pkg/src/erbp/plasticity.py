"""The eRBP weight update.

On every presynaptic spike the synapse adds the postsynaptic dendritic
potential (scaled by the learning rate) to its weight, but only while the
postsynaptic neuron's total synaptic current sits inside the boxcar
``(b_min, b_max)``.  Per synapse that is two comparisons and one addition.
"""
from dataclasses import dataclass

import numpy as np

from .fixedpoint import WEIGHT_MAX, WEIGHT_MIN, diamond_array


@dataclass(frozen=True)
class PlasticityConfig:
    eta: float = -6e-4  # signed: the dendrite carries prediction minus label
    b_min: float = -1.15
    b_max: float = 1.15
    enabled: bool = True

    def __post_init__(self):
        if not self.b_min < self.b_max:
            raise ValueError("b_min must be smaller than b_max")
        if self.enabled and self.eta == 0:
            raise ValueError("eta must be nonzero when plasticity is enabled")


@dataclass
class OpCounter:
    comparisons: int = 0
    additions: int = 0
    shifts: int = 0
    synapses_visited: int = 0


def boxcar(I, cfg):
    I = np.asarray(I)
    out = ((I > cfg.b_min) & (I < cfg.b_max)).astype(np.int64)
    return int(out) if out.ndim == 0 else out


def erbp_update(W, pre_spikes, U, I, cfg, counter=None, mask=None):
    """Apply one step of eRBP to ``W`` (shape (n_pre, n_post)) and return it.

    Only rows of presynaptic neurons that spiked are touched.  ``mask``
    optionally restricts the update to synapses that transmitted the
    spike (blank-out).  A copy is returned; ``W`` is not modified.
    """
    W = np.array(W, dtype=float)
    if not cfg.enabled:
        return W
    pre = np.flatnonzero(np.asarray(pre_spikes, dtype=bool))
    gate = boxcar(I, cfg).astype(bool)
    inc = cfg.eta * np.asarray(U, dtype=float)
    for a, j in enumerate(pre):
        sel = gate if mask is None else gate & mask[a]
        W[j, sel] += inc[sel]
        if counter is not None:
            n_post = W.shape[1] if mask is None else int(mask[a].sum())
            counter.synapses_visited += n_post
            counter.comparisons += 2 * n_post
            counter.additions += int(sel.sum())
    return W


def qerbp_update(W, pre_spikes, U, I, eta_shift, b_min, b_max, counter=None, mask=None):
    """Quantized eRBP: ``w += (eta <> U) * gate`` then clip to the 8-bit range."""
    W = np.array(W, dtype=np.int64)
    pre = np.flatnonzero(np.asarray(pre_spikes, dtype=bool))
    I = np.asarray(I, dtype=np.int64)
    gate = (I > b_min) & (I < b_max)
    inc = diamond_array(eta_shift, np.asarray(U, dtype=np.int64))
    for a, j in enumerate(pre):
        sel = gate if mask is None else gate & mask[a]
        W[j, sel] = np.clip(W[j, sel] + inc[sel], WEIGHT_MIN, WEIGHT_MAX)
        if counter is not None:
            n_post = W.shape[1] if mask is None else int(mask[a].sum())
            counter.synapses_visited += n_post
            counter.comparisons += 2 * n_post
            counter.additions += int(sel.sum())
            counter.shifts += int(sel.sum())
    return W
