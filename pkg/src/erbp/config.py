"""Run configuration and its flat ``key = value`` file format.

Every field of :class:`RunConfig` is a key.  Blank lines and ``#`` comments
are ignored; ``none`` leaves an optional key at its automatic value.
Continuous-model keys use the plain parameter names, quantized-model keys
carry a ``q_`` prefix.
"""
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .continuous import DataEncoderParams, ErrorParams, NeuronParams, NoiseParams
from .continuous import ERBP_NOISE, PERBP_NOISE
from .plasticity import PlasticityConfig
from .quantized import QuantParams
from .snn import SimConfig

MODELS = ("continuous", "quantized", "refnet")
RULES = ("erbp", "perbp", "bp", "rbp")
ORDERS = ("sequential", "shuffled")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "continuous"
    rule: str = "erbp"
    arch: str = "784-100-10"
    seed: int = 0
    epochs: int = 1
    n_train: int = 0  # 0 = whole training split
    n_test: int = 0  # 0 = whole test split
    order: str = "sequential"
    t_train: float = 250.0  # ms per training sample
    t_test: float = 500.0  # ms per test sample
    gate: float = 50.0  # ms without plasticity at each sample onset
    workers: int = 1  # evaluation shards
    # continuous neurons
    dt: float = 0.1
    C: float = 1.0
    g_V: float = 1.0
    g_U: float = 5.0
    V_T: float = 100.0
    tau_refr: float = 3.9
    tau_syn: float = 4.0
    # noise; none = chosen by the rule (erbp: additive, perbp: blank-out)
    sigma_w: Optional[float] = None
    bg_rate: float = 1000.0
    p_blankout: Optional[float] = None
    # data encoder
    beta: float = 0.5
    gamma: float = -0.215
    tau_refr_data: float = 4.0
    # error neurons and learning
    w_L: float = 0.09
    w_E: float = 0.09
    V_T_E: float = 100.0
    label_period: float = 4.0
    error_bias: float = 0.0  # mV per step; > 0 enables the negative-bias variant
    eta: float = -6e-4
    b_min: float = -1.15
    b_max: float = 1.15
    init_scale: float = 6.0
    # first-spike evaluation
    prestim: float = 100.0  # ms of random pattern before each sample
    k_max: int = 20
    fs_offset: Optional[float] = None  # ms; none = 2 * tau_syn (continuous) or 2 * 2^-a_syn steps
    # dense reference network
    lr: float = 0.4
    batch: int = 100
    # quantized core
    q_a_V: int = -3
    q_a_U: int = -7
    q_a_syn: int = -6
    q_a_IV: int = 4
    q_g_V: int = -3
    q_g_U: int = 3
    q_g_I: int = 0
    q_g_E: int = 4
    q_V_T: int = 32767
    q_V_T_E: int = 1025
    q_V_reset: int = 32766
    q_b_V: int = 1000
    q_tau_refr: int = 39
    q_label_period: int = 40
    q_a_E: Optional[int] = None  # none = q_a_V
    q_eta: int = -10
    q_p_blankout: float = 0.6
    q_b_min: int = -2560
    q_b_max: int = 2560
    q_w_L: int = 65
    q_w_E: int = 64
    q_data_rate: float = 25.0
    q_init_gain: float = 200.0
    q_fb_gain: float = 100.0
    q_dt: float = 1.0 / 6.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.rule not in RULES:
            raise ConfigError(f"rule must be one of {RULES}")
        if self.order not in ORDERS:
            raise ConfigError(f"order must be one of {ORDERS}")
        if self.model == "refnet" and self.rule not in ("bp", "rbp"):
            raise ConfigError("the dense reference network trains with rule bp or rbp")
        if self.model != "refnet" and self.rule not in ("erbp", "perbp"):
            raise ConfigError("spiking models train with rule erbp or perbp")
        dims = self.dims
        if len(dims) < 2 or min(dims) < 1:
            raise ConfigError(f"bad architecture {self.arch!r}")
        if dims[-1] != 10:
            raise ConfigError("architecture must end in 10 classes")
        if not 0 <= self.gate < self.t_train:
            raise ConfigError("gate window must be shorter than the training sample")
        if self.t_test <= 0 or self.dt <= 0:
            raise ConfigError("durations must be positive")
        for name in ("epochs", "n_train", "n_test", "seed"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.workers < 1 or self.k_max < 1:
            raise ConfigError("workers and k_max must be at least 1")

    @property
    def dims(self):
        try:
            return tuple(int(x) for x in self.arch.split("-"))
        except ValueError:
            raise ConfigError(f"bad architecture {self.arch!r}") from None

    def noise(self):
        base = PERBP_NOISE if self.rule == "perbp" else ERBP_NOISE
        return NoiseParams(
            sigma_w=base.sigma_w if self.sigma_w is None else self.sigma_w,
            bg_rate=self.bg_rate,
            p_blankout=base.p_blankout if self.p_blankout is None else self.p_blankout,
        )

    def sim_config(self):
        return SimConfig(
            dt=self.dt,
            neuron=NeuronParams(self.C, self.g_V, self.g_U, self.V_T, self.tau_refr, self.tau_syn),
            noise=self.noise(),
            encoder=DataEncoderParams(self.beta, self.gamma, self.tau_refr_data),
            error=ErrorParams(self.w_L, self.w_E, self.V_T_E),
            plasticity=PlasticityConfig(self.eta, self.b_min, self.b_max),
            label_period=self.label_period,
            error_bias=self.error_bias,
            init_scale=self.init_scale,
        )

    def quant_params(self):
        kw = {f.name[2:]: getattr(self, f.name) for f in fields(self) if f.name.startswith("q_")}
        return QuantParams(**kw)

    def first_spike_offset(self):
        if self.fs_offset is not None:
            return self.fs_offset
        if self.model == "quantized":
            p = self.quant_params()
            return 2 * 2 ** (-p.a_syn) * p.dt
        return 2 * self.tau_syn


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key, text):
    kind = _TYPES[key]
    text = text.strip()
    optional = kind in (Optional[float], Optional[int], "Optional[float]", "Optional[int]")
    if optional and text.lower() == "none":
        return None
    try:
        if kind in (int, "int", Optional[int], "Optional[int]"):
            return int(text)
        if kind in (float, "float") or optional:
            return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r}") from None
    return text


def parse_pairs(pairs):
    """Turn ``(key, text)`` pairs into typed overrides; unknown keys are errors."""
    out = {}
    for key, text in pairs:
        key = key.strip()
        if key not in _TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = _convert(key, text)
    return out


def parse_config_text(text):
    pairs = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, value = line.split("=", 1)
        pairs.append((key, value))
    return parse_pairs(pairs)


def load_config(path=None, overrides=None):
    """Defaults, then the file at ``path``, then ``overrides`` (highest priority)."""
    values = {}
    if path is not None:
        with open(path) as f:
            values.update(parse_config_text(f.read()))
    values.update(overrides or {})
    return RunConfig(**values)


def dump_config(cfg):
    lines = []
    for key, value in asdict(cfg).items():
        lines.append(f"{key} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg, **kw):
    return replace(cfg, **kw)
