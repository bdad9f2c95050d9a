"""Event-driven random backpropagation (eRBP) for spiking neural networks."""
from .config import RunConfig, load_config
from .harness import evaluate_first_spike, evaluate_rate, train_spiking
from .quantized import QuantNetwork, QuantParams
from .snn import ContinuousNetwork, SimConfig

__all__ = [
    "ContinuousNetwork", "QuantNetwork", "QuantParams", "RunConfig", "SimConfig",
    "evaluate_first_spike", "evaluate_rate", "load_config", "train_spiking",
]
