"""Multi-agent cyber defense simulator with flat and hierarchical PPO defenders."""

from ._core import (
    ConfigError,
    ContractError,
    DomainError,
    InputError,
    InvalidTargetError,
    LoadError,
    NumericalError,
    RejectedActionError,
    ScenarioConfig,
    ShapeError,
    Simulator,
    ablate_obs,
    commit,
    compute_gae,
    decode_message,
    effective_config,
    encode_message,
    evaluate,
    masked_softmax,
    metrics_from_traces,
    precision,
    report,
    train,
    transfer,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DomainError",
    "InputError",
    "InvalidTargetError",
    "LoadError",
    "NumericalError",
    "RejectedActionError",
    "ScenarioConfig",
    "ShapeError",
    "Simulator",
    "ablate_obs",
    "commit",
    "compute_gae",
    "decode_message",
    "effective_config",
    "encode_message",
    "evaluate",
    "masked_softmax",
    "metrics_from_traces",
    "precision",
    "report",
    "train",
    "transfer",
]
