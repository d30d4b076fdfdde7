"""Training configuration with a flat key-value file format.

The trainer hyperparameter defaults (evaluation_strategy, learning_rate,
weight_decay, save_total_limit, num_train_epochs, gradient_checkpointing)
are fixed reference values; everything is overridable per run.  Batch size,
decoding strategy and sequence lengths are this harness's own defaults,
since they legitimately vary by model.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class TrainConfig:
    base_model_id: str = "t5-small"
    evaluation_strategy: str = "epoch"
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    save_total_limit: int = 3
    num_train_epochs: int = 10
    gradient_checkpointing: bool = True
    batch_size: int = 8
    seed: int = 42
    max_output_length: int = 512

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(TrainConfig)}[name]
    raw = raw.strip()
    if kind == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"{name}: expected a boolean, got {raw!r}")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def save_config(config: TrainConfig, path) -> None:
    """Write the flat ``key = value`` file echoed next to every checkpoint."""
    with open(path, "w", encoding="utf-8") as fh:
        for name, value in config.to_dict().items():
            fh.write(f"{name} = {value}\n")


def load_config(path) -> TrainConfig:
    """Read a flat ``key = value`` file; unknown keys are an error."""
    known = {f.name for f in fields(TrainConfig)}
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            name, raw = line.split("=", 1)
            name = name.strip()
            if name not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {name!r}")
            overrides[name] = _coerce(name, raw)
    return TrainConfig(**overrides)
