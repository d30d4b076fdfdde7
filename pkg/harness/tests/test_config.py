"""Config defaults, file round-trip and schema validation."""

import dataclasses

import pytest

from corefmark_harness.config import TrainConfig, load_config, save_config

# Reference trainer defaults the harness must ship with.
REFERENCE_DEFAULTS = {
    "evaluation_strategy": "epoch",
    "learning_rate": 2e-5,
    "weight_decay": 0.01,
    "save_total_limit": 3,
    "num_train_epochs": 10,
    "gradient_checkpointing": True,
}


def test_default_config_matches_reference_values():
    config = TrainConfig().to_dict()
    for key, value in REFERENCE_DEFAULTS.items():
        assert config[key] == value, key


def test_every_field_overridable():
    config = TrainConfig(
        base_model_id="x",
        evaluation_strategy="steps",
        learning_rate=1e-4,
        weight_decay=0.0,
        save_total_limit=1,
        num_train_epochs=1,
        gradient_checkpointing=False,
        batch_size=2,
        seed=7,
        max_output_length=64,
    )
    assert config.num_train_epochs == 1
    assert not config.gradient_checkpointing


def test_round_trip(tmp_path):
    config = dataclasses.replace(TrainConfig(), batch_size=4, seed=11)
    path = tmp_path / "config.txt"
    save_config(config, path)
    assert load_config(path) == config


def test_file_format_is_flat_key_value(tmp_path):
    path = tmp_path / "config.txt"
    save_config(TrainConfig(), path)
    lines = path.read_text().splitlines()
    assert "learning_rate = 2e-05" in lines
    assert "num_train_epochs = 10" in lines
    assert all(" = " in line for line in lines)


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "config.txt"
    path.write_text("warmup_ratio = 0.1\n")
    with pytest.raises(ValueError, match="unknown key"):
        load_config(path)


def test_bad_boolean_rejected(tmp_path):
    path = tmp_path / "config.txt"
    path.write_text("gradient_checkpointing = maybe\n")
    with pytest.raises(ValueError, match="boolean"):
        load_config(path)
