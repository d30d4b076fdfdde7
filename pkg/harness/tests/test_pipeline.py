"""Smaller pipeline contracts: causal family, CLI, edge cases."""

import json

import pytest

from corefmark_harness.cli import main
from corefmark_harness.config import TrainConfig, load_config
from corefmark_harness.data import SchemaError
from corefmark_harness.finetune import finetune
from corefmark_harness.generate import generate
from corefmark_harness.tiny import init_tiny


def write_pairs(path, n=8, novel="toy"):
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(1, n + 1):
            fh.write(json.dumps({
                "novel_id": novel,
                "sent_id": i,
                "input": "Carl took Helen home.",
                "output": "[Carl: 1] took [Helen: 2] home.",
            }) + "\n")
    return path


@pytest.fixture(scope="module")
def tiny_causal(tmp_path_factory):
    return init_tiny(tmp_path_factory.mktemp("base") / "neox", family="causal")


def small_config(base, **overrides) -> TrainConfig:
    defaults = dict(
        base_model_id=str(base),
        num_train_epochs=1,
        batch_size=4,
        max_output_length=96,
        gradient_checkpointing=False,
    )
    defaults.update(overrides)
    return TrainConfig(**defaults)


class TestCausalFamily:
    def test_finetune_and_generate(self, tiny_causal, tmp_path):
        train = write_pairs(tmp_path / "train.jsonl", n=8)
        val = write_pairs(tmp_path / "val.jsonl", n=2)
        artifacts = finetune(train, val, small_config(tiny_causal), tmp_path / "run")
        assert artifacts.epochs and "val_loss" in artifacts.epochs[0]
        # Ragged batch: left-padding must keep per-row prompts aligned.
        with open(val, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({
                "novel_id": "toy", "sent_id": 99,
                "input": "A much longer sentence about Carl and Helen walking home.",
            }) + "\n")
        out = tmp_path / "preds.jsonl"
        count = generate(artifacts.checkpoint_dir, val, out, max_output_length=48)
        assert count == 3
        rows = [json.loads(l) for l in open(out, encoding="utf-8")]
        assert all(set(r) == {"novel_id", "sent_id", "input", "prediction"}
                   for r in rows)


class TestContracts:
    def test_schema_error_before_training(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"novel_id": "x", "sent_id": 1, "input": "a"}\n')
        ok = write_pairs(tmp_path / "val.jsonl", n=1)
        with pytest.raises(SchemaError, match="output"):
            finetune(bad, ok, small_config("never-loaded"), tmp_path / "run")

    def test_empty_inputs_file(self, tmp_path):
        base = init_tiny(tmp_path / "base", family="seq2seq")
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        out = tmp_path / "preds.jsonl"
        assert generate(base, empty, out) == 0
        assert out.read_text() == ""

    def test_bracketed_input_passes_through(self, tmp_path):
        base = init_tiny(tmp_path / "base", family="seq2seq")
        inputs = tmp_path / "in.jsonl"
        inputs.write_text(json.dumps({
            "novel_id": "n", "sent_id": 1, "input": "stray [ bracket: 1]",
        }) + "\n")
        out = tmp_path / "preds.jsonl"
        assert generate(base, inputs, out, max_output_length=16) == 1
        row = json.loads(out.read_text())
        assert row["input"] == "stray [ bracket: 1]"

    def test_config_echo_reproduces_run_parameters(self, tmp_path):
        base = init_tiny(tmp_path / "base", family="seq2seq")
        train = write_pairs(tmp_path / "train.jsonl", n=4)
        val = write_pairs(tmp_path / "val.jsonl", n=1)
        config = small_config(base, seed=13)
        artifacts = finetune(train, val, config, tmp_path / "run")
        assert load_config(artifacts.config_path) == config


class TestCli:
    def test_init_tiny_and_generate(self, tmp_path, capsys):
        assert main(["init-tiny", str(tmp_path / "base"), "--family", "seq2seq"]) == 0
        inputs = write_pairs(tmp_path / "in.jsonl", n=2)
        assert main([
            "generate", str(tmp_path / "base"), str(inputs),
            str(tmp_path / "out.jsonl"), "--max-output-length", "16",
        ]) == 0
        assert "2 predictions" in capsys.readouterr().out

    def test_finetune_with_config_file(self, tmp_path, capsys):
        from corefmark_harness.config import save_config

        base = init_tiny(tmp_path / "base", family="seq2seq")
        train = write_pairs(tmp_path / "train.jsonl", n=4)
        val = write_pairs(tmp_path / "val.jsonl", n=1)
        config_path = tmp_path / "config.txt"
        save_config(small_config(base), config_path)
        code = main([
            "finetune", str(train), str(val),
            "--out-dir", str(tmp_path / "run"), "--config", str(config_path),
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "epoch 1" in out and "checkpoint:" in out

    def test_missing_pair_file_is_io_error(self, tmp_path):
        assert main([
            "generate", str(tmp_path / "nope"), str(tmp_path / "nope.jsonl"),
            str(tmp_path / "out.jsonl"),
        ]) in (1, 2)
