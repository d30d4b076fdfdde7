"""Fine-tuning driver built on the standard Trainer loop.

Model-family agnostic: any encoder-decoder or decoder-only base model id or
local path works; the family is read off the model config.  Every run
leaves behind a reloadable checkpoint, a per-epoch training log and a
config echo that reproduces the run when fed back in.
"""

from __future__ import annotations

import inspect
import json
import os
from dataclasses import dataclass

from transformers import (
    AutoConfig,
    AutoModelForCausalLM,
    AutoModelForSeq2SeqLM,
    AutoTokenizer,
    DataCollatorForSeq2Seq,
    Trainer,
    TrainingArguments,
    set_seed,
)

from corefmark_harness.config import TrainConfig, save_config
from corefmark_harness.data import (
    CausalPairDataset,
    Seq2SeqPairDataset,
    causal_collator,
    read_pairs,
)

CONFIG_ECHO = "train_config.txt"
TRAINING_LOG = "training_log.jsonl"


@dataclass(frozen=True)
class RunArtifacts:
    checkpoint_dir: str
    config_path: str
    log_path: str
    epochs: list[dict]


def load_model_and_tokenizer(model_id_or_path: str):
    """Resolve any hub id or local path; returns (model, tokenizer, is_seq2seq)."""
    auto_config = AutoConfig.from_pretrained(model_id_or_path)
    tokenizer = AutoTokenizer.from_pretrained(model_id_or_path)
    if auto_config.is_encoder_decoder:
        model = AutoModelForSeq2SeqLM.from_pretrained(model_id_or_path)
    else:
        model = AutoModelForCausalLM.from_pretrained(model_id_or_path)
    if tokenizer.pad_token_id is None and tokenizer.eos_token_id is not None:
        tokenizer.pad_token = tokenizer.eos_token
    return model, tokenizer, auto_config.is_encoder_decoder


def _training_arguments(config: TrainConfig, run_dir: str) -> TrainingArguments:
    kwargs = dict(
        output_dir=os.path.join(run_dir, "trainer"),
        learning_rate=config.learning_rate,
        weight_decay=config.weight_decay,
        num_train_epochs=config.num_train_epochs,
        save_total_limit=config.save_total_limit,
        gradient_checkpointing=config.gradient_checkpointing,
        per_device_train_batch_size=config.batch_size,
        per_device_eval_batch_size=config.batch_size,
        seed=config.seed,
        save_strategy="epoch",
        logging_strategy="epoch",
        report_to=[],
        disable_tqdm=True,
    )
    # The per-epoch evaluation knob was renamed across transformers majors.
    params = inspect.signature(TrainingArguments.__init__).parameters
    eval_key = "eval_strategy" if "eval_strategy" in params else "evaluation_strategy"
    kwargs[eval_key] = config.evaluation_strategy
    return TrainingArguments(**kwargs)


def _epoch_log(log_history: list[dict]) -> list[dict]:
    """Merge trainer log entries into one row per epoch."""
    by_epoch: dict[int, dict] = {}
    for entry in log_history:
        if "epoch" not in entry:
            continue
        epoch = int(round(entry["epoch"]))
        row = by_epoch.setdefault(epoch, {"epoch": epoch})
        if "loss" in entry:
            row["train_loss"] = entry["loss"]
        if "eval_loss" in entry:
            row["val_loss"] = entry["eval_loss"]
    return [by_epoch[e] for e in sorted(by_epoch) if e > 0]


def finetune(
    train_pairs_path,
    val_pairs_path,
    config: TrainConfig,
    run_dir,
) -> RunArtifacts:
    """Fine-tune ``config.base_model_id`` on pair files; returns run artifacts."""
    train_rows = read_pairs(train_pairs_path)
    val_rows = read_pairs(val_pairs_path)
    os.makedirs(run_dir, exist_ok=True)

    set_seed(config.seed)
    model, tokenizer, is_seq2seq = load_model_and_tokenizer(config.base_model_id)
    if is_seq2seq:
        train_set = Seq2SeqPairDataset(train_rows, tokenizer, config.max_output_length)
        val_set = Seq2SeqPairDataset(val_rows, tokenizer, config.max_output_length)
        collator = DataCollatorForSeq2Seq(tokenizer, model=model)
    else:
        train_set = CausalPairDataset(train_rows, tokenizer, config.max_output_length)
        val_set = CausalPairDataset(val_rows, tokenizer, config.max_output_length)
        collator = causal_collator(tokenizer)

    trainer = Trainer(
        model=model,
        args=_training_arguments(config, str(run_dir)),
        train_dataset=train_set,
        eval_dataset=val_set,
        data_collator=collator,
        processing_class=tokenizer,
    )
    trainer.train()

    checkpoint_dir = os.path.join(run_dir, "checkpoint")
    trainer.save_model(checkpoint_dir)
    tokenizer.save_pretrained(checkpoint_dir)

    config_path = os.path.join(run_dir, CONFIG_ECHO)
    save_config(config, config_path)
    log_path = os.path.join(run_dir, TRAINING_LOG)
    epochs = _epoch_log(trainer.state.log_history)
    with open(log_path, "w", encoding="utf-8") as fh:
        for row in epochs:
            fh.write(json.dumps(row) + "\n")
    return RunArtifacts(
        checkpoint_dir=checkpoint_dir,
        config_path=config_path,
        log_path=log_path,
        epochs=epochs,
    )
