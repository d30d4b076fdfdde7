"""Pair-file loading and torch datasets for both model families.

Pair files are the JSON-lines records written by ``corefmark split``:
``{"novel_id", "sent_id", "input", "output"}``.  Schema problems fail fast,
before any model is touched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import torch
from torch.utils.data import Dataset

# Decoder-only models see prompt and continuation in one stream; the
# separator marks where the annotated rewrite begins.
CAUSAL_SEPARATOR = "\n"


class SchemaError(ValueError):
    """A pair or input file does not match the expected record schema."""


@dataclass(frozen=True)
class PairRow:
    novel_id: str
    sent_id: int
    input: str
    output: str | None


def read_pairs(path, require_output: bool = True) -> list[PairRow]:
    rows: list[PairRow] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise SchemaError(f"{path}:{lineno}: not valid JSON ({err})") from err
            required = ["novel_id", "sent_id", "input"]
            if require_output:
                required.append("output")
            missing = [key for key in required if key not in record]
            if missing:
                raise SchemaError(f"{path}:{lineno}: missing fields {missing}")
            rows.append(
                PairRow(
                    novel_id=str(record["novel_id"]),
                    sent_id=int(record["sent_id"]),
                    input=str(record["input"]),
                    output=str(record["output"]) if "output" in record else None,
                )
            )
    return rows


class Seq2SeqPairDataset(Dataset):
    """Input sentence -> annotated sentence, for encoder-decoder models."""

    def __init__(self, rows: list[PairRow], tokenizer, max_length: int):
        self.rows = rows
        self.tokenizer = tokenizer
        self.max_length = max_length

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: int) -> dict:
        row = self.rows[index]
        encoded = self.tokenizer(
            row.input, truncation=True, max_length=self.max_length
        )
        labels = self.tokenizer(
            row.output, truncation=True, max_length=self.max_length
        )
        encoded["labels"] = labels["input_ids"]
        return encoded


class CausalPairDataset(Dataset):
    """Prompt + continuation stream with the prompt masked out of the loss."""

    def __init__(self, rows: list[PairRow], tokenizer, max_length: int):
        self.rows = rows
        self.tokenizer = tokenizer
        self.max_length = max_length

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: int) -> dict:
        row = self.rows[index]
        prompt = row.input + CAUSAL_SEPARATOR
        prompt_ids = self.tokenizer(prompt, add_special_tokens=False)["input_ids"]
        output_ids = self.tokenizer(row.output, add_special_tokens=False)["input_ids"]
        eos = (
            [self.tokenizer.eos_token_id]
            if self.tokenizer.eos_token_id is not None
            else []
        )
        ids = (prompt_ids + output_ids + eos)[: self.max_length]
        labels = ([-100] * len(prompt_ids) + output_ids + eos)[: self.max_length]
        return {
            "input_ids": ids,
            "attention_mask": [1] * len(ids),
            "labels": labels,
        }


def causal_collator(tokenizer):
    """Right-pad a batch of variable-length causal examples."""
    pad_id = tokenizer.pad_token_id if tokenizer.pad_token_id is not None else 0

    def collate(features: list[dict]) -> dict:
        width = max(len(f["input_ids"]) for f in features)

        def pad(values: list[int], fill: int) -> list[int]:
            return values + [fill] * (width - len(values))

        return {
            "input_ids": torch.tensor(
                [pad(f["input_ids"], pad_id) for f in features], dtype=torch.long
            ),
            "attention_mask": torch.tensor(
                [pad(f["attention_mask"], 0) for f in features], dtype=torch.long
            ),
            "labels": torch.tensor(
                [pad(f["labels"], -100) for f in features], dtype=torch.long
            ),
        }

    return collate
