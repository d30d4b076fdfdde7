"""Batch inference producing prediction files for the scoring CLI.

Reads the ``input`` column of a pair file (the ``output`` column may be
absent) and writes one raw, untruncated-up-to-max-length generation per
sentence in the prediction schema: ``{"novel_id", "sent_id", "input",
"prediction"}``.  Decoding is greedy unless sampling is requested.
"""

from __future__ import annotations

import json

import torch

from corefmark_harness.data import CAUSAL_SEPARATOR, read_pairs
from corefmark_harness.finetune import load_model_and_tokenizer


def generate(
    checkpoint_dir,
    inputs_path,
    out_path,
    max_output_length: int = 512,
    batch_size: int = 8,
    sample: bool = False,
) -> int:
    """Generate predictions for every input row; returns the row count."""
    rows = read_pairs(inputs_path, require_output=False)
    model, tokenizer, is_seq2seq = load_model_and_tokenizer(checkpoint_dir)
    model.eval()
    if not is_seq2seq:
        # Decoder-only batches must be left-padded so every row's
        # continuation starts at the same column.
        tokenizer.padding_side = "left"

    predictions: list[str] = []
    for start in range(0, len(rows), batch_size):
        batch = rows[start:start + batch_size]
        texts = [
            row.input if is_seq2seq else row.input + CAUSAL_SEPARATOR
            for row in batch
        ]
        encoded = tokenizer(
            texts, return_tensors="pt", padding=True, truncation=True,
            max_length=max_output_length,
        )
        with torch.no_grad():
            generated = model.generate(
                **encoded,
                max_new_tokens=max_output_length,
                do_sample=sample,
                num_beams=1,
                pad_token_id=tokenizer.pad_token_id,
            )
        if not is_seq2seq:
            # Drop the prompt tokens; decoder-only outputs echo the input.
            generated = generated[:, encoded["input_ids"].shape[1]:]
        predictions.extend(tokenizer.batch_decode(generated, skip_special_tokens=True))

    with open(out_path, "w", encoding="utf-8") as fh:
        for row, prediction in zip(rows, predictions):
            fh.write(
                json.dumps(
                    {
                        "novel_id": row.novel_id,
                        "sent_id": row.sent_id,
                        "input": row.input,
                        "prediction": prediction,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return len(rows)
