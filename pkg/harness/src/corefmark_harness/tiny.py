"""Locally-initialized miniature models for offline runs and smoke tests.

Both variants use the byte-level tokenizer, which needs no downloaded vocab
files, so a usable base "model" can be materialized on a machine with no
model-hub access.  Weights are random: these exist to exercise the training
and generation plumbing end to end, not to produce good annotations.
"""

from __future__ import annotations

from transformers import (
    ByT5Tokenizer,
    GPTNeoXConfig,
    GPTNeoXForCausalLM,
    T5Config,
    T5ForConditionalGeneration,
)

FAMILIES = ("seq2seq", "causal")


def init_tiny(path, family: str = "seq2seq", seed: int = 0) -> str:
    """Create and save a tiny randomly-initialized base model at ``path``."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    from transformers import set_seed

    set_seed(seed)
    tokenizer = ByT5Tokenizer()
    vocab_size = len(tokenizer)
    if family == "seq2seq":
        config = T5Config(
            vocab_size=vocab_size,
            d_model=64,
            d_kv=16,
            d_ff=128,
            num_layers=2,
            num_decoder_layers=2,
            num_heads=4,
            decoder_start_token_id=tokenizer.pad_token_id,
            pad_token_id=tokenizer.pad_token_id,
            eos_token_id=tokenizer.eos_token_id,
        )
        model = T5ForConditionalGeneration(config)
    else:
        config = GPTNeoXConfig(
            vocab_size=vocab_size,
            hidden_size=64,
            num_hidden_layers=2,
            num_attention_heads=4,
            intermediate_size=128,
            max_position_embeddings=1024,
            pad_token_id=tokenizer.pad_token_id,
            eos_token_id=tokenizer.eos_token_id,
        )
        model = GPTNeoXForCausalLM(config)
    model.save_pretrained(path)
    tokenizer.save_pretrained(path)
    return str(path)
