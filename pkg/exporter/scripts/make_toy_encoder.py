#!/usr/bin/env python3
"""Build the bundled toy text encoder snapshot.

Writes a small randomly initialized byte-level T5 encoder (fixed seed) plus
its tokenizer to exporter/toy_encoder/. The snapshot is committed so tests
and demos run offline against a pinned revision; rerunning this script
reproduces it bit-for-bit.
"""

import sys
from pathlib import Path

import torch
from transformers import ByT5Tokenizer, T5Config, T5EncoderModel

OUT = Path(__file__).resolve().parent.parent / "toy_encoder"
SEED = 1234


def main():
    config = T5Config(
        d_model=32,
        num_layers=2,
        num_heads=4,
        d_ff=64,
        d_kv=8,
        vocab_size=384,
        decoder_start_token_id=0,
    )
    torch.manual_seed(SEED)
    model = T5EncoderModel(config)
    model.eval()
    tokenizer = ByT5Tokenizer()
    OUT.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(OUT)
    tokenizer.save_pretrained(OUT)
    total = sum(p.numel() for p in model.parameters())
    print(f"wrote {OUT} parameters={total}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
