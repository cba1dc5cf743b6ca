"""Dump text-encoder hidden states into the NPY + manifest interchange format.

Each prompt becomes one float32 NPY tensor of shape (max_length, d) — the
encoder's output for the prompt padded to a fixed length, padding rows kept
exactly as the encoder emits them — plus one manifest JSON recording the
prompt text, the tensor shape, and the true non-padding token count.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EncoderUnavailable, PromptTooLong

DEFAULT_MAX_LENGTH = 266
MANIFEST_DTYPE = "f32"


@dataclass(frozen=True)
class ExportRequest:
    prompts: tuple
    encoder_id: str
    max_length: int = DEFAULT_MAX_LENGTH
    out_dir: str = "."

    def __post_init__(self):
        if not self.prompts:
            raise ValueError("prompts must be non-empty")
        if any(not isinstance(p, str) or not p.strip() for p in self.prompts):
            raise ValueError("every prompt must be a non-blank string")
        if self.max_length < 1:
            raise ValueError(f"max_length must be >= 1, got {self.max_length}")
        object.__setattr__(self, "prompts", tuple(self.prompts))


@dataclass(frozen=True)
class ManifestRecord:
    """One written manifest, mirroring its JSON keys plus the file locations."""

    prompt: str
    n: int
    d: int
    ids_length: int
    dtype: str
    file: str
    encoder: str
    manifest_path: str
    tensor_path: str


def load_encoder(encoder_id: str):
    """Load tokenizer and encoder; wrap load failures in EncoderUnavailable."""
    try:
        import torch  # noqa: F401  (defer heavy imports to call time)
        from transformers import AutoTokenizer, T5EncoderModel
        from transformers.utils import logging as hf_logging

        hf_logging.disable_progress_bar()
        tokenizer = AutoTokenizer.from_pretrained(encoder_id)
        model = T5EncoderModel.from_pretrained(encoder_id)
    except (OSError, EnvironmentError, ValueError) as err:
        raise EncoderUnavailable(f"cannot load encoder {encoder_id!r}: {err}") from err
    model.eval()
    return tokenizer, model


def encode_prompt(tokenizer, model, prompt: str, max_length: int):
    """Hidden states (max_length, d) float32 and the non-padding token count."""
    import torch

    plain = tokenizer(prompt, padding=False, truncation=False)
    token_count = len(plain["input_ids"])
    if token_count > max_length:
        raise PromptTooLong(prompt, token_count, max_length)
    batch = tokenizer(
        prompt,
        padding="max_length",
        max_length=max_length,
        return_tensors="pt",
    )
    with torch.no_grad():
        hidden = model(
            input_ids=batch["input_ids"], attention_mask=batch["attention_mask"]
        ).last_hidden_state
    matrix = np.ascontiguousarray(hidden[0].numpy(), dtype="<f4")
    ids_length = int(batch["attention_mask"].sum())
    return matrix, ids_length


def export(req: ExportRequest):
    """Write one NPY + manifest pair per prompt; return the written records."""
    tokenizer, model = load_encoder(req.encoder_id)
    out_dir = Path(req.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for idx, prompt in enumerate(req.prompts):
        matrix, ids_length = encode_prompt(tokenizer, model, prompt, req.max_length)
        stem = f"prompt_{idx:03d}"
        tensor_path = out_dir / f"{stem}.npy"
        manifest_path = out_dir / f"{stem}.json"
        np.save(tensor_path, matrix)
        manifest = {
            "prompt": prompt,
            "n": int(matrix.shape[0]),
            "d": int(matrix.shape[1]),
            "ids_length": ids_length,
            "dtype": MANIFEST_DTYPE,
            "file": tensor_path.name,
            "encoder": req.encoder_id,
        }
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
        records.append(
            ManifestRecord(
                prompt=prompt,
                n=manifest["n"],
                d=manifest["d"],
                ids_length=ids_length,
                dtype=MANIFEST_DTYPE,
                file=manifest["file"],
                encoder=req.encoder_id,
                manifest_path=str(manifest_path),
                tensor_path=str(tensor_path),
            )
        )
    return records
