"""Export padded text-encoder embeddings into the NPY + manifest format."""

from .errors import EncoderUnavailable, ExportError, PromptTooLong
from .export import (
    DEFAULT_MAX_LENGTH,
    ExportRequest,
    ManifestRecord,
    encode_prompt,
    export,
    load_encoder,
)

__all__ = [
    "DEFAULT_MAX_LENGTH",
    "EncoderUnavailable",
    "ExportError",
    "ExportRequest",
    "ManifestRecord",
    "PromptTooLong",
    "encode_prompt",
    "export",
    "load_encoder",
]

__version__ = "0.1.0"
