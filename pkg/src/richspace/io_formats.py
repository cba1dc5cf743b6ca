"""Bit-exact interchange: NPY tensors, prompt manifests, and curve files.

Tensors travel as NPY v1.0 containers holding little-endian float32 in C
order, nothing else.  The writer emits one canonical byte encoding (header
space-padded to a 64-byte boundary), so identical tensors always produce
identical files; the reader accepts any well-formed v1.0 header.  Values
are computed in float64 and narrowed to float32 only at the file boundary.

A manifest is a small JSON sidecar naming the tensor file and recording the
prompt, the padded row count n, the hidden width d, and the count of
non-padding rows (ids_length).
"""

from __future__ import annotations

import ast
import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadMagic,
    DimError,
    IoError,
    ManifestError,
    UnsupportedDtype,
    UnsupportedOrder,
)
from .interp_finder import CurveEntry, PromptEmbedding, SimilarityCurve

__all__ = [
    "Manifest",
    "read_tensor",
    "write_tensor",
    "write_curve",
    "read_curve_json",
    "read_curve_csv",
    "load_manifest",
    "save_manifest",
    "load_prompt_embedding",
]

_MAGIC = b"\x93NUMPY"
_VERSION = b"\x01\x00"
_DESCR = "<f4"
_HEADER_ALIGN = 64


@dataclass(frozen=True)
class Manifest:
    """Sidecar metadata for one exported prompt embedding."""

    prompt: str
    n: int
    d: int
    ids_length: int
    file: str
    dtype: str = "f32"
    encoder: str | None = None

    def __post_init__(self):
        if self.dtype != "f32":
            raise ManifestError(f'dtype must be exactly "f32", got "{self.dtype}"')
        if self.n < 1 or self.d < 1:
            raise ManifestError(f"n and d must be >= 1, got n={self.n}, d={self.d}")
        if not 1 <= self.ids_length <= self.n:
            raise ManifestError(
                f"ids_length must be in [1, {self.n}], got {self.ids_length}"
            )
        if not self.file:
            raise ManifestError("file must be a non-empty relative path")


def write_tensor(path, tensor) -> None:
    """Write a 2-D or 4-D tensor as a canonical f32 NPY v1.0 file."""
    arr = np.asarray(tensor, dtype=np.float64)
    if arr.ndim not in (2, 4):
        raise DimError(f"only 2-D and 4-D tensors are stored, got {arr.ndim}-D")
    if not np.all(np.isfinite(arr)):
        raise IoError("refusing to store non-finite values")
    data = np.ascontiguousarray(arr, dtype="<f4")
    shape = tuple(int(s) for s in arr.shape)
    header = "{'descr': '%s', 'fortran_order': False, 'shape': %s, }" % (
        _DESCR,
        str(shape),
    )
    prefix = len(_MAGIC) + len(_VERSION) + 2
    pad = (-(prefix + len(header) + 1)) % _HEADER_ALIGN
    header_bytes = (header + " " * pad + "\n").encode("latin1")
    try:
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(_VERSION)
            fh.write(struct.pack("<H", len(header_bytes)))
            fh.write(header_bytes)
            fh.write(data.tobytes(order="C"))
    except OSError as err:
        raise IoError(f"cannot write {path}: {err}") from err


def read_tensor(path) -> np.ndarray:
    """Read an f32 NPY v1.0 file into a float64 array (2-D or 4-D)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as err:
        raise IoError(f"cannot read {path}: {err}") from err
    if raw[: len(_MAGIC)] != _MAGIC:
        raise BadMagic(f"{path} does not start with the NPY magic bytes")
    version = raw[len(_MAGIC) : len(_MAGIC) + 2]
    if version != _VERSION:
        raise BadMagic(f"{path} is NPY version {tuple(version)}, only 1.0 is read")
    if len(raw) < 10:
        raise IoError(f"{path} is truncated before the header length")
    (hlen,) = struct.unpack("<H", raw[8:10])
    if len(raw) < 10 + hlen:
        raise IoError(f"{path} is truncated inside the header")
    try:
        meta = ast.literal_eval(raw[10 : 10 + hlen].decode("latin1"))
    except (ValueError, SyntaxError) as err:
        raise IoError(f"{path} has a malformed header: {err}") from err
    if not isinstance(meta, dict):
        raise IoError(f"{path} header is not a dict literal")
    if meta.get("descr") != _DESCR:
        raise UnsupportedDtype(
            f"{path} stores descr {meta.get('descr')!r}, only '<f4' is read"
        )
    if meta.get("fortran_order") is not False:
        raise UnsupportedOrder(f"{path} is not C-ordered")
    shape = meta.get("shape")
    if not (
        isinstance(shape, tuple)
        and all(isinstance(s, int) and s >= 0 for s in shape)
    ):
        raise IoError(f"{path} header has a malformed shape {shape!r}")
    if len(shape) not in (2, 4):
        raise DimError(f"{path} holds a {len(shape)}-D tensor, expected 2-D or 4-D")
    count = 1
    for s in shape:
        count *= s
    payload = raw[10 + hlen :]
    if len(payload) != 4 * count:
        raise IoError(
            f"{path} payload is {len(payload)} bytes, expected {4 * count}"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(shape)
    return arr.astype(np.float64)


def _format_float(v: float) -> str:
    return "%.17g" % v


def write_curve(path, curve: SimilarityCurve, format: str = "csv") -> None:
    """Write a similarity curve as CSV or JSON.

    CSV columns are exactly index,cos_trunc,cos_full,cos_sum with floats at
    17 significant digits, enough to reparse the exact binary values.
    """
    if format == "csv":
        lines = ["index,cos_trunc,cos_full,cos_sum"]
        for e in curve.entries:
            lines.append(
                ",".join(
                    [
                        str(e.index),
                        _format_float(e.cos_trunc),
                        _format_float(e.cos_full),
                        _format_float(e.cos_sum),
                    ]
                )
            )
        body = "\n".join(lines) + "\n"
    elif format == "json":
        body = json.dumps(
            {
                "k": curve.k,
                "entries": [
                    {
                        "index": e.index,
                        "cos_trunc": e.cos_trunc,
                        "cos_full": e.cos_full,
                        "cos_sum": e.cos_sum,
                    }
                    for e in curve.entries
                ],
            },
            indent=2,
        )
        body += "\n"
    else:
        raise ValueError(f'format must be "csv" or "json", got "{format}"')
    try:
        with open(path, "w", newline="") as fh:
            fh.write(body)
    except OSError as err:
        raise IoError(f"cannot write {path}: {err}") from err


def read_curve_json(path) -> SimilarityCurve:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise IoError(f"cannot read curve {path}: {err}") from err
    try:
        entries = tuple(
            CurveEntry(
                index=int(e["index"]),
                cos_trunc=float(e["cos_trunc"]),
                cos_full=float(e["cos_full"]),
                cos_sum=float(e["cos_sum"]),
            )
            for e in data["entries"]
        )
        return SimilarityCurve(k=int(data["k"]), entries=entries)
    except (KeyError, TypeError, ValueError) as err:
        raise IoError(f"curve {path} is malformed: {err}") from err


def read_curve_csv(path) -> SimilarityCurve:
    try:
        with open(path) as fh:
            lines = [line for line in fh.read().splitlines() if line]
    except OSError as err:
        raise IoError(f"cannot read curve {path}: {err}") from err
    if not lines or lines[0] != "index,cos_trunc,cos_full,cos_sum":
        raise IoError(f"curve {path} is missing the canonical CSV header")
    try:
        entries = []
        for line in lines[1:]:
            idx, t, f, s = line.split(",")
            entries.append(CurveEntry(int(idx), float(t), float(f), float(s)))
        return SimilarityCurve(k=len(entries), entries=tuple(entries))
    except ValueError as err:
        raise IoError(f"curve {path} is malformed: {err}") from err


def save_manifest(path, manifest: Manifest) -> None:
    data = {
        "prompt": manifest.prompt,
        "n": manifest.n,
        "d": manifest.d,
        "ids_length": manifest.ids_length,
        "dtype": manifest.dtype,
        "file": manifest.file,
    }
    if manifest.encoder is not None:
        data["encoder"] = manifest.encoder
    try:
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")
    except OSError as err:
        raise IoError(f"cannot write {path}: {err}") from err


def load_manifest(path) -> Manifest:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise IoError(f"cannot read manifest {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ManifestError(f"manifest {path} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ManifestError(f"manifest {path} must hold a JSON object")
    required = {"prompt", "n", "d", "ids_length", "dtype", "file"}
    missing = required - set(data)
    if missing:
        raise ManifestError(f"manifest {path} missing fields: {sorted(missing)}")
    try:
        return Manifest(
            prompt=str(data["prompt"]),
            n=int(data["n"]),
            d=int(data["d"]),
            ids_length=int(data["ids_length"]),
            dtype=str(data["dtype"]),
            file=str(data["file"]),
            encoder=None if data.get("encoder") is None else str(data["encoder"]),
        )
    except (TypeError, ValueError) as err:
        raise ManifestError(f"manifest {path} has malformed fields: {err}") from err


def load_prompt_embedding(manifest_path) -> PromptEmbedding:
    """Read a manifest plus its tensor and wrap them as a PromptEmbedding."""
    manifest = load_manifest(manifest_path)
    tensor_path = os.path.join(os.path.dirname(os.fspath(manifest_path)), manifest.file)
    matrix = read_tensor(tensor_path)
    if matrix.ndim != 2 or matrix.shape != (manifest.n, manifest.d):
        raise ManifestError(
            f"{tensor_path} has shape {matrix.shape}, manifest says ({manifest.n}, {manifest.d})"
        )
    return PromptEmbedding(
        matrix=matrix,
        ids_length=manifest.ids_length,
        prompt_text=manifest.prompt,
        source=os.fspath(manifest_path),
    )
