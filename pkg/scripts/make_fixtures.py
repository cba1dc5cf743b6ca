#!/usr/bin/env python3
"""Regenerate the committed fixtures under fixtures/.

planted/: a prompt triplet whose guidance C sits exactly at step j = 14 of
the A-B segment, plus noise chosen block-orthogonal to the direction (the
leading max-ids rows and the trailing rows are orthogonalized separately,
so the feet of both the truncated and the full scoring curves are exactly
unchanged and the argmax provably stays at j).  Written through the f32
interchange format and re-verified after the round-trip.

degenerate/: a pair with byte-identical A and B tensors, which must fail
with a degenerate-direction error.

maps/line4.json: the four-point 1-d map {0, 1, 2, 3} (V=2, n=2).
"""

import os
import sys

import numpy as np

from richspace import (
    DiscreteVideoMap,
    Manifest,
    PromptEmbedding,
    find_optimal,
    load_prompt_embedding,
    save_manifest,
    save_map_json,
    write_tensor,
)

N, D, K, J = 8, 16, 30, 14
IDS = {"a": 5, "b": 6, "c": 7}
SEED = 2024

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def block_orthogonal_noise(rng, direction, n_ids, scale):
    """Noise orthogonal to the direction on the leading-rows block and on
    the trailing block separately, so both projection feet stay put."""
    noise = rng.normal(size=direction.shape)
    for sl in (slice(0, n_ids), slice(n_ids, direction.shape[0])):
        block = direction[sl]
        denom = float(np.dot(block.ravel(), block.ravel()))
        if denom > 0.0:
            coef = float(np.dot(block.ravel(), noise[sl].ravel())) / denom
            noise[sl] = noise[sl] - coef * block
    return noise * (scale / np.linalg.norm(noise))


def make_planted(out_dir):
    rng = np.random.default_rng(SEED)
    a = rng.normal(size=(N, D))
    b = rng.normal(size=(N, D))
    c = (J / K) * a + ((K - J) / K) * b
    noise = block_orthogonal_noise(rng, b - a, max(IDS.values()), 0.1 * np.linalg.norm(c))
    c = c + noise

    os.makedirs(out_dir, exist_ok=True)
    prompts = {
        "a": "synthetic prompt A",
        "b": "synthetic prompt B",
        "c": "synthetic guidance prompt",
    }
    for name, matrix in (("a", a), ("b", b), ("c", c)):
        write_tensor(os.path.join(out_dir, f"{name}.npy"), matrix)
        save_manifest(
            os.path.join(out_dir, f"{name}.json"),
            Manifest(
                prompt=prompts[name],
                n=N,
                d=D,
                ids_length=IDS[name],
                file=f"{name}.npy",
            ),
        )

    # Verify the plant survives the f32 round-trip.
    loaded = [load_prompt_embedding(os.path.join(out_dir, f"{x}.json")) for x in "abc"]
    sel = find_optimal(*loaded, k=K)
    if sel.i_opt != J:
        raise SystemExit(f"planted fixture broken: i_opt={sel.i_opt}, wanted {J}")
    print(f"planted: i_opt={sel.i_opt} after f32 round-trip")


def make_degenerate(out_dir):
    rng = np.random.default_rng(SEED + 1)
    a = rng.normal(size=(N, D))
    c = rng.normal(size=(N, D))
    os.makedirs(out_dir, exist_ok=True)
    for name, matrix, ids in (("a", a, 5), ("b", a, 5), ("c", c, 6)):
        write_tensor(os.path.join(out_dir, f"{name}.npy"), matrix)
        save_manifest(
            os.path.join(out_dir, f"{name}.json"),
            Manifest(
                prompt=f"degenerate prompt {name}",
                n=N,
                d=D,
                ids_length=ids,
                file=f"{name}.npy",
            ),
        )
    with open(os.path.join(out_dir, "a.npy"), "rb") as fa, open(
        os.path.join(out_dir, "b.npy"), "rb"
    ) as fb:
        if fa.read() != fb.read():
            raise SystemExit("degenerate fixture broken: a.npy != b.npy")
    print("degenerate: a.npy and b.npy byte-identical")


def make_maps(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    line4 = DiscreteVideoMap(V=2, n=2, d=1, table=[[0.0], [1.0], [2.0], [3.0]])
    save_map_json(os.path.join(out_dir, "line4.json"), line4)
    print("maps: line4.json written")


def main():
    make_planted(os.path.join(ROOT, "planted"))
    make_degenerate(os.path.join(ROOT, "degenerate"))
    make_maps(os.path.join(ROOT, "maps"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
