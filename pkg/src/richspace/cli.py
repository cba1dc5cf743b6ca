"""Batch command-line surface.

Exit codes form the scripting contract: 0 success, 1 witness search failed
(the bound was not met), 2 input or validation problems, 3 numeric
degeneracy (coincident endpoints, zero rows, singular attention sums).
stdout carries exactly one machine-parseable summary line per run; all
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from .errors import (
    DegenerateDirection,
    DimError,
    RichSpaceError,
    SingularRowSum,
    ZeroRow,
)
from .interp_finder import DEFAULT_STEPS, find_optimal, mix3
from .io_formats import load_prompt_embedding, write_curve, write_tensor, read_tensor
from .tensor_core import lerp
from .theory_verifier import (
    DiscreteVideoMap,
    any_function_witness_1d,
    bilipschitz_witness,
    covering_witness,
    integer_witness,
    load_map_json,
    report_to_json_dict,
)
from .toy_model import ToyModelConfig, forward, initial_noise

BOUNDS = ("integer_1d", "integer_dd", "any_1d", "covering_dd", "bilipschitz")


def _fmt(v: float) -> str:
    return "%.17g" % v


def cmd_find_optimal(args) -> int:
    a = load_prompt_embedding(args.a)
    b = load_prompt_embedding(args.b)
    c = load_prompt_embedding(args.c)
    sel = find_optimal(a, b, c, k=args.steps)
    if args.out_embedding:
        write_tensor(args.out_embedding, sel.embedding)
    if args.out_curve:
        write_curve(args.out_curve, sel.curve, format=args.format)
    print(f"i_opt={sel.i_opt} k={args.steps} cos_sum={_fmt(sel.cos_sum_opt)}")
    return 0


def cmd_sweep(args) -> int:
    a = load_prompt_embedding(args.a)
    b = load_prompt_embedding(args.b)
    os.makedirs(args.out_dir, exist_ok=True)
    for i in range(1, args.steps + 1):
        step = lerp(a.matrix, b.matrix, i, args.steps)
        write_tensor(os.path.join(args.out_dir, f"interp_{i}.npy"), step)
    print(f"k={args.steps} out_dir={args.out_dir}")
    return 0


def cmd_mix3(args) -> int:
    parts = [load_prompt_embedding(p) for p in (args.a, args.b, args.c, args.d, args.e)]
    sel = mix3(*parts, k=args.steps)
    if args.out_embedding:
        write_tensor(args.out_embedding, sel.embedding)
    if args.out_curve1:
        write_curve(args.out_curve1, sel.stage1.curve, format=args.format)
    if args.out_curve2:
        write_curve(args.out_curve2, sel.stage2.curve, format=args.format)
    print(
        f"i_opt1={sel.stage1.i_opt} i_opt2={sel.stage2.i_opt} "
        f"k={args.steps} cos_sum={_fmt(sel.stage2.cos_sum_opt)}"
    )
    return 0


def cmd_toy_generate(args) -> int:
    e_t = read_tensor(args.embedding)
    if e_t.ndim != 2:
        raise DimError(f"--embedding must be a 2-D tensor, got {e_t.ndim}-D")
    d = e_t.shape[1]
    cfg = ToyModelConfig(
        k_3d=args.layers,
        d=d,
        c=args.channels,
        c_patch=d,
        n_f=args.frames,
        h=args.height,
        w=args.width,
        seed=args.seed,
        T=args.denoise_steps,
    )
    z = initial_noise(cfg)
    for t in range(cfg.T, -1, -1):
        z = forward(e_t, z, cfg, t=t)
    write_tensor(args.out, z)
    payload = np.ascontiguousarray(z, dtype="<f4").tobytes()
    digest = hashlib.sha256(payload).hexdigest()
    print(f"shape={'x'.join(str(s) for s in z.shape)} sha256={digest}")
    return 0


def _random_integer_table(rng, size: int, d: int) -> np.ndarray:
    # Norm spread must clear the witness offset (0.5 per axis) so the
    # closed-form y stays inside the annulus.
    need = 0.5 if d == 1 else 0.5 * math.sqrt(d)
    while True:
        table = rng.integers(0, 10, size=(size, d)).astype(np.float64)
        norms = np.linalg.norm(table, axis=1)
        if norms.max() - norms.min() > need:
            return table


def _random_map(bound: str, V: int, n: int, d: int, seed: int):
    """Seeded map construction for --random, shaped to suit each bound."""
    rng = np.random.default_rng(seed)
    size = V ** n
    extras = {}
    if bound in ("integer_1d", "integer_dd"):
        table = _random_integer_table(rng, size, d)
    elif bound == "any_1d":
        table = rng.uniform(0.0, 10.0, size=(size, d))
    elif bound == "covering_dd":
        dirs = rng.normal(size=(size, d))
        norms = np.linalg.norm(dirs, axis=1)
        norms[norms == 0.0] = 1.0
        table = dirs / norms[:, None] * rng.uniform(0.1, 1.0, size)[:, None]
    else:  # bilipschitz: scaled-isometry images of a positive scalar lattice
        if d < n:
            raise ValueError(f"bilipschitz random maps need d >= n, got d={d}, n={n}")
        gaps = rng.uniform(0.2, 1.0, V)
        words = 1.0 + np.cumsum(gaps)
        alpha = float(rng.uniform(0.5, 2.0))
        q, _ = np.linalg.qr(rng.normal(size=(d, n)))
        g = alpha * q.T  # n x d with orthonormal rows scaled by alpha
        import itertools

        sentences = np.array(
            [
                [words[i] for i in idx]
                for idx in itertools.product(range(V), repeat=n)
            ]
        )
        table = sentences @ g
        extras = {
            "embeddings": words,
            "L": max(alpha, 1.0 / alpha),
            "f": lambda x: np.asarray(x, dtype=np.float64) @ g,
        }
    return DiscreteVideoMap(V=V, n=n, d=d, table=table), extras


def cmd_verify_theorem(args) -> int:
    if (args.map is None) == (args.random is None):
        raise ValueError("exactly one of --map and --random is required")
    if args.map is not None:
        if args.bound == "bilipschitz":
            raise ValueError(
                "bilipschitz needs word embeddings and an evaluable map; use --random"
            )
        vmap = load_map_json(args.map)
        extras = {}
        sample_seed = args.seed
    else:
        V, n, d, rand_seed = args.random
        vmap, extras = _random_map(args.bound, V, n, d, rand_seed)
        sample_seed = rand_seed
    if args.bound in ("integer_1d", "integer_dd"):
        if (args.bound == "integer_1d") != (vmap.d == 1):
            raise ValueError(f"bound {args.bound} does not fit map dimension d={vmap.d}")
        report = integer_witness(vmap)
    elif args.bound == "any_1d":
        report = any_function_witness_1d(vmap, grid_resolution=args.grid_resolution)
    elif args.bound == "covering_dd":
        report = covering_witness(vmap, samples=args.samples, seed=sample_seed)
    else:
        report = bilipschitz_witness(
            vmap,
            extras["embeddings"],
            extras["L"],
            f=extras["f"],
            samples=args.samples,
            seed=sample_seed,
        )
    blob = json.dumps(report_to_json_dict(report))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(blob + "\n")
    print(blob)
    return 0 if report.satisfied else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="richspace",
        description="Interpolation-embedding search, toy video denoising, "
        "and coverage-bound witness checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("find-optimal", help="pick the best A-B interpolation under guidance C")
    p.add_argument("--a", required=True, help="manifest for prompt A")
    p.add_argument("--b", required=True, help="manifest for prompt B")
    p.add_argument("--c", required=True, help="manifest for the guidance prompt")
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--out-embedding")
    p.add_argument("--out-curve")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_find_optimal)

    p = sub.add_parser("sweep", help="write every interpolation step as a tensor")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mix3", help="two-stage mix of three prompts")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True, help="stage-1 guidance manifest")
    p.add_argument("--d", required=True, help="stage-2 prompt manifest")
    p.add_argument("--e", required=True, help="stage-2 guidance manifest")
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--out-embedding")
    p.add_argument("--out-curve1")
    p.add_argument("--out-curve2")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_mix3)

    p = sub.add_parser("toy-generate", help="run the toy denoiser from seeded noise")
    p.add_argument("--embedding", required=True, help="text embedding tensor (NPY)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, default=2)
    p.add_argument("--height", type=int, default=8)
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--channels", type=int, default=4)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--denoise-steps", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_toy_generate)

    p = sub.add_parser("verify-theorem", help="search for a coverage-bound witness")
    p.add_argument("--bound", choices=BOUNDS, required=True)
    p.add_argument("--map", help="map JSON file {V, n, d, outputs}")
    p.add_argument(
        "--random",
        nargs=4,
        type=int,
        metavar=("V", "N", "D", "SEED"),
        help="generate a random map instead of reading one",
    )
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0, help="sampling seed for --map runs")
    p.add_argument("--grid-resolution", type=int, default=None)
    p.add_argument("--out", help="also write the report JSON here")
    p.set_defaults(func=cmd_verify_theorem)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateDirection, ZeroRow, SingularRowSum) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (RichSpaceError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
