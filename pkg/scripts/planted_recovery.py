#!/usr/bin/env python3
"""Measure how reliably find_optimal recovers a planted guidance index.

For each trial, prompts A and B are random Gaussian matrices and the guidance
C is planted exactly at step j of the A-B segment, optionally perturbed by
noise orthogonal to B-A.  The recovery rate is the fraction of trials where
the selected index equals j.
"""

import argparse
import sys

import numpy as np

from richspace import PromptEmbedding, find_optimal


def orthogonal_noise(rng, direction, n_ids, scale):
    noise = rng.normal(size=direction.shape)
    for sl in (slice(0, n_ids), slice(n_ids, direction.shape[0])):
        block = direction[sl]
        denom = float(np.dot(block.ravel(), block.ravel()))
        if denom > 0.0:
            coef = float(np.dot(block.ravel(), noise[sl].ravel())) / denom
            noise[sl] = noise[sl] - coef * block
    nn = float(np.linalg.norm(noise))
    return noise * (scale / nn) if nn > 0.0 else noise


def run_trial(seed, n, d, k, rel_noise):
    rng = np.random.default_rng(seed)
    j = 1 + seed % k
    a = rng.normal(size=(n, d))
    b = rng.normal(size=(n, d))
    c = (j / k) * a + ((k - j) / k) * b
    ids = tuple(int(v) for v in rng.choice(np.arange(1, n + 1), 3, replace=False))
    if rel_noise > 0.0:
        scale = rel_noise * float(np.linalg.norm(c))
        c = c + orthogonal_noise(rng, b - a, max(ids), scale)
    sel = find_optimal(
        PromptEmbedding(a, ids[0]),
        PromptEmbedding(b, ids[1]),
        PromptEmbedding(c, ids[2]),
        k=k,
    )
    return int(sel.i_opt == j)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--n", type=int, default=8)
    parser.add_argument("--d", type=int, default=16)
    parser.add_argument("--steps", type=int, default=30)
    parser.add_argument(
        "--noise",
        type=float,
        nargs="*",
        default=[0.0, 0.05, 0.1, 0.2, 0.5],
        help="relative orthogonal-noise levels to sweep",
    )
    args = parser.parse_args(argv)

    print(f"n={args.n} d={args.d} k={args.steps} trials={args.trials}")
    for level in args.noise:
        hits = sum(
            run_trial(seed, args.n, args.d, args.steps, level)
            for seed in range(args.trials)
        )
        print(f"noise={level:.3f} recovered={hits}/{args.trials}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
