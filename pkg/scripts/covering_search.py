#!/usr/bin/env python3
"""Sweep covering-bound witness searches over random discrete video maps.

Each map sends V^n sentences to points in an annulus in R^d; the search
samples the annulus for a point farther than the covering radius from every
image.  Reports the satisfied rate and the observed separation margins.
"""

import argparse
import sys

import numpy as np

from richspace import DiscreteVideoMap, covering_witness


def random_annulus_map(seed, v, n, d):
    rng = np.random.default_rng(seed)
    size = v ** n
    dirs = rng.normal(size=(size, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = rng.uniform(0.1, 1.0, size=size)
    return DiscreteVideoMap(v, n, d, dirs * radii[:, None])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--maps", type=int, default=20)
    parser.add_argument("--v", type=int, default=2)
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--d", type=int, default=2)
    parser.add_argument("--samples", type=int, default=100_000)
    args = parser.parse_args(argv)

    satisfied = 0
    margins = []
    for seed in range(args.maps):
        vmap = random_annulus_map(seed, args.v, args.n, args.d)
        report = covering_witness(vmap, samples=args.samples, seed=seed)
        margin = report.min_dist - report.epsilon
        flag = "ok " if report.satisfied else "MISS"
        print(
            f"map_seed={seed} {flag} eps={report.epsilon:.6f} "
            f"min_dist={report.min_dist:.6f} margin={margin:+.6f}"
        )
        satisfied += int(report.satisfied)
        if report.satisfied:
            margins.append(margin)
    print(f"satisfied {satisfied}/{args.maps} samples={args.samples}")
    if margins:
        print(
            f"margin min={min(margins):.6f} "
            f"median={float(np.median(margins)):.6f} max={max(margins):.6f}"
        )
    return 0 if satisfied == args.maps else 1


if __name__ == "__main__":
    sys.exit(main())
