"""End-to-end acceptance checks.

Each test states one headline guarantee of the package, at its stated
tolerance and runtime budget, and fails loudly if the guarantee slips.
"""

import hashlib
import subprocess
import sys
import time

import numpy as np

import _oracle
from helpers import fixture, planted_instance, random_triplet

from richspace import (
    DiscreteVideoMap,
    PromptEmbedding,
    ToyModelConfig,
    any_function_witness_1d,
    covering_witness,
    find_optimal,
    generate,
    integer_witness,
    perpendicular_foot,
    read_tensor,
    write_tensor,
)


def wrap(a, b, c, ids):
    return (
        PromptEmbedding(a, ids[0]),
        PromptEmbedding(b, ids[1]),
        PromptEmbedding(c, ids[2]),
    )


def test_acceptance_oracle_equivalence_200_instances():
    start = time.monotonic()
    mismatches = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        a, b, c = random_triplet(seed, n=8, d=16)
        ids = tuple(
            int(v) for v in rng.choice(np.arange(1, 9), size=3, replace=False)
        )
        pa, pb, pc = wrap(a, b, c, ids)
        got = find_optimal(pa, pb, pc, k=30).i_opt
        want = _oracle.best_index(
            a.tolist(), b.tolist(), c.tolist(), ids[0], ids[1], ids[2], 30
        )
        if got != want:
            mismatches += 1
    elapsed = time.monotonic() - start
    assert mismatches == 0
    assert elapsed < 5.0, f"took {elapsed:.2f}s, budget 5s"


def test_acceptance_planted_recovery_with_and_without_noise():
    k = 30
    hits_clean = 0
    hits_noisy = 0
    for seed in range(100):
        j = 1 + seed % k
        a, b, c, ids = planted_instance(seed, k=k, j=j, rel_noise=0.0)
        sel = find_optimal(*wrap(a, b, c, ids), k=k)
        hits_clean += int(sel.i_opt == j)
        a, b, c, ids = planted_instance(seed, k=k, j=j, rel_noise=0.1)
        sel = find_optimal(*wrap(a, b, c, ids), k=k)
        hits_noisy += int(sel.i_opt == j)
    assert hits_clean == 100
    assert hits_noisy == 100


def test_acceptance_foot_orthogonality_and_optimality():
    for seed in range(100):
        a, b, c = random_triplet(seed, n=8, d=16)
        foot = perpendicular_foot(a, b, c)
        direction = b - a
        residual = c - foot
        inner = abs(float(np.dot(direction.ravel(), residual.ravel())))
        scale = float(np.linalg.norm(direction)) * float(np.linalg.norm(residual))
        assert inner <= 1e-9 * max(scale, 1.0)
        # the foot is the closest point on the whole line, sampled densely
        foot_dist = float(np.linalg.norm(residual))
        for t in np.linspace(-2.0, 3.0, 1000):
            point = a + t * direction
            assert foot_dist <= float(np.linalg.norm(c - point)) + 1e-9


def test_acceptance_any_1d_exact_radius_and_integer_lemma():
    start = time.monotonic()
    vmap = DiscreteVideoMap(2, 2, 1, [[0.0], [1.0], [2.0], [3.0]])
    report = any_function_witness_1d(vmap)
    assert report.epsilon == 0.375
    assert report.satisfied
    assert report.min_dist >= 0.375
    elapsed = time.monotonic() - start
    assert elapsed < 1.0, f"took {elapsed:.2f}s, budget 1s"

    satisfied = 0
    done = 0
    seed = 0
    while done < 50:
        rng = np.random.default_rng(1000 + seed)
        seed += 1
        n = int(rng.integers(1, 6))
        table = rng.integers(0, 10, size=(2 ** n, 1)).astype(float)
        if table.max() - table.min() <= 0.5:
            continue  # witness must fit between the norm extremes
        done += 1
        rep = integer_witness(DiscreteVideoMap(2, n, 1, table))
        assert rep.y[0] == table.min() + 0.5
        satisfied += int(rep.satisfied)
    assert satisfied == 50


def test_acceptance_covering_theorem_desk_scale():
    start = time.monotonic()
    satisfied = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        dirs = rng.normal(size=(4, 2))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = rng.uniform(0.1, 1.0, size=4)
        table = dirs * radii[:, None]
        vmap = DiscreteVideoMap(2, 2, 2, table)
        report = covering_witness(vmap, samples=100_000, seed=seed)
        if report.satisfied:
            satisfied += 1
            # independent re-verification of the witness actually reported
            dist = _oracle.min_dist(table.tolist(), list(report.y))
            assert abs(dist - report.min_dist) <= 1e-9
            assert dist >= report.epsilon - 1e-12
            norm = _oracle.norm(list(report.y))
            assert vmap.m - 1e-12 <= norm <= vmap.M + 1e-12
    elapsed = time.monotonic() - start
    assert satisfied >= 19, f"only {satisfied}/20 maps satisfied"
    assert elapsed < 10.0, f"took {elapsed:.2f}s, budget 10s"


def test_acceptance_toy_pipeline_deterministic_and_normalized():
    start = time.monotonic()
    cfg = ToyModelConfig(k_3d=2, d=8, c=4, c_patch=8, n_f=2, h=8, w=8, seed=3, T=4)
    a, b, c = random_triplet(77, n=16, d=8)
    pa, pb, pc = (
        PromptEmbedding(a, 10),
        PromptEmbedding(b, 12),
        PromptEmbedding(c, 14),
    )
    log = []
    v1 = generate(pa, pb, pc, 10, 4, cfg, row_sum_log=log)
    v2 = generate(pa, pb, pc, 10, 4, cfg)
    elapsed = time.monotonic() - start
    assert v1.shape == (2, 8, 8, 4)
    assert np.array_equal(v1, v2)
    assert len(log) == (cfg.T + 1) * cfg.k_3d
    for sums in log:
        assert np.max(np.abs(sums - 1.0)) <= 1e-10
    assert elapsed < 2.0, f"took {elapsed:.2f}s, budget 2s"


def test_acceptance_io_bit_exact_1000_tensors(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "t.npy"
    for _ in range(1000):
        shape = (int(rng.integers(1, 12)), int(rng.integers(1, 12)))
        x = (rng.normal(size=shape) * 10.0 ** rng.integers(-6, 7)).astype("<f4")
        write_tensor(path, x)
        back = read_tensor(path)
        assert np.array_equal(back.astype("<f4"), x)
        assert hashlib.sha256(back.astype("<f4").tobytes()).digest() == hashlib.sha256(
            np.ascontiguousarray(x).tobytes()
        ).digest()
    # canonical header: same content twice gives identical files
    x = rng.normal(size=(3, 5))
    p1, p2 = tmp_path / "h1.npy", tmp_path / "h2.npy"
    write_tensor(p1, x)
    write_tensor(p2, x)
    assert p1.read_bytes() == p2.read_bytes()


def test_acceptance_cli_contract():
    def run(*argv):
        return subprocess.run(
            [sys.executable, "-m", "richspace", *argv],
            capture_output=True,
            text=True,
        )

    ok = run(
        "find-optimal",
        "--a", fixture("planted", "a.json"),
        "--b", fixture("planted", "b.json"),
        "--c", fixture("planted", "c.json"),
    )
    assert ok.returncode == 0, ok.stderr
    assert ok.stdout.startswith("i_opt=14 ")

    degen = run(
        "find-optimal",
        "--a", fixture("degenerate", "a.json"),
        "--b", fixture("degenerate", "b.json"),
        "--c", fixture("degenerate", "c.json"),
    )
    assert degen.returncode == 3

    missing = run(
        "find-optimal",
        "--a", fixture("planted", "a.json"),
        "--b", "/no/such/file.json",
        "--c", fixture("planted", "c.json"),
    )
    assert missing.returncode == 2
