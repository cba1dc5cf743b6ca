"""Desk-scale witness searches for the video-coverage separation bounds.

A discrete map sends each of the V^n possible sentences to a video vector
in R^d.  Because the sentence space is finite and the video annulus
m <= ||y|| <= M is not, there must exist videos at least epsilon away from
every sentence image.  This module constructs or searches for such witness
vectors y and reports honestly whether the claimed bound was met:

  - integer maps: the closed-form witness (offset by one half per axis),
  - 1-d maps: an exhaustive grid sweep with epsilon = (M - m) / (2 V^n),
  - general d: seeded maximin sampling inside the annulus against
    epsilon = ((M^d - m^d) / V^n)^(1/d),
  - bi-Lipschitz maps: the midpoint construction y = f((x + x') / 2),
    searched over all sentence pairs, when 0.5 delta_min / L dominates.

Every report records the witness, its exact minimum distance to the table,
the epsilon that was checked, and the search effort spent.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingContinuousMap,
    NonIntegerMap,
    NotBiLipschitz,
)
from .parallel import ordered_map

__all__ = [
    "DiscreteVideoMap",
    "WitnessReport",
    "integer_witness",
    "any_function_witness_1d",
    "covering_witness",
    "bilipschitz_witness",
    "ball_volume",
    "load_map_json",
    "save_map_json",
    "report_to_json_dict",
]

# Slack absorbing float rounding in the satisfied check.
SATISFIED_SLACK = 1e-12

# Relative slack for the pairwise bi-Lipschitz consistency check.
_LIPSCHITZ_TOL = 1e-9

_CHUNK = 2048


@dataclass(frozen=True)
class DiscreteVideoMap:
    """All V^n sentence images in R^d, in lexicographic sentence order."""

    V: int
    n: int
    d: int
    table: np.ndarray

    def __post_init__(self):
        if self.V < 1 or self.n < 1 or self.d < 1:
            raise ValueError(f"V, n, d must be >= 1, got {self.V}, {self.n}, {self.d}")
        t = np.array(self.table, dtype=np.float64)
        expected = self.V ** self.n
        if t.ndim != 2 or t.shape != (expected, self.d):
            raise ValueError(
                f"table must have shape ({expected}, {self.d}), got {t.shape}"
            )
        if not np.all(np.isfinite(t)):
            raise ValueError("table contains non-finite values")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)
        norms = np.linalg.norm(t, axis=1)
        object.__setattr__(self, "_M", float(norms.max()))
        object.__setattr__(self, "_m", float(norms.min()))

    @property
    def M(self) -> float:
        return self._M

    @property
    def m(self) -> float:
        return self._m

    @property
    def size(self) -> int:
        return self.table.shape[0]


@dataclass(frozen=True)
class WitnessReport:
    """A candidate video y and whether it beat the checked bound."""

    y: np.ndarray
    min_dist: float
    epsilon: float
    bound_kind: str
    satisfied: bool
    search_effort: int


def _min_dists(candidates: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Per-candidate minimum distance to the table, chunked over candidates."""

    def scan(chunk):
        return np.linalg.norm(chunk[:, None, :] - table[None, :, :], axis=2).min(axis=1)

    chunks = [candidates[i : i + _CHUNK] for i in range(0, len(candidates), _CHUNK)]
    return np.concatenate(ordered_map(scan, chunks))


def _report(
    vmap: DiscreteVideoMap, y, epsilon: float, kind: str, effort: int
) -> WitnessReport:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    min_dist = float(np.linalg.norm(vmap.table - y[None, :], axis=1).min())
    y_norm = float(np.linalg.norm(y))
    satisfied = (min_dist >= epsilon - SATISFIED_SLACK) and (
        vmap.m <= y_norm <= vmap.M
    )
    return WitnessReport(
        y=y,
        min_dist=min_dist,
        epsilon=float(epsilon),
        bound_kind=kind,
        satisfied=satisfied,
        search_effort=int(effort),
    )


def integer_witness(vmap: DiscreteVideoMap) -> WitnessReport:
    """Closed-form witness for maps whose outputs are all integers.

    In one dimension y = m + 0.5 with epsilon = 0.5; in d >= 2 the witness
    offsets the minimum-norm image by one half along every axis, with
    epsilon = 0.5 sqrt(d).  No search is involved.
    """
    table = vmap.table
    if not np.all(table == np.rint(table)):
        raise NonIntegerMap("map outputs must all be integers")
    if vmap.d == 1:
        y = np.array([vmap.m + 0.5])
        return _report(vmap, y, 0.5, "integer_1d", 1)
    norms = np.linalg.norm(table, axis=1)
    x_min = int(np.argmin(norms))  # first minimum in lexicographic order
    y = table[x_min] + 0.5
    return _report(vmap, y, 0.5 * math.sqrt(vmap.d), "integer_dd", 1)


def any_function_witness_1d(
    vmap: DiscreteVideoMap, grid_resolution: int | None = None
) -> WitnessReport:
    """Grid-sweep witness for arbitrary 1-d maps.

    epsilon = (M - m) / (2 V^n); a uniform grid over [m, M] is swept and
    the point with the largest minimum distance to the table is returned
    (first grid point on ties).  The default resolution keeps the grid
    spacing well below epsilon so the guaranteed witness cannot be missed.
    """
    if vmap.d != 1:
        raise DimensionMismatch(f"1-d bound needs d = 1, got d = {vmap.d}")
    size = vmap.size
    if grid_resolution is None:
        grid_resolution = max(1000, 20 * size)
    elif grid_resolution < 10 * size:
        raise ValueError(f"grid_resolution must be >= {10 * size}")
    epsilon = (vmap.M - vmap.m) / (2 * size)
    grid = np.linspace(vmap.m, vmap.M, grid_resolution)[:, None]
    best = int(np.argmax(_min_dists(grid, vmap.table)))
    return _report(vmap, grid[best], epsilon, "any_1d", grid_resolution)


def _annulus_samples(
    rng: np.random.Generator, count: int, d: int, m: float, M: float
) -> np.ndarray:
    """Uniform (by volume) samples from the annulus m <= ||y|| <= M."""
    dirs = rng.normal(size=(count, d))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms == 0.0] = 1.0
    dirs /= norms[:, None]
    u = rng.random(count)
    radii = (m ** d + u * (M ** d - m ** d)) ** (1.0 / d)
    return dirs * radii[:, None]


def covering_witness(
    vmap: DiscreteVideoMap, samples: int, seed: int
) -> WitnessReport:
    """Seeded maximin search against the covering bound.

    epsilon = ((M^d - m^d) / V^n)^(1/d).  Candidates are drawn uniformly
    from the annulus and the one farthest from the table is reported; ties
    keep the earliest sample.  The search may fail to clear epsilon even
    though a witness exists; that is reported, not raised.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    d = vmap.d
    epsilon = ((vmap.M ** d - vmap.m ** d) / vmap.size) ** (1.0 / d)
    rng = np.random.default_rng(seed)
    candidates = _annulus_samples(rng, samples, d, vmap.m, vmap.M)
    best = int(np.argmax(_min_dists(candidates, vmap.table)))
    return _report(vmap, candidates[best], epsilon, "covering_dd", samples)


def _sentence_lattice(embeddings: np.ndarray, n: int) -> np.ndarray:
    """All V^n sentences as concatenated word vectors, lexicographic."""
    V = embeddings.shape[0]
    rows = [
        np.concatenate([embeddings[i] for i in idx])
        for idx in itertools.product(range(V), repeat=n)
    ]
    return np.array(rows)


def bilipschitz_witness(
    vmap: DiscreteVideoMap,
    embeddings,
    L: float,
    f=None,
    samples: int = 100_000,
    seed: int = 0,
) -> WitnessReport:
    """Witness under a two-sided metric-distortion assumption.

    The table must be consistent with an L-bi-Lipschitz map on the sentence
    lattice built from the word embeddings (checked over all pairs).  The
    bound is epsilon = max(0.5 delta_min / L, covering term).  When the
    midpoint term is at least the covering term, y = f((x + x') / 2) is
    evaluated for every sentence pair and the best candidate is reported,
    which requires f as a callable; otherwise the covering-style annulus
    search runs with the stated samples and seed.
    """
    if L <= 0:
        raise ValueError(f"L must be > 0, got {L}")
    U = np.asarray(embeddings, dtype=np.float64)
    if U.ndim == 1:
        U = U[:, None]
    if U.ndim != 2 or U.shape[0] != vmap.V:
        raise ValueError(f"need {vmap.V} word embeddings, got shape {U.shape}")
    if vmap.V < 2:
        raise ValueError("delta_min needs at least two word embeddings")

    sentences = _sentence_lattice(U, vmap.n)
    table = vmap.table
    for i in range(len(sentences)):
        for j in range(i + 1, len(sentences)):
            dist = float(np.linalg.norm(sentences[i] - sentences[j]))
            fd = float(np.linalg.norm(table[i] - table[j]))
            if fd > L * dist * (1 + _LIPSCHITZ_TOL) or fd < dist / L * (
                1 - _LIPSCHITZ_TOL
            ):
                raise NotBiLipschitz(
                    f"sentence pair ({i}, {j}): distance {dist} maps to {fd}, "
                    f"outside [{dist / L}, {L * dist}]"
                )

    word_diffs = U[:, None, :] - U[None, :, :]
    word_dists = np.linalg.norm(word_diffs, axis=2)
    delta_min = float(word_dists[np.triu_indices(vmap.V, k=1)].min())

    d = vmap.d
    cover_eps = ((vmap.M ** d - vmap.m ** d) / vmap.size) ** (1.0 / d)
    mid_eps = 0.5 * delta_min / L
    epsilon = max(mid_eps, cover_eps)

    if mid_eps >= cover_eps:
        if f is None:
            raise MissingContinuousMap(
                "midpoint construction needs the map as a callable, not a table"
            )
        best_y = None
        best_dist = -1.0
        pairs = 0
        for i in range(len(sentences)):
            for j in range(i + 1, len(sentences)):
                y = np.asarray(
                    f((sentences[i] + sentences[j]) / 2.0), dtype=np.float64
                ).reshape(-1)
                if y.shape != (d,):
                    raise ValueError(f"f returned shape {y.shape}, expected ({d},)")
                md = float(np.linalg.norm(table - y[None, :], axis=1).min())
                pairs += 1
                if md > best_dist:  # strict: ties keep the earliest pair
                    best_dist = md
                    best_y = y
        return _report(vmap, best_y, epsilon, "bilipschitz", pairs)

    rng = np.random.default_rng(seed)
    candidates = _annulus_samples(rng, samples, d, vmap.m, vmap.M)
    best = int(np.argmax(_min_dists(candidates, vmap.table)))
    return _report(vmap, candidates[best], epsilon, "bilipschitz", samples)


def ball_volume(d: int, R: float) -> float:
    """Volume of the d-dimensional ball of radius R."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if R < 0:
        raise ValueError(f"R must be >= 0, got {R}")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * R ** d


def load_map_json(path) -> DiscreteVideoMap:
    """Read a {V, n, d, outputs} JSON file into a DiscreteVideoMap."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ValueError(f"cannot read map file {path}: {err}") from err
    if not isinstance(data, dict):
        raise ValueError("map file must hold a JSON object")
    missing = {"V", "n", "d", "outputs"} - set(data)
    if missing:
        raise ValueError(f"map file missing fields: {sorted(missing)}")
    try:
        table = np.array(data["outputs"], dtype=np.float64)
    except (TypeError, ValueError) as err:
        raise ValueError(f"outputs are not a numeric table: {err}") from err
    if table.ndim == 1:
        table = table[:, None]
    return DiscreteVideoMap(
        V=int(data["V"]), n=int(data["n"]), d=int(data["d"]), table=table
    )


def save_map_json(path, vmap: DiscreteVideoMap) -> None:
    data = {
        "V": vmap.V,
        "n": vmap.n,
        "d": vmap.d,
        "outputs": [[float(v) for v in row] for row in vmap.table],
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def report_to_json_dict(report: WitnessReport) -> dict:
    return {
        "y": [float(v) for v in np.asarray(report.y).reshape(-1)],
        "min_dist": report.min_dist,
        "epsilon": report.epsilon,
        "bound_kind": report.bound_kind,
        "satisfied": report.satisfied,
        "search_effort": report.search_effort,
    }
