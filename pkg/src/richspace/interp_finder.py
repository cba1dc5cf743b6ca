"""Selecting the best interpolation embedding between two prompts.

Given prompt embeddings A and B and a guidance embedding C, the segment
between A and B is sampled at k steps.  C is anchored onto the segment's
line by orthogonal projection (its perpendicular foot), every step is
scored by its row-averaged cosine similarity to that foot, and the scores
of the full (padded) and truncated (non-padding rows only) matrices are
summed.  The argmax of the summed curve is the selected embedding.

A second round of the same procedure mixes a third prompt into the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDirection, ShapeMismatch, ZeroRow
from .parallel import ordered_map
from .tensor_core import as_matrix, frob_inner, lerp, row_cosine_mean

__all__ = [
    "DEFAULT_STEPS",
    "PromptEmbedding",
    "CurveEntry",
    "SimilarityCurve",
    "OptimalSelection",
    "Mix3Selection",
    "perpendicular_foot",
    "cosine_sim_curve",
    "find_optimal",
    "mix3",
]

# Every reported experiment uses 30 interpolation steps.
DEFAULT_STEPS = 30

_COS_SLACK = 1e-9


@dataclass(frozen=True)
class PromptEmbedding:
    """An n x d text embedding plus the count of its non-padding rows."""

    matrix: np.ndarray
    ids_length: int
    prompt_text: str | None = None
    source: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix))
        if not 1 <= self.ids_length <= self.matrix.shape[0]:
            raise ShapeMismatch(
                f"ids_length must be in [1, {self.matrix.shape[0]}], got {self.ids_length}"
            )

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class CurveEntry:
    index: int
    cos_trunc: float
    cos_full: float
    cos_sum: float


@dataclass(frozen=True)
class SimilarityCurve:
    """Per-index scores over interpolation indices 1..k.

    cos_sum is always the exact float sum of the two components; the
    constructor re-checks this so serialized curves cannot drift.
    """

    k: int
    entries: tuple[CurveEntry, ...]

    def __post_init__(self):
        if len(self.entries) != self.k:
            raise ValueError(f"expected {self.k} entries, got {len(self.entries)}")
        for pos, e in enumerate(self.entries, start=1):
            if e.index != pos:
                raise ValueError(f"entry {pos} carries index {e.index}")
            if e.cos_sum != e.cos_trunc + e.cos_full:
                raise ValueError(f"entry {pos}: cos_sum is not the exact component sum")
            if abs(e.cos_trunc) > 1 + _COS_SLACK or abs(e.cos_full) > 1 + _COS_SLACK:
                raise ValueError(f"entry {pos}: cosine outside [-1, 1]")

    @property
    def cos_trunc(self) -> np.ndarray:
        return np.array([e.cos_trunc for e in self.entries])

    @property
    def cos_full(self) -> np.ndarray:
        return np.array([e.cos_full for e in self.entries])

    @property
    def cos_sum(self) -> np.ndarray:
        return np.array([e.cos_sum for e in self.entries])


@dataclass(frozen=True)
class OptimalSelection:
    """The selected index, its embedding, and the curve it was picked from."""

    i_opt: int
    embedding: np.ndarray
    curve: SimilarityCurve

    @property
    def cos_sum_opt(self) -> float:
        return self.curve.entries[self.i_opt - 1].cos_sum


@dataclass(frozen=True)
class Mix3Selection:
    """Result of the two-stage three-prompt mix; stage2 is the final pick."""

    stage1: OptimalSelection
    stage2: OptimalSelection

    @property
    def i_opt(self) -> int:
        return self.stage2.i_opt

    @property
    def embedding(self) -> np.ndarray:
        return self.stage2.embedding

    @property
    def curve(self) -> SimilarityCurve:
        return self.stage2.curve


def degenerate_threshold(n: int, d: int) -> float:
    """Squared-norm floor below which A and B count as the same embedding."""
    return 1e-12 * n * d


def perpendicular_foot(e_a: np.ndarray, e_b: np.ndarray, e_c: np.ndarray) -> np.ndarray:
    """Orthogonal projection of C onto the line through A and B.

    Returns A + l * (B - A) with l = <B-A, C-A> / <B-A, B-A>, all inner
    products Frobenius.  The residual C - foot is then orthogonal to B - A.
    """
    e_a = np.asarray(e_a, dtype=np.float64)
    e_b = np.asarray(e_b, dtype=np.float64)
    e_c = np.asarray(e_c, dtype=np.float64)
    if not (e_a.shape == e_b.shape == e_c.shape):
        raise ShapeMismatch(
            f"embedding shapes differ: {e_a.shape}, {e_b.shape}, {e_c.shape}"
        )
    direction = e_b - e_a
    denom = frob_inner(direction, direction)
    if denom < degenerate_threshold(*e_a.shape):
        raise DegenerateDirection()
    l_proj = frob_inner(direction, e_c - e_a) / denom
    return e_a + l_proj * direction


def cosine_sim_curve(
    e_a: np.ndarray, e_b: np.ndarray, e_c: np.ndarray, k: int
) -> np.ndarray:
    """Scores of the k interpolation steps against C's perpendicular foot.

    Entry i (1-based) is the row-averaged cosine between the i-th step
    from B toward A and the foot of C on the A-B line.
    """
    foot = perpendicular_foot(e_a, e_b, e_c)

    def score(i: int) -> float:
        return row_cosine_mean(lerp(e_a, e_b, i, k), foot)

    return np.array(ordered_map(score, range(1, k + 1)))


def find_optimal(
    a: PromptEmbedding,
    b: PromptEmbedding,
    c: PromptEmbedding,
    k: int = DEFAULT_STEPS,
    cb_blend: bool = False,
) -> OptimalSelection:
    """Pick the interpolation step between A and B best aligned with C.

    Scores the truncated matrices (leading max-ids rows) and the full
    matrices separately, sums the two curves, and takes the argmax; ties
    go to the smallest index.  The returned embedding is the argmax member
    of the scored family, lerp(A, B, i_opt, k), over the full matrices.

    cb_blend=True instead blends the guidance and B endpoints,
    (i_opt/k) * C + ((k-i_opt)/k) * B, for compatibility with callers that
    expect that output; the selection itself is unchanged.
    """
    if not (a.matrix.shape == b.matrix.shape == c.matrix.shape):
        raise ShapeMismatch(
            f"embedding shapes differ: {a.matrix.shape}, {b.matrix.shape}, {c.matrix.shape}"
        )
    n_ids = max(a.ids_length, b.ids_length, c.ids_length)
    cos_trunc = cosine_sim_curve(
        a.matrix[:n_ids, :], b.matrix[:n_ids, :], c.matrix[:n_ids, :], k
    )
    cos_full = cosine_sim_curve(a.matrix, b.matrix, c.matrix, k)
    cos_sum = [float(t) + float(f) for t, f in zip(cos_trunc, cos_full)]
    i_opt = int(np.argmax(cos_sum)) + 1  # argmax takes the first, i.e. smallest, index
    curve = SimilarityCurve(
        k=k,
        entries=tuple(
            CurveEntry(i + 1, float(cos_trunc[i]), float(cos_full[i]), cos_sum[i])
            for i in range(k)
        ),
    )
    if cb_blend:
        embedding = (i_opt / k) * c.matrix + ((k - i_opt) / k) * b.matrix
    else:
        embedding = lerp(a.matrix, b.matrix, i_opt, k)
    return OptimalSelection(i_opt=i_opt, embedding=embedding, curve=curve)


def _staged(err: Exception, stage: int) -> Exception:
    if isinstance(err, DegenerateDirection):
        return DegenerateDirection(stage=stage)
    if isinstance(err, ZeroRow):
        tagged = ZeroRow(err.row, f"stage {stage}: {err}")
        tagged.stage = stage
        return tagged
    return err


def mix3(
    a: PromptEmbedding,
    b: PromptEmbedding,
    c_guid: PromptEmbedding,
    d_prompt: PromptEmbedding,
    e_guid: PromptEmbedding,
    k: int = DEFAULT_STEPS,
) -> Mix3Selection:
    """Mix three prompts by running the finder twice.

    Stage 1 selects between A and B under guidance C; stage 2 selects
    between that result and D under guidance E.  Errors are re-raised
    tagged with the stage that failed.
    """
    try:
        s1 = find_optimal(a, b, c_guid, k)
    except (DegenerateDirection, ZeroRow) as err:
        raise _staged(err, 1) from err
    # The blended embedding has no token count of its own; carry the widest
    # ids length seen among its three parents.
    carried_ids = max(a.ids_length, b.ids_length, c_guid.ids_length)
    blended = PromptEmbedding(
        matrix=s1.embedding, ids_length=carried_ids, source="mix3-stage1"
    )
    try:
        s2 = find_optimal(blended, d_prompt, e_guid, k)
    except (DegenerateDirection, ZeroRow) as err:
        raise _staged(err, 2) from err
    return Mix3Selection(stage1=s1, stage2=s2)
