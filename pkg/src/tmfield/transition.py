"""Empirical transition-matrix estimation over whole series and chunks.

Counting is exact integer arithmetic over consecutive state pairs; a series
of length T contributes T - 1 pairs in total. Chunked estimation partitions
the time axis into K contiguous pieces and counts only pairs whose two
indices fall inside the same chunk, so the K chunk counts sum to T - K pairs
and boundary-straddling transitions are never attributed to either side.

Row normalisation turns counts into a row-stochastic matrix. A state that
never occurs as a transition source inside the counted range has a zero row
total; what happens then is governed by an explicit fallback policy rather
than silently dividing by zero, and the choice taken is recorded per row in
``row_provenance``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binning import StateSequence
from .errors import DataError, UsageError

__all__ = [
    "FALLBACK_POLICIES",
    "CHUNK_POLICIES",
    "TransitionCounts",
    "TransitionMatrix",
    "ChunkPlan",
    "count_transitions",
    "normalize",
    "make_chunks",
    "local_matrices",
]

FALLBACK_POLICIES = ("error", "uniform", "global")
CHUNK_POLICIES = ("strict", "near_equal")


@dataclass(frozen=True)
class TransitionCounts:
    """Q x Q matrix of transition counts plus per-source-state totals."""

    counts: np.ndarray
    row_totals: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        totals = np.asarray(self.row_totals, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise UsageError("counts must be a square matrix", code="dimension-mismatch")
        if counts.min() < 0:
            raise DataError("counts must be nonnegative", code="invalid-input")
        if not np.array_equal(totals, counts.sum(axis=1)):
            raise DataError("row_totals must equal the row sums", code="invalid-input")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "row_totals", totals)

    @property
    def Q(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total_pairs(self) -> int:
        return int(self.row_totals.sum())


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic transition probabilities with per-row provenance.

    ``row_provenance[k]`` records whether row k was estimated from counts
    (``"sampled"``) or substituted by a fallback policy
    (``"fallback_global"`` / ``"fallback_uniform"``).
    """

    probs: np.ndarray
    row_provenance: tuple[str, ...]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] != probs.shape[1]:
            raise UsageError("probs must be a square matrix", code="dimension-mismatch")
        if probs.min() < 0.0 or probs.max() > 1.0:
            raise DataError("probabilities must lie in [0, 1]", code="invalid-input")
        if np.abs(probs.sum(axis=1) - 1.0).max() > 1e-12:
            raise DataError("each row must sum to 1 within 1e-12", code="invalid-input")
        if len(self.row_provenance) != probs.shape[0]:
            raise UsageError("one provenance entry per row required", code="dimension-mismatch")
        allowed = {"sampled", "fallback_global", "fallback_uniform"}
        if not set(self.row_provenance) <= allowed:
            raise UsageError(
                f"row provenance must be one of {sorted(allowed)}",
                code="invalid-input",
            )
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "row_provenance", tuple(self.row_provenance))

    @property
    def Q(self) -> int:
        return int(self.probs.shape[0])


@dataclass(frozen=True)
class ChunkPlan:
    """Partition of {0..T-1} into K contiguous chunks.

    ``ranges`` holds half-open (start, stop) index pairs; ``chunk_of`` maps
    each time index to its chunk id in {0..K-1}.
    """

    T: int
    K: int
    ranges: tuple[tuple[int, int], ...]
    chunk_of: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "chunk_of", np.asarray(self.chunk_of, dtype=np.int64))
        if len(self.ranges) != self.K:
            raise UsageError("one range per chunk required", code="dimension-mismatch")
        if self.chunk_of.shape != (self.T,):
            raise UsageError("chunk_of must cover every time index", code="dimension-mismatch")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(stop - start for start, stop in self.ranges)


def count_transitions(seq: StateSequence, interval: tuple[int, int] | None = None) -> TransitionCounts:
    """Count consecutive state transitions inside a half-open index interval.

    Both endpoints of a counted pair must lie inside the interval, so an
    interval of length n contributes exactly n - 1 pairs and a length-1
    interval yields an all-zero count matrix.

    Parameters
    ----------
    seq : StateSequence
        States in {1..Q}.
    interval : (int, int), optional
        Half-open (start, stop) positions; defaults to the whole series.

    Returns
    -------
    TransitionCounts
    """
    states = seq.states
    T = states.size
    Q = seq.Q
    start, stop = interval if interval is not None else (0, T)
    if not (0 <= start < stop <= T):
        raise UsageError(
            f"interval [{start}, {stop}) must be a nonempty subrange of [0, {T})",
            code="invalid-range",
        )
    src = states[start : stop - 1] - 1
    dst = states[start + 1 : stop] - 1
    counts = np.bincount(src * Q + dst, minlength=Q * Q).reshape(Q, Q)
    return TransitionCounts(counts=counts, row_totals=counts.sum(axis=1))


def normalize(
    counts: TransitionCounts,
    fallback: str = "error",
    global_matrix: TransitionMatrix | None = None,
) -> TransitionMatrix:
    """Turn transition counts into a row-stochastic matrix.

    Rows with a positive total become exact count/total ratios. Zero-total
    rows are handled by the fallback policy: ``"error"`` raises,
    ``"uniform"`` substitutes the flat 1/Q row, and ``"global"`` copies the
    corresponding row of ``global_matrix`` (which must itself contain no
    globally-substituted rows).

    Returns
    -------
    TransitionMatrix
        With per-row provenance recording any substitution.
    """
    if fallback not in FALLBACK_POLICIES:
        raise UsageError(
            f"fallback must be one of {FALLBACK_POLICIES}, got {fallback!r}",
            code="invalid-fallback",
        )
    Q = counts.Q
    if fallback == "global":
        if global_matrix is None:
            raise UsageError(
                "fallback 'global' requires a global_matrix", code="invalid-fallback"
            )
        if global_matrix.Q != Q:
            raise UsageError(
                f"global matrix is {global_matrix.Q}x{global_matrix.Q}, counts are {Q}x{Q}",
                code="dimension-mismatch",
            )
        if "fallback_global" in global_matrix.row_provenance:
            raise UsageError(
                "global_matrix rows must be sampled or uniform-substituted",
                code="invalid-fallback",
            )

    probs = np.zeros((Q, Q), dtype=np.float64)
    provenance = []
    for k in range(Q):
        total = counts.row_totals[k]
        if total > 0:
            probs[k] = counts.counts[k] / total
            provenance.append("sampled")
        elif fallback == "uniform":
            probs[k] = 1.0 / Q
            provenance.append("fallback_uniform")
        elif fallback == "global":
            probs[k] = global_matrix.probs[k]
            provenance.append("fallback_global")
        else:
            raise DataError(
                f"state {k + 1} has no outgoing transitions in the counted range",
                code="unsampled-state",
            )
    return TransitionMatrix(probs=probs, row_provenance=tuple(provenance))


def make_chunks(T: int, K: int, policy: str = "strict") -> ChunkPlan:
    """Partition {0..T-1} into K contiguous chunks.

    Under ``"strict"`` the chunk count must divide T exactly and all chunks
    share size T/K. Under ``"near_equal"`` the first T mod K chunks take the
    extra index. Every chunk must hold at least two indices (otherwise it
    could not contain a single transition), which bounds K by T/2.
    """
    T = int(T)
    K = int(K)
    if policy not in CHUNK_POLICIES:
        raise UsageError(
            f"chunk policy must be one of {CHUNK_POLICIES}, got {policy!r}",
            code="invalid-chunk-policy",
        )
    if T < 2:
        raise UsageError(f"need at least 2 indices to chunk, got T={T}", code="invalid-range")
    if K < 1:
        raise UsageError(f"chunk count must be at least 1, got {K}", code="chunk-too-small")
    if 2 * K > T:
        raise UsageError(
            f"K={K} leaves chunks shorter than 2 indices for T={T}; need K <= T/2",
            code="chunk-too-small",
        )
    if policy == "strict" and T % K != 0:
        raise UsageError(
            f"strict chunking requires K to divide T; K={K} does not divide T={T}",
            code="divisibility",
        )

    base, remainder = divmod(T, K)
    sizes = [base + 1] * remainder + [base] * (K - remainder)
    edges = np.concatenate(([0], np.cumsum(sizes)))
    ranges = tuple((int(edges[k]), int(edges[k + 1])) for k in range(K))
    chunk_of = np.repeat(np.arange(K, dtype=np.int64), sizes)
    return ChunkPlan(T=T, K=K, ranges=ranges, chunk_of=chunk_of)


def local_matrices(
    seq: StateSequence,
    plan: ChunkPlan,
    fallback: str = "global",
    global_matrix: TransitionMatrix | None = None,
) -> list[TransitionMatrix]:
    """Estimate one transition matrix per chunk of the plan.

    With ``fallback="global"`` and no matrix supplied, the whole-series
    matrix is computed here (its own unsampled rows, which can only arise
    from states occurring solely at the final index, fall back to uniform).
    """
    if plan.T != seq.T:
        raise UsageError(
            f"chunk plan covers {plan.T} indices but the series has {seq.T}",
            code="dimension-mismatch",
        )
    if fallback == "global" and global_matrix is None:
        global_matrix = normalize(count_transitions(seq), fallback="uniform")
    return [
        normalize(count_transitions(seq, interval), fallback, global_matrix)
        for interval in plan.ranges
    ]
