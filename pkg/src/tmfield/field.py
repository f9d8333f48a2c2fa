"""Transition-field image assembly, channel stacking, and pooling.

A field image is the T x T array whose (i, j) entry is the estimated
probability of moving from the state at time i to the state at time j. The
assembly here never recomputes probabilities per cell: for each (chunk,
state) pair there is a single length-T row template, and every image row is
a bitwise copy of its template. Rows that share a source state (and chunk)
are therefore identical down to the last bit, which keeps the distinct-row
structure of the image exactly as coarse as the state sequence allows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binning import StateSequence, as_series, assign_states
from .errors import UsageError
from .transition import ChunkPlan, TransitionMatrix, local_matrices, make_chunks

__all__ = [
    "FieldImage",
    "ChannelStack",
    "global_mtf",
    "tmtf",
    "multi_resolution",
    "pool",
    "distinct_rows",
]


@dataclass(frozen=True)
class FieldImage:
    """Square probability image produced by field assembly.

    ``kind`` is ``"global_mtf"`` when a single whole-series matrix filled the
    image and ``"tmtf"`` when rows were drawn from per-chunk matrices.
    """

    entries: np.ndarray
    kind: str
    Q: int
    K: int

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise UsageError(
                f"field image must be square, got shape {entries.shape}",
                code="dimension-mismatch",
            )
        if self.kind not in ("global_mtf", "tmtf"):
            raise UsageError(f"unknown field kind {self.kind!r}", code="invalid-input")
        if entries.size and (entries.min() < 0.0 or entries.max() > 1.0):
            raise UsageError("field entries must lie in [0, 1]", code="invalid-input")
        object.__setattr__(self, "entries", entries)

    @property
    def T(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class ChannelStack:
    """Several field images of the same size stacked as channels."""

    channels: tuple[FieldImage, ...]

    def __post_init__(self):
        if not self.channels:
            raise UsageError("channel stack needs at least one channel", code="invalid-input")
        sizes = {c.T for c in self.channels}
        if len(sizes) != 1:
            raise UsageError(
                f"all channels must share one image size, got {sorted(sizes)}",
                code="dimension-mismatch",
            )
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def T(self) -> int:
        return self.channels[0].T

    @property
    def Q_list(self) -> tuple[int, ...]:
        return tuple(c.Q for c in self.channels)

    def as_array(self) -> np.ndarray:
        """Channel-first (R, T, T) float64 array."""
        return np.stack([c.entries for c in self.channels])


def global_mtf(seq: StateSequence, matrix: TransitionMatrix) -> FieldImage:
    """Fill a T x T image from one whole-series transition matrix.

    Entry (i, j) is ``matrix.probs[state_i, state_j]``; all rows with the
    same source state are bitwise-identical copies of one template, so the
    image has at most Q distinct rows.
    """
    if matrix.Q != seq.Q:
        raise UsageError(
            f"matrix is {matrix.Q}x{matrix.Q} but the sequence has Q={seq.Q}",
            code="dimension-mismatch",
        )
    idx = seq.states - 1
    entries = matrix.probs[np.ix_(idx, idx)]
    return FieldImage(entries=entries, kind="global_mtf", Q=seq.Q, K=1)


def tmtf(seq: StateSequence, plan: ChunkPlan, matrices: list[TransitionMatrix]) -> FieldImage:
    """Fill a T x T image using the local matrix of each row's chunk.

    Row i is the template ``matrices[chunk_of[i]].probs[state_i, state_j]``
    evaluated over all column states j. Only the row index selects a chunk;
    columns always range over the full series, so chunk structure shows up
    as horizontal bands, never vertical ones.
    """
    if plan.T != seq.T:
        raise UsageError(
            f"chunk plan covers {plan.T} indices but the series has {seq.T}",
            code="dimension-mismatch",
        )
    if len(matrices) != plan.K:
        raise UsageError(
            f"need one matrix per chunk: got {len(matrices)} for K={plan.K}",
            code="dimension-mismatch",
        )
    for m in matrices:
        if m.Q != seq.Q:
            raise UsageError(
                f"matrix is {m.Q}x{m.Q} but the sequence has Q={seq.Q}",
                code="dimension-mismatch",
            )
    idx = seq.states - 1
    stacked = np.stack([m.probs for m in matrices])
    templates = stacked[plan.chunk_of, idx, :]  # (T, Q): row template per time step
    entries = templates[:, idx]
    return FieldImage(entries=entries, kind="tmtf", Q=seq.Q, K=plan.K)


def multi_resolution(
    x,
    Q_list,
    K: int,
    fallback: str = "global",
    chunk_policy: str = "strict",
) -> ChannelStack:
    """Encode one series as a stack of chunked field images, one per bin count.

    Every channel shares the same chunk plan; only the state resolution Q
    varies. The result is suitable for direct export as an (R, T, T) array.

    Parameters
    ----------
    x : TimeSeries or array-like
        Input series.
    Q_list : sequence of int
        One bin count per requested channel; must be nonempty.
    K : int
        Number of contiguous chunks shared by all channels.
    fallback : {"global", "uniform", "error"}
        Policy for chunk rows with no observed transitions.
    chunk_policy : {"strict", "near_equal"}
        Whether K must divide T exactly.
    """
    series = as_series(x)
    Q_list = [int(q) for q in Q_list]
    if not Q_list:
        raise UsageError("Q_list must name at least one bin count", code="invalid-bin-count")
    plan = make_chunks(len(series), K, chunk_policy)
    channels = []
    for Q in Q_list:
        seq = assign_states(series, Q)
        matrices = local_matrices(seq, plan, fallback)
        channels.append(tmtf(seq, plan, matrices))
    return ChannelStack(channels=tuple(channels))


def pool(img, S: int) -> np.ndarray:
    """Average-pool a square probability image down to S x S.

    When S divides T this is plain non-overlapping block averaging. When it
    does not, each output cell covers a span of T/S input pixels and
    boundary pixels contribute in proportion to their overlap with the
    span; the integer-derived weights make the result deterministic. Output
    values are clipped to [0, 1] to shed accumulation dust.
    """
    entries = img.entries if isinstance(img, FieldImage) else np.asarray(img, dtype=np.float64)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise UsageError(
            f"pooling expects a square image, got shape {entries.shape}",
            code="dimension-mismatch",
        )
    T = entries.shape[0]
    if entries.size and (entries.min() < 0.0 or entries.max() > 1.0):
        raise UsageError("pooling expects entries in [0, 1]", code="invalid-input")
    S = int(S)
    if not 1 <= S <= T:
        raise UsageError(f"pool size must satisfy 1 <= S <= T={T}, got {S}", code="invalid-pool-size")
    if S == T:
        return entries.copy()
    if T % S == 0:
        width = T // S
        out = entries.reshape(S, width, S, width).mean(axis=(1, 3))
    else:
        weights = _pool_weights(T, S)
        out = weights @ entries @ weights.T
    return np.clip(out, 0.0, 1.0)


def _pool_weights(T: int, S: int) -> np.ndarray:
    # Overlap of pixel [i, i+1) with block [a*T/S, (a+1)*T/S), computed in
    # integer units of 1/S so each row sums to exactly T/T = 1.
    weights = np.zeros((S, T), dtype=np.float64)
    for a in range(S):
        first = (a * T) // S
        last = -(-((a + 1) * T) // S)  # ceil division
        for i in range(first, min(last, T)):
            overlap = min((i + 1) * S, (a + 1) * T) - max(i * S, a * T)
            if overlap > 0:
                weights[a, i] = overlap / T
    return weights


def distinct_rows(img, tol: float = 0.0) -> int:
    """Count distinct rows of an image.

    With ``tol == 0`` rows must match bitwise. With a positive tolerance a
    row joins the first earlier representative whose entrywise maximum
    difference is at most ``tol``, and the representatives are counted.
    """
    entries = img.entries if isinstance(img, FieldImage) else np.asarray(img, dtype=np.float64)
    if entries.ndim != 2:
        raise UsageError(f"expected a 2-D image, got shape {entries.shape}", code="dimension-mismatch")
    if tol < 0:
        raise UsageError(f"tolerance must be nonnegative, got {tol}", code="invalid-input")
    if tol == 0:
        return int(np.unique(entries, axis=0).shape[0])
    representatives: list[np.ndarray] = []
    for row in entries:
        if not any(np.max(np.abs(row - rep)) <= tol for rep in representatives):
            representatives.append(row)
    return len(representatives)
