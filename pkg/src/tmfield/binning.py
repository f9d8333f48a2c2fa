"""Quantile-state discretisation of one-dimensional series.

Every transition estimate in this package operates on the sequence of
equal-count bin labels produced here. Assignment is rank based: the T
observations are ordered by (value, time index) and the sorted positions are
sliced into Q nearly equal blocks, the lowest block becoming state 1. The
result therefore depends only on the ordering of the values, never on their
scale, which is what makes the downstream images invariant under strictly
increasing transforms of the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError

__all__ = ["TimeSeries", "BinSpec", "StateSequence", "as_series", "assign_states"]


@dataclass(frozen=True)
class TimeSeries:
    """A one-dimensional series of at least two finite real observations."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise DataError(
                f"series must be one-dimensional, got shape {values.shape}",
                code="invalid-input",
            )
        if values.size < 2:
            raise DataError(
                f"series needs at least 2 observations, got {values.size}",
                code="invalid-input",
            )
        if not np.all(np.isfinite(values)):
            position = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DataError(
                f"non-finite value at position {position}", code="invalid-input"
            )
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


def as_series(x) -> TimeSeries:
    """Coerce an array-like to a validated :class:`TimeSeries`."""
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class BinSpec:
    """Reported bin metadata.

    ``boundaries`` holds Q+1 values: the series minimum followed by the
    maximum observed value in each bin. They are descriptive output for
    display and diagnostics; state assignment never consults them, and under
    ties that span bins consecutive boundaries may coincide.
    """

    Q: int
    boundaries: tuple[float, ...]
    assignment_mode: str = "rank_based"

    def __post_init__(self):
        if len(self.boundaries) != self.Q + 1:
            raise UsageError(
                f"expected {self.Q + 1} boundaries, got {len(self.boundaries)}",
                code="invalid-bin-count",
            )
        if any(lo > hi for lo, hi in zip(self.boundaries, self.boundaries[1:])):
            raise DataError("bin boundaries must be nondecreasing", code="invalid-input")


@dataclass(frozen=True)
class StateSequence:
    """Per-time-step quantile states in {1..Q} plus the bin metadata."""

    states: np.ndarray
    Q: int
    source_bins: BinSpec

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int64)
        if states.ndim != 1 or states.size == 0:
            raise DataError("state sequence must be a nonempty vector", code="invalid-input")
        if states.min() < 1 or states.max() > self.Q:
            raise DataError(
                f"states must lie in 1..{self.Q}", code="invalid-input"
            )
        object.__setattr__(self, "states", states)

    @property
    def T(self) -> int:
        return int(self.states.size)

    def __len__(self) -> int:
        return self.T


def assign_states(x, Q: int) -> StateSequence:
    """Assign each observation to one of Q equal-count quantile states.

    Observations are ranked by (value, time index); the first ceil(T/Q) or
    floor(T/Q) ranks form state 1, the next block state 2, and so on, with
    the T mod Q surplus observations going to the lowest-numbered states.
    Ties are broken by time index, so equal values earlier in the series
    never land in a higher state than later duplicates.

    Parameters
    ----------
    x : TimeSeries or array-like
        Series of at least two finite values.
    Q : int
        Number of states; must satisfy 2 <= Q <= T.

    Returns
    -------
    StateSequence
        States in {1..Q} with occupancy counts differing by at most one,
        plus the reported bin boundaries.
    """
    series = as_series(x)
    values = series.values
    T = values.size
    Q = int(Q)
    if not 2 <= Q <= T:
        raise UsageError(
            f"bin count must satisfy 2 <= Q <= T={T}, got {Q}",
            code="invalid-bin-count",
        )

    # Stable sort == ordering by (value, time index).
    order = np.argsort(values, kind="stable")
    base, remainder = divmod(T, Q)
    sizes = np.full(Q, base, dtype=np.int64)
    sizes[:remainder] += 1
    edges = np.concatenate(([0], np.cumsum(sizes)))

    states = np.empty(T, dtype=np.int64)
    boundaries = [float(values[order[0]])]
    for k in range(Q):
        block = order[edges[k] : edges[k + 1]]
        states[block] = k + 1
        boundaries.append(float(values[block[-1]]))

    spec = BinSpec(Q=Q, boundaries=tuple(boundaries))
    return StateSequence(states=states, Q=Q, source_bins=spec)
