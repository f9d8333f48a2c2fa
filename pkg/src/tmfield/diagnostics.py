"""Regime diagnostics and chunk-count planning for transition matrices.

The summary statistics are three mass averages plus one deviation: the mean
diagonal entry, the strict upper- and lower-triangle sums scaled by 1/Q
(so the three masses always sum to one), and the maximum entrywise distance
from the flat 1/Q matrix. The regime label is a pure function of those four
numbers; every threshold involved is an explicit constant so callers can
report or override them.

Planning helpers size K against the rule of thumb that a Q-state matrix
wants at least 5*Q^2 observed transitions per chunk before its rows mean
much. ``check_plan`` never fails a run; it reports pass or warn and leaves
the decision to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .transition import TransitionMatrix

__all__ = [
    "LABELS",
    "LabelThresholds",
    "RegimeSummary",
    "PlanReport",
    "summarize",
    "max_chunks",
    "check_plan",
]

LABELS = (
    "persistent",
    "mean_reverting",
    "trending_up",
    "trending_down",
    "uniform_like",
    "mixed",
)


@dataclass(frozen=True)
class LabelThresholds:
    """Constants behind the regime labels.

    ``uniform_max_dev`` and ``reverting_max_diag`` are multiples of the
    uniform rate 1/Q; ``persistent_min_diag`` likewise. ``trend_max_opposite``
    is an absolute bound on the mass in the triangle opposing the trend
    direction. Note that weakly autocorrelated processes produce matrices
    statistically indistinguishable from uniform under these summaries, so
    no setting of the constants separates them reliably at moderate T.
    """

    uniform_max_dev: float = 0.5
    trend_max_opposite: float = 0.05
    persistent_min_diag: float = 2.0
    reverting_max_diag: float = 0.5


@dataclass(frozen=True)
class RegimeSummary:
    """Mass decomposition and regime label of one transition matrix."""

    diag_mass: float
    upper_mass: float
    lower_mass: float
    uniformity_dev: float
    label: str


def summarize(matrix: TransitionMatrix, thresholds: LabelThresholds | None = None) -> RegimeSummary:
    """Summarise a transition matrix and classify its regime.

    The masses are per-row averages: ``diag_mass`` is the mean diagonal
    entry and the triangle masses are the strict-triangle sums divided by
    Q, so ``diag_mass + upper_mass + lower_mass == 1`` up to rounding.
    ``uniformity_dev`` is ``max |W_kl - 1/Q|``.

    Labels are decided in fixed precedence order:

    1. ``uniform_like``    when uniformity_dev <= uniform_max_dev / Q
    2. ``trending_up``     when lower_mass <= trend_max_opposite and
       upper_mass > lower_mass (``trending_down`` symmetrically)
    3. ``persistent``      when diag_mass >= persistent_min_diag / Q and
       diag_mass >= max(upper_mass, lower_mass)
    4. ``mean_reverting``  when diag_mass <= reverting_max_diag / Q
    5. ``mixed``           otherwise
    """
    if thresholds is None:
        thresholds = LabelThresholds()
    probs = matrix.probs
    Q = matrix.Q
    diag_mass = float(np.trace(probs) / Q)
    upper_mass = float(np.triu(probs, 1).sum() / Q)
    lower_mass = float(np.tril(probs, -1).sum() / Q)
    uniformity_dev = float(np.max(np.abs(probs - 1.0 / Q)))
    label = _label(diag_mass, upper_mass, lower_mass, uniformity_dev, Q, thresholds)
    return RegimeSummary(
        diag_mass=diag_mass,
        upper_mass=upper_mass,
        lower_mass=lower_mass,
        uniformity_dev=uniformity_dev,
        label=label,
    )


def _label(
    diag_mass: float,
    upper_mass: float,
    lower_mass: float,
    uniformity_dev: float,
    Q: int,
    th: LabelThresholds,
) -> str:
    uniform_rate = 1.0 / Q
    if uniformity_dev <= th.uniform_max_dev * uniform_rate:
        return "uniform_like"
    if lower_mass <= th.trend_max_opposite and upper_mass > lower_mass:
        return "trending_up"
    if upper_mass <= th.trend_max_opposite and lower_mass > upper_mass:
        return "trending_down"
    if diag_mass >= th.persistent_min_diag * uniform_rate and diag_mass >= max(upper_mass, lower_mass):
        return "persistent"
    if diag_mass <= th.reverting_max_diag * uniform_rate:
        return "mean_reverting"
    return "mixed"


@dataclass(frozen=True)
class PlanReport:
    """Advisory verdict on a proposed (T, Q, K) estimation plan."""

    T: int
    Q: int
    K: int
    per_chunk_transitions: int
    required_min: int
    status: str


def max_chunks(T: int, Q: int) -> int:
    """Largest K whose chunks each hold at least 5*Q^2 transitions.

    A chunk of length L yields L - 1 transitions, so the bound is
    floor(T / (5*Q^2 + 1)); at least 1 is always reported because the
    unchunked estimate remains available no matter how short the series.
    """
    T = int(T)
    Q = int(Q)
    if T < 2:
        raise UsageError(f"series length must be at least 2, got {T}", code="invalid-range")
    if Q < 2:
        raise UsageError(f"bin count must be at least 2, got {Q}", code="invalid-bin-count")
    return max(1, T // (5 * Q * Q + 1))


def check_plan(T: int, Q: int, K: int) -> PlanReport:
    """Compare a proposed chunk count against the sample-size guideline.

    The worst chunk under either chunk policy holds floor(T/K) indices and
    therefore floor(T/K) - 1 transitions; the guideline asks for 5*Q^2 of
    them. The report's ``status`` is ``"pass"`` or ``"warn"`` and carries
    no other consequence.
    """
    T = int(T)
    Q = int(Q)
    K = int(K)
    if T < 2:
        raise UsageError(f"series length must be at least 2, got {T}", code="invalid-range")
    if Q < 2:
        raise UsageError(f"bin count must be at least 2, got {Q}", code="invalid-bin-count")
    if K < 1:
        raise UsageError(f"chunk count must be at least 1, got {K}", code="chunk-too-small")
    if 2 * K > T:
        raise UsageError(
            f"K={K} leaves chunks shorter than 2 indices for T={T}", code="chunk-too-small"
        )
    per_chunk = T // K - 1
    required = 5 * Q * Q
    status = "pass" if per_chunk >= required else "warn"
    return PlanReport(
        T=T, Q=Q, K=K, per_chunk_transitions=per_chunk, required_min=required, status=status
    )
