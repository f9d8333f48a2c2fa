"""Markov transition field encodings for one-dimensional time series.

The pipeline runs in four stages, each usable on its own:

1. :func:`assign_states` discretises a series into Q equal-count quantile
   states, depending only on the ordering of the values.
2. :func:`count_transitions` / :func:`normalize` estimate row-stochastic
   transition matrices, whole-series or per contiguous chunk
   (:func:`make_chunks`, :func:`local_matrices`), with explicit fallback
   policies for states that were never observed as transition sources.
3. :func:`global_mtf` / :func:`tmtf` / :func:`multi_resolution` assemble
   T x T probability images whose rows are bitwise template copies, plus
   :func:`pool` and :func:`distinct_rows` for shrinking and inspecting them.
4. :func:`summarize`, :func:`max_chunks`, and :func:`check_plan` classify
   matrix regimes and size chunk counts against a sample-size guideline.

:mod:`tmfield.synth` generates deterministic test series from a
self-contained PRNG, and :mod:`tmfield.dataio` reads CSV input and writes
byte-deterministic NPY / PGM / CSV artifacts. The ``tmfield`` command-line
tool exposes the whole pipeline.
"""

from .binning import BinSpec, StateSequence, TimeSeries, as_series, assign_states
from .dataio import (
    read_csv,
    read_matrix_csv,
    read_npy,
    write_matrix_csv,
    write_npy,
    write_pgm,
    write_series_csv,
)
from .diagnostics import (
    LABELS,
    LabelThresholds,
    PlanReport,
    RegimeSummary,
    check_plan,
    max_chunks,
    summarize,
)
from .errors import DataError, TmfieldError, UsageError
from .field import (
    ChannelStack,
    FieldImage,
    distinct_rows,
    global_mtf,
    multi_resolution,
    pool,
    tmtf,
)
from .synth import GeneratorSpec, NormalStream, Segment, Xoshiro256PlusPlus, generate, load_spec, spec_from_dict
from .transition import (
    CHUNK_POLICIES,
    FALLBACK_POLICIES,
    ChunkPlan,
    TransitionCounts,
    TransitionMatrix,
    count_transitions,
    local_matrices,
    make_chunks,
    normalize,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "TimeSeries",
    "BinSpec",
    "StateSequence",
    "as_series",
    "assign_states",
    "TransitionCounts",
    "TransitionMatrix",
    "ChunkPlan",
    "FALLBACK_POLICIES",
    "CHUNK_POLICIES",
    "count_transitions",
    "normalize",
    "make_chunks",
    "local_matrices",
    "FieldImage",
    "ChannelStack",
    "global_mtf",
    "tmtf",
    "multi_resolution",
    "pool",
    "distinct_rows",
    "LABELS",
    "LabelThresholds",
    "RegimeSummary",
    "PlanReport",
    "summarize",
    "max_chunks",
    "check_plan",
    "GeneratorSpec",
    "Segment",
    "NormalStream",
    "Xoshiro256PlusPlus",
    "generate",
    "spec_from_dict",
    "load_spec",
    "read_csv",
    "read_npy",
    "read_matrix_csv",
    "write_npy",
    "write_pgm",
    "write_series_csv",
    "write_matrix_csv",
    "TmfieldError",
    "UsageError",
    "DataError",
]
