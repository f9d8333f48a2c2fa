"""Command-line interface.

Four subcommands: ``encode`` turns a series into NPY / PGM / CSV field
images, ``diagnose`` prints a JSON report of transition matrices, regime
summaries, and plan advice, ``synth`` writes a deterministic synthetic
series as CSV, and ``pool`` shrinks an exported image. Every successful run
prints one JSON record of all effective parameters (defaults included) to
stdout; warnings and errors go to stderr. Exit codes: 0 success, 1 usage
error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .binning import TimeSeries, assign_states
from .dataio import (
    read_csv,
    read_matrix_csv,
    write_matrix_csv,
    write_npy,
    write_pgm,
    write_series_csv,
)
from .diagnostics import LabelThresholds, check_plan, summarize
from .errors import TmfieldError, UsageError
from .field import ChannelStack, global_mtf, multi_resolution, pool
from .synth import GeneratorSpec, generate, load_spec
from .transition import (
    CHUNK_POLICIES,
    FALLBACK_POLICIES,
    count_transitions,
    local_matrices,
    make_chunks,
    normalize,
)

__all__ = ["main"]

FORMATS = ("npy", "pgm", "csv")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; those are usage errors here.
    def error(self, message):
        raise UsageError(message, code="usage")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="tmfield",
        description="Encode time series as Markov transition field images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    encode = sub.add_parser("encode", help="encode a series as field images")
    _series_flags(encode)
    encode.add_argument("--mode", choices=("global", "temporal"), default="temporal",
                        help="whole-series or per-chunk transition estimates")
    encode.add_argument("--pool", type=int, default=None, metavar="S",
                        help="average-pool the output down to S x S")
    encode.add_argument("--format", choices=FORMATS, default="npy")
    encode.add_argument("--output", required=True)

    diagnose = sub.add_parser("diagnose", help="print a JSON diagnostics report")
    _series_flags(diagnose)

    synth = sub.add_parser("synth", help="write a deterministic synthetic series")
    synth.add_argument("--kind", choices=("ar1", "random_walk", "white_noise", "linear_trend"))
    synth.add_argument("--spec", help="JSON generator spec (required for regime_switch)")
    synth.add_argument("--length", type=int)
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--phi", type=float)
    synth.add_argument("--scale", type=float)
    synth.add_argument("--slope", type=float)
    synth.add_argument("--start", type=float)
    synth.add_argument("--output", required=True)

    pool_cmd = sub.add_parser("pool", help="average-pool an exported CSV image")
    pool_cmd.add_argument("--input", required=True, help="square image as numeric CSV")
    pool_cmd.add_argument("--size", type=int, required=True)
    pool_cmd.add_argument("--format", choices=FORMATS, default="npy")
    pool_cmd.add_argument("--output", required=True)

    return parser


def _series_flags(cmd) -> None:
    cmd.add_argument("--input", required=True,
                     help="CSV series, or a .json generator spec")
    cmd.add_argument("--column", default=None,
                     help="column name or 0-based index for multi-column CSV")
    cmd.add_argument("--bins", type=int, action="append", metavar="Q",
                     help="states per channel; repeat for multi-resolution (default 6)")
    cmd.add_argument("--chunks", type=int, default=4, metavar="K")
    cmd.add_argument("--chunk-policy", choices=CHUNK_POLICIES, default="strict")
    cmd.add_argument("--fallback", choices=FALLBACK_POLICIES, default="global")
    cmd.add_argument("--seed", type=int, default=None,
                     help="override the seed of a .json generator spec")


def _load_series(args) -> tuple[TimeSeries, dict]:
    if str(args.input).endswith(".json"):
        spec = load_spec(args.input)
        if args.seed is not None:
            spec = dataclasses.replace(spec, seed=args.seed)
        series = generate(spec)
        source = {"generator": spec.kind, "seed": spec.seed, "length": spec.T}
    else:
        series = read_csv(args.input, column=args.column)
        source = {"file": str(args.input), "length": len(series)}
    return series, source


def _series_params(args) -> dict:
    return {
        "input": str(args.input),
        "column": args.column,
        "bins": args.bins or [6],
        "chunks": args.chunks,
        "chunk_policy": args.chunk_policy,
        "fallback": args.fallback,
        "seed": args.seed,
    }


def _plan_reports(T: int, bins, K: int) -> list[dict]:
    reports = []
    for Q in bins:
        report = check_plan(T, Q, K)
        reports.append(dataclasses.asdict(report))
        if report.status == "warn":
            print(
                f"warning[chunk-guideline]: K={K} leaves "
                f"{report.per_chunk_transitions} transitions per chunk; "
                f"at least {report.required_min} recommended for Q={Q}",
                file=sys.stderr,
            )
    return reports


def _global_matrix(seq, fallback: str):
    # The whole-series matrix cannot fall back to itself; anything other
    # than an explicit error request degrades to the uniform row.
    mode = "error" if fallback == "error" else "uniform"
    return normalize(count_transitions(seq), fallback=mode)


def _cmd_encode(args) -> int:
    series, source = _load_series(args)
    bins = args.bins or [6]
    params = _series_params(args) | {
        "mode": args.mode,
        "pool": args.pool,
        "format": args.format,
        "output": str(args.output),
    }

    if args.mode == "temporal":
        reports = _plan_reports(len(series), bins, args.chunks)
        stack = multi_resolution(series, bins, args.chunks, args.fallback, args.chunk_policy)
        images = list(stack.channels)
    else:
        reports = _plan_reports(len(series), bins, 1)
        images = []
        for Q in bins:
            seq = assign_states(series, Q)
            images.append(global_mtf(seq, _global_matrix(seq, args.fallback)))

    if args.pool is not None:
        arrays = [pool(img, args.pool) for img in images]
    else:
        arrays = [img.entries for img in images]

    if args.format == "npy":
        payload = arrays[0] if len(arrays) == 1 else np.stack(arrays)
        write_npy(payload, args.output)
        shape = list(payload.shape)
    else:
        if len(arrays) != 1:
            raise UsageError(
                f"{args.format} output supports a single channel, got {len(arrays)}",
                code="format-channels",
            )
        writer = write_pgm if args.format == "pgm" else write_matrix_csv
        writer(arrays[0], args.output)
        shape = list(arrays[0].shape)

    record = {
        "command": "encode",
        "params": params,
        "source": source,
        "shape": shape,
        "check_plan": reports,
    }
    print(json.dumps(record))
    return 0


def _summary_dict(matrix, thresholds) -> dict:
    summary = dataclasses.asdict(summarize(matrix, thresholds))
    summary["fallback_rows"] = [
        k + 1 for k, prov in enumerate(matrix.row_provenance) if prov != "sampled"
    ]
    return summary


def _cmd_diagnose(args) -> int:
    series, source = _load_series(args)
    bins = args.bins or [6]
    if len(bins) != 1:
        raise UsageError(
            "diagnose takes exactly one --bins value", code="invalid-bin-count"
        )
    Q = bins[0]
    thresholds = LabelThresholds()

    seq = assign_states(series, Q)
    global_matrix = _global_matrix(seq, args.fallback)
    plan = make_chunks(len(series), args.chunks, args.chunk_policy)
    matrices = local_matrices(seq, plan, args.fallback, global_matrix)
    reports = _plan_reports(len(series), [Q], args.chunks)

    record = {
        "command": "diagnose",
        "params": _series_params(args),
        "source": source,
        "states": seq.states.tolist(),
        "bin_boundaries": list(seq.source_bins.boundaries),
        "label_thresholds": dataclasses.asdict(thresholds),
        "check_plan": reports[0],
        "global": {
            "probs": global_matrix.probs.tolist(),
            "row_provenance": list(global_matrix.row_provenance),
            "summary": _summary_dict(global_matrix, thresholds),
        },
        "chunks": [
            {
                "chunk": k,
                "start": start,
                "stop": stop,
                "probs": matrix.probs.tolist(),
                "row_provenance": list(matrix.row_provenance),
                "summary": _summary_dict(matrix, thresholds),
            }
            for k, ((start, stop), matrix) in enumerate(zip(plan.ranges, matrices))
        ],
    }
    print(json.dumps(record))
    return 0


def _cmd_synth(args) -> int:
    if args.spec is not None:
        if args.kind is not None:
            raise UsageError("give either --kind or --spec, not both", code="usage")
        spec = load_spec(args.spec)
        if args.seed is not None:
            spec = dataclasses.replace(spec, seed=args.seed)
    else:
        if args.kind is None:
            raise UsageError("synth needs --kind or --spec", code="usage")
        if args.length is None:
            raise UsageError("synth needs --length with --kind", code="usage")
        params = {
            key: value
            for key, value in (
                ("phi", args.phi),
                ("scale", args.scale),
                ("slope", args.slope),
                ("start", args.start),
            )
            if value is not None
        }
        seed = args.seed if args.seed is not None else 0
        spec = GeneratorSpec(kind=args.kind, T=args.length, seed=seed, params=params)

    series = generate(spec)
    write_series_csv(series.values, args.output)
    record = {
        "command": "synth",
        "params": {
            "kind": spec.kind,
            "length": spec.T,
            "seed": spec.seed,
            "params": {k: float(v) for k, v in spec.params.items()},
            "segments": [
                {"length": seg.length, "kind": seg.kind,
                 "params": {k: float(v) for k, v in seg.params.items()}}
                for seg in spec.segments
            ],
            "spec": args.spec,
            "output": str(args.output),
        },
    }
    print(json.dumps(record))
    return 0


def _cmd_pool(args) -> int:
    entries = read_matrix_csv(args.input)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise UsageError(
            f"pooling expects a square image, got shape {entries.shape}",
            code="dimension-mismatch",
        )
    pooled = pool(entries, args.size)
    if args.format == "npy":
        write_npy(pooled, args.output)
    elif args.format == "pgm":
        write_pgm(pooled, args.output)
    else:
        write_matrix_csv(pooled, args.output)
    record = {
        "command": "pool",
        "params": {
            "input": str(args.input),
            "size": args.size,
            "format": args.format,
            "output": str(args.output),
        },
        "input_shape": list(entries.shape),
        "shape": list(pooled.shape),
    }
    print(json.dumps(record))
    return 0


_HANDLERS = {
    "encode": _cmd_encode,
    "diagnose": _cmd_diagnose,
    "synth": _cmd_synth,
    "pool": _cmd_pool,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except TmfieldError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
