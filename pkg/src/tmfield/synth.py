"""Deterministic synthetic series for exercising the encoding pipeline.

Reproducibility is part of the contract here, so nothing is delegated to a
platform RNG. Uniform 64-bit words come from xoshiro256++ seeded through
splitmix64, both implemented directly from their published constants, and
normal variates come from the Box-Muller transform applied to 53-bit
uniforms on (0, 1]. Identical seeds therefore give identical integer
streams everywhere, and identical floating-point output wherever IEEE-754
doubles and the usual libm functions behave alike.

Generators share one normal stream per call to :func:`generate`, consumed
in time order, so a regime-switching series is reproducible as a whole
rather than per segment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .binning import TimeSeries
from .errors import DataError, UsageError

__all__ = [
    "KINDS",
    "SplitMix64",
    "Xoshiro256PlusPlus",
    "NormalStream",
    "Segment",
    "GeneratorSpec",
    "generate",
    "spec_from_dict",
    "load_spec",
]

KINDS = ("ar1", "random_walk", "white_noise", "linear_trend", "regime_switch")

_MASK64 = (1 << 64) - 1
# Largest AR coefficient magnitude accepted; leaves a small margin above 1
# for near-unit-root experiments while rejecting clearly explosive values.
_MAX_PHI = 1.05


class SplitMix64:
    """splitmix64 stream, used only to expand a seed into generator state."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256PlusPlus:
    """xoshiro256++ with its 256-bit state filled by four splitmix64 words."""

    def __init__(self, seed: int):
        mixer = SplitMix64(seed)
        self._s = [mixer.next_uint64() for _ in range(4)]

    def next_uint64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def next_unit(self) -> float:
        """Uniform double on (0, 1], from the top 53 bits of one word."""
        return ((self.next_uint64() >> 11) + 1) * 2.0**-53


class NormalStream:
    """Standard normal variates via Box-Muller, two per uniform pair."""

    def __init__(self, seed: int):
        self._rng = Xoshiro256PlusPlus(seed)
        self._spare: float | None = None

    def next(self) -> float:
        if self._spare is not None:
            value, self._spare = self._spare, None
            return value
        u1 = self._rng.next_unit()
        u2 = self._rng.next_unit()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._spare = radius * math.sin(angle)
        return radius * math.cos(angle)

    def take(self, n: int) -> np.ndarray:
        return np.array([self.next() for _ in range(n)], dtype=np.float64)


@dataclass(frozen=True)
class Segment:
    """One piece of a regime-switching series."""

    length: int
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS or self.kind == "regime_switch":
            raise UsageError(
                f"segment kind must be a non-switching generator, got {self.kind!r}",
                code="invalid-params",
            )
        if int(self.length) < 1:
            raise UsageError(
                f"segment length must be positive, got {self.length}",
                code="invalid-params",
            )
        object.__setattr__(self, "length", int(self.length))
        _validate_params(self.kind, self.params)


@dataclass(frozen=True)
class GeneratorSpec:
    """Fully-determined recipe for one synthetic series.

    ``T`` is the total length, ``seed`` drives the shared noise stream, and
    ``params`` carries the per-kind constants. ``segments`` is used only by
    ``kind="regime_switch"``, whose total segment length must equal T.
    """

    kind: str
    T: int
    seed: int
    params: dict = field(default_factory=dict)
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown generator kind {self.kind!r}", code="invalid-params")
        object.__setattr__(self, "T", int(self.T))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.kind == "regime_switch":
            if not self.segments:
                raise UsageError(
                    "regime_switch needs at least one segment", code="invalid-params"
                )
            total = sum(seg.length for seg in self.segments)
            if self.T != total:
                raise UsageError(
                    f"segment lengths sum to {total} but T={self.T}",
                    code="invalid-params",
                )
            if self.params:
                raise UsageError(
                    "regime_switch takes parameters on its segments", code="invalid-params"
                )
        else:
            if self.segments:
                raise UsageError(
                    f"{self.kind} takes no segments", code="invalid-params"
                )
            _validate_params(self.kind, self.params)
        if self.T < 2:
            raise UsageError(f"series length must be at least 2, got {self.T}", code="invalid-params")


_ALLOWED_PARAMS = {
    "ar1": {"phi", "scale", "start"},
    "random_walk": {"scale", "start"},
    "white_noise": {"scale", "start"},
    "linear_trend": {"slope", "scale", "start"},
}


def _validate_params(kind: str, params: dict) -> None:
    allowed = _ALLOWED_PARAMS[kind]
    unknown = set(params) - allowed
    if unknown:
        raise UsageError(
            f"{kind} does not accept parameters {sorted(unknown)}", code="invalid-params"
        )
    for key, value in params.items():
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise UsageError(f"parameter {key!r} must be numeric", code="invalid-params")
        if not math.isfinite(value):
            raise UsageError(f"parameter {key!r} must be finite", code="invalid-params")
    if kind == "ar1":
        if "phi" not in params:
            raise UsageError("ar1 requires a phi parameter", code="invalid-params")
        if abs(float(params["phi"])) >= _MAX_PHI:
            raise UsageError(
                f"|phi| must be below {_MAX_PHI}, got {params['phi']}",
                code="invalid-params",
            )
    if float(params.get("scale", 0.0)) < 0.0:
        raise UsageError("scale must be nonnegative", code="invalid-params")


def generate(spec: GeneratorSpec) -> TimeSeries:
    """Produce the series described by a :class:`GeneratorSpec`.

    The recursions, with e_t the shared standard-normal stream:

    - ``white_noise``:  x_t = start + scale * e_t
    - ``ar1``:          x_t = phi * x_{t-1} + scale * e_t,  x_0 = start
    - ``random_walk``:  ar1 with phi = 1
    - ``linear_trend``: x_t = start + slope * t + scale * e_t,  t = 1..T
    - ``regime_switch``: segments generated in order, each segment's start
      level being the previous segment's final value (zero for the first),
      all drawing from one noise stream.
    """
    normals = NormalStream(spec.seed)
    if spec.kind == "regime_switch":
        pieces = []
        level = 0.0
        for segment in spec.segments:
            values = _generate_kind(segment.kind, segment.length, segment.params, normals, level)
            pieces.append(values)
            level = float(values[-1])
        return TimeSeries(np.concatenate(pieces))
    return TimeSeries(_generate_kind(spec.kind, spec.T, spec.params, normals, 0.0))


def _generate_kind(
    kind: str, n: int, params: dict, normals: NormalStream, inherited_start: float
) -> np.ndarray:
    start = float(params.get("start", inherited_start))
    if kind == "white_noise":
        scale = float(params.get("scale", 1.0))
        return start + scale * normals.take(n)
    if kind in ("ar1", "random_walk"):
        phi = 1.0 if kind == "random_walk" else float(params["phi"])
        scale = float(params.get("scale", 1.0))
        out = np.empty(n, dtype=np.float64)
        level = start
        for t in range(n):
            level = phi * level + scale * normals.next()
            out[t] = level
        return out
    if kind == "linear_trend":
        slope = float(params.get("slope", 1.0))
        scale = float(params.get("scale", 0.0))
        out = start + slope * np.arange(1, n + 1, dtype=np.float64)
        if scale > 0.0:
            out = out + scale * normals.take(n)
        return out
    raise UsageError(f"unknown generator kind {kind!r}", code="invalid-params")


def spec_from_dict(payload: dict) -> GeneratorSpec:
    """Build a :class:`GeneratorSpec` from a plain JSON-style mapping.

    Expected keys: ``kind``, ``seed`` (default 0), and either ``length``
    plus optional ``params`` or, for ``regime_switch``, a ``segments`` list
    of ``{"length", "kind", "params"}`` objects (total length is implied).
    """
    if not isinstance(payload, dict):
        raise DataError("generator spec must be a JSON object", code="invalid-input")
    unknown = set(payload) - {"kind", "seed", "length", "params", "segments"}
    if unknown:
        raise DataError(
            f"unknown generator spec keys: {sorted(unknown)}", code="invalid-input"
        )
    kind = payload.get("kind")
    if kind is None:
        raise DataError("generator spec needs a 'kind'", code="invalid-input")
    seed = payload.get("seed", 0)
    if kind == "regime_switch":
        raw_segments = payload.get("segments", [])
        if not isinstance(raw_segments, list):
            raise DataError("'segments' must be a list", code="invalid-input")
        segments = tuple(
            Segment(
                length=item.get("length", 0),
                kind=item.get("kind", ""),
                params=dict(item.get("params", {})),
            )
            for item in raw_segments
        )
        total = sum(seg.length for seg in segments)
        return GeneratorSpec(kind=kind, T=total, seed=seed, segments=segments)
    length = payload.get("length")
    if length is None:
        raise DataError("generator spec needs a 'length'", code="invalid-input")
    params = dict(payload.get("params", {}))
    return GeneratorSpec(kind=kind, T=length, seed=seed, params=params)


def load_spec(path) -> GeneratorSpec:
    """Read a generator spec from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"generator spec not found: {path}", code="missing-file")
    except json.JSONDecodeError as exc:
        raise DataError(f"generator spec is not valid JSON: {exc}", code="invalid-input")
    return spec_from_dict(payload)
