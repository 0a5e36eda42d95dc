"""Throughput harness.

All schemes are measured the same way: a random payload held in memory is
fragmented (and defragmented) repeatedly, warm-up runs are discarded, and
the median MB/s over the remaining repetitions is reported.  Disk and
network never enter the timed region; this measures the codecs, not the
storage.  Absolute numbers are hardware-bound, so downstream checks should
compare medians relatively (scaling in k, block-size ordering) rather than
against fixed MB/s targets.
"""

from __future__ import annotations

import json
import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines
from .baselines import SchemeId
from .codec import CodecParams, decode_data, encode_data
from .errors import ParameterError

MB = 1 << 20

# the six standard grid points: two site counts, three block sizes
DEFAULT_GRID: list[tuple[int, int, int]] = [
    (4, 2, 16),
    (4, 2, 34),
    (4, 2, 250),
    (6, 3, 16),
    (6, 3, 34),
    (6, 3, 250),
]


@dataclass
class BenchConfig:
    schemes: list[SchemeId] = field(default_factory=lambda: [SchemeId.PROPOSED])
    payload_mb: int = 100
    repetitions: int = 3
    warmup: int = 1
    grid: list[tuple[int, int, int]] = field(default_factory=lambda: list(DEFAULT_GRID))
    seed: int = 0
    measure_join: bool = True
    parallel_join_workers: int = 1

    def __post_init__(self) -> None:
        if self.repetitions < 3:
            raise ParameterError(f"repetitions must be at least 3, got {self.repetitions}")
        if self.payload_mb < 1:
            raise ParameterError(f"payload must be at least 1 MB, got {self.payload_mb}")
        if not self.grid:
            raise ParameterError("empty grid")


@dataclass
class BenchResult:
    scheme: str
    k: int
    c: int
    block_size: int
    direction: str  # "split" or "join" (join-parallel when threaded)
    mb_per_s_median: float
    mb_per_s_stddev: float
    repetitions: int


def _payload(cfg: BenchConfig) -> bytes:
    gen = np.random.default_rng(cfg.seed)
    return gen.integers(0, 256, size=cfg.payload_mb * MB, dtype=np.uint8).tobytes()


def _time_runs(fn, warmup: int, reps: int) -> list[float]:
    for _ in range(warmup):
        fn()
    out = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return out


def _adapters(scheme: SchemeId, k: int, c: int, block_size: int, rng: random.Random):
    """(split, join) callables; baselines run at n == k (no redundancy)."""
    if scheme is SchemeId.PROPOSED:
        params = CodecParams(k=k, c=c, block_size=block_size)
        return (
            lambda d: encode_data(d, params, rng),
            lambda frags, workers: decode_data(frags, workers=workers),
        )
    if scheme is SchemeId.SSS:
        return (
            lambda d: baselines.sss_split(d, k, k, rng),
            lambda frags, workers: baselines.sss_reconstruct(frags, k),
        )
    if scheme is SchemeId.IDA:
        matrix = baselines.build_ida_matrix(k, k)
        return (
            lambda d: baselines.ida_split(d, k, k, matrix),
            lambda frags, workers: baselines.ida_reconstruct(frags),
        )
    if scheme is SchemeId.SSMS:
        return (
            lambda d: baselines.ssms_split(d, k, k, rng),
            lambda frags, workers: baselines.ssms_reconstruct(frags),
        )
    if scheme is SchemeId.AONT_RS:
        return (
            lambda d: baselines.aont_rs_split(d, k, k, rng),
            lambda frags, workers: baselines.aont_rs_reconstruct(frags),
        )
    raise ParameterError(f"unknown scheme {scheme}")


def run_bench(cfg: BenchConfig) -> list[BenchResult]:
    """Measure every (scheme, grid point); split and join timed separately."""
    payload = _payload(cfg)
    size_mb = len(payload) / MB
    rng = random.Random(cfg.seed)
    results: list[BenchResult] = []
    for scheme in cfg.schemes:
        for (k, c, block_size) in cfg.grid:
            split, join = _adapters(scheme, k, c, block_size, rng)
            times = _time_runs(lambda: split(payload), cfg.warmup, cfg.repetitions)
            results.append(_result(scheme, k, c, block_size, "split", size_mb, times, cfg))
            if cfg.measure_join:
                frags = split(payload)
                workers = cfg.parallel_join_workers
                times = _time_runs(
                    lambda: join(frags, workers), cfg.warmup, cfg.repetitions
                )
                direction = "join-parallel" if workers > 1 else "join"
                results.append(
                    _result(scheme, k, c, block_size, direction, size_mb, times, cfg)
                )
    return results


def _result(scheme, k, c, block_size, direction, size_mb, times, cfg) -> BenchResult:
    rates = [size_mb / t for t in times]
    return BenchResult(
        scheme=scheme.value,
        k=k,
        c=c,
        block_size=block_size,
        direction=direction,
        mb_per_s_median=statistics.median(rates),
        mb_per_s_stddev=statistics.pstdev(rates) if len(rates) > 1 else 0.0,
        repetitions=cfg.repetitions,
    )


CSV_HEADER = "scheme,k,c,block_size,mb_per_s_median,mb_per_s_stddev,direction"


def emit_results(
    results: list[BenchResult],
    csv_path: str | Path | None = None,
    json_path: str | Path | None = None,
) -> str:
    """Render results as CSV (returned; optionally written) and JSON."""
    lines = [CSV_HEADER]
    for r in results:
        lines.append(
            f"{r.scheme},{r.k},{r.c},{r.block_size},"
            f"{r.mb_per_s_median:.3f},{r.mb_per_s_stddev:.3f},{r.direction}"
        )
    csv_text = "\n".join(lines) + "\n"
    if csv_path is not None:
        Path(csv_path).write_text(csv_text)
    if json_path is not None:
        doc = [r.__dict__ for r in results]
        Path(json_path).write_text(json.dumps(doc, indent=2))
    return csv_text
