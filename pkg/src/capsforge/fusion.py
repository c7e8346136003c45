"""Fusion orchestration: per-record calls, ordering, resume, reporting.

Records are fused with up to ``max_in_flight`` concurrent backend
calls, but output shards are written strictly in input order, so for a
deterministic backend the shard bytes are independent of parallelism.
Completed output shards (manifest present and digest verified) are
skipped when resuming.
"""

from __future__ import annotations

import time
from collections import deque
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .backend import BackendConfig, ChatBackend
from .cache import FusionCache, cache_key
from .errors import BackendError
from .prompts import build_prompt, clean_response
from .records import FusedRecord, FusionStatus, ImageTextRecord
from .shardio import read_shard, shard_is_complete, write_shard

REORDER_WINDOW_FACTOR = 4


@dataclass
class RunReport:
    requested: int = 0
    served_from_cache: int = 0
    backend_calls: int = 0  # calls that succeeded
    failures: int = 0
    wall_clock_s: float = 0.0
    attempts: int = 0  # total attempts including retries
    skipped_shards: int = 0

    def merge(self, other: "RunReport") -> None:
        self.requested += other.requested
        self.served_from_cache += other.served_from_cache
        self.backend_calls += other.backend_calls
        self.failures += other.failures
        self.attempts += other.attempts
        self.skipped_shards += other.skipped_shards

    def as_dict(self) -> dict:
        return {
            "requested": self.requested,
            "served_from_cache": self.served_from_cache,
            "backend_calls": self.backend_calls,
            "failures": self.failures,
            "wall_clock_s": round(self.wall_clock_s, 3),
            "attempts": self.attempts,
            "skipped_shards": self.skipped_shards,
        }


@dataclass
class FuseOutcome:
    record: FusedRecord
    from_cache: bool = False
    attempts: int = 0


def fuse_record(
    record: ImageTextRecord, backend: ChatBackend, cache: FusionCache | None = None
) -> FuseOutcome:
    """Fuse one record; backend failures become status=BackendError.

    An empty caption after cleanup also counts as a failure: the Fused
    status guarantees a non-empty caption, and retrying later is
    cheaper than poisoning the cache with empties.
    """
    model = backend.config.model_name
    key = cache_key(record.raw_caption, record.synthetic_caption, model)
    if cache is not None:
        cached = cache.get(key)
        if cached is not None:
            fused = FusedRecord(
                base=record, fused_caption=cached, backend_model=model, latency_ms=0
            )
            return FuseOutcome(fused, from_cache=True)
    prompt = build_prompt(record.raw_caption, record.synthetic_caption)
    started = time.monotonic()
    try:
        reply, attempts = backend.complete(prompt)
    except BackendError as exc:
        latency_ms = int((time.monotonic() - started) * 1000)
        fused = FusedRecord(
            base=record,
            fused_caption="",
            backend_model=model,
            latency_ms=latency_ms,
            status=FusionStatus.BACKEND_ERROR,
        )
        return FuseOutcome(fused, attempts=getattr(exc, "attempts", 1))
    latency_ms = int((time.monotonic() - started) * 1000)
    caption = clean_response(reply)
    if not caption:
        fused = FusedRecord(
            base=record,
            fused_caption="",
            backend_model=model,
            latency_ms=latency_ms,
            status=FusionStatus.BACKEND_ERROR,
        )
        return FuseOutcome(fused, attempts=attempts)
    if cache is not None:
        cache.put(key, caption)
    fused = FusedRecord(
        base=record, fused_caption=caption, backend_model=model, latency_ms=latency_ms
    )
    return FuseOutcome(fused, attempts=attempts)


def _fuse_ordered(
    records: Iterable[ImageTextRecord],
    backend: ChatBackend,
    cache: FusionCache | None,
    report: RunReport,
) -> Iterator[FusedRecord]:
    """Yield fused records in input order with bounded parallelism."""
    window = REORDER_WINDOW_FACTOR * backend.config.max_in_flight
    pending: deque[Future] = deque()

    def drain_one() -> FusedRecord:
        outcome: FuseOutcome = pending.popleft().result()
        report.requested += 1
        report.attempts += outcome.attempts
        if outcome.from_cache:
            report.served_from_cache += 1
        elif outcome.record.status is FusionStatus.FUSED:
            report.backend_calls += 1
        else:
            report.failures += 1
        return outcome.record

    with ThreadPoolExecutor(max_workers=backend.config.max_in_flight) as pool:
        for record in records:
            if len(pending) >= window:
                yield drain_one()
            pending.append(pool.submit(fuse_record, record, backend, cache))
        while pending:
            yield drain_one()


def fuse_corpus(
    input_shards: Iterable[str | Path],
    output_dir: str | Path,
    backend_config: BackendConfig,
    cache_dir: str | Path | None = None,
    resume: bool = False,
    transport: Callable[[dict], str] | None = None,
) -> RunReport:
    """Fuse every input shard into ``output_dir``, one output per input."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    cache = FusionCache(cache_dir) if cache_dir is not None else None
    backend = ChatBackend(backend_config, transport=transport)
    report = RunReport()
    started = time.monotonic()
    for shard in input_shards:
        shard = Path(shard)
        out_path = output_dir / shard.name
        if resume and shard_is_complete(out_path):
            report.skipped_shards += 1
            continue
        write_shard(_fuse_ordered(read_shard(shard), backend, cache, report), out_path)
    report.wall_clock_s = time.monotonic() - started
    return report
