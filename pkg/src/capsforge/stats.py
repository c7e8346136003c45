"""Corpus diversity statistics: average caption length and distinct trigrams.

Two modes share one accumulator type. Exact mode keeps the set of
64-bit trigram digests (right answer, memory grows with the corpus);
sketch mode keeps 2^p logarithmic-counting registers whose register-max
merge makes sharded computation trivial. At tens of millions of
distinct trigrams only the sketch is practical.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable

from ._kernels import hll_update
from .digest import digest64
from .errors import ModeMismatch
from .textnorm import TOKENIZER_VERSION, extract_trigrams, tokenize_words

DEFAULT_PRECISION = 14
DEFAULT_HASH_SEED = 0x5EED_CAB5  # fixed so reported numbers are reproducible
MIN_PRECISION = 10
MAX_PRECISION = 18


class StatsMode(str, enum.Enum):
    EXACT = "exact"
    SKETCH = "sketch"


def _alpha(m: int) -> float:
    if m == 16:
        return 0.673
    if m == 32:
        return 0.697
    if m == 64:
        return 0.709
    return 0.7213 / (1.0 + 1.079 / m)


@dataclass
class CorpusStats:
    mode: StatsMode
    precision: int = DEFAULT_PRECISION
    hash_seed: int = DEFAULT_HASH_SEED
    record_count: int = 0
    word_count_sum: int = 0
    exact_digests: set[int] = field(default_factory=set)
    registers: bytearray = field(default_factory=bytearray)

    @classmethod
    def empty(
        cls,
        mode: StatsMode,
        precision: int = DEFAULT_PRECISION,
        hash_seed: int = DEFAULT_HASH_SEED,
    ) -> "CorpusStats":
        if mode is StatsMode.SKETCH and not MIN_PRECISION <= precision <= MAX_PRECISION:
            raise ValueError(f"precision must be in [{MIN_PRECISION}, {MAX_PRECISION}]")
        stats = cls(mode=mode, precision=precision, hash_seed=hash_seed)
        if mode is StatsMode.SKETCH:
            stats.registers = bytearray(1 << precision)
        return stats

    def add_caption(self, caption: str) -> None:
        words = tokenize_words(caption)
        self.record_count += 1
        self.word_count_sum += len(words)
        if len(words) < 3:
            return
        hashes = [
            digest64(w1, w2, w3, seed=self.hash_seed)
            for w1, w2, w3 in extract_trigrams(words)
        ]
        if self.mode is StatsMode.EXACT:
            self.exact_digests.update(hashes)
        else:
            hll_update(self.registers, hashes, self.precision)

    @property
    def avg_length(self) -> float | None:
        """Mean caption length in words; undefined on an empty corpus."""
        if self.record_count == 0:
            return None
        return self.word_count_sum / self.record_count

    def distinct_trigrams(self) -> int:
        if self.mode is StatsMode.EXACT:
            return len(self.exact_digests)
        return self._estimate()

    def _estimate(self) -> int:
        m = 1 << self.precision
        indicator = 0.0
        zeros = 0
        for r in self.registers:
            indicator += 2.0 ** (-r)
            if r == 0:
                zeros += 1
        raw = _alpha(m) * m * m / indicator
        if raw <= 2.5 * m and zeros > 0:
            return int(round(m * math.log(m / zeros)))
        return int(round(raw))

    def as_dict(self) -> dict:
        return {
            "record_count": self.record_count,
            "avg_length": self.avg_length,
            "unique_trigrams": self.distinct_trigrams(),
            "mode": self.mode.value,
            "tokenizer": TOKENIZER_VERSION,
        }


def caption_stats(
    captions: Iterable[str],
    mode: StatsMode = StatsMode.EXACT,
    precision: int = DEFAULT_PRECISION,
    hash_seed: int = DEFAULT_HASH_SEED,
) -> CorpusStats:
    stats = CorpusStats.empty(mode, precision, hash_seed)
    for caption in captions:
        stats.add_caption(caption)
    return stats


def merge_stats(a: CorpusStats, b: CorpusStats) -> CorpusStats:
    """Combine two accumulators; associative and commutative."""
    if a.mode is not b.mode:
        raise ModeMismatch(f"cannot merge {a.mode.value} with {b.mode.value}")
    if a.hash_seed != b.hash_seed:
        raise ModeMismatch("cannot merge accumulators with different hash seeds")
    merged = CorpusStats.empty(a.mode, a.precision, a.hash_seed)
    merged.record_count = a.record_count + b.record_count
    merged.word_count_sum = a.word_count_sum + b.word_count_sum
    if a.mode is StatsMode.EXACT:
        merged.exact_digests = a.exact_digests | b.exact_digests
    else:
        if a.precision != b.precision:
            raise ModeMismatch(
                f"cannot merge sketches with precisions {a.precision} and {b.precision}"
            )
        merged.registers = bytearray(
            max(ra, rb) for ra, rb in zip(a.registers, b.registers)
        )
    return merged
