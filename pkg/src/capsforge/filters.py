"""Heuristic rejection of degenerate fusion outputs.

The rules reconstruct a plausible post-fusion cleanup: reject empty or
out-of-range captions, refusal boilerplate, outputs that merely
concatenate their inputs, and outputs that copy one input verbatim.
Thresholds default to values at which clean desk-scale fusions pass at
better than 99%.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from ._kernels import edit_distance, lcs_substring_len
from .records import FusedRecord, FusionStatus
from .shardio import read_fused_shard, write_shard
from .textnorm import tokenize_words

CONCAT_SIZE_RATIO = 0.8  # fused must be near the combined input size to be a concat

REFUSAL_PREFIXES = (
    "i'm sorry",
    "i am sorry",
    "as an ai",
    "i cannot",
    "unable to merge",
)


class FilterRule(str, enum.Enum):
    EMPTY = "Empty"
    TOO_SHORT = "TooShort"
    TOO_LONG = "TooLong"
    REFUSAL = "Refusal"
    CONCATENATION = "Concatenation"
    VERBATIM_COPY_RAW = "VerbatimCopyRaw"
    VERBATIM_COPY_SYNTHETIC = "VerbatimCopySynthetic"


@dataclass(frozen=True)
class FilterConfig:
    concat_containment_threshold: float = 0.85
    min_words: int = 3
    max_words: int = 128
    copy_similarity_threshold: float = 0.95

    def validate(self) -> None:
        if not 0.0 < self.concat_containment_threshold <= 1.0:
            raise ValueError("concat_containment_threshold must be in (0, 1]")
        if not 0.0 < self.copy_similarity_threshold <= 1.0:
            raise ValueError("copy_similarity_threshold must be in (0, 1]")
        if self.min_words < 1:
            raise ValueError("min_words must be positive")
        if self.min_words >= self.max_words:
            raise ValueError("min_words must be smaller than max_words")


@dataclass(frozen=True)
class FilterVerdict:
    accepted: bool
    triggered_rules: tuple[FilterRule, ...]
    evidence: dict[str, str]


@dataclass
class FilterReport:
    input_count: int = 0
    retained_count: int = 0
    per_rule_counts: dict[str, int] = field(
        default_factory=lambda: {rule.value: 0 for rule in FilterRule}
    )
    skipped_not_fused: int = 0

    def merge(self, other: "FilterReport") -> None:
        self.input_count += other.input_count
        self.retained_count += other.retained_count
        self.skipped_not_fused += other.skipped_not_fused
        for rule, count in other.per_rule_counts.items():
            self.per_rule_counts[rule] = self.per_rule_counts.get(rule, 0) + count

    def as_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "retained_count": self.retained_count,
            "per_rule_counts": dict(self.per_rule_counts),
            "skipped_not_fused": self.skipped_not_fused,
        }


def _word_ids(*token_lists: Sequence[str]) -> list[list[int]]:
    """Map words to small ints so the DP kernels compare machine words."""
    intern: dict[str, int] = {}
    out = []
    for tokens in token_lists:
        ids = []
        for tok in tokens:
            wid = intern.get(tok)
            if wid is None:
                wid = len(intern)
                intern[tok] = wid
            ids.append(wid)
        out.append(ids)
    return out


def containment(inner: Sequence[str], outer: Sequence[str]) -> float:
    """Longest common word run between the texts, relative to ``inner``."""
    if not inner:
        return 0.0
    ids_inner, ids_outer = _word_ids(inner, outer)
    return lcs_substring_len(ids_inner, ids_outer) / len(inner)


def copy_similarity(a: Sequence[str], b: Sequence[str]) -> float:
    """Normalized word-level edit similarity: 1 - distance / max length."""
    if not a and not b:
        return 1.0
    ids_a, ids_b = _word_ids(a, b)
    return 1.0 - edit_distance(ids_a, ids_b) / max(len(a), len(b))


def detect_concatenation(
    raw: str, synthetic: str, fused: str, threshold: float
) -> tuple[bool, float]:
    """Score how much the fused text merely embeds both inputs whole.

    The score is the smaller of the two containments (a concatenation
    must contain *both* inputs); the flag additionally requires the
    fused text to be near the combined input length.
    """
    raw_words = tokenize_words(raw)
    syn_words = tokenize_words(synthetic)
    fused_words = tokenize_words(fused)
    score = min(containment(raw_words, fused_words), containment(syn_words, fused_words))
    flag = score >= threshold and len(fused_words) >= CONCAT_SIZE_RATIO * (
        len(raw_words) + len(syn_words)
    )
    return flag, score


def detect_refusal(fused: str) -> bool:
    """True iff the caption opens with refusal boilerplate."""
    head = fused.replace("’", "'").lstrip().lower()
    return head.startswith(REFUSAL_PREFIXES)


def apply_filters(record: FusedRecord, cfg: FilterConfig) -> FilterVerdict:
    """Evaluate every rule (no short-circuit) and assemble the verdict.

    A caption that trims to nothing is the degenerate case: the other
    rules need text to operate on, so the verdict is just ``Empty``.
    """
    fused = record.fused_caption
    if not fused.strip():
        return FilterVerdict(
            accepted=False,
            triggered_rules=(FilterRule.EMPTY,),
            evidence={FilterRule.EMPTY.value: "caption empty after trim"},
        )

    raw = record.base.raw_caption
    synthetic = record.base.synthetic_caption
    fused_words = tokenize_words(fused)
    n_words = len(fused_words)

    triggered: list[FilterRule] = []
    evidence: dict[str, str] = {}

    if n_words < cfg.min_words:
        triggered.append(FilterRule.TOO_SHORT)
    evidence[FilterRule.TOO_SHORT.value] = f"words={n_words} min={cfg.min_words}"

    if n_words > cfg.max_words:
        triggered.append(FilterRule.TOO_LONG)
    evidence[FilterRule.TOO_LONG.value] = f"words={n_words} max={cfg.max_words}"

    if detect_refusal(fused):
        triggered.append(FilterRule.REFUSAL)
        evidence[FilterRule.REFUSAL.value] = f"prefix={fused[:32]!r}"
    else:
        evidence[FilterRule.REFUSAL.value] = "no refusal prefix"

    concat_flag, concat_score = detect_concatenation(
        raw, synthetic, fused, cfg.concat_containment_threshold
    )
    if concat_flag:
        triggered.append(FilterRule.CONCATENATION)
    evidence[FilterRule.CONCATENATION.value] = (
        f"score={concat_score:.4f} threshold={cfg.concat_containment_threshold}"
    )

    raw_sim = copy_similarity(fused_words, tokenize_words(raw))
    if raw_sim >= cfg.copy_similarity_threshold:
        triggered.append(FilterRule.VERBATIM_COPY_RAW)
    evidence[FilterRule.VERBATIM_COPY_RAW.value] = f"similarity={raw_sim:.4f}"

    syn_sim = copy_similarity(fused_words, tokenize_words(synthetic))
    if syn_sim >= cfg.copy_similarity_threshold:
        triggered.append(FilterRule.VERBATIM_COPY_SYNTHETIC)
    evidence[FilterRule.VERBATIM_COPY_SYNTHETIC.value] = f"similarity={syn_sim:.4f}"

    return FilterVerdict(
        accepted=not triggered, triggered_rules=tuple(triggered), evidence=evidence
    )


def filter_corpus(
    shard_paths: Iterable[str | Path],
    cfg: FilterConfig,
    output_dir: str | Path,
    write_rejected: bool = False,
) -> tuple[list[Path], FilterReport]:
    """Filter fused shards into ``output_dir``; order preserved per shard."""
    cfg.validate()
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    rejected_dir = output_dir / "rejected"
    report = FilterReport()
    retained_paths: list[Path] = []

    for shard in shard_paths:
        shard = Path(shard)
        retained: list[FusedRecord] = []
        rejected: list[FusedRecord] = []
        for record in read_fused_shard(shard):
            report.input_count += 1
            if record.status is not FusionStatus.FUSED:
                report.skipped_not_fused += 1
                continue
            verdict = apply_filters(record, cfg)
            if verdict.accepted:
                retained.append(record)
            else:
                for rule in verdict.triggered_rules:
                    report.per_rule_counts[rule.value] += 1
                if write_rejected:
                    rejected.append(replace(record, status=FusionStatus.FILTERED))
        report.retained_count += len(retained)
        out_path = output_dir / shard.name
        write_shard(retained, out_path)
        retained_paths.append(out_path)
        if write_rejected:
            write_shard(rejected, rejected_dir / shard.name)

    return retained_paths, report
