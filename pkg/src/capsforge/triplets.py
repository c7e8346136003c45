"""Export fusion triplets as chat-format finetuning data.

Each exported example carries the exact inference-time prompt as its
user message, so the refiner model trains on the distribution it will
see in production. The train/val split buckets by a seeded digest of
the source id: stable under corpus reordering, disjoint by
construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .digest import digest64
from .errors import InvalidTriplet
from .prompts import build_prompt
from .records import FusedRecord, FusionStatus

SPLIT_BUCKETS = 1_000_000

TRAINING_CONFIG_LINES = (
    "model_init=LLaMA-2-13B",
    "batch_size=128",
    "epochs=2",
    "peak_lr=1e-5",
    "end_lr=0",
    "warmup_steps=500",
    "scheduler=cosine",
    "optimizer=AdamW",
    "betas=(0.9,0.95)",
    "eps=1e-8",
    "weight_decay=0.0",
)


@dataclass(frozen=True)
class CaptionTriplet:
    raw: str
    synthetic: str
    fused: str
    source_id: str

    def validate(self) -> None:
        if not self.raw.strip():
            raise InvalidTriplet(f"{self.source_id}: empty raw caption")
        if not self.synthetic.strip():
            raise InvalidTriplet(f"{self.source_id}: empty synthetic caption")
        if not self.fused.strip():
            raise InvalidTriplet(f"{self.source_id}: empty fused caption")


@dataclass(frozen=True)
class ExportResult:
    train_path: Path
    val_path: Path
    train_count: int
    val_count: int


def triplets_from_records(records: Iterable[FusedRecord]) -> Iterator[CaptionTriplet]:
    """Triplets from filtered fused records; non-Fused records are skipped."""
    for record in records:
        if record.status is not FusionStatus.FUSED:
            continue
        yield CaptionTriplet(
            raw=record.base.raw_caption,
            synthetic=record.base.synthetic_caption,
            fused=record.fused_caption,
            source_id=record.base.id,
        )


def render_chat_example(triplet: CaptionTriplet) -> dict:
    """One chat training example: prompt as user message, fusion as target."""
    triplet.validate()
    return {
        "source_id": triplet.source_id,
        "messages": [
            {"role": "user", "content": build_prompt(triplet.raw, triplet.synthetic)}
        ],
        "target": triplet.fused,
        "raw_caption": triplet.raw,
        "synthetic_caption": triplet.synthetic,
    }


def parse_chat_example(line: str) -> CaptionTriplet:
    obj = json.loads(line)
    return CaptionTriplet(
        raw=obj["raw_caption"],
        synthetic=obj["synthetic_caption"],
        fused=obj["target"],
        source_id=obj["source_id"],
    )


def split_is_val(source_id: str, val_fraction: float, seed: int) -> bool:
    bucket = digest64(source_id, seed=seed) % SPLIT_BUCKETS
    return bucket < val_fraction * SPLIT_BUCKETS


def export_triplets(
    triplets: Iterable[CaptionTriplet],
    out_dir: str | Path,
    val_fraction: float = 0.01,
    seed: int = 0,
) -> ExportResult:
    """Write train/val chat files; the split is a pure function of the seed."""
    if not 0.0 <= val_fraction < 1.0:
        raise ValueError("val_fraction must be in [0, 1)")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_path = out_dir / "train.chat.jsonl"
    val_path = out_dir / "val.chat.jsonl"
    train_count = val_count = 0
    with open(train_path, "w", encoding="utf-8") as train_fh, open(
        val_path, "w", encoding="utf-8"
    ) as val_fh:
        for triplet in triplets:
            line = json.dumps(
                render_chat_example(triplet), ensure_ascii=False, separators=(",", ":")
            )
            if split_is_val(triplet.source_id, val_fraction, seed):
                val_fh.write(line + "\n")
                val_count += 1
            else:
                train_fh.write(line + "\n")
                train_count += 1
    return ExportResult(
        train_path=train_path,
        val_path=val_path,
        train_count=train_count,
        val_count=val_count,
    )


def emit_training_config(out_path: str | Path) -> Path:
    """Write the refiner finetuning configuration as flat key=value lines."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(TRAINING_CONFIG_LINES) + "\n", encoding="utf-8")
    return out_path


def parse_training_config(path: str | Path) -> dict[str, str]:
    config: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return config
