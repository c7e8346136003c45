"""Canonical record types carried through every pipeline stage."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .digest import hexdigest64


class FusionStatus(str, enum.Enum):
    FUSED = "Fused"
    BACKEND_ERROR = "BackendError"
    FILTERED = "Filtered"


@dataclass(frozen=True)
class ImageTextRecord:
    """One image reference with its raw (web) and synthetic captions.

    ``meta`` holds optional source tags; ``extra`` preserves unknown
    keys from the wire format verbatim so rewrites are lossless.
    """

    id: str
    image_ref: str
    raw_caption: str
    synthetic_caption: str
    meta: Mapping[str, str] = field(default_factory=dict)
    extra: Mapping[str, object] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.raw_caption.strip():
            raise ValueError("raw_caption must be non-empty after trim")
        if not self.synthetic_caption.strip():
            raise ValueError("synthetic_caption must be non-empty after trim")


@dataclass(frozen=True)
class FusedRecord:
    """An ``ImageTextRecord`` plus the fusion outcome.

    ``backend_model`` and ``latency_ms`` are run metadata: the model
    name travels in ``meta`` on disk, the latency is report-only and
    never serialized (shard bytes stay deterministic).
    """

    base: ImageTextRecord
    fused_caption: str
    backend_model: str = ""
    latency_ms: int = 0
    status: FusionStatus = FusionStatus.FUSED

    def validate(self) -> None:
        self.base.validate()
        if self.latency_ms < 0:
            raise ValueError("latency_ms must be nonnegative")
        if self.status is FusionStatus.FUSED and not self.fused_caption:
            raise ValueError("status=Fused requires a non-empty fused_caption")
        if self.status is FusionStatus.BACKEND_ERROR and self.fused_caption:
            raise ValueError("status=BackendError requires an empty fused_caption")


@dataclass(frozen=True)
class ShardManifest:
    """Sidecar metadata describing one written shard."""

    shard_path: str
    record_count: int
    content_digest: str  # 64-bit hex digest of the payload bytes


def synthesize_id(image_ref: str) -> str:
    """Stable id for source rows that arrive without one.

    64-bit digest of the image reference; a digest collision is treated
    as a duplicate record downstream.
    """
    return hexdigest64(image_ref)
