"""Shard readers/writers for the record-line corpus format.

A shard is a UTF-8 text file, one JSON object per line, extension
``.rlc``. Canonical keys: ``id``, ``image_ref``, ``raw_caption``,
``synthetic_caption``, plus optional ``fused_caption``, ``status``,
``backend_model`` and ``meta``. Unknown keys round-trip verbatim.
Each shard gets a ``<shard>.manifest`` sidecar with the record count
and a 64-bit digest of the payload bytes.
"""

from __future__ import annotations

import enum
import json
import os
from pathlib import Path
from typing import Iterable, Iterator

from .digest import StreamDigest
from .errors import DuplicateId, MalformedLine
from .records import FusedRecord, FusionStatus, ImageTextRecord, ShardManifest

SHARD_EXT = ".rlc"
MANIFEST_EXT = ".manifest"

_CANONICAL_KEYS = (
    "id",
    "image_ref",
    "raw_caption",
    "synthetic_caption",
    "fused_caption",
    "status",
    "backend_model",
    "meta",
)


class DedupKey(str, enum.Enum):
    BY_ID = "id"
    BY_IMAGE_REF = "image_ref"


def _parse_line(path: str, line_no: int, byte_offset: int, raw: bytes) -> dict:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedLine(path, line_no, byte_offset, f"invalid UTF-8: {exc}") from exc
    if not text.strip():
        raise MalformedLine(path, line_no, byte_offset, "blank line")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedLine(path, line_no, byte_offset, f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedLine(path, line_no, byte_offset, "line is not an object")
    return obj


def _require_str(obj: dict, key: str, path: str, line_no: int, byte_offset: int) -> str:
    if key not in obj:
        raise MalformedLine(path, line_no, byte_offset, f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, str):
        raise MalformedLine(path, line_no, byte_offset, f"field {key!r} is not text")
    return value


def _record_from_obj(obj: dict, path: str, line_no: int, byte_offset: int) -> ImageTextRecord:
    rec_id = _require_str(obj, "id", path, line_no, byte_offset)
    image_ref = _require_str(obj, "image_ref", path, line_no, byte_offset)
    raw_caption = _require_str(obj, "raw_caption", path, line_no, byte_offset)
    synthetic_caption = _require_str(obj, "synthetic_caption", path, line_no, byte_offset)
    if not rec_id:
        raise MalformedLine(path, line_no, byte_offset, "empty id")
    if not raw_caption.strip():
        raise MalformedLine(path, line_no, byte_offset, "raw_caption empty after trim")
    if not synthetic_caption.strip():
        raise MalformedLine(path, line_no, byte_offset, "synthetic_caption empty after trim")
    meta = obj.get("meta", {})
    if not isinstance(meta, dict) or any(
        not isinstance(k, str) or not isinstance(v, str) for k, v in meta.items()
    ):
        raise MalformedLine(path, line_no, byte_offset, "meta is not a text-to-text map")
    extra = {k: v for k, v in obj.items() if k not in _CANONICAL_KEYS}
    return ImageTextRecord(
        id=rec_id,
        image_ref=image_ref,
        raw_caption=raw_caption,
        synthetic_caption=synthetic_caption,
        meta=meta,
        extra=extra,
    )


def _iter_lines(path: str | Path) -> Iterator[tuple[int, int, bytes]]:
    offset = 0
    with open(path, "rb") as fh:
        for line_no, raw in enumerate(fh, start=1):
            yield line_no, offset, raw.rstrip(b"\r\n")
            offset += len(raw)


def read_shard(path: str | Path) -> Iterator[ImageTextRecord]:
    """Yield records in file order; constant memory in corpus size."""
    spath = str(path)
    for line_no, offset, raw in _iter_lines(path):
        obj = _parse_line(spath, line_no, offset, raw)
        yield _record_from_obj(obj, spath, line_no, offset)


def read_fused_shard(path: str | Path) -> Iterator[FusedRecord]:
    """Yield fused records; ``status`` defaults from the caption when absent."""
    spath = str(path)
    for line_no, offset, raw in _iter_lines(path):
        obj = _parse_line(spath, line_no, offset, raw)
        base = _record_from_obj(obj, spath, line_no, offset)
        fused_caption = obj.get("fused_caption", "")
        if not isinstance(fused_caption, str):
            raise MalformedLine(spath, line_no, offset, "field 'fused_caption' is not text")
        status_name = obj.get("status")
        if status_name is None:
            status = FusionStatus.FUSED if fused_caption else FusionStatus.BACKEND_ERROR
        else:
            try:
                status = FusionStatus(status_name)
            except ValueError:
                raise MalformedLine(spath, line_no, offset, f"unknown status {status_name!r}")
        backend_model = obj.get("backend_model", "")
        if not isinstance(backend_model, str):
            raise MalformedLine(spath, line_no, offset, "field 'backend_model' is not text")
        yield FusedRecord(
            base=base,
            fused_caption=fused_caption,
            backend_model=backend_model,
            status=status,
        )


def record_to_obj(record: ImageTextRecord | FusedRecord) -> dict:
    """Wire object for a record, canonical key order, extras last."""
    if isinstance(record, FusedRecord):
        base = record.base
        obj: dict = {
            "id": base.id,
            "image_ref": base.image_ref,
            "raw_caption": base.raw_caption,
            "synthetic_caption": base.synthetic_caption,
            "fused_caption": record.fused_caption,
            "status": record.status.value,
        }
        if record.backend_model:
            obj["backend_model"] = record.backend_model
        if base.meta:
            obj["meta"] = dict(base.meta)
        obj.update(base.extra)
        return obj
    obj = {
        "id": record.id,
        "image_ref": record.image_ref,
        "raw_caption": record.raw_caption,
        "synthetic_caption": record.synthetic_caption,
    }
    if record.meta:
        obj["meta"] = dict(record.meta)
    obj.update(record.extra)
    return obj


def encode_line(record: ImageTextRecord | FusedRecord) -> bytes:
    return json.dumps(record_to_obj(record), ensure_ascii=False, separators=(",", ":")).encode(
        "utf-8"
    ) + b"\n"


def manifest_path(shard_path: str | Path) -> Path:
    return Path(str(shard_path) + MANIFEST_EXT)


def write_manifest(manifest: ShardManifest, directory: str | Path | None = None) -> Path:
    base = Path(directory) if directory is not None else Path(manifest.shard_path).parent
    path = manifest_path(base / Path(manifest.shard_path).name)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(
        json.dumps(
            {
                "shard_path": manifest.shard_path,
                "record_count": manifest.record_count,
                "content_digest": manifest.content_digest,
            }
        )
        + "\n",
        encoding="utf-8",
    )
    os.replace(tmp, path)
    return path


def read_manifest(shard_path: str | Path) -> ShardManifest | None:
    path = manifest_path(shard_path)
    if not path.exists():
        return None
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
        return ShardManifest(
            shard_path=obj["shard_path"],
            record_count=int(obj["record_count"]),
            content_digest=str(obj["content_digest"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        return None


def write_shard(
    records: Iterable[ImageTextRecord | FusedRecord], path: str | Path
) -> ShardManifest:
    """Write records to ``path`` and its manifest sidecar.

    Raises ``DuplicateId`` if one id appears twice; the partially
    written temp file is removed and no manifest is produced.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    digest = StreamDigest()
    seen: set[str] = set()
    count = 0
    try:
        with open(tmp, "wb") as fh:
            for record in records:
                rec_id = record.base.id if isinstance(record, FusedRecord) else record.id
                if rec_id in seen:
                    raise DuplicateId(rec_id)
                seen.add(rec_id)
                line = encode_line(record)
                fh.write(line)
                digest.update(line)
                count += 1
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    os.replace(tmp, path)
    manifest = ShardManifest(
        shard_path=path.name, record_count=count, content_digest=digest.hexdigest()
    )
    write_manifest(manifest, path.parent)
    return manifest


def compute_shard_digest(path: str | Path) -> tuple[int, str]:
    """Recount records and redigest payload bytes for verification."""
    digest = StreamDigest()
    count = 0
    with open(path, "rb") as fh:
        for raw in fh:
            digest.update(raw)
            count += 1
    return count, digest.hexdigest()


def shard_is_complete(path: str | Path) -> bool:
    """True iff the shard exists and matches its manifest sidecar."""
    path = Path(path)
    manifest = read_manifest(path)
    if manifest is None or not path.exists():
        return False
    count, hexdigest = compute_shard_digest(path)
    return count == manifest.record_count and hexdigest == manifest.content_digest


def dedup(
    records: Iterable[ImageTextRecord], key: DedupKey = DedupKey.BY_ID
) -> Iterator[ImageTextRecord]:
    """Drop repeats of the dedup key; first occurrence wins, order kept.

    Keeps an exact seen-set: memory is O(distinct keys).
    """
    seen: set[str] = set()
    for record in records:
        value = record.id if key is DedupKey.BY_ID else record.image_ref
        if value in seen:
            continue
        seen.add(value)
        yield record
