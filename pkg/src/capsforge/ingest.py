"""Normalization of source JSONL rows into canonical records.

Source rows use the canonical key names; ``id`` may be absent and is
then synthesized from the image reference.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

from .errors import MalformedLine
from .records import ImageTextRecord, synthesize_id

_CANONICAL = {"id", "image_ref", "raw_caption", "synthetic_caption", "meta"}


def read_source_files(paths: Iterable[str | Path]) -> Iterator[ImageTextRecord]:
    for path in paths:
        spath = str(path)
        offset = 0
        with open(path, "rb") as fh:
            for line_no, raw in enumerate(fh, start=1):
                stripped = raw.rstrip(b"\r\n")
                if stripped.strip():
                    yield _row_to_record(spath, line_no, offset, stripped)
                offset += len(raw)


def _row_to_record(path: str, line_no: int, offset: int, raw: bytes) -> ImageTextRecord:
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedLine(path, line_no, offset, f"invalid source row: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedLine(path, line_no, offset, "source row is not an object")
    for key in ("image_ref", "raw_caption", "synthetic_caption"):
        if not isinstance(obj.get(key), str) or not obj[key].strip():
            raise MalformedLine(path, line_no, offset, f"missing or empty field {key!r}")
    rec_id = obj.get("id") or synthesize_id(obj["image_ref"])
    if not isinstance(rec_id, str):
        raise MalformedLine(path, line_no, offset, "field 'id' is not text")
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise MalformedLine(path, line_no, offset, "meta is not a map")
    return ImageTextRecord(
        id=rec_id,
        image_ref=obj["image_ref"],
        raw_caption=obj["raw_caption"],
        synthetic_caption=obj["synthetic_caption"],
        meta={str(k): str(v) for k, v in meta.items()},
        extra={k: v for k, v in obj.items() if k not in _CANONICAL},
    )
