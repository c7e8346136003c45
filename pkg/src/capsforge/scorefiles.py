"""Readers for scoring inputs: record-line files of (id, caption) pairs.

A references file lists one caption per line; repeated ids accumulate
into that image's reference set. The caption is taken from the first
of ``caption``, ``fused_caption``, ``raw_caption`` present.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

from .errors import MalformedLine

_CAPTION_KEYS = ("caption", "fused_caption", "raw_caption")


def read_caption_file(path: str | Path) -> Iterator[tuple[str, str]]:
    spath = str(path)
    offset = 0
    with open(path, "rb") as fh:
        for line_no, raw in enumerate(fh, start=1):
            stripped = raw.rstrip(b"\r\n")
            if stripped.strip():
                yield _parse(spath, line_no, offset, stripped)
            offset += len(raw)


def _parse(path: str, line_no: int, offset: int, raw: bytes) -> tuple[str, str]:
    try:
        obj = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedLine(path, line_no, offset, f"invalid line: {exc}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) or not obj["id"]:
        raise MalformedLine(path, line_no, offset, "line needs a non-empty 'id'")
    for key in _CAPTION_KEYS:
        value = obj.get(key)
        if isinstance(value, str):
            return obj["id"], value
    raise MalformedLine(
        path, line_no, offset, f"line needs one of {', '.join(_CAPTION_KEYS)}"
    )
