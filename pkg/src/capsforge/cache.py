"""On-disk fusion cache: append-only key-to-text log with an in-memory index.

Keys digest the caption pair plus model name and prompt version, not
the record id, so a re-sharded or re-deduplicated corpus still hits.
Appends are serialized under a lock; reads are lock-free dict lookups.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from .digest import hexdigest64
from .prompts import PROMPT_VERSION

CACHE_FILE = "fusion_cache.jsonl"


def cache_key(raw_caption: str, synthetic_caption: str, model_name: str) -> str:
    return hexdigest64(raw_caption, synthetic_caption, model_name, PROMPT_VERSION)


class FusionCache:
    def __init__(self, directory: str | Path):
        self._path = Path(directory) / CACHE_FILE
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[str, str] = {}
        self._load()

    def _load(self) -> None:
        if not self._path.exists():
            return
        with open(self._path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    self._index[entry["key"]] = entry["fused_caption"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    continue  # torn tail write from a crashed run


    def get(self, key: str) -> str | None:
        return self._index.get(key)

    def put(self, key: str, fused_caption: str) -> None:
        entry = json.dumps(
            {"key": key, "fused_caption": fused_caption, "created_at": time.time()},
            ensure_ascii=False,
        )
        with self._lock:
            if key in self._index:
                return
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(entry + "\n")
                fh.flush()
            self._index[key] = fused_caption

    def __len__(self) -> int:
        return len(self._index)
