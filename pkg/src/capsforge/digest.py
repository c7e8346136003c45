"""Stable 64-bit content digests.

Every digest in the pipeline (shard payload digests, synthesized record
ids, fusion cache keys, trigram hashes, split bucketing) goes through
``digest64`` so the on-disk formats stay reproducible across processes
and machines. Built on keyed blake2b, which is C-speed in the stdlib
and, unlike ``hash()``, not randomized per process.
"""

from __future__ import annotations

import hashlib

_SEP = b"\x1f"  # unit separator between joined parts
_MASK64 = (1 << 64) - 1


def digest64(*parts: str | bytes, seed: int = 0) -> int:
    """Digest the given parts (unit-separator joined) into a uint64.

    ``seed`` keys the hash; distinct seeds give independent hash
    families, which the distinct-counting sketch relies on.
    """
    if seed:
        h = hashlib.blake2b(digest_size=8, key=(seed & _MASK64).to_bytes(8, "little"))
    else:
        h = hashlib.blake2b(digest_size=8)
    first = True
    for part in parts:
        if not first:
            h.update(_SEP)
        h.update(part.encode("utf-8") if isinstance(part, str) else part)
        first = False
    return int.from_bytes(h.digest(), "big")


def hexdigest64(*parts: str | bytes, seed: int = 0) -> str:
    """``digest64`` formatted as 16 lowercase hex characters."""
    return f"{digest64(*parts, seed=seed):016x}"


class StreamDigest:
    """Incremental 64-bit digest over a stream of payload bytes."""

    def __init__(self):
        self._h = hashlib.blake2b(digest_size=8)

    def update(self, data: bytes) -> None:
        self._h.update(data)

    def hexdigest(self) -> str:
        return self._h.hexdigest()
