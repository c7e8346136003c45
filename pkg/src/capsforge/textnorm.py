"""Word-level text normalization (``tok/v1``).

The normalization is deliberately simple and versioned: lowercase,
delete Unicode punctuation, split on whitespace. Reported corpus
numbers are only comparable when computed under the same tokenizer
version, so any change here must bump ``TOKENIZER_VERSION``.
"""

from __future__ import annotations

import unicodedata

TOKENIZER_VERSION = "tok/v1"


class _PunctTable(dict):
    """Lazy ``str.translate`` table deleting Unicode punctuation.

    Punctuation codepoints map to ``None`` (delete); everything else
    raises ``KeyError`` so ``translate`` keeps the character. Decisions
    are memoized per codepoint, so ``unicodedata`` is consulted once.
    """

    def __init__(self):
        super().__init__()
        self._kept: set[int] = set()

    def __missing__(self, codepoint: int):
        if codepoint not in self._kept:
            if unicodedata.category(chr(codepoint)).startswith("P"):
                self[codepoint] = None
                return None
            self._kept.add(codepoint)
        raise KeyError(codepoint)


_PUNCT_TABLE = _PunctTable()


def tokenize_words(caption: str) -> list[str]:
    """Lowercase, strip punctuation, split on whitespace; drops empties."""
    return caption.lower().translate(_PUNCT_TABLE).split()


def extract_trigrams(words: list[str]) -> list[tuple[str, str, str]]:
    """Contiguous word 3-grams in order; ``max(0, len(words) - 2)`` of them."""
    return [(words[i], words[i + 1], words[i + 2]) for i in range(len(words) - 2)]
