"""Fusion instruction rendering and backend-response cleanup.

The instruction template is frozen: cache keys embed ``PROMPT_VERSION``
so any byte change here must bump the version or cached fusions would
silently go stale.
"""

from __future__ import annotations

import re

from .errors import EmptyCaption

PROMPT_VERSION = "fuse-prompt/v1"

_TEMPLATE_HEAD = (
    "Please merge and refine the information from the two given sentences.\n"
    "Sentence 1 provides detailed real-world knowledge, yet it suffers from flaws in "
    "sentence structure and grammar.\n"
    "Sentence 2 exhibits nice sentence structure, but lacking in-depth real-world details "
    "and may contain false information.\n"
    "Please combine them into a new sentence, ensuring a well-structured sentence while "
    "retaining the detailed real-world information provided in Sentence 1.\n"
    "Avoid simply concatenating the sentences.\n"
    "Sentence 1: "
)
_TEMPLATE_MID = "\nSentence 2: "

_LEADING_LABEL = re.compile(r"^(?:new sentence|merged sentence|sentence)\s*:\s*", re.IGNORECASE)

_QUOTE_PAIRS = {
    '"': '"',
    "'": "'",
    "“": "”",  # curly double
    "‘": "’",  # curly single
}


def build_prompt(raw_caption: str, synthetic_caption: str) -> str:
    """Render the fusion instruction with both captions substituted.

    Substitution is literal and simultaneous: caption text can never
    alter the template structure.
    """
    if not raw_caption.strip():
        raise EmptyCaption("raw caption is empty")
    if not synthetic_caption.strip():
        raise EmptyCaption("synthetic caption is empty")
    return _TEMPLATE_HEAD + raw_caption + _TEMPLATE_MID + synthetic_caption


def _clean_pass(text: str) -> str:
    text = " ".join(text.split())
    text = _LEADING_LABEL.sub("", text)
    if len(text) >= 2 and _QUOTE_PAIRS.get(text[0]) == text[-1]:
        text = text[1:-1]
    return text


def clean_response(backend_text: str) -> str:
    """Normalize a backend reply to a bare caption.

    Strips symmetric wrapping quotes and leading ``New sentence:`` /
    ``Merged sentence:`` / ``Sentence:`` labels, collapses whitespace
    runs, and trims. Applied to a fixed point, so it is idempotent.
    """
    text = backend_text
    while True:
        cleaned = _clean_pass(text)
        if cleaned == text:
            return cleaned
        text = cleaned
