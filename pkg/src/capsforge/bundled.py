"""Paths to the data files shipped inside the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

STYLES = ("raw", "synthetic", "rewrite", "fused")


def _data_root() -> Path:
    return Path(str(resources.files("capsforge").joinpath("data")))


def style_sample_path(style: str) -> Path:
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}; expected one of {STYLES}")
    return _data_root() / "style_samples" / f"{style}.txt"


def read_style_sample(style: str) -> list[str]:
    return style_sample_path(style).read_text(encoding="utf-8").splitlines()


def eval_fixture_dir() -> Path:
    """State directory of the bundled 100-judgment evaluation session."""
    return _data_root() / "eval_fixture"
