#!/usr/bin/env python3
"""Regenerate the bundled style-sample corpora (200 captions per style).

Deterministic; run from the repo root after changing the synthesizers:

    python tools/make_style_samples.py
"""

from pathlib import Path

from capsforge.bundled import STYLES
from capsforge.sampledata import style_corpus
from capsforge.stats import caption_stats

SEED = 7
N = 200
OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "capsforge" / "data" / "style_samples"


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    averages = {}
    for style in STYLES:
        captions = style_corpus(style, N, seed=SEED)
        (OUT_DIR / f"{style}.txt").write_text("\n".join(captions) + "\n", encoding="utf-8")
        averages[style] = caption_stats(captions).avg_length
        print(f"{style:<10} n={N} avg_words={averages[style]:.2f}")
    order = ["fused", "rewrite", "raw", "synthetic"]
    values = [averages[s] for s in order]
    assert values == sorted(values, reverse=True), f"length ordering violated: {averages}"
    print("ordering ok:", " > ".join(order))


if __name__ == "__main__":
    main()
