"""Deterministic synthetic corpora in four caption styles.

Used to build the bundled style-sample files, desk-scale demo corpora,
and test harnesses. The four styles mimic the texture of web alt-text
(entity-rich, noisy), captioning-model output (short, generic), LLM
rewrites (fluent, mid-length), and fusions (long, entity-rich and
fluent); their average word lengths are ordered fused > rewrite >
raw > synthetic.
"""

from __future__ import annotations

import random
from typing import Iterator

from .records import ImageTextRecord

ENTITIES = [
    "the B&O Railroad Museum in Baltimore",
    "the Rijksmuseum in Amsterdam",
    "Gare du Nord station in Paris",
    "the 1969 Apollo 11 launch site",
    "the Brooklyn Botanic Garden",
    "Hadrian's Wall in Northumberland",
    "the Shinkansen platform at Kyoto Station",
    "the Palace of Fine Arts in San Francisco",
    "Checkpoint Charlie in Berlin",
    "the Royal Mile in Edinburgh",
    "Monterey Bay Aquarium",
    "the Uffizi Gallery in Florence",
    "Svalbard Global Seed Vault",
    "the Hoover Dam visitor center",
    "Portmeirion village in North Wales",
    "the Alhambra in Granada",
]

SUBJECTS = [
    "a man",
    "a woman",
    "a young boy",
    "two tourists",
    "a street vendor",
    "a group of cyclists",
    "an elderly couple",
    "a museum guide",
    "a train conductor",
    "a photographer",
]

OBJECTS = [
    "a vintage locomotive",
    "a red brick building",
    "a wooden sailboat",
    "a market stall",
    "a stone bridge",
    "a glass greenhouse",
    "a steam engine",
    "a mosaic fountain",
    "an old tram car",
    "a lighthouse",
]

ACTIONS = [
    "standing next to",
    "walking past",
    "taking pictures of",
    "looking at",
    "leaning against",
    "waiting beside",
    "pointing at",
    "sitting in front of",
]

PLACES = [
    "on a cobblestone street",
    "near the waterfront",
    "under a clear sky",
    "in the old town",
    "at the main entrance",
    "beside the canal",
    "on the station platform",
    "in the courtyard",
]

ADJECTIVES = [
    "restored",
    "historic",
    "sunlit",
    "crowded",
    "quiet",
    "famous",
    "colorful",
    "well-preserved",
]

FACTS = [
    "its collection of nineteenth-century rolling stock",
    "one of the oldest surviving ironworks in the region",
    "hosting the annual harvest festival since 1911",
    "the largest public archive of maritime photographs",
    "a popular stop on the coastal heritage trail",
    "its hand-painted ceramic tile facades",
    "the site of the first transatlantic radio test",
    "guided tours that sell out every summer weekend",
]

NOISE = [
    "stock photo",
    "800x600",
    "DSC_0417.jpg",
    "royalty free image",
    "| eBay",
    "photo tour DVD",
    "circa 1950s postcard",
    "HD wallpaper download",
    "item no. 4471-B",
    "(lot of 3)",
]

YEARS = ["1891", "1928", "1954", "1967", "1975", "1983", "1999", "2004"]


def synthetic_caption(rng: random.Random) -> str:
    """Captioning-model style: short, generic, no proper nouns."""
    parts = [rng.choice(SUBJECTS), rng.choice(ACTIONS), rng.choice(OBJECTS)]
    if rng.random() < 0.3:
        parts.append(rng.choice(PLACES))
    return " ".join(parts)


def raw_caption(rng: random.Random) -> str:
    """Web alt-text style: entity-rich fragments with catalog noise."""
    parts = [rng.choice(ENTITIES), rng.choice(YEARS), rng.choice(NOISE)]
    if rng.random() < 0.6:
        parts.append(rng.choice(NOISE))
    if rng.random() < 0.4:
        parts.append(rng.choice(PLACES))
    rng.shuffle(parts)
    return " ".join(parts)


def rewrite_caption(rng: random.Random) -> str:
    """LLM-rewrite style: one fluent sentence of moderate length."""
    tail = f"taken {rng.choice(PLACES)}" if rng.random() < 0.6 else "taken"
    return (
        f"A {rng.choice(ADJECTIVES)} photograph of {rng.choice(ENTITIES)}, "
        f"{tail} in {rng.choice(YEARS)}."
    )


def fused_caption(rng: random.Random) -> str:
    """Fusion style: long, well-structured, keeps entities and context."""
    head = (
        f"{rng.choice(SUBJECTS).capitalize()} {rng.choice(ACTIONS)} "
        f"{rng.choice(OBJECTS)} at {rng.choice(ENTITIES)}"
    )
    if rng.random() < 0.4:
        return f"{head}, a {rng.choice(ADJECTIVES)} landmark known for {rng.choice(FACTS)}."
    return f"{head}, photographed {rng.choice(PLACES)} in {rng.choice(YEARS)}."


STYLE_GENERATORS = {
    "synthetic": synthetic_caption,
    "raw": raw_caption,
    "rewrite": rewrite_caption,
    "fused": fused_caption,
}


def style_corpus(style: str, n: int, seed: int = 0) -> list[str]:
    """``n`` captions of one style, deterministic in the seed."""
    generator = STYLE_GENERATORS[style]
    rng = random.Random(f"{style}/{seed}")
    return [generator(rng) for _ in range(n)]


def demo_records(n: int, seed: int = 0) -> Iterator[ImageTextRecord]:
    """Paired (raw, synthetic) records for desk-scale pipeline runs."""
    rng = random.Random(f"demo/{seed}")
    for i in range(n):
        yield ImageTextRecord(
            id=f"demo-{seed}-{i:06d}",
            image_ref=f"https://images.example.org/{seed}/{i:06d}.jpg",
            raw_caption=raw_caption(rng),
            synthetic_caption=synthetic_caption(rng),
        )
