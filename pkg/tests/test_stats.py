import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capsforge.errors import ModeMismatch
from capsforge.sampledata import style_corpus
from capsforge.stats import (
    CorpusStats,
    StatsMode,
    caption_stats,
    merge_stats,
)
from capsforge.textnorm import extract_trigrams, tokenize_words

WORDS = [f"w{i}" for i in range(50)]


def _random_captions(rng, n, max_words=12):
    return [" ".join(rng.choices(WORDS, k=rng.randrange(max_words))) for _ in range(n)]


def _trigram_set(captions):
    grams = set()
    for caption in captions:
        grams.update(extract_trigrams(tokenize_words(caption)))
    return grams


def test_single_caption():
    stats = caption_stats(["a b c"])
    assert stats.record_count == 1
    assert stats.avg_length == 3
    assert stats.distinct_trigrams() == 1


def test_duplicate_captions_do_not_add_trigrams():
    once = caption_stats(["a b c d"])
    twice = caption_stats(["a b c d", "a b c d"])
    assert twice.distinct_trigrams() == once.distinct_trigrams()
    assert twice.record_count == 2


def test_avg_length_undefined_on_empty():
    assert caption_stats([]).avg_length is None


def test_exact_matches_bruteforce_set_oracle():
    rng = random.Random(31)
    captions = _random_captions(rng, 10_000)
    stats = caption_stats(captions, StatsMode.EXACT)
    assert stats.distinct_trigrams() == len(_trigram_set(captions))
    assert stats.word_count_sum == sum(len(tokenize_words(c)) for c in captions)


def test_sketch_within_two_percent_at_1e6_distinct():
    # one unique trigram per caption by construction: exactly 10^6 distinct
    captions = (f"u{i} v{i} w{i}" for i in range(1_000_000))
    stats = caption_stats(captions, StatsMode.SKETCH, precision=14)
    estimate = stats.distinct_trigrams()
    assert abs(estimate - 1_000_000) / 1_000_000 <= 0.02


def test_sketch_small_range_uses_linear_counting():
    captions = [f"a{i} b{i} c{i}" for i in range(500)]
    stats = caption_stats(captions, StatsMode.SKETCH, precision=14)
    assert abs(stats.distinct_trigrams() - 500) / 500 <= 0.05


def test_merge_identity_element():
    stats = caption_stats(["a b c", "d e f g"])
    empty = CorpusStats.empty(StatsMode.EXACT)
    merged = merge_stats(stats, empty)
    assert merged.record_count == stats.record_count
    assert merged.word_count_sum == stats.word_count_sum
    assert merged.distinct_trigrams() == stats.distinct_trigrams()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 60), st.integers(0, 60), st.data())
def test_merge_commutes(n_a, n_b, data):
    rng = random.Random(data.draw(st.integers(0, 10_000)))
    a = caption_stats(_random_captions(rng, n_a))
    b = caption_stats(_random_captions(rng, n_b))
    ab = merge_stats(a, b)
    ba = merge_stats(b, a)
    assert ab.record_count == ba.record_count
    assert ab.word_count_sum == ba.word_count_sum
    assert ab.exact_digests == ba.exact_digests


def test_merge_is_associative():
    rng = random.Random(5)
    parts = [caption_stats(_random_captions(rng, 40)) for _ in range(3)]
    left = merge_stats(merge_stats(parts[0], parts[1]), parts[2])
    right = merge_stats(parts[0], merge_stats(parts[1], parts[2]))
    assert left.exact_digests == right.exact_digests
    assert left.record_count == right.record_count


def test_sharded_merge_equals_single_pass_exact():
    rng = random.Random(17)
    captions = _random_captions(rng, 4000)
    single = caption_stats(captions, StatsMode.EXACT)
    shards = [captions[i::8] for i in range(8)]
    merged = None
    for shard in shards:
        part = caption_stats(shard, StatsMode.EXACT)
        merged = part if merged is None else merge_stats(merged, part)
    assert merged.record_count == single.record_count
    assert merged.word_count_sum == single.word_count_sum
    assert merged.distinct_trigrams() == single.distinct_trigrams()


def test_sharded_merge_equals_single_pass_sketch():
    rng = random.Random(19)
    captions = _random_captions(rng, 4000)
    single = caption_stats(captions, StatsMode.SKETCH, precision=12)
    merged = None
    for i in range(8):
        part = caption_stats(captions[i::8], StatsMode.SKETCH, precision=12)
        merged = part if merged is None else merge_stats(merged, part)
    assert merged.registers == single.registers
    assert merged.distinct_trigrams() == single.distinct_trigrams()


def test_mode_mismatch_rejected():
    exact = caption_stats(["a b c"], StatsMode.EXACT)
    sketch = caption_stats(["a b c"], StatsMode.SKETCH)
    with pytest.raises(ModeMismatch):
        merge_stats(exact, sketch)


def test_precision_mismatch_rejected():
    a = caption_stats(["a b c"], StatsMode.SKETCH, precision=12)
    b = caption_stats(["a b c"], StatsMode.SKETCH, precision=14)
    with pytest.raises(ModeMismatch):
        merge_stats(a, b)


def test_precision_out_of_range_rejected():
    with pytest.raises(ValueError):
        CorpusStats.empty(StatsMode.SKETCH, precision=9)
    with pytest.raises(ValueError):
        CorpusStats.empty(StatsMode.SKETCH, precision=19)


def test_style_corpora_length_ordering():
    averages = {}
    for style in ("fused", "rewrite", "raw", "synthetic"):
        stats = caption_stats(style_corpus(style, 200, seed=7))
        averages[style] = stats.avg_length
    assert averages["fused"] > averages["rewrite"] > averages["raw"] > averages["synthetic"]
