import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capsforge.filters import (
    FilterConfig,
    FilterRule,
    apply_filters,
    containment,
    copy_similarity,
    detect_concatenation,
    detect_refusal,
    filter_corpus,
)
from capsforge.records import FusedRecord, FusionStatus
from capsforge.sampledata import style_corpus
from capsforge.shardio import read_fused_shard, write_shard
from capsforge.textnorm import tokenize_words
from conftest import make_record
from harness import REFUSAL_TEXTS, build_defect_corpus, clean_fusion
from oracles import brute_lcs_substring_len

WORDS = [f"t{i}" for i in range(9)]

token_lists = st.lists(st.sampled_from(WORDS), max_size=20)


def fused_record(raw="raw caption words here", synthetic="a synthetic caption", fused="x"):
    return FusedRecord(
        base=make_record(0, raw_caption=raw, synthetic_caption=synthetic),
        fused_caption=fused,
    )


def test_full_concatenation_detected():
    raw = "B&O Railroad Museum photo tour 1987 edition"
    synthetic = "a man standing next to a train"
    flag, score = detect_concatenation(raw, synthetic, raw + " " + synthetic, 0.85)
    assert flag
    assert score == pytest.approx(1.0)


def test_reversed_concatenation_detected():
    raw = "museum archive scan lot 441"
    synthetic = "an old photo of a building"
    flag, score = detect_concatenation(raw, synthetic, synthetic + " " + raw, 0.85)
    assert flag
    assert score == pytest.approx(1.0)


def test_disjoint_fusion_scores_zero():
    flag, score = detect_concatenation(
        "alpha beta gamma", "delta epsilon zeta", "totally different words", 0.85
    )
    assert not flag
    assert score == 0.0


def test_half_embedding_matches_dp_oracle():
    raw = "one two three four five six seven eight nine ten"
    fused = "story begins three four five six seven then ends differently"
    raw_tokens = tokenize_words(raw)
    fused_tokens = tokenize_words(fused)
    expected = brute_lcs_substring_len(raw_tokens, fused_tokens) / len(raw_tokens)
    assert containment(raw_tokens, fused_tokens) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.5)


@settings(max_examples=150)
@given(raw=token_lists, synthetic=token_lists, fused=token_lists)
def test_concat_score_matches_bruteforce_oracle(raw, synthetic, fused):
    flag, score = detect_concatenation(" ".join(raw), " ".join(synthetic), " ".join(fused), 0.85)
    def oracle_containment(inner):
        if not inner:
            return 0.0
        return brute_lcs_substring_len(inner, fused) / len(inner)
    expected = min(oracle_containment(raw), oracle_containment(synthetic))
    assert score == pytest.approx(expected, abs=1e-9)


def test_refusal_patterns():
    assert detect_refusal("I'm sorry, but I cannot merge the sentences.")
    assert detect_refusal("i am sorry, this will not work")
    assert detect_refusal("As an AI model, I cannot do that")
    assert detect_refusal("Unable to merge due to contradictions")
    assert detect_refusal("  I cannot combine these")
    assert detect_refusal("I’m sorry but no")  # curly apostrophe


def test_refusal_is_start_anchored():
    assert not detect_refusal("Sorry Street is a landmark in the old town")
    assert not detect_refusal("The guide said: I'm sorry, closed today")
    assert not detect_refusal("An AI conference venue in Boston")


def test_no_refusal_hits_on_clean_corpus():
    captions = style_corpus("fused", 1000, seed=3)
    assert sum(detect_refusal(c) for c in captions) == 0


@given(a=st.lists(st.sampled_from(WORDS), min_size=1, max_size=15))
def test_copy_similarity_self_is_one(a):
    assert copy_similarity(a, a) == pytest.approx(1.0)


@given(a=token_lists, b=token_lists)
def test_copy_similarity_symmetric(a, b):
    assert copy_similarity(a, b) == pytest.approx(copy_similarity(b, a))


def test_empty_caption_verdict_is_empty_only():
    verdict = apply_filters(fused_record(fused="   "), FilterConfig())
    assert not verdict.accepted
    assert verdict.triggered_rules == (FilterRule.EMPTY,)
    assert FilterRule.EMPTY.value in verdict.evidence


def test_copy_of_synthetic_rejected():
    synthetic = "a man standing next to a train at the station"
    verdict = apply_filters(
        fused_record(synthetic=synthetic, fused=synthetic), FilterConfig()
    )
    assert not verdict.accepted
    assert FilterRule.VERBATIM_COPY_SYNTHETIC in verdict.triggered_rules


def test_copy_of_raw_rejected():
    raw = "Rijksmuseum archive print 1954 lot 12 catalog scan"
    verdict = apply_filters(fused_record(raw=raw, fused=raw), FilterConfig())
    assert not verdict.accepted
    assert FilterRule.VERBATIM_COPY_RAW in verdict.triggered_rules


def test_too_short_and_too_long():
    short = apply_filters(fused_record(fused="two words"), FilterConfig())
    assert FilterRule.TOO_SHORT in short.triggered_rules
    long = apply_filters(fused_record(fused="word " * 200), FilterConfig())
    assert FilterRule.TOO_LONG in long.triggered_rules


def test_clean_fusion_accepted():
    raw = "Gare du Nord station 1928 postcard stock photo"
    synthetic = "a group of people waiting on a platform"
    verdict = apply_filters(
        fused_record(raw=raw, synthetic=synthetic, fused=clean_fusion(raw, synthetic)),
        FilterConfig(),
    )
    assert verdict.accepted, verdict.triggered_rules


def test_evidence_is_complete_for_all_evaluated_rules():
    verdict = apply_filters(fused_record(fused="a detailed caption of many things"), FilterConfig())
    for rule in FilterRule:
        if rule is FilterRule.EMPTY:
            continue
        assert rule.value in verdict.evidence


def test_rejected_records_always_carry_evidence():
    records, _ = build_defect_corpus(300, seed=5)
    cfg = FilterConfig()
    for record in records:
        verdict = apply_filters(record, cfg)
        if not verdict.accepted:
            assert verdict.triggered_rules
            for rule in verdict.triggered_rules:
                assert rule.value in verdict.evidence


def test_injected_defects_all_rejected():
    records, defect_ids = build_defect_corpus(1000, seed=2)
    planted = set().union(*defect_ids.values())
    cfg = FilterConfig()
    rejected = {
        r.base.id for r in records if not apply_filters(r, cfg).accepted
    }
    assert planted <= rejected
    clean = {r.base.id for r in records} - planted
    false_rejects = rejected & clean
    assert len(false_rejects) <= 0.01 * len(clean)


@settings(max_examples=40, deadline=None)
@given(
    t_low=st.floats(min_value=0.05, max_value=1.0),
    t_high=st.floats(min_value=0.05, max_value=1.0),
    seed=st.integers(0, 500),
)
def test_lowering_concat_threshold_never_grows_accepted_set(t_low, t_high, seed):
    if t_low > t_high:
        t_low, t_high = t_high, t_low
    records, _ = build_defect_corpus(40, seed=seed)
    accepted_low = {
        r.base.id
        for r in records
        if apply_filters(r, FilterConfig(concat_containment_threshold=t_low)).accepted
    }
    accepted_high = {
        r.base.id
        for r in records
        if apply_filters(r, FilterConfig(concat_containment_threshold=t_high)).accepted
    }
    assert accepted_low <= accepted_high


def test_filter_corpus_all_clean_retains_everything(tmp_path):
    records, _ = build_defect_corpus(200, concat_rate=0, refusal_rate=0, copy_rate=0, seed=1)
    write_shard(records, tmp_path / "in.rlc")
    retained, report = filter_corpus([tmp_path / "in.rlc"], FilterConfig(), tmp_path / "out")
    assert report.input_count == 200
    assert report.retained_count == 200


def test_filter_corpus_only_refusals_retains_nothing(tmp_path):
    records = [
        FusedRecord(base=make_record(i), fused_caption=REFUSAL_TEXTS[i % len(REFUSAL_TEXTS)])
        for i in range(50)
    ]
    write_shard(records, tmp_path / "in.rlc")
    _, report = filter_corpus([tmp_path / "in.rlc"], FilterConfig(), tmp_path / "out")
    assert report.retained_count == 0
    assert report.per_rule_counts[FilterRule.REFUSAL.value] == 50


def test_filter_corpus_preserves_order_and_counts(tmp_path):
    records, defect_ids = build_defect_corpus(400, seed=9)
    write_shard(records[:200], tmp_path / "a.rlc")
    write_shard(records[200:], tmp_path / "b.rlc")
    retained_paths, report = filter_corpus(
        [tmp_path / "a.rlc", tmp_path / "b.rlc"], FilterConfig(), tmp_path / "out"
    )
    assert report.input_count == 400
    kept_ids = [
        r.base.id for path in retained_paths for r in read_fused_shard(path)
    ]
    original_order = [r.base.id for r in records if r.base.id in set(kept_ids)]
    assert kept_ids == original_order
    assert report.retained_count == len(kept_ids)


def test_per_rule_counts_shard_order_invariant(tmp_path):
    records, _ = build_defect_corpus(300, seed=4)
    write_shard(records[:150], tmp_path / "a.rlc")
    write_shard(records[150:], tmp_path / "b.rlc")
    _, forward = filter_corpus(
        [tmp_path / "a.rlc", tmp_path / "b.rlc"], FilterConfig(), tmp_path / "out1"
    )
    _, backward = filter_corpus(
        [tmp_path / "b.rlc", tmp_path / "a.rlc"], FilterConfig(), tmp_path / "out2"
    )
    assert forward.per_rule_counts == backward.per_rule_counts
    assert forward.retained_count == backward.retained_count


def test_non_fused_records_are_skipped_not_filtered(tmp_path):
    records = [
        FusedRecord(base=make_record(0), fused_caption="a b c d e f g h"),
        FusedRecord(
            base=make_record(1), fused_caption="", status=FusionStatus.BACKEND_ERROR
        ),
    ]
    write_shard(records, tmp_path / "in.rlc")
    _, report = filter_corpus([tmp_path / "in.rlc"], FilterConfig(), tmp_path / "out")
    assert report.input_count == 2
    assert report.skipped_not_fused == 1


def test_write_rejected_marks_status(tmp_path):
    records = [FusedRecord(base=make_record(0), fused_caption=REFUSAL_TEXTS[0])]
    write_shard(records, tmp_path / "in.rlc")
    filter_corpus(
        [tmp_path / "in.rlc"], FilterConfig(), tmp_path / "out", write_rejected=True
    )
    [rejected] = read_fused_shard(tmp_path / "out" / "rejected" / "in.rlc")
    assert rejected.status is FusionStatus.FILTERED


def test_config_validation():
    with pytest.raises(ValueError):
        FilterConfig(concat_containment_threshold=0.0).validate()
    with pytest.raises(ValueError):
        FilterConfig(min_words=10, max_words=5).validate()
    FilterConfig().validate()
