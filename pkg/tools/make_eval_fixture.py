#!/usr/bin/env python3
"""Regenerate the bundled 100-judgment evaluation fixture.

Builds one blinded session over 100 synthetic items and a complete
judgment log whose unblinded tally is the reference outcome split
(a_win 20, b_win 15, similar 46, identical 19). Deterministic; run
from the repo root:

    python tools/make_eval_fixture.py
"""

import shutil
from pathlib import Path

from capsforge.evalservice import EvalStore, JudgmentChoice, SystemOutput, create_session
from capsforge.sampledata import demo_records
from harness_fusions import fusion_a, fusion_b

SEED = 40  # even seed: polarity bit 0
SAMPLE_N = 100
ANNOTATOR = "annotator-1"
OUTCOME_SPLIT = (("a_win", 20), ("b_win", 15), ("similar", 46), ("identical", 19))

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "capsforge" / "data" / "eval_fixture"


def main():
    if OUT_DIR.exists():
        shutil.rmtree(OUT_DIR)

    outputs_a = {}
    outputs_b = {}
    for record in demo_records(120, seed=SEED):
        shared = dict(
            id=record.id,
            raw_caption=record.raw_caption,
            synthetic_caption=record.synthetic_caption,
            image_ref=record.image_ref,
        )
        outputs_a[record.id] = SystemOutput(
            output=fusion_a(record.raw_caption, record.synthetic_caption), **shared
        )
        outputs_b[record.id] = SystemOutput(
            output=fusion_b(record.raw_caption, record.synthetic_caption), **shared
        )

    store = EvalStore(OUT_DIR)
    session = store.add_session(
        create_session(
            outputs_a,
            outputs_b,
            sample_n=SAMPLE_N,
            seed=SEED,
            system_a_name="hosted-llm",
            system_b_name="finetuned-refiner",
        )
    )

    outcomes = [name for name, count in OUTCOME_SPLIT for _ in range(count)]
    assert len(outcomes) == SAMPLE_N
    for item, outcome in zip(session.items, outcomes):
        if outcome == "similar":
            choice = JudgmentChoice.SIMILAR
        elif outcome == "identical":
            choice = JudgmentChoice.IDENTICAL
        elif outcome == "a_win":
            choice = JudgmentChoice.LEFT_WIN if item.left_is_a else JudgmentChoice.RIGHT_WIN
        else:  # b_win
            choice = JudgmentChoice.RIGHT_WIN if item.left_is_a else JudgmentChoice.LEFT_WIN
        store.submit(session.session_id, item.item_id, choice, ANNOTATOR)

    tally = store.tally(session.session_id)
    print("session:", session.session_id)
    print("tally:  ", tally.as_dict())
    expected = dict(OUTCOME_SPLIT)
    got = tally.as_dict()
    assert all(got[k] == v for k, v in expected.items()), got
    assert got["judgments"] == SAMPLE_N
    print("fixture written to", OUT_DIR)


if __name__ == "__main__":
    main()
