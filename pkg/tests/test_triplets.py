import json

import pytest

from capsforge.errors import InvalidTriplet
from capsforge.prompts import build_prompt
from capsforge.records import FusedRecord, FusionStatus
from capsforge.triplets import (
    CaptionTriplet,
    emit_training_config,
    export_triplets,
    parse_chat_example,
    parse_training_config,
    render_chat_example,
    triplets_from_records,
)
from conftest import make_record


def make_triplet(i: int) -> CaptionTriplet:
    return CaptionTriplet(
        raw=f"raw caption number {i} with entity names",
        synthetic=f"a generic description of scene {i}",
        fused=f"A fused caption for scene {i} keeping the entity names.",
        source_id=f"t-{i:05d}",
    )


def test_render_uses_exact_prompt():
    triplet = make_triplet(1)
    example = render_chat_example(triplet)
    assert example["messages"][0]["role"] == "user"
    assert example["messages"][0]["content"] == build_prompt(triplet.raw, triplet.synthetic)
    assert example["messages"][0]["content"].startswith(
        "Please merge and refine the information"
    )
    assert example["target"] == triplet.fused


def test_render_rejects_empty_fused():
    with pytest.raises(InvalidTriplet):
        render_chat_example(
            CaptionTriplet(raw="r words", synthetic="s words", fused="  ", source_id="x")
        )


def test_exported_line_roundtrips():
    triplet = make_triplet(2)
    line = json.dumps(render_chat_example(triplet), ensure_ascii=False)
    parsed = parse_chat_example(line)
    assert parsed == triplet


def test_triplets_from_records_skips_non_fused():
    records = [
        FusedRecord(base=make_record(0), fused_caption="good caption here"),
        FusedRecord(base=make_record(1), fused_caption="", status=FusionStatus.BACKEND_ERROR),
    ]
    triplets = list(triplets_from_records(records))
    assert len(triplets) == 1
    assert triplets[0].source_id == "rec-000000"


def test_export_split_is_deterministic(tmp_path):
    triplets = [make_triplet(i) for i in range(1000)]
    first = export_triplets(triplets, tmp_path / "e1", val_fraction=0.1, seed=77)
    second = export_triplets(triplets, tmp_path / "e2", val_fraction=0.1, seed=77)
    assert first.train_count == second.train_count
    assert first.val_count == second.val_count
    assert first.train_count + first.val_count == 1000
    assert (tmp_path / "e1" / "train.chat.jsonl").read_bytes() == (
        tmp_path / "e2" / "train.chat.jsonl"
    ).read_bytes()
    assert (tmp_path / "e1" / "val.chat.jsonl").read_bytes() == (
        tmp_path / "e2" / "val.chat.jsonl"
    ).read_bytes()
    # about a tenth goes to val
    assert 60 <= first.val_count <= 140


def test_export_split_is_disjoint(tmp_path):
    triplets = [make_triplet(i) for i in range(500)]
    result = export_triplets(triplets, tmp_path, val_fraction=0.2, seed=3)
    train_ids = {
        parse_chat_example(line).source_id
        for line in result.train_path.read_text().splitlines()
    }
    val_ids = {
        parse_chat_example(line).source_id
        for line in result.val_path.read_text().splitlines()
    }
    assert not train_ids & val_ids
    assert len(train_ids) + len(val_ids) == 500


def test_split_stable_under_reordering(tmp_path):
    triplets = [make_triplet(i) for i in range(300)]
    forward = export_triplets(triplets, tmp_path / "f", val_fraction=0.1, seed=5)
    backward = export_triplets(list(reversed(triplets)), tmp_path / "b", val_fraction=0.1, seed=5)
    val_ids_f = {
        parse_chat_example(line).source_id
        for line in forward.val_path.read_text().splitlines()
    }
    val_ids_b = {
        parse_chat_example(line).source_id
        for line in backward.val_path.read_text().splitlines()
    }
    assert val_ids_f == val_ids_b


def test_zero_val_fraction_gives_empty_val_file(tmp_path):
    result = export_triplets([make_triplet(i) for i in range(20)], tmp_path, val_fraction=0.0)
    assert result.val_count == 0
    assert result.val_path.exists()
    assert result.val_path.read_text() == ""
    assert result.train_count == 20


def test_export_rejects_bad_fraction(tmp_path):
    with pytest.raises(ValueError):
        export_triplets([], tmp_path, val_fraction=1.0)


def test_prompt_parity_on_export(tmp_path):
    triplets = [make_triplet(i) for i in range(50)]
    result = export_triplets(triplets, tmp_path, val_fraction=0.1, seed=1)
    for path in (result.train_path, result.val_path):
        for line in path.read_text().splitlines():
            obj = json.loads(line)
            assert obj["messages"][0]["content"] == build_prompt(
                obj["raw_caption"], obj["synthetic_caption"]
            )


def test_training_config_exact_values(tmp_path):
    path = emit_training_config(tmp_path / "training_config.txt")
    config = parse_training_config(path)
    assert config == {
        "model_init": "LLaMA-2-13B",
        "batch_size": "128",
        "epochs": "2",
        "peak_lr": "1e-5",
        "end_lr": "0",
        "warmup_steps": "500",
        "scheduler": "cosine",
        "optimizer": "AdamW",
        "betas": "(0.9,0.95)",
        "eps": "1e-8",
        "weight_decay": "0.0",
    }


def test_training_config_roundtrips(tmp_path):
    path = emit_training_config(tmp_path / "c.txt")
    first = path.read_text()
    reparsed = parse_training_config(path)
    emit_training_config(tmp_path / "c2.txt")
    assert (tmp_path / "c2.txt").read_text() == first
    assert reparsed["peak_lr"] == "1e-5"
    assert reparsed["warmup_steps"] == "500"
