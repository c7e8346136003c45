import pytest
from hypothesis import given
from hypothesis import strategies as st

from capsforge.errors import EmptyCaption
from capsforge.prompts import build_prompt, clean_response

GOLDEN_PROMPT = (
    "Please merge and refine the information from the two given sentences.\n"
    "Sentence 1 provides detailed real-world knowledge, yet it suffers from flaws in "
    "sentence structure and grammar.\n"
    "Sentence 2 exhibits nice sentence structure, but lacking in-depth real-world details "
    "and may contain false information.\n"
    "Please combine them into a new sentence, ensuring a well-structured sentence while "
    "retaining the detailed real-world information provided in Sentence 1.\n"
    "Avoid simply concatenating the sentences.\n"
    "Sentence 1: B&O Railroad Museum: 1828-1993 Photo Tour\n"
    "Sentence 2: A man standing next to a train"
)


def test_golden_prompt_is_byte_exact():
    prompt = build_prompt(
        "B&O Railroad Museum: 1828-1993 Photo Tour", "A man standing next to a train"
    )
    assert prompt == GOLDEN_PROMPT


def test_prompt_starts_with_task_line():
    prompt = build_prompt("raw words here", "synthetic words here")
    assert prompt.startswith(
        "Please merge and refine the information from the two given sentences."
    )


def test_template_lines_appear_in_order():
    prompt = build_prompt("first caption", "second caption")
    markers = [
        "Please merge and refine the information",
        "Sentence 1 provides detailed real-world knowledge",
        "Sentence 2 exhibits nice sentence structure",
        "Avoid simply concatenating the sentences.",
        "Sentence 1: first caption",
        "Sentence 2: second caption",
    ]
    positions = [prompt.index(m) for m in markers]
    assert positions == sorted(positions)


def test_substitution_is_literal():
    raw = 'tricky "Sentence 2:" inside <synthetic caption>'
    prompt = build_prompt(raw, "plain one")
    assert "Sentence 1: " + raw in prompt
    assert prompt.endswith("\nSentence 2: plain one")


def test_empty_caption_rejected():
    with pytest.raises(EmptyCaption):
        build_prompt("", "x")
    with pytest.raises(EmptyCaption):
        build_prompt("x", "   ")


@given(raw=st.text(min_size=1).filter(lambda s: s.strip()),
       synthetic=st.text(min_size=1).filter(lambda s: s.strip()))
def test_prompt_is_byte_stable(raw, synthetic):
    assert build_prompt(raw, synthetic) == build_prompt(raw, synthetic)


def test_clean_strips_wrapping_quotes():
    assert clean_response('"A vintage locomotive at the museum."') == (
        "A vintage locomotive at the museum."
    )


def test_clean_strips_leading_labels():
    assert clean_response("Merged sentence: The museum opened.") == "The museum opened."
    assert clean_response("new sentence:   Tidy output.") == "Tidy output."
    assert clean_response("SENTENCE: ok caption") == "ok caption"


def test_clean_collapses_whitespace():
    assert clean_response("a  b\n\tc") == "a b c"


def test_clean_leaves_clean_text_alone():
    text = "The B&O Railroad Museum, photographed in 1987."
    assert clean_response(text) == text


def test_clean_handles_label_inside_quotes():
    assert clean_response('"Sentence: nested label"') == "nested label"


def test_clean_empty_allowed():
    assert clean_response("") == ""
    assert clean_response('""') == ""
    assert clean_response("Merged sentence:") == ""


@given(st.text(max_size=120))
def test_clean_is_idempotent(text):
    once = clean_response(text)
    assert clean_response(once) == once
