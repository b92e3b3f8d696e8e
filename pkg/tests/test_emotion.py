"""Lexicon emotion classifier: negation, ties, emoji, bundled accuracy."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axs.chunker import Utterance
from axs.emotion import (
    CLASSES,
    EMOJI,
    EmotionLabel,
    bundled_lexicon,
    classify_emotion,
    classify_text,
    emoji_for,
    load_lexicon,
)
from axs.errors import InvalidParams, ParseError


@pytest.fixture(scope="module")
def lex():
    return bundled_lexicon()


@pytest.fixture()
def tiny_lex(tmp_path):
    p = tmp_path / "lex.txt"
    p.write_text(
        "# tiny\n"
        "happy joy:1.0\n"
        "sad sadness:1.0\n"
        "furious anger:2.0\n"
        "mixed joy:1.0,sadness:1.0\n",
        encoding="utf-8",
    )
    return load_lexicon(p)


def test_load_lexicon_parses(tiny_lex):
    assert tiny_lex.entries["furious"] == {"anger": 2.0}
    assert tiny_lex.entries["mixed"] == {"joy": 1.0, "sadness": 1.0}


@pytest.mark.parametrize(
    "line",
    ["happy", "happy joy", "happy joy:x", "happy disgust:1.0", "happy joy:-1", "happy joy:0"],
)
def test_load_lexicon_rejects_bad_lines(tmp_path, line):
    p = tmp_path / "bad.txt"
    p.write_text(line + "\n", encoding="utf-8")
    with pytest.raises(ParseError, match=":1"):
        load_lexicon(p)


def test_basic_classification(tiny_lex):
    assert classify_text("I am so happy today", tiny_lex) == ("joy", 1.0)
    label, conf = classify_text("happy but also sad and sad", tiny_lex)
    assert label == "sadness"
    assert conf == pytest.approx(2 / 3)


def test_negation_zeroes_contribution(tiny_lex):
    assert classify_text("I am not happy", tiny_lex) == ("neutral", 0.0)
    # negator two tokens back still applies
    assert classify_text("not at happy", tiny_lex)[0] == "neutral"
    # three tokens back is out of the window
    assert classify_text("not at all happy", tiny_lex)[0] == "joy"


def test_ties_resolve_to_neutral(tiny_lex):
    assert classify_text("happy sad", tiny_lex)[0] == "neutral"
    assert classify_text("mixed", tiny_lex)[0] == "neutral"


def test_no_signal_is_neutral_zero(tiny_lex):
    assert classify_text("the report is on the desk", tiny_lex) == ("neutral", 0.0)
    assert classify_text("", tiny_lex) == ("neutral", 0.0)


def test_punctuation_stripped(tiny_lex):
    assert classify_text("Happy!", tiny_lex)[0] == "joy"


def test_classify_emotion_wraps_utterance(tiny_lex):
    utt = Utterance(speaker_id="p", text="So happy.", tokens=["So", "happy."], t0=0, t1=1)
    label = classify_emotion(utt, tiny_lex)
    assert isinstance(label, EmotionLabel)
    assert label.label == "joy"
    assert label.utterance_id == utt.utterance_id


def test_label_validation():
    with pytest.raises(InvalidParams):
        EmotionLabel(label="disgust", confidence=0.5)


def test_emoji_mapping():
    assert emoji_for("joy") == "\U0001F600"
    assert emoji_for(EmotionLabel(label="anger", confidence=1.0)) == "\U0001F620"
    assert set(EMOJI) == set(CLASSES)


def test_bundled_lexicon_size(lex):
    assert len(lex) >= 300


def test_bundled_accuracy_at_least_90(lex):
    from importlib import resources

    correct = total = 0
    eval_text = (resources.files("axs.data") / "emotion_eval.tsv").read_text("utf-8")
    for line in eval_text.splitlines():
        if not line.strip():
            continue
        text, expected = line.rsplit("\t", 1)
        total += 1
        if classify_text(text, lex)[0] == expected:
            correct += 1
    assert total == 100
    assert correct / total >= 0.90


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_fuzzed_unicode_always_one_of_six(lex, s):
    label, conf = classify_text(s, lex)
    assert label in CLASSES
    assert 0.0 <= conf <= 1.0
