"""Extractive summariser: verbatim guarantee, cues, window tiling."""

import random

import pytest

from axs.chunker import Utterance
from axs.errors import EmptyWindow
from axs.summarizer import (
    SummaryAccumulator,
    TranscriptEntry,
    extract_summary,
    split_sentences,
    summarize_multilingual,
)
from axs.translator import LangPair, TranslatorRegistry


def entry(text, t=0.0, speaker="p1", uid=None):
    return TranscriptEntry(speaker, text, t, uid or f"u-{id(text)}-{t}")


def utt(text, uid):
    return Utterance(speaker_id="p1", text=text, tokens=text.split(), t0=0.0, t1=1.0, utterance_id=uid)


# -- sentence splitting ------------------------------------------------------


def test_split_sentences():
    assert split_sentences("One. Two! Three?") == ["One.", "Two!", "Three?"]
    assert split_sentences("No terminal mark") == ["No terminal mark"]
    assert split_sentences("") == []
    assert split_sentences("  Padded.  ") == ["Padded."]


# -- extract_summary ---------------------------------------------------------


def test_empty_window_raises():
    with pytest.raises(EmptyWindow):
        extract_summary([], window=(0, 900))
    with pytest.raises(EmptyWindow):
        extract_summary([entry("   ")], window=(0, 900))


def test_decision_and_action_cues():
    record = extract_summary(
        [
            entry("We agreed to ship the beta."),
            entry("Sam will update the docs."),
            entry("The weather is nice today."),
        ],
        window=(0, 900),
    )
    assert record.decisions == ["We agreed to ship the beta."]
    assert record.action_items == ["Sam will update the docs."]
    assert record.key_points == ["The weather is nice today."]


def test_decision_cue_takes_precedence_over_action():
    # contains both "agreed" and "will": decisions wins
    record = extract_summary([entry("We agreed that Pat will lead.")], window=(0, 900))
    assert record.decisions == ["We agreed that Pat will lead."]
    assert record.action_items == []


def test_by_weekday_is_action():
    record = extract_summary([entry("Send the report by Friday.")], window=(0, 900))
    assert record.action_items == ["Send the report by Friday."]


def test_key_points_capped_and_ordered():
    entries = [entry(f"Topic {chr(65 + i)} covers item number {i}.") for i in range(9)]
    record = extract_summary(entries, window=(0, 900), k=5)
    assert len(record.key_points) == 5
    # original order preserved
    sentences = [s for e in entries for s in split_sentences(e.text)]
    idx = [sentences.index(s) for s in record.key_points]
    assert idx == sorted(idx)


def test_frequency_scoring_prefers_repeated_topics():
    entries = [
        entry("Budget budget budget review review."),
        entry("Completely unrelated pets discussion."),
        entry("Budget review continues."),
    ]
    record = extract_summary(entries, window=(0, 900), k=1)
    assert "udget" in record.key_points[0]


def random_sentence(rng):
    words = ["alpha", "beta", "gamma", "delta", "metric", "launch", "review",
             "budget", "scope", "risk", "deadline", "design", "test", "users"]
    n = rng.randint(3, 9)
    body = " ".join(rng.choice(words) for _ in range(n))
    return body.capitalize() + rng.choice([".", "!", "?"])


def test_extractive_guarantee_500_windows():
    """Every emitted sentence appears verbatim in its window's transcript."""
    rng = random.Random(42)
    for _ in range(500):
        entries = [
            entry(" ".join(random_sentence(rng) for _ in range(rng.randint(1, 3))), t=i)
            for i in range(rng.randint(1, 6))
        ]
        record = extract_summary(entries, window=(0, 900), k=rng.randint(1, 6))
        window_text = " ".join(e.text for e in entries)
        for sentence in record.key_points + record.decisions + record.action_items:
            assert sentence in window_text
        assert record.key_points or record.decisions or record.action_items


# -- accumulator -------------------------------------------------------------


def test_scheduled_trigger_fires_on_interval():
    acc = SummaryAccumulator("s", interval_s=900)
    acc.accumulate(utt("First point discussed.", "u1"), now=10.0)
    assert acc.schedule_tick(100.0) is None  # before the boundary
    record = acc.schedule_tick(900.0)
    assert record is not None
    assert record.window == (0.0, 900.0)


def test_empty_window_advances_clock_without_record():
    acc = SummaryAccumulator("s", interval_s=900)
    assert acc.schedule_tick(900.0) is None
    acc.accumulate(utt("Late talk here.", "u1"), now=1000.0)
    # next boundary is 1800, not 900 + nothing
    assert acc.schedule_tick(1700.0) is None
    assert acc.schedule_tick(1800.0) is not None


def test_windows_tile_without_gap_or_overlap():
    acc = SummaryAccumulator("s", interval_s=100)
    windows = []
    for i in range(6):
        acc.accumulate(utt(f"Window {i} content point.", f"u{i}"), now=i * 100 + 50)
        record = acc.schedule_tick((i + 1) * 100.0)
        assert record is not None
        windows.append(record.window)
        assert record.key_points == [f"Window {i} content point."]
    for (a0, a1), (b0, b1) in zip(windows, windows[1:]):
        assert a1 == b0  # tiling: next window starts where the last ended
    assert windows[0][0] == 0.0


def test_duplicate_utterances_skipped_with_warning():
    acc = SummaryAccumulator("s", interval_s=100)
    acc.accumulate(utt("Same thing.", "dup"), now=1.0)
    acc.accumulate(utt("Same thing.", "dup"), now=2.0)
    assert acc.duplicate_warnings == 1
    record = acc.on_demand(10.0)
    assert record.key_points == ["Same thing."]


def test_on_demand_window_since_last_summary():
    acc = SummaryAccumulator("s", interval_s=900)
    acc.accumulate(utt("Early remark made.", "u1"), now=5.0)
    record = acc.on_demand(120.0)
    assert record is not None
    assert record.window == (0.0, 120.0)
    # consumed: a second on-demand over the same span is empty
    assert acc.on_demand(121.0) is None
    acc.accumulate(utt("Newer remark made.", "u2"), now=130.0)
    record2 = acc.on_demand(140.0)
    assert record2.window == (120.0, 140.0)
    assert record2.key_points == ["Newer remark made."]


def test_on_demand_empty_returns_none():
    acc = SummaryAccumulator("s")
    assert acc.on_demand(50.0) is None


# -- multilingual ------------------------------------------------------------


def test_summarize_multilingual_partial_failure(tmp_path):
    lex = tmp_path / "en_fr.tsv"
    lex.write_text("report\trapport\n", encoding="utf-8")
    reg = TranslatorRegistry()
    reg.register_language_pair(LangPair("en", "fr"), lexicon_path=lex)
    record = extract_summary([entry("The report is ready.")], window=(0, 10))
    results = summarize_multilingual(record, ["fr", "de"], reg)
    assert [r[0] for r in results] == ["fr", "de"]
    fr = results[0][1]
    assert fr.language == "fr"
    assert fr.key_points == ["The rapport is ready."]
    assert results[0][2] is None
    assert results[1][1] is None
    assert results[1][2] == "PAIR_NOT_REGISTERED"
