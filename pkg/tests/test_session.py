"""Rooms: membership, capacity race, prefs, replay ring, fan-out planning."""

import threading

import pytest

from axs.errors import (
    DuplicateId,
    DuplicateParticipant,
    InvalidParams,
    InvalidSettings,
    NotInBuffer,
    RoomFull,
    SessionClosed,
    SessionUnknown,
)
from axs.session import (
    MAX_PARTICIPANTS,
    Participant,
    ParticipantPrefs,
    Session,
    SessionRegistry,
    SessionSettings,
    plan_fanout,
)
from axs.signgen import DICTIONARY, Gloss, assemble_animation


def participant(i, **kw):
    return Participant(participant_id=f"p{i}", display_name=f"P {i}", **kw)


def fresh(settings=None):
    return Session("room", settings or SessionSettings())


# -- settings / prefs validation --------------------------------------------


def test_settings_defaults():
    s = SessionSettings()
    assert s.summary_interval_s == 900.0
    assert s.source_language == "en"
    assert s.sign_input == "source"


def test_settings_validation():
    with pytest.raises(InvalidSettings):
        SessionSettings(summary_interval_s=0)
    with pytest.raises(InvalidSettings):
        SessionSettings(replay_capacity=0)
    with pytest.raises(InvalidSettings):
        SessionSettings(sign_input="osmosis")


def test_prefs_speed_bounds():
    ParticipantPrefs(signing_speed=0.25)
    ParticipantPrefs(signing_speed=2.0)
    with pytest.raises(InvalidParams):
        ParticipantPrefs(signing_speed=0.1)
    with pytest.raises(InvalidParams):
        ParticipantPrefs(signing_speed=2.5)


def test_participant_role_validation():
    with pytest.raises(InvalidParams):
        participant(1, role="moderator")


# -- membership --------------------------------------------------------------


def test_join_returns_token():
    s = fresh()
    token = s.join(participant(1))
    assert token
    assert s.participant_count() == 1


def test_duplicate_participant_rejected():
    s = fresh()
    s.join(participant(1))
    with pytest.raises(DuplicateParticipant):
        s.join(participant(1))


def test_ninth_join_room_full():
    s = fresh()
    for i in range(MAX_PARTICIPANTS):
        s.join(participant(i))
    with pytest.raises(RoomFull):
        s.join(participant(99))


def test_leave_frees_slot():
    s = fresh()
    for i in range(MAX_PARTICIPANTS):
        s.join(participant(i))
    s.leave("p0")
    s.join(participant(99))  # slot reopened
    assert s.participant_count() == MAX_PARTICIPANTS


def test_join_closed_session():
    s = fresh()
    s.close()
    with pytest.raises(SessionClosed):
        s.join(participant(1))


def test_capacity_race_never_exceeds_eight():
    """Many rounds of 16 concurrent joins: exactly 8 ever win."""
    for round_no in range(30):
        s = Session(f"race-{round_no}", SessionSettings())
        results = [None] * 16
        barrier = threading.Barrier(16)

        def attempt(i):
            barrier.wait()
            try:
                s.join(participant(i))
                results[i] = "ok"
            except RoomFull:
                results[i] = "full"

        threads = [threading.Thread(target=attempt, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results.count("ok") == MAX_PARTICIPANTS
        assert results.count("full") == 16 - MAX_PARTICIPANTS
        assert s.participant_count() == MAX_PARTICIPANTS


# -- prefs updates -----------------------------------------------------------


def test_update_prefs():
    s = fresh()
    s.join(participant(1))
    prefs = s.update_prefs("p1", signing_speed=1.5, language="fr")
    assert prefs.signing_speed == 1.5
    assert s.participant("p1").prefs.language == "fr"
    with pytest.raises(InvalidParams):
        s.update_prefs("p1", signing_speed=9.0)
    with pytest.raises(SessionUnknown):
        s.update_prefs("ghost", language="de")


# -- seq ordering ------------------------------------------------------------


def test_seq_tracking_per_speaker():
    s = fresh()
    assert s.check_seq("a", 0)
    assert not s.check_seq("a", 0)  # consumed
    assert s.check_seq("a", 1)
    assert s.check_seq("b", 0)  # independent per speaker
    assert not s.check_seq("a", 5)


def test_peek_and_advance():
    s = fresh()
    assert s.peek_seq("a", 0)
    assert s.peek_seq("a", 0)  # peek does not consume
    s.advance_seq("a")
    assert s.peek_seq("a", 1)
    s.reset_seq("a")
    assert s.peek_seq("a", 0)


# -- replay ring -------------------------------------------------------------


def make_sequence(dictionary, gloss="HELLO", speed=1.0):
    g = Gloss(gloss, DICTIONARY, (0, 1), dictionary.version)
    return assemble_animation([g], dictionary, speed=speed)


def test_replay_ring_eviction(test_dictionary):
    s = Session("room", SessionSettings(replay_capacity=3))
    seqs = [make_sequence(test_dictionary) for _ in range(5)]
    for seq in seqs:
        s.remember_sequence(seq)
    assert s.replay_ids() == [x.sequence_id for x in seqs[-3:]]
    with pytest.raises(NotInBuffer):
        s.replay(seqs[0].sequence_id)
    assert s.replay(seqs[-1].sequence_id) is seqs[-1]


def test_replay_retimes_on_speed_change(test_dictionary):
    s = fresh()
    seq = make_sequence(test_dictionary)
    s.remember_sequence(seq)
    slow = s.replay(seq.sequence_id, speed=0.5)
    assert slow.speed == 0.5
    assert slow.total_duration == pytest.approx(seq.total_duration * 2)
    assert s.replay(seq.sequence_id, speed=1.0) is seq  # same speed: no copy


# -- fan-out planning --------------------------------------------------------


def test_fanout_partials_stay_local():
    assert plan_fanout(fresh(), final=False) == []


def test_fanout_final_with_signing():
    stages = plan_fanout(fresh(), final=True)
    assert stages == ["translation", "emotion", "signgen", "summary"]


def test_fanout_final_signing_disabled():
    s = fresh(SessionSettings(signing_enabled=False))
    assert plan_fanout(s, final=True) == ["translation", "emotion", "summary"]


def test_fanout_closed_session():
    s = fresh()
    s.close()
    with pytest.raises(SessionClosed):
        plan_fanout(s, final=True)


# -- registry ----------------------------------------------------------------


def test_registry_lifecycle():
    reg = SessionRegistry()
    s1 = reg.create_session()
    s2 = reg.create_session()
    assert s1.session_id != s2.session_id
    assert reg.get(s1.session_id) is s1
    with pytest.raises(DuplicateId):
        reg.create_session(session_id=s1.session_id)
    with pytest.raises(SessionUnknown):
        reg.get("missing")
    reg.close_session(s1.session_id)
    assert s1.closed
    with pytest.raises(SessionUnknown):
        reg.get(s1.session_id)
    assert [s.session_id for s in reg.live_sessions()] == [s2.session_id]


def test_registry_get_or_create():
    reg = SessionRegistry()
    a = reg.get_or_create("room-1")
    b = reg.get_or_create("room-1", SessionSettings(target_language="de"))
    assert a is b
    assert a.settings.target_language == "fr"  # first creator's settings stick
