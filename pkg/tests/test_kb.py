from typing import NamedTuple

import pytest

from storyqa.kb import (
    FrameEntry,
    FrameFormatError,
    FrameNotFound,
    KnowledgeBase,
    default_kb_path,
    split_articles,
)
from storyqa.semdb import dump, load
from storyqa.semmap import FactorSet

ROB_STAGES = [
    "to go to organization",
    "to come in at labor time",
    "to neutralize a personal",
    "to open safes using tools",
    "to take moneys",
    "to come out from organization",
]


def test_serialization_is_lossless(kb):
    assert kb.serialize() == default_kb_path().read_text(encoding="utf-8")


def test_reload_of_serialized_text_is_identical(kb, lexicon):
    again = KnowledgeBase(lexicon)
    again.load_text(kb.serialize())
    assert again.serialize() == kb.serialize()
    assert dump(again.db) == dump(kb.db)


class Kind(NamedTuple):
    head: str
    kind: str
    roles: dict


KINDS = [
    Kind("doctor", "noun", {"function": 3}),
    Kind("car", "noun", {"structure_part": 2}),
    Kind("learn", "verb", {"sub_action": 4}),
    Kind("shoot from a gun", "verb", {}),
    Kind("shoot a person", "verb", {"definition": 1, "motive": 3}),
    Kind("rob the organization", "operation", {"stage": 6}),
]


@pytest.mark.parametrize("case", KINDS, ids=lambda c: c.head)
def test_frame_kinds_and_roles(kb, case):
    frame = kb.frame_lookup(case.head)
    assert frame.kind == case.kind
    roles = {}
    for entry in frame.entries:
        roles[entry.role] = roles.get(entry.role, 0) + 1
    assert roles == case.roles


def test_doctor_functions_verbatim(kb):
    assert [e.render() for e in kb.frame_lookup("doctor").functions] == [
        "doctor examines a person",
        "doctor determines a disease",
        "doctor prescribes a medicine",
    ]


def test_car_structure(kb):
    parts = kb.frame_lookup("car").by_role("structure_part")
    assert [p.text for p in parts] == ["chassis", "engine"]
    for part in parts:
        rel, code = part.parsed
        assert kb.db[rel]["type"] == "part" and kb.db[rel]["right"] == code


def test_rob_stages_in_order(kb):
    (alternative,) = kb.operation_alternatives("rob the organization")
    assert [e.text for e in alternative] == ROB_STAGES
    assert all(e.alternative_no == 1 for e in alternative)


def test_unanalysable_stage_kept_as_text(kb):
    (alternative,) = kb.operation_alternatives("to rob the organization")
    broken = [e for e in alternative if e.warning]
    assert [e.text for e in broken] == ["to neutralize a personal"]
    assert broken[0].parsed == ()
    assert ("to neutralize a personal", broken[0].warning) in kb.warnings
    assert all(e.parsed for e in alternative if not e.warning)


def test_motive_conditions(kb):
    motives = kb.frame_lookup("shoot a person").motives
    assert [m.text for m in motives] == [
        "to get money from the person",
        "to pay off the person",
        "to annihilate the person",
    ]
    assert [m.condition for m in motives] == [
        "the subject is criminal",
        "this person outrages the subject",
        "this person is the enemy of the subject",
    ]


def test_frame_lookup_by_qualifier(kb):
    person = kb.frame_lookup("shoot", FactorSet(dobj_kind="person"))
    gun = kb.frame_lookup("shoot", FactorSet(prep_objects=(("from", "machine"),)))
    assert person.head == "shoot a person"
    assert gun.head == "shoot from a gun"


def test_frame_lookup_missing(kb):
    with pytest.raises(FrameNotFound):
        kb.frame_lookup("fly")
    with pytest.raises(FrameNotFound):
        kb.operation_alternatives("build a house")


def test_shadow_records_use_prefix(kb):
    text = dump(kb.db)
    assert text and all(line.startswith("t") for line in text.splitlines())
    assert load(text, prefix="t").multiset() == kb.db.multiset()


def test_split_articles():
    text = "frame is a\nx\n\n\nframe is b\n"
    assert split_articles(text) == [["frame is a", "x"], ["frame is b"]]


@pytest.mark.parametrize("article, message", [
    ("doctor examines a person", "must start with"),
    ("frame is glorp\nthing", "neither a noun nor a verb"),
    ("frame is doctor\ndoctor zorbs a person", "cannot analyse body line"),
    ("frame is car\nA car consists of zorb", "cannot analyse structure line"),
])
def test_format_errors(lexicon, article, message):
    with pytest.raises(FrameFormatError, match=message):
        KnowledgeBase(lexicon).ingest_frame(article)


def test_failed_frame_is_not_added(lexicon):
    base = KnowledgeBase(lexicon)
    with pytest.raises(FrameFormatError):
        base.ingest_frame("frame is doctor\ndoctor examines a person\ndoctor zorbs it")
    assert base.frames == []


def test_entry_validation():
    with pytest.raises(ValueError):
        FrameEntry("opinion", "x", "x")
    with pytest.raises(ValueError):
        FrameEntry("stage", "x", "x", alternative_no=0)


def test_several_alternatives_grouped(lexicon):
    base = KnowledgeBase(lexicon)
    base.load_text("frame is visit London\n"
                   "alternative 2 ; to buy a ticket\n"
                   "alternative 1 ; to drive a car\n"
                   "alternative 2 ; to go to London\n")
    groups = base.operation_alternatives("visit London")
    assert [[e.text for e in g] for g in groups] == [
        ["to drive a car"], ["to buy a ticket", "to go to London"]]
