from typing import NamedTuple

import pytest

from storyqa.lexicon import (
    FactorConstraint,
    FeatureSet,
    LexEntry,
    LexiconError,
    SemanticCode,
    inflect,
    load_dictionaries,
)


class Inflection(NamedTuple):
    lemma: str
    form: str
    expected: str


INFLECTIONS = [
    Inflection("stop", "past", "stopped"),
    Inflection("stop", "ing", "stopping"),
    Inflection("study", "past", "studied"),
    Inflection("study", "thirdsing", "studies"),
    Inflection("play", "past", "played"),
    Inflection("love", "ing", "loving"),
    Inflection("see", "ing", "seeing"),
    Inflection("die", "ing", "dying"),
    Inflection("watch", "thirdsing", "watches"),
    Inflection("visit", "past", "visited"),
    Inflection("ship", "plur", "ships"),
]


@pytest.mark.parametrize("case", INFLECTIONS, ids=lambda c: f"{c.lemma}-{c.form}")
def test_inflect(case):
    assert inflect(case.lemma, case.form) == case.expected


def test_inflect_rejects_unknown_form():
    with pytest.raises(ValueError):
        inflect("go", "gerundive")


class Lookup(NamedTuple):
    surface: str
    pos: str
    lemma: str
    form: str


LOOKUPS = [
    Lookup("was", "auxiliary", "be", "past"),
    Lookup("was", "verb", "be", "past"),
    Lookup("shot", "verb", "shoot", "pastpart"),
    Lookup("robbed", "verb", "rob", "past"),
    Lookup("studied", "verb", "study", "past"),
    Lookup("visits", "verb", "visit", "thirdsing"),
    Lookup("building", "verb", "build", "ing"),
    Lookup("has", "auxiliary", "have", "thirdsing"),
]


@pytest.mark.parametrize("case", LOOKUPS, ids=lambda c: f"{c.surface}-{c.pos}")
def test_lookup_verb_forms(lexicon, case):
    found = {(a.pos, a.lemma, a.features.verb_form) for a in lexicon.lookup(case.surface)}
    assert (case.pos, case.lemma, case.form) in found


def test_lookup_is_case_insensitive(lexicon):
    assert lexicon.lookup("Ship") == lexicon.lookup("ship")


def test_plural_noun_keeps_semcode(lexicon):
    ships = [a for a in lexicon.lookup("ships") if a.pos == "noun"]
    assert ships and ships[0].lemma == "ship"
    assert ships[0].features.number == "plur"
    assert ships[0].kind == "machine"


def test_unknown_word_has_no_analyses(lexicon):
    assert lexicon.lookup("xylophonist") == []


def test_numeral_digits(lexicon):
    assert any(a.pos == "numeral" for a in lexicon.lookup("1984"))


def test_proper_nouns_do_not_pluralize(lexicon):
    assert not [a for a in lexicon.lookup("londons") if a.pos == "noun"]


def test_verb_senses_in_dictionary_order(lexicon):
    senses = lexicon.verb_senses("shoot")
    assert len(senses) >= 2
    assert [s.index for s in senses] == sorted(s.index for s in senses)
    assert len({s.label for s in senses}) == len(senses)


def test_particle_senses(lexicon):
    assert "off" in lexicon.particles("pay")
    assert all(s.particle == "off" for s in lexicon.verb_senses("pay", "off"))


def test_feature_set_parse():
    fs = FeatureSet.parse("sing,third,proper,field=stature")
    assert fs.number == "sing" and fs.person_feature == "third"
    assert fs.has("proper") and fs.value("field") == "stature"
    assert FeatureSet.parse("-") == FeatureSet()


def test_factor_constraint_accepts():
    c = FactorConstraint("dobj", frozenset({"person"}))
    assert c.accepts("person") and not c.accepts("machine")
    assert c.accepts(None)
    assert FactorConstraint("dobj", frozenset({"abstr"})).accepts("disease")
    assert FactorConstraint("subj", frozenset({"any"})).accepts("tim")
    assert str(FactorConstraint("prep", frozenset({"place"}), "to")) == "prep:to=place"


@pytest.mark.parametrize("kwargs", [
    dict(surface="Ship", pos="noun", lemma="ship", semcode=SemanticCode("machine")),
    dict(surface="ship", pos="nounish", lemma="ship", semcode=SemanticCode("machine")),
    dict(surface="ship", pos="noun", lemma="ship"),
    dict(surface="red", pos="adjective", lemma="red", semcode=SemanticCode("thing")),
    dict(surface="red", pos="adjective", lemma="red", features=FeatureSet(verb_form="past")),
])
def test_lex_entry_validation(kwargs):
    with pytest.raises(ValueError):
        LexEntry(**kwargs)


def test_semantic_code_domain():
    with pytest.raises(ValueError):
        SemanticCode("spaceship")


def _write_dicts(tmp_path, nouns="", verbs="", closed=""):
    (tmp_path / "nouns.dict").write_text(nouns)
    (tmp_path / "verbs.dict").write_text(verbs)
    (tmp_path / "closed.dict").write_text(closed)
    return tmp_path


def test_load_small_dictionary(tmp_path):
    d = _write_dicts(
        tmp_path,
        nouns="# comment\ncat\tnoun\tcat\tsing\tanimal\n",
        verbs="see\t-\tATTEND\taction\tsubj=person|animal;dobj=any\n",
        closed="the\tdeterminer\tthe\t-\n",
    )
    lex = load_dictionaries(d)
    assert [a.kind for a in lex.lookup("cats")] == ["animal"]
    assert {a.lemma for a in lex.lookup("saw")} == {"see"}
    (sense,) = lex.verb_senses("see")
    assert sense.constraint("subj").kinds == {"person", "animal"}


class BadDict(NamedTuple):
    file: str
    line: str
    message: str


BAD_DICTS = [
    BadDict("nouns.dict", "cat\tnoun\tcat\tsing", "expected 5 columns"),
    BadDict("nouns.dict", "cat\tnoun\tcat\tsing\tspaceship", "unknown semantic code"),
    BadDict("closed.dict", "cat\tnoun\tcat\t-", "nouns belong in nouns.dict"),
    BadDict("verbs.dict", "see\t-\tATTEND\tthought\tsubj=any", "unknown target kind"),
    BadDict("verbs.dict", "see\t-\tattend\taction\tsubj=any", "bad semantic type"),
    BadDict("verbs.dict", "see\t-\tATTEND\taction\tsubj=alien", "unknown kind"),
    BadDict("verbs.dict", "see\t-\tATTEND\taction\twho=any", "unknown valence slot"),
    BadDict("verbs.dict", "see\t-\tATTEND\taction\tsubj", "bad valence clause"),
]


@pytest.mark.parametrize("case", BAD_DICTS, ids=lambda c: c.message.replace(" ", "-"))
def test_malformed_dictionary_reports_line(tmp_path, case):
    d = _write_dicts(tmp_path)
    (d / case.file).write_text("# header\n" + case.line + "\n")
    with pytest.raises(LexiconError, match=case.message) as info:
        load_dictionaries(d)
    assert info.value.line_no == 2
    assert str(info.value).startswith(str(d / case.file))


def test_missing_directory(tmp_path):
    with pytest.raises(LexiconError, match="not found"):
        load_dictionaries(tmp_path / "absent")


def test_missing_one_file(tmp_path):
    (tmp_path / "nouns.dict").write_text("")
    with pytest.raises(LexiconError, match="missing dictionary file"):
        load_dictionaries(tmp_path)
