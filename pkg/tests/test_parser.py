import json
import os
from collections import Counter
from pathlib import Path
from typing import NamedTuple

import pytest

from storyqa.parser import (
    GRAMMAR,
    NONTERMINALS,
    NT,
    Leaf,
    ParseError,
    ParseNode,
    Parser,
    UnknownWordError,
    check_tree,
    split_sentences,
    tokenize,
)

HERE = Path(__file__).parent
CORPUS = HERE / "corpus" / "grammar_corpus.txt"
EXPECTED = HERE / "corpus" / "grammar_expected.json"
GOLDEN = HERE / "golden"


def corpus_sentences():
    lines = CORPUS.read_text(encoding="utf-8").splitlines()
    return [l.strip() for l in lines if l.strip() and not l.startswith("#")]


def parse(lexicon, text):
    (tokens,) = tokenize(text, lexicon)
    return tokens, Parser(lexicon).parse_declarative(tokens)


def test_grammar_table_covers_every_nonterminal():
    assert set(GRAMMAR) == set(NONTERMINALS)
    assert len(NONTERMINALS) == 30


def test_corpus_size():
    assert len(corpus_sentences()) >= 30


def test_corpus_nonterminal_multisets(lexicon):
    actual = {}
    for sentence in corpus_sentences():
        _, tree = parse(lexicon, sentence)
        actual[sentence] = dict(sorted(tree.labels().items()))
    if os.environ.get("UPDATE_GOLDEN"):
        EXPECTED.write_text(json.dumps(actual, indent=1) + "\n", encoding="utf-8")
    expected = json.loads(EXPECTED.read_text(encoding="utf-8"))
    assert actual == expected


def test_corpus_covers_all_nonterminals(lexicon):
    seen = Counter()
    for sentence in corpus_sentences():
        seen.update(parse(lexicon, sentence)[1].labels())
    assert set(NONTERMINALS) - set(seen) == set()


@pytest.mark.parametrize("sentence", corpus_sentences())
def test_corpus_tree_is_well_formed(lexicon, sentence):
    tokens, tree = parse(lexicon, sentence)
    assert check_tree(tree) == []
    # leaves are exactly the tokens, in order
    assert [leaf.token for leaf in tree.leaves()] == tokens


@pytest.mark.parametrize("name, sentence", [
    ("golden", "Mister Brown was a mate on a ship fifteen years ago."),
    ("three_objects", "The captain sent the sailor a letter from the ship."),
])
def test_tree_golden(lexicon, name, sentence):
    _, tree = parse(lexicon, sentence)
    path = GOLDEN / f"{name}.tree"
    if os.environ.get("UPDATE_GOLDEN"):
        path.write_text(tree.pretty() + "\n", encoding="utf-8")
    assert tree.pretty() + "\n" == path.read_text(encoding="utf-8")


class Shape(NamedTuple):
    sentence: str
    must_contain: tuple


SHAPES = [
    Shape("There is a book on the table.", (NT.THERE_IS,)),
    Shape("Here comes the captain.", (NT.THERE_HERE,)),
    Shape("Never had he seen such a storm.", (NT.ADVERB_FRONT,)),
    Shape("No sooner had he left than the ship sank.", (NT.ADVERB_FRONT,)),
    Shape("John went to London and Mary stayed in Paris.", (NT.COMPLEX,)),
    Shape("The sailor who saw the storm went to the captain.", (NT.ATTRIBUTIVE,)),
    Shape("The men building the house worked at the bank.", (NT.PARTICIPIAL,)),
    Shape("He has a wish to visit London.", (NT.INFINITIVE,)),
    Shape("The house has been sold.", (NT.COMPOUND_VERBAL,)),
]


@pytest.mark.parametrize("case", SHAPES, ids=lambda c: c.sentence)
def test_construction_recognized(lexicon, case):
    _, tree = parse(lexicon, case.sentence)
    labels = tree.labels()
    for label in case.must_contain:
        assert labels[label] >= 1, tree.pretty()


def test_hardly_when_is_an_adverbial_clause(lexicon):
    _, tree = parse(lexicon, "Hardly had he arrived when the storm began.")
    clause = tree.find_all(NT.ADVERBIAL_CLAUSE)
    assert clause and clause[0].children[0].text.lower() == "when"


def test_object_order_indirect_before_direct(lexicon):
    _, tree = parse(lexicon, "The doctor gave the patient a medicine.")
    (objects,) = tree.find_all(NT.OBJECTS)
    assert [c.label for c in objects.children] == [NT.INDIRECT, NT.DIRECT]
    assert objects.children[0].text == "the patient"


def test_parse_error_reports_prefix(lexicon):
    (tokens,) = tokenize("The captain the ship.", lexicon)
    with pytest.raises(ParseError) as info:
        Parser(lexicon).parse_declarative(tokens)
    assert info.value.prefix
    assert info.value.production


def test_unknown_words_listed(lexicon):
    (tokens,) = tokenize("The frobnicator glorped the ship.", lexicon)
    with pytest.raises(UnknownWordError) as info:
        Parser(lexicon).parse_declarative(tokens)
    assert info.value.words == ["frobnicator", "glorped"]


def test_alternative_parses_are_distinct(lexicon):
    (tokens,) = tokenize("The criminal robbed the bank with a gun.", lexicon)
    trees = list(Parser(lexicon).parses(tokens, limit=8))
    assert trees
    # trees differ in shape or in the lexical analysis chosen for some leaf
    assert len(set(trees)) == len(trees)
    assert len({t.pretty() for t in trees}) >= 2


def test_trace_callback(lexicon):
    lines = []
    (tokens,) = tokenize("John went to London.", lexicon)
    Parser(lexicon, trace=lines.append).parse_declarative(tokens)
    assert any("group_of_subject" in line for line in lines)


def test_noun_phrase_entry_point(lexicon):
    (tokens,) = tokenize("the captain of the ship sank", lexicon)
    node, used = Parser(lexicon).parse_noun_phrase(tokens)
    assert used == 5 and node.label == NT.NOUN_PHRASE


class Split(NamedTuple):
    text: str
    sentences: list


SPLITS = [
    Split("John went. Mary stayed!", [["John", "went"], ["Mary", "stayed"]]),
    Split("Mr. Brown left.", [["Mr.", "Brown", "left"]]),
    Split("Who was a mate?", [["Who", "was", "a", "mate"]]),
    Split("no terminator", [["no", "terminator"]]),
    Split("", []),
]


@pytest.mark.parametrize("case", SPLITS, ids=lambda c: c.text or "empty")
def test_split_sentences(case):
    got = [[t.text for t in tokens] for tokens, _ in split_sentences(case.text)]
    assert got == case.sentences


def test_terminators_and_commas():
    pairs = split_sentences("Fifteen years ago, he left? Yes.")
    assert [term for _, term in pairs] == ["?", "."]
    first = pairs[0][0]
    assert [t.comma_before for t in first] == [False, False, False, True, False]


def test_check_tree_flags_bad_shape(lexicon):
    _, tree = parse(lexicon, "John went to London.")
    broken = ParseNode(NT.NOUN_GROUP, [tree.leaves()[1]])
    assert check_tree(broken)
    assert check_tree(ParseNode("bogus", []))
    assert isinstance(tree.leaves()[0], Leaf)
