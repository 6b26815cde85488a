import pytest

from storyqa.kb import KnowledgeBase, default_kb_path
from storyqa.lexicon import seed_lexicon
from storyqa.semdb import SemanticDB
from storyqa.semmap import ingest_text

GOLDEN_SENTENCE = "Mister Brown was a mate on a ship fifteen years ago."


@pytest.fixture(scope="session")
def lexicon():
    return seed_lexicon()


@pytest.fixture
def golden_db(lexicon):
    db = SemanticDB()
    report = ingest_text(GOLDEN_SENTENCE, db, lexicon)
    assert not report.failures
    return db


@pytest.fixture(scope="session")
def kb(lexicon):
    base = KnowledgeBase(lexicon)
    base.load_file(default_kb_path())
    return base
