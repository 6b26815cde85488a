"""Parse English stories into a typed fact database and answer questions about them."""

from .kb import Frame, FrameEntry, KnowledgeBase
from .lexicon import Lexicon, load_dictionaries, seed_lexicon
from .parser import ParseNode, Parser, tokenize
from .qa import Answer, Question, answer, parse_question, render
from .semdb import QueryPattern, Record, SemanticDB, WILDCARD, alpha_equivalent, dump, load
from .semmap import SemanticMapper, analyze_sentence, ingest_text

__all__ = [
    "Answer", "Frame", "FrameEntry", "KnowledgeBase", "Lexicon", "ParseNode", "Parser",
    "QueryPattern", "Question", "Record", "SemanticDB", "SemanticMapper", "WILDCARD",
    "alpha_equivalent", "analyze_sentence", "answer", "dump", "ingest_text", "load",
    "load_dictionaries", "parse_question", "render", "seed_lexicon", "tokenize",
]
