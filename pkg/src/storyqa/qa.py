"""Question answering over a story database and a frame knowledge base.

A question is turned back into declarative word order ("Who did Brown
shoot?" becomes "Brown did shoot who") and mapped into a scratch copy of the
story database, with wh-words as placeholder records.  The scratch clause
record is compiled into a query pattern: placeholders become wildcards,
records the question reused (a named person, a resolved pronoun) stay exact
codes, and freshly minted ones become nested patterns over their identifying
fields.  Answers come from one-step unification against the story, or from
frame lookup for "What does X do?" and "why" questions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .kb import FrameEntry, FrameNotFound, KnowledgeBase
from .lexicon import Lexicon
from .parser import NT, ParseError, ParseNode, Parser, Token, UnknownWordError, split_sentences
from .semdb import CLAUSE_KINDS, WILDCARD, QueryPattern, Record, SemanticDB
from .semmap import FactorSet, MappingError, SemanticMapper, map_first, map_tense

__all__ = [
    "QTYPES",
    "Question",
    "Answer",
    "QuestionError",
    "parse_question",
    "answer",
    "compile_pattern",
    "render",
]

QTYPES = ("who", "what_subject", "what_object", "where", "when", "yesno",
          "what_does_X_do", "why")
WH_WORDS = ("who", "whom", "what", "where", "when", "why")
ASKED_FIELDS = {
    "where": ("final_location", "start_location", "location"),
    "when": ("start_time", "time"),
}
IDENTIFYING = {
    "person": ("designation", "first_name", "last_name"),
    "machine": ("noun", "name"),
    "thing": ("noun", "name"),
    "animal": ("noun", "name"),
    "place": ("designation", "name"),
    "organization": ("designation", "name"),
    "project": ("designation", "name"),
    "abstr": ("designation", "noun"),
    "tim": ("designation", "unit", "year", "month", "day", "weekday", "hour",
            "minute", "season", "part_of_day"),
    "number": ("value_word",),
    "event": ("designation",),
    "cause": ("cause_word",),
}


class QuestionError(ValueError):
    """Not a question, or a question form the grammar does not cover."""


@dataclass
class Question:
    qtype: str
    text: str
    tokens: list
    declarative: list = field(default_factory=list)
    verb: str = ""
    tense: str = ""
    subject: str = ""
    complement: str = ""
    tree: Optional[ParseNode] = None


@dataclass
class Answer:
    status: str                  # found, no_fact, unknown_words
    text: str
    supporting_codes: tuple = ()


# -- question grammar ------------------------------------------------------------

def _is_aux(tok: Token) -> bool:
    return any(a.pos == "auxiliary" or (a.pos == "verb" and a.lemma == "be")
               for a in tok.analyses)


def _subject_splits(parser: Parser, tokens: list) -> list:
    """Possible subject lengths at the start of ``tokens``, longest first."""
    lengths = []
    try:
        for _, used in parser.noun_phrases(tokens):
            if used not in lengths:
                lengths.append(used)
    except ParseError:
        return []
    return lengths


def _candidates(tokens: list, parser: Parser) -> list:
    """``(qtype, declarative tokens)`` readings of a question, in preference order."""
    first = tokens[0].lower
    out = []
    if first in WH_WORDS:
        wh, rest = tokens[0], tokens[1:]
        if first in ("who", "what"):
            out.append(("who" if first == "who" else "what_subject", tokens))
        if rest and _is_aux(rest[0]):
            aux, after = rest[0], rest[1:]
            for n in _subject_splits(parser, after):
                base = [*after[:n], aux, *after[n:]]
                if first in ("who", "whom", "what"):
                    qtype = "who" if first in ("who", "whom") else "what_object"
                    out.append((qtype, [*base, wh]))
                else:
                    out.append((first, base))
        elif first in ("where", "when", "why") and rest:
            out.append((first, rest))
    elif _is_aux(tokens[0]):
        aux, after = tokens[0], tokens[1:]
        for n in _subject_splits(parser, after):
            out.append(("yesno", [*after[:n], aux, *after[n:]]))
    return out


_DOES_X_DO = re.compile(r"^what\s+(does|do|did)\s+(.+)\s+do$", re.IGNORECASE)


def parse_question(question: Union[str, Sequence[Token]], lexicon: Lexicon) -> Question:
    """Classify a question and recover its declarative word order."""
    if isinstance(question, str):
        sentences = split_sentences(question, lexicon)
        if len(sentences) != 1:
            raise QuestionError("expected exactly one question")
        tokens, terminator = sentences[0]
    else:
        tokens, terminator = list(question), "?"
    if not tokens:
        raise QuestionError("empty question")
    text = " ".join(t.text for t in tokens)
    unknown = [t.text for t in tokens if not t.analyses]
    if unknown:
        raise UnknownWordError(unknown)
    if terminator != "?" and tokens[0].lower not in WH_WORDS and not _is_aux(tokens[0]):
        raise QuestionError(f"not a question: {text!r}")
    m = _DOES_X_DO.match(" ".join(t.lower for t in tokens))
    if m:
        np_tokens = tokens[2:-1]
        return Question("what_does_X_do", text, tokens, subject=" ".join(
            t.text for t in np_tokens))
    parser = Parser(lexicon)
    last_error: Optional[Exception] = None
    for qtype, decl in _candidates(tokens, parser):
        try:
            tree = parser.parse_declarative(decl)
        except ParseError as exc:
            last_error = exc
            continue
        q = Question(qtype, text, tokens, decl, tree=tree)
        _fill_focus(q, lexicon)
        return q
    if last_error is None:
        raise QuestionError(f"unsupported question form: {text!r}")
    raise QuestionError(f"cannot parse question {text!r}: {last_error}")


def _fill_focus(q: Question, lexicon: Lexicon) -> None:
    mapper = SemanticMapper(SemanticDB(), lexicon)
    body = q.tree.children[0]
    if body.label != NT.SIMPLE:
        return
    parts = mapper._simple_parts(body)
    if parts.verb is None:
        return
    q.verb = parts.verb.lemma
    try:
        q.tense = map_tense([a.analysis for a in parts.aux], parts.verb.analysis)[0]
    except MappingError:
        q.tense = ""
    if parts.subject is not None:
        q.subject = parts.subject.text
    if parts.complement is not None:
        q.complement = parts.complement.text
    elif parts.dobj is not None:
        q.complement = parts.dobj.text


# -- pattern compilation -------------------------------------------------------

def _entity_pattern(rec: Record) -> QueryPattern:
    fields = IDENTIFYING.get(rec.kind, ())
    return QueryPattern(rec.kind, {f: rec[f] for f in fields if rec[f]})


def compile_pattern(scratch: SemanticDB, code: int, known: int,
                    placeholders: dict, asked: Optional[list] = None) -> QueryPattern:
    """Pattern for scratch record ``code``.

    Codes below ``known`` existed before the question was mapped and are
    matched exactly; placeholder codes become wildcards (their field names
    are appended to ``asked``).
    """
    rec = scratch[code]
    constraints: dict = {}
    if rec.kind in CLAUSE_KINDS and rec.kind != "event":
        constraints["verb"] = rec["verb"]
        constraints["negation"] = rec["negation"]
    elif rec.kind == "event":
        constraints["designation"] = rec["designation"]
    for name, ref in rec.references():
        if name == "linkage":
            continue
        if ref in placeholders:
            constraints[name] = WILDCARD
            if asked is not None:
                asked.append(name)
        elif ref < known:
            constraints[name] = ref
        elif scratch[ref].kind in CLAUSE_KINDS:
            constraints[name] = compile_pattern(scratch, ref, known, placeholders)
        else:
            constraints[name] = _entity_pattern(scratch[ref])
    return QueryPattern(rec.kind, constraints)


# -- rendering -------------------------------------------------------------------

def _article(word: str) -> str:
    return f"an {word}" if word[:1].lower() in "aeiou" else f"a {word}"


def render(item: Union[Record, FrameEntry, int], db: Optional[SemanticDB] = None) -> str:
    """Short English rendering of a record (or code) or frame entry."""
    if isinstance(item, FrameEntry):
        return item.render()
    rec = db[item] if isinstance(item, int) else item
    kind = rec.kind
    if kind == "person":
        names = [rec[f] for f in ("additional_data", "first_name", "last_name") if rec[f]]
        if names:
            return " ".join(names)
        noun = rec["designation"] or rec["profession"]
        return _article(noun) if noun else "someone"
    if kind in ("machine", "thing", "animal"):
        return rec["name"] or (_article(rec["noun"]) if rec["noun"] else "something")
    if kind in ("place", "organization", "project"):
        return rec["name"] or (_article(rec["designation"]) if rec["designation"] else kind)
    if kind == "tim":
        return _render_tim(rec, db)
    if kind == "abstr":
        return _article(rec["noun"] or rec["designation"])
    if kind == "event":
        return _article(rec["designation"]) if rec["designation"] else "an event"
    if kind in CLAUSE_KINDS:
        words = []
        if rec["subject"] and db is not None:
            words.append(render(rec["subject"], db))
        words.append(("not " if rec["negation"] else "") + rec["verb"])
        if rec["object_of_influence"] and db is not None:
            words.append(render(rec["object_of_influence"], db))
        return " ".join(words)
    if kind == "number":
        return rec["value_word"]
    return f"{kind} {rec.code}"


def _render_tim(rec: Record, db: Optional[SemanticDB]) -> str:
    words = [rec[f] for f in ("designation", "unit", "weekday", "part_of_day",
                              "season", "year", "month", "day") if rec[f]]
    if db is not None:
        numbers = [r for r in db.records("number") if r["referent"] == rec.code]
        causes = [r for r in db.records("cause") if r["time"] == rec.code]
        if numbers:
            words.insert(0, numbers[0]["value_word"])
        if causes:
            words.append(causes[0]["cause_word"])
    return " ".join(words) if words else "some time"


# -- answering -------------------------------------------------------------------

def answer(question_text: str, db: SemanticDB, kb: Optional[KnowledgeBase],
           lexicon: Lexicon) -> Answer:
    """Answer one question.  Raises :class:`QuestionError` for non-questions."""
    try:
        q = parse_question(question_text, lexicon)
    except UnknownWordError as exc:
        return Answer("unknown_words", str(exc))
    if q.qtype == "what_does_X_do":
        return _answer_functions(q, kb, lexicon)

    scratch = db.copy()
    known = scratch.next_code
    mapper = SemanticMapper(scratch, lexicon, question=True, linkage=False)
    try:
        map_first(Parser(lexicon), q.declarative, mapper)
    except (MappingError, ParseError) as exc:
        raise QuestionError(f"cannot analyse question {q.text!r}: {exc}") from None
    if not mapper.main_codes:
        raise QuestionError(f"no clause found in {q.text!r}")
    main = mapper.main_codes[0]
    asked: list = []
    pattern = compile_pattern(scratch, main, known, mapper.placeholders, asked)
    matches = db.query(pattern)

    if q.qtype == "yesno":
        if matches:
            return Answer("found", "yes", tuple(r.code for r in matches))
        return Answer("no_fact", "no fact")
    if q.qtype == "why":
        return _answer_why(q, scratch, main, matches, db, kb)
    fields = ASKED_FIELDS.get(q.qtype, tuple(asked))
    fillers, support = [], []
    for rec in matches:
        for name in fields:
            value = rec.get(name)
            if value:
                if value not in fillers:
                    fillers.append(value)
                support.append(rec.code)
                break
    if not fillers:
        return Answer("no_fact", "no fact")
    text = ", ".join(render(code, db) for code in fillers)
    return Answer("found", text, tuple(dict.fromkeys([*support, *fillers])))


def _answer_functions(q: Question, kb: Optional[KnowledgeBase], lexicon: Lexicon) -> Answer:
    if kb is None:
        return Answer("no_fact", "no fact")
    words = q.subject.split()
    nouns = [a.lemma for w in reversed(words) for a in lexicon.lookup(w) if a.pos == "noun"]
    for lemma in nouns[:1]:
        try:
            frame = kb.frame_lookup(lemma)
        except FrameNotFound:
            break
        entries = frame.functions
        if entries:
            codes = tuple(c for e in entries for c in e.parsed)
            return Answer("found", "\n".join(render(e) for e in entries), codes)
    return Answer("no_fact", "no fact")


def _record_kind(db: SemanticDB, code: int) -> Optional[str]:
    rec = db.get(code) if code else None
    return rec.kind if rec is not None else None


def _answer_why(q: Question, scratch: SemanticDB, main: int, matches: list,
                db: SemanticDB, kb: Optional[KnowledgeBase]) -> Answer:
    if kb is None:
        return Answer("no_fact", "no fact")
    rec = scratch[main]
    factors = FactorSet(subject_kind=_record_kind(scratch, rec["subject"]),
                        dobj_kind=_record_kind(scratch, rec["object_of_influence"]))
    try:
        frame = kb.frame_lookup(rec["verb"], factors)
    except FrameNotFound:
        return Answer("no_fact", "no fact")
    motives = frame.motives
    if not motives:
        return Answer("no_fact", "no fact")
    held = [m for m in motives if m.condition and any(
        _condition_holds(m.condition, action, db, kb.lexicon) for action in matches)]
    if held:
        codes = tuple(c for m in held for c in m.parsed) + tuple(r.code for r in matches)
        return Answer("found", "\n".join(m.source.strip() for m in held), codes)
    codes = tuple(c for m in motives for c in m.parsed)
    return Answer("found", "\n".join(f"possibly {m.source.strip()}" for m in motives), codes)


_ROLE_WORDS = {"the subject": "subject", "subject": "subject",
               "this person": "object_of_influence", "the person": "object_of_influence"}
_IS_CONDITION = re.compile(r"^(?P<a>.+?) is (?:an? |the )?(?P<noun>\w+)(?: of (?P<b>.+))?$")
_VERB_CONDITION = re.compile(r"^(?P<a>this person|the person|the subject|subject) "
                             r"(?P<verb>\w+) (?P<b>.+)$")


def _condition_holds(condition: str, action: Record, db: SemanticDB, lexicon: Lexicon) -> bool:
    """Check a motive condition ("the subject is criminal") against the story."""
    text = " ".join(condition.lower().split())

    def role(phrase: str) -> int:
        name = _ROLE_WORDS.get(phrase.strip())
        return action.get(name, 0) if name else 0

    m = _IS_CONDITION.match(text)
    if m:
        who = db.get(role(m.group("a")))
        if who is None or who.kind != "person":
            return False
        return m.group("noun") in (who["designation"], who["profession"])
    m = _VERB_CONDITION.match(text)
    if m:
        subject, obj = role(m.group("a")), role(m.group("b"))
        lemmas = {a.lemma for a in lexicon.lookup(m.group("verb")) if a.pos == "verb"}
        return any(r.get("verb") in lemmas and r.get("subject") == subject
                   and r.get("object_of_influence") == obj
                   for kind in CLAUSE_KINDS if kind != "event" for r in db.records(kind))
    return False
