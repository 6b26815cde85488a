"""Tokenizer and recursive-descent parser for English declarative sentences.

The grammar has one method per nonterminal.  Every method is a generator of
``(node, end)`` alternatives in preference order, so callers backtrack simply
by pulling the next alternative.  Preferences:

* complex sentences before simple ones;
* compound verbal, then compound nominal, then simple predicates;
* preposition chains inside a noun phrase are greedy (longest first), except
  that a preposition declared by the governing verb's valence is left for a
  prepositional object;
* lexical ambiguity is explored in dictionary order.
"""

from __future__ import annotations

import functools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from .lexicon import LexEntry, Lexicon

__all__ = [
    "NT",
    "NONTERMINALS",
    "GRAMMAR",
    "Token",
    "Leaf",
    "ParseNode",
    "ParseError",
    "UnknownWordError",
    "Parser",
    "tokenize",
    "split_sentences",
    "check_tree",
]


class NT:
    DECLARATIVE = "declarative_sentence"
    COMPLEX = "complex_declarative_sentence"
    SIMPLE = "simple_declarative_sentence"
    REVERSE = "reverse_order_sentence"
    THERE_IS = "there_is_construction"
    THERE_HERE = "there_here_construction"
    ADVERB_FRONT = "adverb_initial_construction"
    SUBJECT_GROUP = "group_of_subject"
    NOUN_PHRASE = "basic_noun_phrase"
    NOUN_GROUP = "noun_group"
    DETERMINATIVE = "determinative_construction"
    PARTICIPIAL = "participial_phrase"
    ATTRIBUTIVE = "attributive_clause"
    INFINITIVE = "infinitive_phrase"
    PREDICATE_GROUP = "group_of_predicate"
    PREDICATE = "predicate"
    SIMPLE_PREDICATE = "simple_predicate"
    COMPOUND_VERBAL = "compound_verbal_predicate"
    COMPOUND_NOMINAL = "compound_name_predicate"
    CONTROLLED = "construction_controlled_by_predicate"
    OBJECTS = "group_of_objects"
    INDIRECT = "indirect_object"
    DIRECT = "direct_object"
    PREPOSITIONAL = "prepositional_object"
    ADVERBIALS = "group_of_adverbial_modifiers"
    ADVERBIAL = "adverbial_modifier"
    SIMPLE_ADVERBIAL = "simple_adverbial_modifier"
    ADVERBIAL_CLAUSE = "adverbial_clause"
    OBJECT_CLAUSE = "object_clause"
    SUBJECT_CLAUSE = "subject_clause"


NONTERMINALS = tuple(v for k, v in vars(NT).items() if k.isupper())

_NP = "basic_noun_phrase( determinative_construction)?"
_PARTICLE = "( (preposition|adverb))?"

# Right-hand sides as regular expressions over the space-joined child labels.
# Leaves are labelled with their part of speech.
GRAMMAR = {
    NT.DECLARATIVE: r"complex_declarative_sentence|simple_declarative_sentence",
    NT.COMPLEX: r"simple_declarative_sentence( conjunction)? simple_declarative_sentence",
    NT.SIMPLE: r"(adverbial_modifier )?group_of_subject group_of_predicate|reverse_order_sentence",
    NT.REVERSE: r"there_is_construction|there_here_construction|adverb_initial_construction",
    NT.THERE_IS: r"adverb (verb|auxiliary) group_of_subject group_of_adverbial_modifiers",
    NT.THERE_HERE: r"adverb verb group_of_subject( group_of_adverbial_modifiers)?",
    NT.ADVERB_FRONT: (r"(adverb|pronoun|determiner adverb|adverb adverb) predicate group_of_subject"
                      r"( group_of_predicate| construction_controlled_by_predicate)?"),
    NT.SUBJECT_GROUP: rf"{_NP}|subject_clause",
    NT.NOUN_PHRASE: r"noun_group( preposition noun_group)*",
    NT.NOUN_GROUP: r"pronoun|(determiner ){0,2}(numeral )*(adjective )*noun( noun)*",
    NT.DETERMINATIVE: r"participial_phrase|attributive_clause|infinitive_phrase",
    NT.PARTICIPIAL: rf"verb{_PARTICLE}( construction_controlled_by_predicate)?",
    NT.ATTRIBUTIVE: r"pronoun (group_of_subject )?group_of_predicate",
    NT.INFINITIVE: rf"preposition verb{_PARTICLE}( construction_controlled_by_predicate)?",
    NT.PREDICATE_GROUP: r"predicate( construction_controlled_by_predicate)?",
    NT.PREDICATE: r"simple_predicate|compound_verbal_predicate|compound_name_predicate",
    NT.SIMPLE_PREDICATE: rf"(verb|auxiliary){_PARTICLE}",
    NT.COMPOUND_VERBAL: rf"auxiliary( adverb)?( auxiliary)* verb{_PARTICLE}",
    NT.COMPOUND_NOMINAL: (r"(auxiliary )?(adverb )?(auxiliary )*verb( adverb)?"
                          r" (basic_noun_phrase|adjective( adjective)*)"),
    NT.CONTROLLED: r"group_of_objects( group_of_adverbial_modifiers)?|group_of_adverbial_modifiers",
    NT.OBJECTS: (r"indirect_object direct_object( prepositional_object)?"
                 r"|direct_object( prepositional_object)?|prepositional_object"),
    NT.INDIRECT: _NP,
    NT.DIRECT: rf"{_NP}|infinitive_phrase|object_clause",
    NT.PREPOSITIONAL: rf"preposition {_NP}",
    NT.ADVERBIALS: r"adverbial_modifier( group_of_adverbial_modifiers)?",
    NT.ADVERBIAL: (r"simple_adverbial_modifier|adverbial_clause|participial_phrase"
                   r"|infinitive_phrase"),
    NT.SIMPLE_ADVERBIAL: rf"adverb|(conjunction )?preposition {_NP}|basic_noun_phrase adverb",
    NT.ADVERBIAL_CLAUSE: r"conjunction simple_declarative_sentence",
    NT.OBJECT_CLAUSE: r"(conjunction|pronoun) simple_declarative_sentence",
    NT.SUBJECT_CLAUSE: r"(conjunction|pronoun) simple_declarative_sentence",
}
_GRAMMAR_RE = {label: re.compile(rf"(?:{rhs})\Z") for label, rhs in GRAMMAR.items()}

ABBREVIATIONS = ("mr", "mrs", "dr")
ADVERBIAL_INTRODUCERS = ("when", "while", "because", "if", "after", "before", "as",
                         "than", "until", "since")
CLAUSE_INTRODUCERS = ("that", "whether", "if", "what", "who")
EXISTENCE_VERBS = ("be", "exist", "stand", "lie", "come")
RELATIVE_PRONOUNS = ("who", "which", "that")
# noun kinds that take an infinitive phrase as determinative ("a wish to go")
INFINITIVE_HEADS = ("abstr", "project")
ANIMATE_KINDS = ("person", "animal", "organization")
TWO_WORD_TRIGGERS = (("no", "sooner"), ("not", "only"))


@dataclass(frozen=True)
class Token:
    text: str
    span: tuple
    analyses: tuple = ()
    comma_before: bool = False

    @property
    def lower(self) -> str:
        return self.text.lower().rstrip(".")


@dataclass(frozen=True)
class Leaf:
    token: Token
    analysis: LexEntry

    @property
    def label(self) -> str:
        return self.analysis.pos

    @property
    def chosen_analysis(self) -> LexEntry:
        return self.analysis

    @property
    def lemma(self) -> str:
        return self.analysis.lemma

    @property
    def text(self) -> str:
        return self.token.text

    def leaves(self) -> list:
        return [self]

    def __repr__(self):
        return f"{self.analysis.pos}:{self.token.text}"


@dataclass(frozen=True)
class ParseNode:
    label: str
    children: tuple = ()

    def leaves(self) -> list:
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    @property
    def tokens(self) -> list:
        return [leaf.token for leaf in self.leaves()]

    @property
    def text(self) -> str:
        return " ".join(leaf.token.text for leaf in self.leaves())

    def child(self, label: str) -> Optional["ParseNode"]:
        for c in self.children:
            if c.label == label:
                return c
        return None

    def nodes(self) -> Iterator["ParseNode"]:
        yield self
        for c in self.children:
            if isinstance(c, ParseNode):
                yield from c.nodes()

    def find_all(self, label: str) -> list:
        return [n for n in self.nodes() if n.label == label]

    def labels(self) -> Counter:
        """Multiset of nonterminal labels in the tree."""
        return Counter(n.label for n in self.nodes())

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}{self.label}"]
        for c in self.children:
            if isinstance(c, ParseNode):
                lines.append(c.pretty(indent + 1))
            else:
                lines.append(f"{pad}  {c!r}")
        return "\n".join(lines)

    def __repr__(self):
        return f"ParseNode({self.label}: {self.text!r})"


class ParseError(Exception):
    """No parse; carries the longest parsed prefix and the failing production."""

    def __init__(self, message: str, prefix: Sequence[Token] = (),
                 production: str = ""):
        super().__init__(message)
        self.prefix = list(prefix)
        self.production = production


class UnknownWordError(ParseError):
    def __init__(self, words: Sequence[str]):
        super().__init__(f"unknown word(s): {', '.join(words)}")
        self.words = list(words)


def check_tree(node) -> list:
    """Return a list of well-formedness violations (empty when valid)."""
    problems = []
    if isinstance(node, Leaf):
        return problems
    if node.label not in _GRAMMAR_RE:
        return [f"unknown label {node.label!r}"]
    seq = " ".join(c.label for c in node.children)
    if not _GRAMMAR_RE[node.label].match(seq):
        problems.append(f"{node.label} -> {seq!r} matches no production")
    for c in node.children:
        problems.extend(check_tree(c))
    return problems


# -- tokenizer ---------------------------------------------------------------

_WORD = re.compile(r"[A-Za-z0-9]+(?:['\-][A-Za-z0-9]+)*\.?|[.?!,;:]|\S")


def split_sentences(text: str, lexicon: Optional[Lexicon] = None) -> list:
    """Split text into ``(tokens, terminator)`` pairs; terminator may be ''."""
    sentences = []
    current: list = []
    comma = False
    for m in _WORD.finditer(text):
        raw = m.group(0)
        start, end = m.span()
        if raw[0].isalnum():
            word = raw
            stop = False
            if raw.endswith("."):
                if raw[:-1].lower() in ABBREVIATIONS:
                    word = raw
                else:
                    word, end, stop = raw[:-1], end - 1, True
            analyses = tuple(lexicon.lookup(word.rstrip("."))) if lexicon else ()
            current.append(Token(word, (start, end), analyses, comma))
            comma = False
            if stop:
                sentences.append((current, "."))
                current = []
        elif raw in ".?!":
            if current:
                sentences.append((current, raw))
            current = []
            comma = False
        elif raw in ",;:":
            comma = bool(current)
    if current:
        sentences.append((current, ""))
    return sentences


def tokenize(text: str, lexicon: Optional[Lexicon] = None) -> list:
    """Split text into sentences, each a list of :class:`Token`."""
    return [tokens for tokens, _ in split_sentences(text, lexicon)]


# -- parser ------------------------------------------------------------------

def production(name: str):
    """Wrap a generator production with tracing and failure bookkeeping."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(self, i, *args, **kwargs):
            self._emit(f"enter {name} @{i}")
            gen = fn(self, i, *args, **kwargs)
            while True:
                self._stack.append(name)
                try:
                    result = next(gen)
                except StopIteration:
                    self._stack.pop()
                    self._emit(f"leave {name} @{i}")
                    return
                self._stack.pop()
                self._emit(f"match {name} @{i}..{result[1]}")
                yield result
        return wrapper
    return deco


def _finite(entry: LexEntry) -> bool:
    if entry.lemma == "be":
        return entry.surface not in ("be", "been", "being")
    return entry.features.verb_form in ("past", "thirdsing", "base")


def _nonfinite(entry: LexEntry) -> bool:
    if entry.lemma == "be":
        return entry.surface in ("be", "been", "being")
    return entry.features.verb_form in ("base", "pastpart", "ing")


def _required_forms(aux: LexEntry) -> tuple:
    """Forms allowed for the verb following auxiliary ``aux``."""
    if aux.has("modal") or aux.lemma == "do":
        return ("base",)
    if aux.lemma == "have":
        return ("pastpart",)
    if aux.lemma == "be":
        return ("ing", "pastpart")
    return ()


def _form_ok(entry: LexEntry, forms: tuple) -> bool:
    if entry.lemma == "be":
        wanted = {"base": "be", "pastpart": "been", "ing": "being"}
        return entry.surface in {wanted[f] for f in forms}
    return entry.features.verb_form in forms


class Parser:
    """Recursive-descent parser over one token list.

    ``trace`` receives one line per production enter/match/leave event.
    """

    def __init__(self, lexicon: Lexicon, trace: Optional[Callable[[str], None]] = None):
        self.lexicon = lexicon
        self.trace = trace
        self.toks: list = []
        self._stack: list = []
        self._farthest = (-1, "")

    # -- plumbing --------------------------------------------------------

    def _emit(self, event: str) -> None:
        if self.trace is not None:
            self.trace(f"{'  ' * len(self._stack)}{event}")

    def _reset(self, tokens: Sequence[Token]) -> None:
        unknown = [t.text for t in tokens if not t.analyses]
        if unknown:
            raise UnknownWordError(unknown)
        self.toks = list(tokens)
        self._stack = []
        self._farthest = (-1, "")

    def _note(self, i: int) -> None:
        if i > self._farthest[0]:
            self._farthest = (i, self._stack[-1] if self._stack else "")

    def _leaf(self, i: int, pred: Callable[[LexEntry], bool],
              allow_comma: bool = True) -> Iterator[tuple]:
        if i >= len(self.toks):
            self._note(i)
            return
        tok = self.toks[i]
        if tok.comma_before and not allow_comma:
            self._note(i)
            return
        matched = False
        for a in tok.analyses:
            if pred(a):
                matched = True
                yield Leaf(tok, a), i + 1
        if not matched:
            self._note(i)

    def _word(self, i: int, *words: str) -> bool:
        return i < len(self.toks) and self.toks[i].lower in words

    def _sub(self, tokens: Sequence[Token]) -> "Parser":
        sub = Parser(self.lexicon, self.trace)
        sub.toks = list(tokens)
        sub._stack = list(self._stack)
        return sub

    def _fail(self, what: str) -> ParseError:
        pos, prod = self._farthest
        prefix = self.toks[:max(pos, 0)]
        at = self.toks[pos].text if 0 <= pos < len(self.toks) else "end of sentence"
        return ParseError(f"no parse for {what}: stuck at {at!r} in {prod or 'start'}",
                          prefix, prod)

    # -- public entry points ---------------------------------------------

    def parse_declarative(self, tokens: Sequence[Token]) -> ParseNode:
        if not tokens:
            raise ParseError("empty sentence")
        self._reset(tokens)
        for node, end in self.declarative(0):
            if end == len(self.toks):
                return node
        raise self._fail("declarative sentence")

    def parses(self, tokens: Sequence[Token], what: str = "declarative",
               limit: int = 16) -> Iterator[ParseNode]:
        """Yield up to ``limit`` complete parses in preference order.

        ``what`` is ``"declarative"`` or ``"infinitive"``.  Raises
        :class:`ParseError` when there is none.
        """
        if not tokens:
            raise ParseError("empty sentence")
        self._reset(tokens)
        prod = self.declarative if what == "declarative" else self.infinitive
        found = 0
        for node, end in prod(0):
            if end == len(self.toks):
                found += 1
                yield node
                if found >= limit:
                    return
        if not found:
            raise self._fail(f"{what} {'sentence' if what == 'declarative' else 'phrase'}")

    def parse_infinitive(self, tokens: Sequence[Token]) -> ParseNode:
        """Parse a whole token list as an infinitive phrase ("to go to London")."""
        self._reset(tokens)
        for node, end in self.infinitive(0):
            if end == len(self.toks):
                return node
        raise self._fail("infinitive phrase")

    def parse_noun_phrase(self, tokens: Sequence[Token], start: int = 0) -> tuple:
        self._reset(tokens)
        for np, j in self.basic_noun_phrase(start):
            for det, k in self.determinative(j, np):
                return ParseNode(NT.SUBJECT_GROUP, (np, det)), k - start
            return np, j - start
        raise self._fail("noun phrase")

    def parse_predicate_group(self, tokens: Sequence[Token], start: int = 0) -> tuple:
        self._reset(tokens)
        for node, j in self.predicate_group(start):
            return node, j - start
        raise self._fail("predicate group")

    def noun_phrases(self, tokens: Sequence[Token], start: int = 0) -> Iterator[tuple]:
        """All basic noun phrase alternatives at ``start`` (longest first)."""
        self._reset(tokens)
        for np, j in self.basic_noun_phrase(start):
            yield np, j - start

    # -- sentences -------------------------------------------------------

    @production(NT.DECLARATIVE)
    def declarative(self, i):
        n = len(self.toks)
        for node, end in self.complex(i):
            if end == n:
                yield ParseNode(NT.DECLARATIVE, (node,)), end
        for node, end in self.simple(i):
            if end == n:
                yield ParseNode(NT.DECLARATIVE, (node,)), end

    @production(NT.COMPLEX)
    def complex(self, i):
        toks = self.toks
        for k in range(i + 1, len(toks)):
            tok = toks[k]
            coord = [a for a in tok.analyses
                     if a.pos == "conjunction" and a.has("coordinating")]
            if coord and k + 1 < len(toks):
                left = self._sub(toks[i:k])
                right = self._sub(toks[k + 1:])
                for lnode in left._full(left.simple):
                    for rnode in right._full(right.simple):
                        conj = Leaf(tok, coord[0])
                        yield ParseNode(NT.COMPLEX, (lnode, conj, rnode)), len(toks)
                        return
            elif tok.comma_before:
                left = self._sub(toks[i:k])
                right = self._sub(toks[k:])
                for lnode in left._full(left.simple):
                    for rnode in right._full(right.simple):
                        yield ParseNode(NT.COMPLEX, (lnode, rnode)), len(toks)
                        return

    def _full(self, prod) -> Iterator[ParseNode]:
        if not self.toks:
            return
        for node, end in prod(0):
            if end == len(self.toks):
                yield node

    @production(NT.SIMPLE)
    def simple(self, i):
        for rev, j in self.reverse(i):
            yield ParseNode(NT.SIMPLE, (rev,)), j
        for adv, j in self.adverbial_modifier(i, initial=True):
            for subj, k in self.subject_group(j):
                for pred, m in self.predicate_group(k):
                    yield ParseNode(NT.SIMPLE, (adv, subj, pred)), m
        for subj, k in self.subject_group(i):
            for pred, m in self.predicate_group(k):
                yield ParseNode(NT.SIMPLE, (subj, pred)), m

    @production(NT.REVERSE)
    def reverse(self, i):
        for node, j in self.there_is(i):
            yield ParseNode(NT.REVERSE, (node,)), j
        for node, j in self.there_here(i):
            yield ParseNode(NT.REVERSE, (node,)), j
        for node, j in self.adverb_front(i):
            yield ParseNode(NT.REVERSE, (node,)), j

    @production(NT.THERE_IS)
    def there_is(self, i):
        if not self._word(i, "there"):
            return
        for there, j in self._leaf(i, lambda a: a.pos == "adverb"):
            for be, k in self._leaf(j, lambda a: a.lemma == "be" and _finite(a)
                                    and a.pos == "verb"):
                for subj, m in self.subject_group(k):
                    for advs, n in self.adverbials(m):
                        yield ParseNode(NT.THERE_IS, (there, be, subj, advs)), n

    @production(NT.THERE_HERE)
    def there_here(self, i):
        if not self._word(i, "there", "here"):
            return
        for adv, j in self._leaf(i, lambda a: a.pos == "adverb"):
            for verb, k in self._leaf(j, lambda a: a.pos == "verb" and _finite(a)
                                      and a.lemma in EXISTENCE_VERBS):
                for subj, m in self.subject_group(k):
                    for advs, n in self.adverbials(m):
                        yield ParseNode(NT.THERE_HERE, (adv, verb, subj, advs)), n
                    yield ParseNode(NT.THERE_HERE, (adv, verb, subj)), m

    def _inversion_trigger(self, i) -> Iterator[tuple]:
        for pair in TWO_WORD_TRIGGERS:
            if self._word(i, pair[0]) and self._word(i + 1, pair[1]):
                first = [a for a in self.toks[i].analyses if a.pos in ("determiner", "adverb")]
                second = [a for a in self.toks[i + 1].analyses if a.pos == "adverb"]
                if first and second:
                    yield [Leaf(self.toks[i], first[0]), Leaf(self.toks[i + 1], second[0])], i + 2
        for leaf, j in self._leaf(i, lambda a: a.has("inversion")):
            yield [leaf], j

    @production(NT.ADVERB_FRONT)
    def adverb_front(self, i):
        for trigger, j in self._inversion_trigger(i):
            for verb, k in self._leaf(j, lambda a: a.pos in ("auxiliary", "verb") and _finite(a)):
                pred = ParseNode(NT.PREDICATE, (ParseNode(NT.SIMPLE_PREDICATE, (verb,)),))
                for subj, m in self.subject_group(k):
                    if verb.label == "auxiliary":
                        for rest, n in self.predicate_group(m, finite=False,
                                                            after=verb.analysis):
                            yield ParseNode(NT.ADVERB_FRONT, (*trigger, pred, subj, rest)), n
                    else:
                        for cc, n in self.controlled(m, verb.lemma):
                            yield ParseNode(NT.ADVERB_FRONT, (*trigger, pred, subj, cc)), n
                    yield ParseNode(NT.ADVERB_FRONT, (*trigger, pred, subj)), m

    # -- subject and noun phrases ----------------------------------------

    @production(NT.SUBJECT_GROUP)
    def subject_group(self, i):
        for np, j in self.basic_noun_phrase(i):
            for det, k in self.determinative(j, np):
                yield ParseNode(NT.SUBJECT_GROUP, (np, det)), k
            yield ParseNode(NT.SUBJECT_GROUP, (np,)), j
        for clause, j in self.clause(i, NT.SUBJECT_CLAUSE, ("that", "whether", "what")):
            yield ParseNode(NT.SUBJECT_GROUP, (clause,)), j

    @production(NT.NOUN_PHRASE)
    def basic_noun_phrase(self, i, stop: frozenset = frozenset()):
        for group, j in self.noun_group(i):
            for chain, k in self._np_chain(j, stop):
                yield ParseNode(NT.NOUN_PHRASE, (group, *chain)), k

    def _np_chain(self, j, stop):
        if j < len(self.toks) and not self.toks[j].comma_before:
            for prep, k in self._leaf(j, lambda a: a.pos == "preposition"
                                      and a.lemma not in stop):
                for group, m in self.noun_group(k):
                    for rest, n in self._np_chain(m, stop):
                        yield [prep, group, *rest], n
        yield [], j

    @production(NT.NOUN_GROUP)
    def noun_group(self, i):
        for pron, j in self._leaf(i, lambda a: a.pos == "pronoun"
                                  and not (a.has("relative") and not a.has("wh"))):
            yield ParseNode(NT.NOUN_GROUP, (pron,)), j
        for dets, j in self._determiners(i):
            for nums, k in self._repeat(j, lambda a: a.pos == "numeral", start=i):
                for adjs, m in self._repeat(k, lambda a: a.pos == "adjective", start=i):
                    for nouns, n in self._repeat(m, lambda a: a.pos == "noun", 1, start=i):
                        yield ParseNode(NT.NOUN_GROUP, (*dets, *nums, *adjs, *nouns)), n

    def _determiners(self, i):
        for pre, j in self._leaf(i, lambda a: a.pos == "determiner" and a.has("predeterminer")):
            for det, k in self._leaf(j, lambda a: a.pos == "determiner"
                                     and a.lemma in ("a", "an", "the"), allow_comma=False):
                yield [pre, det], k
        for det, j in self._leaf(i, lambda a: a.pos == "determiner"):
            yield [det], j
        yield [], i

    def _repeat(self, i, pred, minimum: int = 0, start: int = -1):
        """Greedy repetition of one terminal class, longest alternative first.

        Only the token at ``start`` may be preceded by a comma.
        """
        for leaf, j in self._leaf(i, pred, allow_comma=i == start):
            for rest, k in self._repeat(j, pred, max(minimum - 1, 0), start):
                yield [leaf, *rest], k
        if minimum == 0:
            yield [], i

    @production(NT.DETERMINATIVE)
    def determinative(self, i, np):
        head = head_noun(np)
        if (i >= len(self.toks) or self.toks[i].comma_before
                or head is None or head.label != "noun"):
            return
        head_kind = head.analysis.kind
        for node, j in self.attributive(i):
            yield ParseNode(NT.DETERMINATIVE, (node,)), j
        for node, j in self.participial(i):
            yield ParseNode(NT.DETERMINATIVE, (node,)), j
        if head_kind in INFINITIVE_HEADS:
            for node, j in self.infinitive(i):
                yield ParseNode(NT.DETERMINATIVE, (node,)), j

    @production(NT.ATTRIBUTIVE)
    def attributive(self, i):
        for rel, j in self._leaf(i, lambda a: a.pos == "pronoun"
                                 and a.lemma in RELATIVE_PRONOUNS):
            if rel.lemma == "who":
                for pred, k in self.predicate_group(j):
                    yield ParseNode(NT.ATTRIBUTIVE, (rel, pred)), k
            for subj, k in self.subject_group(j):
                for pred, m in self.predicate_group(k):
                    yield ParseNode(NT.ATTRIBUTIVE, (rel, subj, pred)), m
            if rel.lemma != "who":
                for pred, k in self.predicate_group(j):
                    yield ParseNode(NT.ATTRIBUTIVE, (rel, pred)), k

    @production(NT.PARTICIPIAL)
    def participial(self, i):
        for verb, j in self._leaf(i, lambda a: a.pos == "verb"
                                  and a.features.verb_form in ("ing", "pastpart")):
            # "had", "been" only ever continue an auxiliary chain
            if verb.analysis.features.verb_form == "pastpart" and verb.lemma in ("be", "have"):
                continue
            for part, k in self._particle(j, verb.lemma):
                for cc, m in self.controlled(k, verb.lemma):
                    yield ParseNode(NT.PARTICIPIAL, (verb, *part, cc)), m
                yield ParseNode(NT.PARTICIPIAL, (verb, *part)), k

    @production(NT.INFINITIVE)
    def infinitive(self, i):
        if not self._word(i, "to"):
            return
        for to, j in self._leaf(i, lambda a: a.pos == "preposition"):
            for verb, k in self._leaf(j, lambda a: a.pos == "verb"
                                      and a.features.verb_form == "base"):
                for part, m in self._particle(k, verb.lemma):
                    for cc, n in self.controlled(m, verb.lemma):
                        yield ParseNode(NT.INFINITIVE, (to, verb, *part, cc)), n
                    yield ParseNode(NT.INFINITIVE, (to, verb, *part)), m

    def _particle(self, i, lemma):
        particles = self.lexicon.particles(lemma)
        if particles and i < len(self.toks) and self.toks[i].lower in particles:
            for leaf, j in self._leaf(i, lambda a: a.pos in ("preposition", "adverb"),
                                      allow_comma=False):
                yield [leaf], j
                break
        yield [], i

    # -- predicate -------------------------------------------------------

    @production(NT.PREDICATE_GROUP)
    def predicate_group(self, i, finite: bool = True, after: Optional[LexEntry] = None):
        for pred, j, lemma in self.predicate(i, finite, after):
            for cc, k in self.controlled(j, lemma):
                yield ParseNode(NT.PREDICATE_GROUP, (pred, cc)), k
            yield ParseNode(NT.PREDICATE_GROUP, (pred,)), j

    def predicate(self, i, finite=True, after=None):
        """Yield ``(predicate node, end, main verb lemma)``."""
        self._stack.append(NT.PREDICATE)
        try:
            for node, j, lemma in self._compound_verbal(i, finite, after):
                yield ParseNode(NT.PREDICATE, (node,)), j, lemma
            for node, j, lemma in self._compound_nominal(i, finite, after):
                yield ParseNode(NT.PREDICATE, (node,)), j, lemma
            for node, j, lemma in self._simple_predicate(i, finite, after):
                yield ParseNode(NT.PREDICATE, (node,)), j, lemma
        finally:
            self._stack.pop()

    def _verb_ok(self, a: LexEntry, finite: bool, after: Optional[LexEntry]) -> bool:
        if after is not None:
            return _form_ok(a, _required_forms(after))
        return _finite(a) if finite else _nonfinite(a)

    def _aux_chain(self, i, finite, after):
        """Auxiliaries (with an optional ``not`` after the first).

        Yields ``(leaves, end, last auxiliary)`` for chains of length >= 1,
        longest first.
        """
        for aux, j in self._leaf(i, lambda a: a.pos == "auxiliary"
                                 and self._verb_ok(a, finite, after)):
            negs = list(self._leaf(j, lambda a: a.has("negation")))
            starts = [([neg], k) for neg, k in negs] + [([], j)]
            for neg, k in starts:
                for rest, m, last in self._aux_tail(k, aux.analysis):
                    yield [aux, *neg, *rest], m, last
                yield [aux, *neg], k, aux.analysis

    def _aux_tail(self, i, prev):
        forms = _required_forms(prev)
        for aux, j in self._leaf(i, lambda a: a.pos == "auxiliary" and _form_ok(a, forms)):
            for rest, k, last in self._aux_tail(j, aux.analysis):
                yield [aux, *rest], k, last
            yield [aux], j, aux.analysis

    def _compound_verbal(self, i, finite, after):
        self._stack.append(NT.COMPOUND_VERBAL)
        try:
            for chain, j, last in self._aux_chain(i, finite, after):
                forms = _required_forms(last)
                for verb, k in self._leaf(j, lambda a: a.pos == "verb" and _form_ok(a, forms)):
                    for part, m in self._particle(k, verb.lemma):
                        yield ParseNode(NT.COMPOUND_VERBAL, (*chain, verb, *part)), m, verb.lemma
        finally:
            self._stack.pop()

    def _compound_nominal(self, i, finite, after):
        self._stack.append(NT.COMPOUND_NOMINAL)
        try:
            heads = []
            for chain, j, last in self._aux_chain(i, finite, after):
                forms = _required_forms(last)
                heads.extend((chain, be, k) for be, k in self._leaf(
                    j, lambda a: a.pos == "verb" and a.lemma == "be" and _form_ok(a, forms)))
            heads.extend(([], be, k) for be, k in self._leaf(
                i, lambda a: a.pos == "verb" and a.lemma == "be"
                and self._verb_ok(a, finite, after)))
            stop = self.lexicon.declared_prepositions("be")
            for chain, be, k in heads:
                negs = [([neg], m) for neg, m in self._leaf(k, lambda a: a.has("negation"))]
                for neg, m in negs + [([], k)]:
                    for np, n in self.basic_noun_phrase(m, stop):
                        yield ParseNode(NT.COMPOUND_NOMINAL, (*chain, be, *neg, np)), n, "be"
                    for adjs, n in self._repeat(m, lambda a: a.pos == "adjective", minimum=1):
                        yield ParseNode(NT.COMPOUND_NOMINAL, (*chain, be, *neg, *adjs)), n, "be"
        finally:
            self._stack.pop()

    def _simple_predicate(self, i, finite, after):
        self._stack.append(NT.SIMPLE_PREDICATE)
        try:
            for verb, j in self._leaf(i, lambda a: a.pos == "verb"
                                      and self._verb_ok(a, finite, after)):
                for part, k in self._particle(j, verb.lemma):
                    yield ParseNode(NT.SIMPLE_PREDICATE, (verb, *part)), k, verb.lemma
        finally:
            self._stack.pop()

    # -- objects ---------------------------------------------------------

    @production(NT.CONTROLLED)
    def controlled(self, i, lemma):
        stop = self.lexicon.declared_prepositions(lemma)
        for objs, j in self.objects(i, stop):
            for advs, k in self.adverbials(j):
                yield ParseNode(NT.CONTROLLED, (objs, advs)), k
            yield ParseNode(NT.CONTROLLED, (objs,)), j
        for advs, j in self.adverbials(i):
            yield ParseNode(NT.CONTROLLED, (advs,)), j

    @production(NT.OBJECTS)
    def objects(self, i, stop):
        if i >= len(self.toks) or self.toks[i].comma_before:
            return
        for dobj, j in self.direct_object(i, stop):
            for pobj, k in self.prepositional_object(j, stop):
                yield ParseNode(NT.OBJECTS, (dobj, pobj)), k
            yield ParseNode(NT.OBJECTS, (dobj,)), j
        for iobj, j in self.indirect_object(i, stop):
            for dobj, k in self.direct_object(j, stop):
                for pobj, m in self.prepositional_object(k, stop):
                    yield ParseNode(NT.OBJECTS, (iobj, dobj, pobj)), m
                yield ParseNode(NT.OBJECTS, (iobj, dobj)), k
        for pobj, j in self.prepositional_object(i, stop):
            yield ParseNode(NT.OBJECTS, (pobj,)), j

    def _np_with_determinative(self, i, stop):
        for np, j in self.basic_noun_phrase(i, stop):
            for det, k in self.determinative(j, np):
                yield (np, det), k
            yield (np,), j

    @production(NT.INDIRECT)
    def indirect_object(self, i, stop):
        for np, j in self.basic_noun_phrase(i, stop):
            if _animate(np) and j < len(self.toks) and not self.toks[j].comma_before:
                yield ParseNode(NT.INDIRECT, (np,)), j

    @production(NT.DIRECT)
    def direct_object(self, i, stop):
        for parts, j in self._np_with_determinative(i, stop):
            yield ParseNode(NT.DIRECT, parts), j
        for inf, j in self.infinitive(i):
            yield ParseNode(NT.DIRECT, (inf,)), j
        for clause, j in self.clause(i, NT.OBJECT_CLAUSE, CLAUSE_INTRODUCERS):
            yield ParseNode(NT.DIRECT, (clause,)), j

    @production(NT.PREPOSITIONAL)
    def prepositional_object(self, i, stop):
        if not stop or i >= len(self.toks):
            return
        for prep, j in self._leaf(i, lambda a: a.pos == "preposition" and a.lemma in stop):
            for parts, k in self._np_with_determinative(j, stop):
                yield ParseNode(NT.PREPOSITIONAL, (prep, *parts)), k

    def clause(self, i, label, introducers):
        self._stack.append(label)
        try:
            for intro, j in self._leaf(i, lambda a: a.lemma in introducers
                                       and a.pos in ("conjunction", "pronoun")
                                       and not (a.pos == "conjunction"
                                                and a.has("coordinating"))):
                for sentence, k in self.simple(j):
                    yield ParseNode(label, (intro, sentence)), k
        finally:
            self._stack.pop()

    # -- adverbials ------------------------------------------------------

    @production(NT.ADVERBIALS)
    def adverbials(self, i):
        for mod, j in self.adverbial_modifier(i):
            for rest, k in self.adverbials(j):
                yield ParseNode(NT.ADVERBIALS, (mod, rest)), k
            yield ParseNode(NT.ADVERBIALS, (mod,)), j

    @production(NT.ADVERBIAL)
    def adverbial_modifier(self, i, initial: bool = False):
        if i >= len(self.toks):
            return
        for node, j in self.simple_adverbial(i, initial):
            yield ParseNode(NT.ADVERBIAL, (node,)), j
        for node, j in self.adverbial_clause(i):
            yield ParseNode(NT.ADVERBIAL, (node,)), j
        for node, j in self.participial(i):
            yield ParseNode(NT.ADVERBIAL, (node,)), j
        for node, j in self.infinitive(i):
            yield ParseNode(NT.ADVERBIAL, (node,)), j

    @production(NT.SIMPLE_ADVERBIAL)
    def simple_adverbial(self, i, initial=False):
        for conj, j in self._leaf(i, lambda a: a.pos == "conjunction"
                                  and a.has("subordinating")):
            for prep, k in self._leaf(j, lambda a: a.pos == "preposition"):
                for parts, m in self._np_with_determinative(k, frozenset()):
                    yield ParseNode(NT.SIMPLE_ADVERBIAL, (conj, prep, *parts)), m
        for prep, j in self._leaf(i, lambda a: a.pos == "preposition"):
            for parts, k in self._np_with_determinative(j, frozenset()):
                yield ParseNode(NT.SIMPLE_ADVERBIAL, (prep, *parts)), k
        for np, j in self.basic_noun_phrase(i):
            if _head_kind(np) != "tim":
                continue
            for adv, k in self._leaf(j, lambda a: a.pos == "adverb"
                                     and not a.has("negation"), allow_comma=False):
                yield ParseNode(NT.SIMPLE_ADVERBIAL, (np, adv)), k
        for adv, j in self._leaf(i, lambda a: a.pos == "adverb"
                                 and not a.has("existential")
                                 and not (initial and a.has("inversion"))):
            yield ParseNode(NT.SIMPLE_ADVERBIAL, (adv,)), j

    @production(NT.ADVERBIAL_CLAUSE)
    def adverbial_clause(self, i):
        for conj, j in self._leaf(i, lambda a: a.pos == "conjunction"
                                  and a.lemma in ADVERBIAL_INTRODUCERS):
            for sentence, k in self.simple(j):
                yield ParseNode(NT.ADVERBIAL_CLAUSE, (conj, sentence)), k


def _head_group(np: ParseNode) -> ParseNode:
    return np.children[0]


def head_noun(np: ParseNode) -> Optional[Leaf]:
    """Last noun (or the pronoun) of the first noun group of a noun phrase."""
    group = _head_group(np) if np.label == NT.NOUN_PHRASE else np
    for leaf in reversed(group.children):
        if isinstance(leaf, Leaf) and leaf.label in ("noun", "pronoun"):
            return leaf
    return None


def _head_kind(np: ParseNode) -> Optional[str]:
    leaf = head_noun(np)
    if leaf is None:
        return None
    if leaf.label == "pronoun":
        return "person" if leaf.analysis.lemma in ("he", "she", "i", "we", "you",
                                                   "who", "everyone") else None
    return leaf.analysis.kind


def _animate(np: ParseNode) -> bool:
    return _head_kind(np) in ANIMATE_KINDS
