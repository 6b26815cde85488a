"""Map parse trees onto semantic-database records.

A simple declarative sentence is analysed in five steps: a fronted
adverbial modifier, the subject, the objects, the remaining adverbial
modifiers and finally the predicate, which chooses a verb sense from the
collected factors and writes the main clause record.  Subordinate clauses
(attributive, object, subject and adverbial clauses, participial and
infinitive phrases) go through the same steps with ``clause_role = "sub"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .lexicon import FactorConstraint, LexEntry, Lexicon, VerbSense
from .parser import NT, Leaf, ParseError, ParseNode, Parser, head_noun, split_sentences
from .semdb import CLAUSE_KINDS, IntegrityError, Record, SemanticDB

__all__ = [
    "MappingError",
    "FactorSet",
    "AnalysisContext",
    "SemanticMapper",
    "IngestReport",
    "analyze_sentence",
    "ingest_text",
    "map_first",
    "map_tense",
    "select_verb_sense",
    "score_sense",
]


class MappingError(Exception):
    """A tree that cannot be turned into records."""

    def __init__(self, message: str, candidates: Sequence = ()):
        super().__init__(message)
        self.candidates = list(candidates)


# -- tense -----------------------------------------------------------------

MODAL_TENSES = {"will": "fut", "shall": "fut", "would": "futpast"}
FINITE_FORMS = ("past", "thirdsing", "base")

# (auxiliaries after any modal or "do", main verb form) -> tense type
TENSE_TYPE_TABLE = {
    ((), None): "indef",
    (("have",), "pastpart"): "perf",
    (("be",), "ing"): "cont",
    (("have", "be"), "ing"): "perfcont",
    (("be",), "pastpart"): "indpassiv",
    (("have", "be"), "pastpart"): "perfpasiv",
}
PASSIVE_TYPES = ("indpassiv", "perfpasiv")


def map_tense(aux_chain: Sequence[LexEntry], main_verb: LexEntry) -> tuple:
    """Return ``(tense, tense_type)`` for an auxiliary chain and main verb."""
    chain = list(aux_chain)
    carrier = chain[0] if chain else main_verb
    if carrier.has("modal"):
        tense = MODAL_TENSES.get(carrier.lemma, "mod")
        chain = chain[1:]
    else:
        if carrier.features.verb_form not in FINITE_FORMS:
            raise MappingError(f"non-finite verb {carrier.surface!r} carries tense")
        tense = "past" if carrier.features.verb_form == "past" else "pres"
        if chain and chain[0].lemma == "do":
            chain = chain[1:]
            if chain or main_verb.features.verb_form != "base":
                raise MappingError("do-support takes a bare verb")
    lemmas = tuple(a.lemma for a in chain)
    form = main_verb.features.verb_form if lemmas else None
    if lemmas and (chain[0].has("modal") or "do" in lemmas):
        raise MappingError(f"unrecognised auxiliary chain {' '.join(lemmas)}")
    if not lemmas and carrier is not main_verb and main_verb.features.verb_form != "base":
        raise MappingError(f"{carrier.surface!r} takes a bare verb")
    try:
        return tense, TENSE_TYPE_TABLE[(lemmas, form)]
    except KeyError:
        raise MappingError(
            f"unrecognised auxiliary chain {' '.join(lemmas)} + {main_verb.surface}") from None


# -- verb senses -------------------------------------------------------------

@dataclass(frozen=True)
class FactorSet:
    """Semantic kinds found around a verb, read off the parse tree alone."""

    subject_kind: Optional[str] = None
    dobj_kind: Optional[str] = None
    iobj_kind: Optional[str] = None
    prep_objects: tuple = ()
    place_present: bool = False
    time_present: bool = False
    purpose_present: bool = False
    tool_present: bool = False


def _constraint_status(c: FactorConstraint, factors: FactorSet) -> Optional[bool]:
    """True when satisfied, False when violated, None when neutral."""
    if c.slot == "prep":
        kinds = [k for p, k in factors.prep_objects if p == c.preposition]
        if not kinds:
            return None
        return any(c.accepts(k) for k in kinds)
    kind = {"subj": factors.subject_kind, "dobj": factors.dobj_kind,
            "iobj": factors.iobj_kind}[c.slot]
    if not c.kinds:
        return kind is None
    if kind is None:
        return None
    return c.accepts(kind)


def score_sense(constraints: Iterable[FactorConstraint], factors: FactorSet) -> tuple:
    """Return ``(satisfied count, violated constraints)``."""
    satisfied, violated = 0, []
    for c in constraints:
        status = _constraint_status(c, factors)
        if status is True:
            satisfied += 1
        elif status is False:
            violated.append(c)
    return satisfied, violated


def select_verb_sense(senses: Sequence[VerbSense], factors: FactorSet) -> VerbSense:
    """Most satisfied constraints, no violations; ties go to dictionary order."""
    if not senses:
        raise MappingError("no verb sense available")
    best, best_score, report = None, -1, []
    for sense in senses:
        satisfied, violated = score_sense(sense.valence, factors)
        if violated:
            report.append(f"{sense.label}: violates {', '.join(map(str, violated))}")
        elif satisfied > best_score:
            best, best_score = sense, satisfied
    if best is None:
        raise MappingError("no verb sense fits: " + "; ".join(report), senses)
    return best


# -- analysis state ------------------------------------------------------------

@dataclass
class AnalysisContext:
    clause_role: str = "main"
    sentence_ordinal: int = 1
    subject_code: int = 0
    object_codes: list = field(default_factory=list)
    # (field name, code) wirings collected by steps 1-4, applied in step 5
    pending_modifiers: list = field(default_factory=list)
    subject_kind: Optional[str] = None
    object_kind: Optional[str] = None


@dataclass
class _Clause:
    """Constituents of one clause, flattened out of the tree."""

    fronted: list = field(default_factory=list)
    subject: Optional[ParseNode] = None
    trigger: list = field(default_factory=list)
    aux: list = field(default_factory=list)
    verb: Optional[Leaf] = None
    particle: Optional[Leaf] = None
    negated: bool = False
    complement: Optional[ParseNode] = None
    adjectives: list = field(default_factory=list)
    iobj: Optional[ParseNode] = None
    dobj: Optional[ParseNode] = None
    pobjs: list = field(default_factory=list)
    adverbials: list = field(default_factory=list)
    adverb_words: list = field(default_factory=list)
    sort: str = "real"
    form: str = "finite"        # finite, infinitive, participle


HONORIFICS = {"mister": "Mister", "missis": "Mrs", "miss": "Miss"}
PERSON_PRONOUNS = {"he": "m", "she": "f"}
SPEAKER_PRONOUNS = ("i", "you", "we", "everyone", "someone")
NEUTER_PRONOUNS = ("it", "they")
WH_PLACEHOLDERS = {"who": "person", "what": "thing"}
TIME_FIELDS = {"monday": "weekday", "sunday": "weekday", "morning": "part_of_day",
               "evening": "part_of_day", "night": "part_of_day"}
ENTITY_KINDS = ("machine", "thing", "animal", "organization", "place", "project", "abstr")
ANIMATE = ("person", "organization", "animal")


def _adverbial_list(group: Optional[ParseNode]) -> list:
    out = []
    while group is not None:
        out.append(group.children[0])
        group = group.children[1] if len(group.children) > 1 else None
    return out


def _np_kind(node: Optional[ParseNode]) -> Optional[str]:
    """Semantic kind of a noun phrase (or phrase-bearing group), tree only."""
    if node is None:
        return None
    np = node if node.label == NT.NOUN_PHRASE else node.child(NT.NOUN_PHRASE)
    if np is None:
        return "abstr"      # clause or infinitive standing as a noun
    leaf = head_noun(np)
    if leaf is None:
        return None
    if leaf.label == "pronoun":
        lemma = leaf.analysis.lemma
        if lemma in PERSON_PRONOUNS or lemma in SPEAKER_PRONOUNS or lemma == "who":
            return "person"
        return None
    return leaf.analysis.kind


class SemanticMapper:
    """Writes records for parse trees into one database.

    ``question`` mode turns wh-pronouns into placeholder records whose codes
    are collected in :attr:`placeholders`.  ``linkage`` controls whether a
    sentence linkage record is written for each sentence.
    """

    def __init__(self, db: SemanticDB, lexicon: Lexicon, *, question: bool = False,
                 linkage: bool = True):
        self.db = db
        self.lexicon = lexicon
        self.question = question
        self.linkage = linkage
        self.placeholders: dict = {}
        self.main_codes: list = []
        self.senses: dict = {}
        self._new: list = []

    # -- entry points ----------------------------------------------------

    def analyze_sentence(self, tree: ParseNode) -> list:
        """Map a declarative tree; return the codes created, in insertion order."""
        if tree.label != NT.DECLARATIVE:
            raise MappingError(f"expected {NT.DECLARATIVE}, got {tree.label}")
        self._new = []
        with self.db.batch():
            ordinal = max((r["sentence_ordinal"] for r in self.db.records("cadr")),
                          default=0) + 1
            link = self._insert(Record("cadr", story=1, sentence_ordinal=ordinal)) \
                if self.linkage else 0
            body = tree.children[0]
            ctx = AnalysisContext(sentence_ordinal=ordinal)
            if body.label == NT.COMPLEX:
                sentences = [c for c in body.children if c.label == NT.SIMPLE]
                codes = [self._simple(s, AnalysisContext(sentence_ordinal=ordinal), link)
                         for s in sentences]
                for left, right in zip(codes, codes[1:]):
                    conj = [c for c in body.children if isinstance(c, Leaf)]
                    self._insert(Record("relation", type=conj[0].lemma if conj else "and",
                                        left=left, right=right))
            else:
                self._simple(body, ctx, link)
        return list(self._new)

    def analyze_infinitive(self, node: ParseNode, role: str = "main") -> int:
        """Map a stand-alone infinitive phrase (no subject); return its code."""
        self._new = []
        with self.db.batch():
            ctx = AnalysisContext(clause_role=role)
            return self._clause(self._infinitive_parts(node), ctx, 0)

    def map_phrase(self, node: ParseNode) -> int:
        """Map a noun phrase (or group of subject) outside any sentence."""
        with self.db.batch():
            return self.map_noun_phrase(node)

    # -- record helpers --------------------------------------------------

    def _insert(self, record: Record, code: Optional[int] = None) -> int:
        code = self.db.insert(record, code)
        self._new.append(code)
        return code

    def _latest(self, kinds: Sequence[str], pred: Callable[[Record], bool]) -> int:
        best = 0
        for kind in kinds:
            for rec in self.db.records(kind):
                if rec.code > best and rec.code not in self.placeholders and pred(rec):
                    best = rec.code
        return best

    # -- noun phrases ----------------------------------------------------

    def map_noun_phrase(self, node: ParseNode) -> int:
        """Map a basic noun phrase or a group of subject/object; return its code."""
        if node.label in (NT.SUBJECT_GROUP, NT.DIRECT, NT.INDIRECT):
            np = node.child(NT.NOUN_PHRASE)
            if np is None:
                raise MappingError(f"{node.label} without a noun phrase")
            code = self.map_noun_phrase(np)
            det = node.child(NT.DETERMINATIVE)
            if det is not None:
                self._determinative(det, code, _np_kind(np))
            return code
        if node.label != NT.NOUN_PHRASE:
            raise MappingError(f"expected a noun phrase, got {node.label}")
        groups = node.children
        head = self._noun_group(groups[0])
        for i in range(1, len(groups), 2):
            other = self._noun_group(groups[i + 1])
            self._insert(Record("relation", type=groups[i].lemma, left=head, right=other))
        return head

    def _noun_group(self, group: ParseNode) -> int:
        leaves = list(group.children)
        first = leaves[0]
        if first.label == "pronoun":
            return self._pronoun(first)
        dets = [l for l in leaves if l.label == "determiner"]
        nums = [l for l in leaves if l.label == "numeral"]
        adjs = [l for l in leaves if l.label == "adjective"]
        nouns = [l for l in leaves if l.label == "noun"]
        head = nouns[-1]
        kind = head.analysis.kind
        if kind is None:
            raise MappingError(f"noun {head.text!r} has no semantic code")
        builder = getattr(self, f"_entity_{kind}", self._entity_generic)
        code = builder(kind, head, nouns[:-1], adjs, dets)
        if nums:
            self._insert(Record("number", value_word=" ".join(n.text.lower() for n in nums),
                                referent=code))
        for adj in adjs:
            self._adjective_event(adj, code)
        return code

    def _adjective_event(self, adj: Leaf, subject: int) -> None:
        spec = adj.analysis.features.value("event")
        if not spec:
            return
        scale, _, value = spec.partition(":")
        self._insert(Record("event", sort="real", subject=subject,
                            designation=adj.analysis.lemma, scale=scale,
                            result_state=int(value)))

    def _pronoun(self, leaf: Leaf) -> int:
        lemma = leaf.analysis.lemma
        if self.question and lemma in WH_PLACEHOLDERS:
            code = self._insert(Record(WH_PLACEHOLDERS[lemma]))
            self.placeholders[code] = lemma
            return code
        if lemma in PERSON_PRONOUNS:
            sex = PERSON_PRONOUNS[lemma]
            code = (self._latest(("person",), lambda r: r["sex"] == sex)
                    or self._latest(("person",), lambda r: r["sex"] == ""))
            return code or self._insert(Record("person", sex=sex))
        if lemma in NEUTER_PRONOUNS:
            code = self._latest(ENTITY_KINDS, lambda r: True)
            return code or self._insert(Record("thing"))
        if lemma in SPEAKER_PRONOUNS:
            code = self._latest(("person",), lambda r: r["designation"] == lemma)
            return code or self._insert(Record("person", designation=lemma))
        return self._insert(Record("abstr", designation=lemma, noun=lemma))

    def _owner(self, dets: Sequence[Leaf]) -> int:
        for d in dets:
            if d.analysis.has("possessive") or d.analysis.lemma in ("his", "her"):
                sex = "m" if d.analysis.has("male") else "f" if d.analysis.has("female") else None
                if sex:
                    return self._latest(("person",), lambda r: r["sex"] == sex)
        return 0

    def _entity_person(self, kind, head, modifiers, adjs, dets) -> int:
        values: dict = {}
        for n in (*modifiers, head):
            a = n.analysis
            if a.has("honorific"):
                values["additional_data"] = HONORIFICS.get(a.lemma, n.text)
            elif a.has("given"):
                values["first_name"] = n.text.capitalize()
            elif a.has("proper"):
                values["last_name"] = n.text.capitalize()
            else:
                values["designation"] = a.lemma
                if a.has("occupation"):
                    values["profession"] = a.lemma
            if a.has("male"):
                values["sex"] = "m"
            elif a.has("female"):
                values["sex"] = "f"
        for adj in adjs:
            slot = adj.analysis.features.value("field")
            if slot in ("stature", "constitution", "temperament", "hair"):
                values[slot] = adj.analysis.lemma
        existing = 0
        if values.get("last_name"):
            existing = self._latest(("person",),
                                    lambda r: r["last_name"] == values["last_name"])
        elif values.get("first_name") and not values.get("designation"):
            existing = self._latest(("person",),
                                    lambda r: r["first_name"] == values["first_name"])
        if existing:
            rec = self.db[existing]
            fill = {k: v for k, v in values.items() if v and not rec[k]}
            if fill and not self.question:
                self.db.update(existing, **fill)
            return existing
        return self._insert(Record("person", **values))

    def _proper_name(self, nouns: Iterable[Leaf]) -> str:
        return " ".join(n.text.capitalize() for n in nouns if n.analysis.has("proper"))

    def _descriptive(self, adjs, slots) -> dict:
        values = {}
        for adj in adjs:
            slot = adj.analysis.features.value("field")
            if slot in slots:
                values[slot] = adj.analysis.lemma
        return values

    def _entity_machine(self, kind, head, modifiers, adjs, dets) -> int:
        values = self._descriptive(adjs, ("size", "color"))
        owner = self._owner(dets)
        return self._insert(Record(kind, noun=head.analysis.lemma,
                                   name=self._proper_name(modifiers), owner=owner, **values))

    _entity_thing = _entity_machine
    _entity_animal = _entity_machine

    def _named(self, kind, head, modifiers, **values) -> int:
        if head.analysis.has("proper"):
            name = self._proper_name((*modifiers, head))
            existing = self._latest((kind,), lambda r: r["name"] == name)
            return existing or self._insert(Record(kind, name=name, **values))
        return self._insert(Record(kind, designation=head.analysis.lemma,
                                   name=self._proper_name(modifiers), **values))

    def _entity_place(self, kind, head, modifiers, adjs, dets) -> int:
        return self._named(kind, head, modifiers)

    def _entity_organization(self, kind, head, modifiers, adjs, dets) -> int:
        return self._named(kind, head, modifiers)

    def _entity_project(self, kind, head, modifiers, adjs, dets) -> int:
        return self._named(kind, head, modifiers)

    def _entity_abstr(self, kind, head, modifiers, adjs, dets) -> int:
        return self._insert(Record("abstr", designation=head.analysis.lemma,
                                   noun=head.analysis.lemma))

    def _entity_disease(self, kind, head, modifiers, adjs, dets) -> int:
        return self._insert(Record("abstr", designation="disease", noun=head.analysis.lemma))

    def _entity_tim(self, kind, head, modifiers, adjs, dets) -> int:
        slot = TIME_FIELDS.get(head.analysis.lemma, "unit")
        values = {slot: head.text.lower()}
        if modifiers:
            values["designation"] = " ".join(m.analysis.lemma for m in modifiers)
        return self._insert(Record("tim", **values))

    def _entity_event(self, kind, head, modifiers, adjs, dets) -> int:
        return self._insert(Record("event", sort="real", designation=head.analysis.lemma))

    def _entity_generic(self, kind, head, modifiers, adjs, dets) -> int:
        raise MappingError(f"no record kind for semantic code {kind!r}")

    # -- determinatives --------------------------------------------------

    def _determinative(self, det: ParseNode, antecedent: int, kind: Optional[str]) -> None:
        inner = det.children[0]
        if inner.label == NT.ATTRIBUTIVE:
            subj = inner.child(NT.SUBJECT_GROUP)
            parts = self._predicate_group_parts(inner.child(NT.PREDICATE_GROUP))
            ctx = AnalysisContext(clause_role="sub")
            if subj is None:
                ctx.subject_code, ctx.subject_kind = antecedent, kind
            else:
                parts.subject = subj
                ctx.object_codes, ctx.object_kind = [antecedent], kind
            sub = self._clause(parts, ctx, 0)
            rel = "attributive"
        elif inner.label == NT.PARTICIPIAL:
            parts = self._participle_parts(inner)
            ctx = AnalysisContext(clause_role="sub")
            if parts.verb.analysis.features.verb_form == "pastpart":
                ctx.object_codes, ctx.object_kind = [antecedent], kind
            else:
                ctx.subject_code, ctx.subject_kind = antecedent, kind
            sub = self._clause(parts, ctx, 0)
            rel = "participial"
        else:
            sub = self._clause(self._infinitive_parts(inner), AnalysisContext(clause_role="sub"), 0)
            rel = "infinitive"
        self._insert(Record("relation", type=rel, left=antecedent, right=sub))

    # -- clause extraction -----------------------------------------------

    def _predicate_parts(self, pred: ParseNode, parts: _Clause) -> None:
        inner = pred.children[0]
        seen_verb = False
        for child in inner.children:
            if isinstance(child, ParseNode):
                parts.complement = child
                continue
            a = child.analysis
            if a.has("negation"):
                parts.negated = True
            elif child.label == "auxiliary" and not seen_verb:
                parts.aux.append(child)
            elif child.label == "verb" and not seen_verb:
                parts.verb, seen_verb = child, True
            elif child.label == "adjective":
                parts.adjectives.append(child)
            elif seen_verb and child.label in ("preposition", "adverb"):
                parts.particle = child
        if parts.verb is None and parts.aux:
            # a lone fronted auxiliary ("Never was he so happy") is the main verb
            last = parts.aux.pop()
            verbs = [a for a in last.token.analyses
                     if a.pos == "verb" and a.lemma == last.analysis.lemma
                     and a.features.verb_form == last.analysis.features.verb_form]
            if not verbs:
                raise MappingError(f"no main verb in {pred.text!r}")
            parts.verb = Leaf(last.token, verbs[0])

    def _controlled_parts(self, cc: Optional[ParseNode], parts: _Clause) -> None:
        if cc is None:
            return
        for child in cc.children:
            if child.label == NT.OBJECTS:
                for obj in child.children:
                    if obj.label == NT.INDIRECT:
                        parts.iobj = obj
                    elif obj.label == NT.DIRECT:
                        parts.dobj = obj
                    else:
                        parts.pobjs.append(obj)
            else:
                parts.adverbials.extend(_adverbial_list(child))

    def _predicate_group_parts(self, group: ParseNode, parts: Optional[_Clause] = None) -> _Clause:
        parts = parts or _Clause()
        self._predicate_parts(group.children[0], parts)
        self._controlled_parts(group.child(NT.CONTROLLED), parts)
        return parts

    def _participle_parts(self, node: ParseNode) -> _Clause:
        parts = _Clause(form="participle")
        for child in node.children:
            if isinstance(child, Leaf):
                if child.label == "verb":
                    parts.verb = child
                else:
                    parts.particle = child
        self._controlled_parts(node.child(NT.CONTROLLED), parts)
        return parts

    def _infinitive_parts(self, node: ParseNode) -> _Clause:
        parts = _Clause(form="infinitive", sort="sup")
        for child in node.children[1:]:
            if isinstance(child, Leaf):
                if child.label == "verb":
                    parts.verb = child
                else:
                    parts.particle = child
        self._controlled_parts(node.child(NT.CONTROLLED), parts)
        return parts

    def _simple_parts(self, node: ParseNode) -> _Clause:
        parts = _Clause()
        first = node.children[0]
        if first.label == NT.REVERSE:
            return self._reverse_parts(first.children[0])
        for child in node.children:
            if child.label == NT.ADVERBIAL:
                parts.fronted.append(child)
            elif child.label == NT.SUBJECT_GROUP:
                parts.subject = child
            elif child.label == NT.PREDICATE_GROUP:
                self._predicate_group_parts(child, parts)
        return parts

    def _reverse_parts(self, node: ParseNode) -> _Clause:
        parts = _Clause()
        parts.subject = node.child(NT.SUBJECT_GROUP)
        if node.label in (NT.THERE_IS, NT.THERE_HERE):
            adverb, verb = node.children[0], node.children[1]
            parts.verb = verb
            if adverb.lemma == "here" or node.label == NT.THERE_HERE:
                parts.adverb_words.append(adverb.lemma)
            parts.adverbials.extend(_adverbial_list(node.child(NT.ADVERBIALS)))
            return parts
        parts.trigger = [c for c in node.children if isinstance(c, Leaf)]
        for leaf in parts.trigger:
            parts.adverb_words.append(leaf.text.lower())
            if leaf.analysis.lemma in ("never", "nothing"):
                parts.negated = True
        fronted = node.child(NT.PREDICATE).children[0].children[0]
        rest = node.child(NT.PREDICATE_GROUP)
        if rest is not None:
            parts.aux.append(fronted)
            self._predicate_group_parts(rest, parts)
        else:
            pred = ParseNode(NT.PREDICATE, (ParseNode(NT.SIMPLE_PREDICATE, (fronted,)),))
            self._predicate_parts(pred, parts)
            self._controlled_parts(node.child(NT.CONTROLLED), parts)
        return parts

    # -- clause mapping (steps 1-5) --------------------------------------

    def _simple(self, node: ParseNode, ctx: AnalysisContext, link: int) -> int:
        return self._clause(self._simple_parts(node), ctx, link)

    def _clause(self, parts: _Clause, ctx: AnalysisContext, link: int) -> int:
        if parts.verb is None:
            raise MappingError("clause without a verb")
        main = self.db.reserve()
        tense, tense_type = self._tense(parts)
        passive = tense_type in PASSIVE_TYPES
        adverb_words = list(parts.adverb_words)

        # 1. fronted adverbial modifiers
        for mod in parts.fronted:
            self._adverbial(mod, ctx, main, adverb_words)
        # 2. subject
        if parts.subject is not None:
            inner = parts.subject.children[0]
            if inner.label == NT.SUBJECT_CLAUSE:
                ctx.subject_code = self._embedded(inner.children[1], ctx)
                ctx.subject_kind = "abstr"
            else:
                ctx.subject_code = self.map_noun_phrase(parts.subject)
                ctx.subject_kind = _np_kind(inner)
        # 3. objects
        iobj = dobj = 0
        if parts.iobj is not None:
            iobj = self.map_noun_phrase(parts.iobj)
            ctx.pending_modifiers.append(("directed_to", iobj))
        if parts.dobj is not None:
            dobj = self._direct_object(parts.dobj, ctx)
            ctx.object_codes.append(dobj)
        prep_factors = []
        for pobj in parts.pobjs:
            prep, np_node = pobj.children[0], pobj.children[1:]
            code = self.map_noun_phrase(ParseNode(NT.DIRECT, np_node))
            kind = _np_kind(np_node[0])
            prep_factors.append((prep.lemma, kind))
            self._wire_preposition(prep.lemma, kind, code, ctx)
        if parts.complement is not None:
            comp = self.map_noun_phrase(parts.complement)
            ctx.object_codes.append(comp)
            self._complement_profession(ctx.subject_code, comp)
        # 4. remaining adverbial modifiers
        for mod in parts.adverbials:
            self._adverbial(mod, ctx, main, adverb_words)
        # 5. predicate
        subject_kind, dobj_kind = ctx.subject_kind, _np_kind(parts.dobj) if parts.dobj else None
        if dobj_kind is None and ctx.object_codes and parts.complement is None:
            dobj_kind = ctx.object_kind
        if passive or (parts.form == "participle"
                       and parts.verb.analysis.features.verb_form == "pastpart"):
            agent = next((c for f, c in ctx.pending_modifiers if f == "agent"), 0)
            agent_kind = self.db[agent].kind if agent else None
            if parts.subject is not None or ctx.subject_code:
                ctx.object_codes.insert(0, ctx.subject_code)
                dobj_kind = subject_kind
            ctx.subject_code, subject_kind = agent, agent_kind
        factors = FactorSet(
            subject_kind=subject_kind,
            dobj_kind=dobj_kind,
            iobj_kind=_np_kind(parts.iobj) if parts.iobj else None,
            prep_objects=tuple(prep_factors),
            place_present=any(f in ("start_location", "final_location")
                              for f, _ in ctx.pending_modifiers),
            time_present=any(f == "start_time" for f, _ in ctx.pending_modifiers),
            purpose_present=any(f == "purpose" for f, _ in ctx.pending_modifiers),
            tool_present=any(f == "tool" for f, _ in ctx.pending_modifiers),
        )
        particle = parts.particle.lemma if parts.particle is not None else None
        senses = self.lexicon.verb_senses(parts.verb.lemma, particle)
        if not senses:
            raise MappingError(f"no sense for verb {parts.verb.lemma!r}")
        sense = select_verb_sense(senses, factors)
        self.senses[main] = sense
        negation = "not" if parts.negated else ""
        wiring = {}
        for name, code in ctx.pending_modifiers:
            wiring.setdefault(name, code)
        wiring.pop("agent", None)
        obj = ctx.object_codes[0] if ctx.object_codes else 0
        if sense.target_kind == "event":
            record = Record(
                "event", sort=parts.sort, subject=ctx.subject_code or obj,
                designation=sense.lemma, scale=sense.scale,
                result_state=sense.result_state or 0, time=wiring.get("start_time", 0),
                location=wiring.get("start_location", wiring.get("final_location", 0)),
                way_tool=wiring.get("tool", 0),
                object_of_influence=obj if ctx.subject_code else 0, tense=tense)
        else:
            result_state = " ".join(a.analysis.lemma for a in parts.adjectives)
            for adj in parts.adjectives:
                self._adjective_event(adj, ctx.subject_code)
                self._adjective_field(adj, ctx.subject_code)
            record = Record(
                sense.target_kind, semantic_type=sense.semantic_type, sort=parts.sort,
                negation=negation, tense=tense, tense_type=tense_type,
                adverb=" ".join(adverb_words), verb=sense.lemma,
                subject=ctx.subject_code, object_of_influence=obj,
                result_state=result_state,
                clause_role=ctx.clause_role, linkage=link,
                sentence_ordinal=ctx.sentence_ordinal if link else 0, **wiring)
        self._insert(record, main)
        if ctx.clause_role == "main":
            self.main_codes.append(main)
        return main

    def _tense(self, parts: _Clause) -> tuple:
        if parts.form == "infinitive":
            return "pres", "indef"
        if parts.form == "participle":
            form = parts.verb.analysis.features.verb_form
            return "pres", "cont" if form == "ing" else "indpassiv"
        return map_tense([a.analysis for a in parts.aux], parts.verb.analysis)

    def _complement_profession(self, subject: int, complement: int) -> None:
        subj, comp = self.db.get(subject), self.db.get(complement)
        if (subj is not None and comp is not None and subj.kind == comp.kind == "person"
                and comp["profession"] and not self.question):
            self.db.update(subject, profession=comp["profession"])

    def _adjective_field(self, adj: Leaf, subject: int) -> None:
        rec = self.db.get(subject)
        slot = adj.analysis.features.value("field")
        if rec is None or not slot or self.question:
            return
        if rec.get(slot) == "":
            self.db.update(subject, **{slot: adj.analysis.lemma})

    def _embedded(self, sentence: ParseNode, ctx: AnalysisContext) -> int:
        sub = AnalysisContext(clause_role="sub", sentence_ordinal=ctx.sentence_ordinal)
        return self._simple(sentence, sub, 0)

    def _direct_object(self, dobj: ParseNode, ctx: AnalysisContext) -> int:
        inner = dobj.children[0]
        if inner.label == NT.INFINITIVE:
            sub = AnalysisContext(clause_role="sub", subject_code=ctx.subject_code,
                                  subject_kind=ctx.subject_kind)
            return self._clause(self._infinitive_parts(inner), sub, 0)
        if inner.label == NT.OBJECT_CLAUSE:
            return self._embedded(inner.children[1], ctx)
        return self.map_noun_phrase(dobj)

    def _wire_preposition(self, prep: str, kind: Optional[str], code: int,
                          ctx: AnalysisContext) -> bool:
        rec = self.db.get(code)
        kind = rec.kind if rec is not None else kind
        target = None
        if kind == "tim":
            target = "start_time"
        elif kind == "place":
            target = "final_location" if prep in ("to", "into", "towards") else "start_location"
        elif kind in ("person", "organization"):
            target = {"from": "directed_from", "to": "directed_to", "by": "agent"}.get(prep)
        elif kind == "animal":
            target = {"to": "directed_to", "by": "agent"}.get(prep)
        elif kind in ("machine", "thing"):
            target = "tool" if prep in ("with", "by", "using") else None
        if target is None:
            return False
        ctx.pending_modifiers.append((target, code))
        return True

    def _adverbial(self, mod: ParseNode, ctx: AnalysisContext, main: int,
                   adverb_words: list) -> None:
        inner = mod.children[0]
        if inner.label == NT.SIMPLE_ADVERBIAL:
            self._simple_adverbial(inner, ctx, adverb_words)
        elif inner.label == NT.ADVERBIAL_CLAUSE:
            sub = self._embedded(inner.children[1], ctx)
            self._insert(Record("relation", type=inner.children[0].lemma, left=main, right=sub))
        elif inner.label == NT.PARTICIPIAL:
            parts = self._participle_parts(inner)
            if parts.verb.lemma == "use" and parts.dobj is not None and not parts.adverbials:
                ctx.pending_modifiers.append(("tool", self.map_noun_phrase(parts.dobj)))
                return
            sub_ctx = AnalysisContext(clause_role="sub", subject_code=ctx.subject_code,
                                      subject_kind=ctx.subject_kind)
            sub = self._clause(parts, sub_ctx, 0)
            self._insert(Record("relation", type="participial", left=main, right=sub))
        elif inner.label == NT.INFINITIVE:
            sub_ctx = AnalysisContext(clause_role="sub", subject_code=ctx.subject_code,
                                      subject_kind=ctx.subject_kind)
            sub = self._clause(self._infinitive_parts(inner), sub_ctx, 0)
            ctx.pending_modifiers.append(("purpose", sub))

    def _simple_adverbial(self, node: ParseNode, ctx: AnalysisContext,
                          adverb_words: list) -> None:
        children = node.children
        if len(children) == 1:
            adv = children[0]
            if adv.analysis.has("negation"):
                return
            if adv.analysis.has("time"):
                ctx.pending_modifiers.append(
                    ("start_time", self._insert(Record("tim", designation=adv.lemma))))
            else:
                adverb_words.append(adv.lemma)
            return
        if children[0].label == NT.NOUN_PHRASE:
            # "fifteen years ago": a time phrase qualified by an adverb
            tim = self.map_noun_phrase(children[0])
            numbers = [c for c in self._new if self.db[c].kind == "number"
                       and self.db[c]["referent"] == tim]
            self._insert(Record("cause", cause_word=children[1].lemma,
                                number=numbers[-1] if numbers else 0, time=tim))
            ctx.pending_modifiers.append(("start_time", tim))
            return
        rest = [c for c in children if not (isinstance(c, Leaf) and c.label == "conjunction")]
        prep, np_nodes = rest[0], rest[1:]
        code = self.map_noun_phrase(ParseNode(NT.DIRECT, tuple(np_nodes)))
        self._wire_preposition(prep.lemma, _np_kind(np_nodes[0]), code, ctx)


def analyze_sentence(tree: ParseNode, db: SemanticDB, lexicon: Lexicon) -> list:
    """Map one declarative tree into ``db``; return the new codes in order."""
    return SemanticMapper(db, lexicon).analyze_sentence(tree)


def map_first(parser: Parser, tokens, mapper: SemanticMapper,
              what: str = "declarative") -> tuple:
    """Map the first parse that maps cleanly; return ``(tree, codes)``.

    Parses come in preference order; one whose mapping fails (no verb sense
    fits, say) is rolled back and the next is tried.  The first mapping
    error is re-raised when every parse fails.
    """
    first_error = None
    for tree in parser.parses(tokens, what):
        try:
            if what == "declarative":
                return tree, mapper.analyze_sentence(tree)
            mapper.analyze_infinitive(tree)
            return tree, list(mapper._new)
        except (MappingError, IntegrityError) as exc:
            first_error = first_error or exc
    raise first_error


@dataclass
class IngestReport:
    sentences: int = 0
    records: int = 0
    failures: list = field(default_factory=list)   # (sentence text, message)

    def summary(self) -> str:
        lines = [f"{self.sentences} sentence(s), {self.records} record(s), "
                 f"{len(self.failures)} failure(s)"]
        lines.extend(f"failed: {text}: {msg}" for text, msg in self.failures)
        return "\n".join(lines)


def ingest_text(text: str, db: SemanticDB, lexicon: Lexicon,
                trace: Optional[Callable[[str], None]] = None) -> IngestReport:
    """Parse and map every sentence; failures are collected, never fatal."""
    report = IngestReport()
    mapper = SemanticMapper(db, lexicon)
    for tokens, _ in split_sentences(text, lexicon):
        sentence = " ".join(t.text for t in tokens)
        try:
            _, codes = map_first(Parser(lexicon, trace), tokens, mapper)
        except (ParseError, MappingError, IntegrityError) as exc:
            report.failures.append((sentence, str(exc)))
            continue
        report.sentences += 1
        report.records += len(codes)
    return report
