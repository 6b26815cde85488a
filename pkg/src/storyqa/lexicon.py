"""Word dictionaries and morphological analysis.

Three tab-separated files make up a dictionary directory:

``nouns.dict``
    ``surface  pos  lemma  features  semcode``
``verbs.dict``
    ``lemma  particle-or-"-"  semantic_type  target_kind  valence-spec``
``closed.dict``
    ``surface  pos  lemma  features`` (prepositions, conjunctions, pronouns,
    determiners, adverbs, adjectives, numerals, auxiliaries)

Lines starting with ``#`` are comments.  Verb lemmas are not listed as
surface forms: inflected verb forms are produced on lookup through suffix
rules and the irregular tables below.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

__all__ = [
    "POS",
    "SEMANTIC_KINDS",
    "TARGET_KINDS",
    "SEMANTIC_ACTION_TYPES",
    "LexiconError",
    "FeatureSet",
    "SemanticCode",
    "LexEntry",
    "FactorConstraint",
    "VerbSense",
    "Lexicon",
    "load_dictionaries",
    "default_dict_dir",
    "inflect",
]

POS = (
    "noun", "verb", "adjective", "adverb", "preposition", "conjunction",
    "pronoun", "determiner", "numeral", "auxiliary",
)

SEMANTIC_KINDS = (
    "person", "animal", "organization", "project", "thing", "machine",
    "place", "tim", "abstr", "disease", "event",
)

TARGET_KINDS = ("action", "message", "intelligence", "job", "event")

# Open set; dictionaries may introduce further tags.
SEMANTIC_ACTION_TYPES = frozenset({
    "PROPEL", "MOVE", "GO", "TRANSFER", "IS", "MESSAGE", "INGEST", "GRASP",
    "EXPEL", "ATTEND", "SPEAK", "MTRANS", "MBUILD",
})

NUMBERS = ("sing", "plur", "none")
VERB_FORMS = ("base", "past", "pastpart", "ing", "thirdsing", "none")
PERSONS = ("first", "second", "third", "none")

DICT_FILES = ("nouns.dict", "verbs.dict", "closed.dict")


class LexiconError(Exception):
    """Raised for missing or malformed dictionary files."""

    def __init__(self, message: str, path: Optional[str] = None,
                 line_no: Optional[int] = None):
        where = ""
        if path is not None:
            where = f"{path}:{line_no}: " if line_no is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line_no = line_no


@dataclass(frozen=True)
class FeatureSet:
    number: str = "none"
    verb_form: str = "none"
    person_feature: str = "none"
    # Free-form markers such as "proper", "modal", "field=stature".
    flags: frozenset = frozenset()

    def has(self, flag: str) -> bool:
        return flag in self.flags

    def value(self, key: str) -> Optional[str]:
        prefix = key + "="
        for flag in self.flags:
            if flag.startswith(prefix):
                return flag[len(prefix):]
        return None

    @classmethod
    def parse(cls, text: str) -> "FeatureSet":
        number, verb_form, person = "none", "none", "none"
        flags = set()
        if text.strip() not in ("", "-"):
            for item in text.split(","):
                item = item.strip()
                if not item:
                    continue
                if item in NUMBERS:
                    number = item
                elif item in VERB_FORMS:
                    verb_form = item
                elif item in PERSONS:
                    person = item
                else:
                    flags.add(item)
        return cls(number, verb_form, person, frozenset(flags))


@dataclass(frozen=True)
class SemanticCode:
    kind: str

    def __post_init__(self):
        if self.kind not in SEMANTIC_KINDS:
            raise ValueError(f"unknown semantic code {self.kind!r}")


@dataclass(frozen=True)
class LexEntry:
    surface: str
    pos: str
    lemma: str
    features: FeatureSet = FeatureSet()
    semcode: Optional[SemanticCode] = None

    def __post_init__(self):
        if not self.surface or not self.lemma:
            raise ValueError("surface and lemma must be non-empty")
        if self.surface != self.surface.lower() or self.lemma != self.lemma.lower():
            raise ValueError(f"entry {self.surface!r} is not lowercase")
        if self.pos not in POS:
            raise ValueError(f"unknown part of speech {self.pos!r}")
        if (self.semcode is not None) != (self.pos == "noun"):
            raise ValueError(f"{self.surface!r}: semcode is required for nouns only")
        if self.features.verb_form != "none" and self.pos not in ("verb", "auxiliary"):
            raise ValueError(f"{self.surface!r}: verb form on a {self.pos}")

    @property
    def kind(self) -> Optional[str]:
        return self.semcode.kind if self.semcode else None

    def has(self, flag: str) -> bool:
        return self.features.has(flag)


@dataclass(frozen=True)
class FactorConstraint:
    """One valence slot: ``subj``, ``dobj``, ``iobj`` or ``prep`` (with word).

    ``kinds`` is the set of acceptable semantic kinds; ``{"any"}`` accepts
    anything and an empty set means the slot must stay empty.
    """

    slot: str
    kinds: frozenset
    preposition: Optional[str] = None

    def accepts(self, kind: Optional[str]) -> bool:
        if "any" in self.kinds or kind is None:
            return True
        if kind in self.kinds:
            return True
        # disease nouns are stored as abstr
        return kind == "disease" and "abstr" in self.kinds

    def __str__(self):
        kinds = "|".join(sorted(self.kinds)) or "-"
        if self.slot == "prep":
            return f"prep:{self.preposition}={kinds}"
        return f"{self.slot}={kinds}"


@dataclass(frozen=True)
class VerbSense:
    lemma: str
    particle: Optional[str]
    semantic_type: str
    target_kind: str
    valence: tuple = ()
    # event senses carry the scale they move along and the resulting state
    scale: str = ""
    result_state: Optional[int] = None
    index: int = 0

    @property
    def prepositions(self) -> frozenset:
        return frozenset(c.preposition for c in self.valence if c.slot == "prep")

    def constraint(self, slot: str) -> Optional[FactorConstraint]:
        for c in self.valence:
            if c.slot == slot:
                return c
        return None

    @property
    def label(self) -> str:
        head = self.lemma if self.particle is None else f"{self.lemma} {self.particle}"
        spec = ";".join(str(c) for c in self.valence)
        return f"{head} [{self.semantic_type}/{self.target_kind}] {spec}".rstrip()


def _parse_valence(spec: str, where: tuple) -> tuple:
    spec = spec.strip()
    if spec in ("", "-"):
        return (), "", None
    constraints = []
    scale, result = "", None
    for clause in spec.replace(";", ",").split(","):
        clause = clause.strip()
        if not clause:
            continue
        if "=" not in clause:
            raise LexiconError(f"bad valence clause {clause!r}", *where)
        key, value = clause.split("=", 1)
        key, value = key.strip(), value.strip()
        if key == "scale":
            scale = value
            continue
        if key == "result":
            try:
                result = int(value)
            except ValueError:
                raise LexiconError(f"bad result state {value!r}", *where) from None
            continue
        kinds = frozenset() if value == "-" else frozenset(value.split("|"))
        for k in kinds:
            if k != "any" and k not in SEMANTIC_KINDS:
                raise LexiconError(f"unknown kind {k!r} in valence", *where)
        if key in ("subj", "dobj", "iobj"):
            constraints.append(FactorConstraint(key, kinds))
        elif key.startswith("prep:"):
            constraints.append(FactorConstraint("prep", kinds, key[5:]))
        else:
            raise LexiconError(f"unknown valence slot {key!r}", *where)
    return tuple(constraints), scale, result


# Irregular verb forms: lemma -> (past, past participle).  Third-singular and
# -ing forms of these lemmas follow the regular rules unless listed in
# _IRREGULAR_EXTRA.
IRREGULAR_VERBS = {
    "be": ("was were", "been"),
    "have": ("had", "had"),
    "do": ("did", "done"),
    "go": ("went", "gone"),
    "see": ("saw", "seen"),
    "take": ("took", "taken"),
    "come": ("came", "come"),
    "give": ("gave", "given"),
    "get": ("got", "got gotten"),
    "make": ("made", "made"),
    "say": ("said", "said"),
    "tell": ("told", "told"),
    "know": ("knew", "known"),
    "think": ("thought", "thought"),
    "write": ("wrote", "written"),
    "read": ("read", "read"),
    "shoot": ("shot", "shot"),
    "stand": ("stood", "stood"),
    "lie": ("lay", "lain"),
    "find": ("found", "found"),
    "leave": ("left", "left"),
    "buy": ("bought", "bought"),
    "bring": ("brought", "brought"),
    "begin": ("began", "begun"),
    "break": ("broke", "broken"),
    "eat": ("ate", "eaten"),
    "fall": ("fell", "fallen"),
    "feel": ("felt", "felt"),
    "fight": ("fought", "fought"),
    "fly": ("flew", "flown"),
    "hear": ("heard", "heard"),
    "hold": ("held", "held"),
    "keep": ("kept", "kept"),
    "lose": ("lost", "lost"),
    "meet": ("met", "met"),
    "pay": ("paid", "paid"),
    "put": ("put", "put"),
    "run": ("ran", "run"),
    "sell": ("sold", "sold"),
    "send": ("sent", "sent"),
    "sit": ("sat", "sat"),
    "sleep": ("slept", "slept"),
    "speak": ("spoke", "spoken"),
    "spend": ("spent", "spent"),
    "steal": ("stole", "stolen"),
    "teach": ("taught", "taught"),
    "understand": ("understood", "understood"),
    "wake": ("woke", "woken"),
    "win": ("won", "won"),
    "sink": ("sank", "sunk"),
    "become": ("became", "become"),
    "build": ("built", "built"),
    "catch": ("caught", "caught"),
    "drive": ("drove", "driven"),
    "drink": ("drank", "drunk"),
    "hit": ("hit", "hit"),
    "hurt": ("hurt", "hurt"),
    "ride": ("rode", "ridden"),
    "rise": ("rose", "risen"),
    "strike": ("struck", "struck"),
    "swim": ("swam", "swum"),
    "die": ("died", "died"),
}

# surface -> (lemma, verb_form, person_feature) for forms the rules miss
_IRREGULAR_EXTRA = {
    "am": ("be", "base", "first"),
    "are": ("be", "base", "second"),
    "is": ("be", "thirdsing", "third"),
    "be": ("be", "base", "none"),
    "being": ("be", "ing", "none"),
    "has": ("have", "thirdsing", "third"),
    "does": ("do", "thirdsing", "third"),
    "goes": ("go", "thirdsing", "third"),
    "lying": ("lie", "ing", "none"),
    "dying": ("die", "ing", "none"),
}

# Lemmas whose forms also serve as auxiliaries.
AUXILIARY_LEMMAS = ("be", "have", "do")

_VOWELS = set("aeiou")


def _doubles_final(lemma: str) -> bool:
    """CVC-final short stems double their last consonant (stop -> stopped)."""
    return (
        len(lemma) >= 3
        and lemma[-1] not in _VOWELS | set("wxy")
        and lemma[-2] in _VOWELS
        and lemma[-3] not in _VOWELS
        and len([c for c in lemma if c in _VOWELS]) == 1
    )


def inflect(lemma: str, form: str) -> str:
    """Regular inflection of a verb lemma (or -s plural of a noun)."""
    if form in ("thirdsing", "plur"):
        if lemma.endswith(("s", "x", "z", "ch", "sh", "o")):
            return lemma + "es"
        if lemma.endswith("y") and lemma[-2:-1] not in _VOWELS:
            return lemma[:-1] + "ies"
        return lemma + "s"
    if form in ("past", "pastpart"):
        if lemma.endswith("e"):
            return lemma + "d"
        if lemma.endswith("y") and lemma[-2:-1] not in _VOWELS:
            return lemma[:-1] + "ied"
        if _doubles_final(lemma):
            return lemma + lemma[-1] + "ed"
        return lemma + "ed"
    if form == "ing":
        if lemma.endswith("ie"):
            return lemma[:-2] + "ying"
        if lemma.endswith("e") and not lemma.endswith(("ee", "ye", "oe")):
            return lemma[:-1] + "ing"
        if _doubles_final(lemma):
            return lemma + lemma[-1] + "ing"
        return lemma + "ing"
    if form == "base":
        return lemma
    raise ValueError(f"cannot inflect for {form!r}")


def _stem_candidates(word: str) -> Iterator[tuple]:
    """Yield (candidate lemma, form) pairs by suffix stripping."""
    if word.endswith("ies") and len(word) > 4:
        yield word[:-3] + "y", "s"
    if word.endswith("es") and len(word) > 3:
        yield word[:-2], "s"
    if word.endswith("s") and not word.endswith("ss") and len(word) > 2:
        yield word[:-1], "s"
    if word.endswith("ied") and len(word) > 4:
        yield word[:-3] + "y", "ed"
    if word.endswith("ed") and len(word) > 3:
        yield word[:-2], "ed"
        yield word[:-1], "ed"
        if len(word) > 4 and word[-3] == word[-4]:
            yield word[:-3], "ed"
    if word.endswith("ing") and len(word) > 4:
        yield word[:-3], "ing"
        yield word[:-3] + "e", "ing"
        if len(word) > 5 and word[-4] == word[-5]:
            yield word[:-4], "ing"


class Lexicon:
    """In-memory dictionaries; immutable once built."""

    def __init__(self, entries: Iterable[LexEntry] = (),
                 senses: Iterable[VerbSense] = ()):
        self._entries = tuple(entries)
        senses = tuple(senses)
        self._senses = tuple(
            VerbSense(s.lemma, s.particle, s.semantic_type, s.target_kind,
                      s.valence, s.scale, s.result_state, index=i)
            for i, s in enumerate(senses)
        )
        self._by_surface: dict = {}
        for entry in self._entries:
            self._by_surface.setdefault(entry.surface, []).append(entry)
        self._senses_by_lemma: dict = {}
        for sense in self._senses:
            self._senses_by_lemma.setdefault(sense.lemma, []).append(sense)
        self._noun_lemmas: dict = {}
        for entry in self._entries:
            if entry.pos == "noun" and entry.features.number != "plur":
                self._noun_lemmas.setdefault(entry.surface, []).append(entry)
        self._irregular = self._build_irregular_table()
        self._cache: dict = {}

    def _build_irregular_table(self) -> dict:
        table: dict = {}
        for lemma, (pasts, parts) in IRREGULAR_VERBS.items():
            if lemma not in self._senses_by_lemma:
                continue
            for past in pasts.split():
                table.setdefault(past, []).append((lemma, "past", "none"))
            for part in parts.split():
                table.setdefault(part, []).append((lemma, "pastpart", "none"))
        for surface, (lemma, form, person) in _IRREGULAR_EXTRA.items():
            if lemma in self._senses_by_lemma:
                table.setdefault(surface, []).append((lemma, form, person))
        return table

    def __len__(self) -> int:
        return len(self._entries) + len(self._senses)

    @property
    def entries(self) -> tuple:
        return self._entries

    @property
    def senses(self) -> tuple:
        return self._senses

    def verb_lemmas(self) -> list:
        return list(self._senses_by_lemma)

    def _verb_entries(self, surface: str, lemma: str, form: str,
                      person: str = "none") -> list:
        if form == "thirdsing":
            person = "third"
        feats = FeatureSet("none", form, person)
        result = []
        if lemma in AUXILIARY_LEMMAS:
            result.append(LexEntry(surface, "auxiliary", lemma, feats))
        result.append(LexEntry(surface, "verb", lemma, feats))
        return result

    def lookup(self, surface: str) -> list:
        """All analyses of ``surface``; empty for unknown words."""
        word = surface.lower()
        cached = self._cache.get(word)
        if cached is not None:
            return list(cached)
        result = list(self._by_surface.get(word, ()))
        if word.isdigit():
            result.append(LexEntry(word, "numeral", word))
        result.extend(self._verb_analyses(word))
        result.extend(self._plural_noun_analyses(word))
        seen = set()
        unique = []
        for entry in result:
            if entry not in seen:
                seen.add(entry)
                unique.append(entry)
        self._cache[word] = tuple(unique)
        return unique

    def _verb_analyses(self, word: str) -> list:
        result = []
        irregular = self._irregular.get(word, ())
        for lemma, form, person in irregular:
            result.extend(self._verb_entries(word, lemma, form, person))
        if word in self._senses_by_lemma and word not in _IRREGULAR_EXTRA:
            result.extend(self._verb_entries(word, word, "base"))
        for lemma, suffix in _stem_candidates(word):
            if lemma not in self._senses_by_lemma:
                continue
            if suffix == "s":
                if inflect(lemma, "thirdsing") == word:
                    result.extend(self._verb_entries(word, lemma, "thirdsing"))
            elif suffix == "ed":
                if lemma in IRREGULAR_VERBS:
                    continue
                if inflect(lemma, "past") == word:
                    result.extend(self._verb_entries(word, lemma, "past"))
                    result.extend(self._verb_entries(word, lemma, "pastpart"))
            elif suffix == "ing":
                if inflect(lemma, "ing") == word:
                    result.extend(self._verb_entries(word, lemma, "ing"))
        return result

    def _plural_noun_analyses(self, word: str) -> list:
        result = []
        for lemma, suffix in _stem_candidates(word):
            if suffix != "s":
                continue
            for entry in self._noun_lemmas.get(lemma, ()):
                if entry.has("proper") or entry.has("noplural"):
                    continue
                if inflect(lemma, "plur") != word and lemma + "s" != word:
                    continue
                feats = FeatureSet("plur", "none", entry.features.person_feature,
                                   entry.features.flags)
                result.append(LexEntry(word, "noun", entry.lemma, feats,
                                       entry.semcode))
        return result

    def verb_senses(self, lemma: str, particle: Optional[str] = None) -> list:
        """Senses of ``lemma`` in dictionary order, filtered by particle."""
        senses = self._senses_by_lemma.get(lemma, ())
        if particle is None:
            return [s for s in senses if s.particle is None] or list(senses)
        return [s for s in senses if s.particle == particle]

    def particles(self, lemma: str) -> frozenset:
        return frozenset(s.particle for s in self._senses_by_lemma.get(lemma, ())
                         if s.particle)

    def declared_prepositions(self, lemma: str) -> frozenset:
        preps = set()
        for sense in self._senses_by_lemma.get(lemma, ()):
            preps |= sense.prepositions
        return frozenset(preps)


def _read_rows(path: Path) -> Iterator[tuple]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line_no, line.split("\t")


def _noun_entry(cols: list, where: tuple) -> LexEntry:
    if len(cols) != 5:
        raise LexiconError(f"expected 5 columns, got {len(cols)}", *where)
    surface, pos, lemma, feats, code = (c.strip() for c in cols)
    try:
        return LexEntry(surface, pos, lemma, FeatureSet.parse(feats),
                        SemanticCode(code))
    except ValueError as exc:
        raise LexiconError(str(exc), *where) from None


def _closed_entry(cols: list, where: tuple) -> LexEntry:
    if len(cols) != 4:
        raise LexiconError(f"expected 4 columns, got {len(cols)}", *where)
    surface, pos, lemma, feats = (c.strip() for c in cols)
    if pos == "noun":
        raise LexiconError("nouns belong in nouns.dict", *where)
    try:
        return LexEntry(surface, pos, lemma, FeatureSet.parse(feats))
    except ValueError as exc:
        raise LexiconError(str(exc), *where) from None


def _verb_sense(cols: list, where: tuple) -> VerbSense:
    if len(cols) != 5:
        raise LexiconError(f"expected 5 columns, got {len(cols)}", *where)
    lemma, particle, stype, target, valence = (c.strip() for c in cols)
    if not lemma or lemma != lemma.lower():
        raise LexiconError(f"bad verb lemma {lemma!r}", *where)
    if target not in TARGET_KINDS:
        raise LexiconError(f"unknown target kind {target!r}", *where)
    if not stype or stype != stype.upper():
        raise LexiconError(f"bad semantic type {stype!r}", *where)
    constraints, scale, result = _parse_valence(valence, where)
    return VerbSense(lemma, None if particle in ("", "-") else particle,
                     stype, target, constraints, scale, result)


def load_dictionaries(dir_path) -> Lexicon:
    """Load ``nouns.dict``, ``verbs.dict`` and ``closed.dict`` from a directory."""
    root = Path(dir_path)
    if not root.is_dir():
        raise LexiconError(f"dictionary directory not found: {root}")
    present = [name for name in DICT_FILES if (root / name).is_file()]
    if not present:
        raise LexiconError("no dictionaries found", str(root))
    for name in DICT_FILES:
        if name not in present:
            raise LexiconError(f"missing dictionary file {name}", str(root / name))
    entries, senses = [], []
    for line_no, cols in _read_rows(root / "nouns.dict"):
        entries.append(_noun_entry(cols, (str(root / "nouns.dict"), line_no)))
    for line_no, cols in _read_rows(root / "closed.dict"):
        entries.append(_closed_entry(cols, (str(root / "closed.dict"), line_no)))
    for line_no, cols in _read_rows(root / "verbs.dict"):
        senses.append(_verb_sense(cols, (str(root / "verbs.dict"), line_no)))
    return Lexicon(entries, senses)


def default_dict_dir() -> Path:
    """``./data/dict`` when present, else the seed dictionaries shipped here."""
    local = Path(os.getcwd()) / "data" / "dict"
    if local.is_dir():
        return local
    return Path(__file__).parent / "data" / "dict"


_default: Optional[Lexicon] = None


def seed_lexicon() -> Lexicon:
    """The shipped seed lexicon, loaded once."""
    global _default
    if _default is None:
        _default = load_dictionaries(Path(__file__).parent / "data" / "dict")
    return _default
