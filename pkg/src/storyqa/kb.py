"""Knowledge base of frame articles.

An article opens with ``frame is <description>`` and runs to the next blank
line.  Noun frames list functions ("doctor examines a person") and structure
("A car consists of chassis, engine,..."); verb frames list definitions,
component actions and motives ("... as <condition>"); operation frames list
``alternative <n> ; <stage>`` lines.  Every body line keeps its verbatim
source next to the shadow records it was mapped to.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .lexicon import FactorConstraint, Lexicon
from .parser import NT, ParseError, ParseNode, Parser, tokenize
from .semdb import IntegrityError, Record, SemanticDB
from .semmap import FactorSet, MappingError, SemanticMapper, _np_kind, map_first, score_sense

__all__ = [
    "FrameEntry",
    "Frame",
    "FrameFormatError",
    "FrameNotFound",
    "KnowledgeBase",
    "default_kb_path",
]

log = logging.getLogger(__name__)

ROLES = ("function", "structure_part", "definition", "sub_action", "motive", "stage")
HEADER = re.compile(r"^\s*frame\s+is\s+(.+?)\s*$", re.IGNORECASE)
STAGE = re.compile(r"^\s*alternative\s+(\d+)\s*;\s*(.+?)\s*$", re.IGNORECASE)
STRUCTURE = re.compile(r"^(.*?)\bconsists\s+of\b(.*)$", re.IGNORECASE)
CONDITION = re.compile(r"\s+as\s+")


class FrameFormatError(ValueError):
    def __init__(self, message: str, line: str = ""):
        super().__init__(f"{message}: {line!r}" if line else message)
        self.line = line


class FrameNotFound(KeyError):
    def __str__(self):
        return f"no frame for {self.args[0]!r}"


@dataclass
class FrameEntry:
    role: str
    text: str
    source: str
    parsed: tuple = ()
    alternative_no: int = 0
    condition: Optional[str] = None
    warning: str = ""

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown frame entry role {self.role!r}")
        if self.role == "stage" and self.alternative_no < 1:
            raise ValueError("stage entries need an alternative number >= 1")

    def render(self) -> str:
        return self.text


@dataclass
class Frame:
    head: str
    kind: str                       # noun, verb or operation
    entries: list = field(default_factory=list)
    lemma: str = ""
    particle: Optional[str] = None
    constraints: tuple = ()         # qualifier factors of the head, as constraints
    header: str = ""
    body: list = field(default_factory=list)   # verbatim body lines

    @property
    def key(self) -> str:
        return _normalize(self.head)

    def by_role(self, role: str) -> list:
        return [e for e in self.entries if e.role == role]

    @property
    def functions(self) -> list:
        return self.by_role("function")

    @property
    def motives(self) -> list:
        return self.by_role("motive")


def _normalize(text: str) -> str:
    text = " ".join(text.lower().split())
    return text[3:] if text.startswith("to ") else text


def default_kb_path() -> Path:
    return Path(__file__).parent / "data" / "kb" / "frames.kb"


def split_articles(text: str) -> list:
    """Split frame-file text into articles (lists of non-blank lines)."""
    articles, current = [], []
    for line in text.splitlines():
        if line.strip():
            current.append(line.rstrip())
        elif current:
            articles.append(current)
            current = []
    if current:
        articles.append(current)
    return articles


class KnowledgeBase:
    """Frames plus their shadow records (kinds printed with a ``t`` prefix)."""

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon
        self.db = SemanticDB(prefix="t")
        self.frames: list = []
        self.warnings: list = []
        self._mapper = SemanticMapper(self.db, lexicon, linkage=False)

    # -- loading ---------------------------------------------------------

    def load_text(self, text: str) -> list:
        frames = [self.ingest_frame("\n".join(lines)) for lines in split_articles(text)]
        return frames

    def load_file(self, path) -> list:
        return self.load_text(Path(path).read_text(encoding="utf-8"))

    def ingest_frame(self, article_text: str) -> Frame:
        lines = [l.rstrip() for l in article_text.splitlines() if l.strip()]
        if not lines:
            raise FrameFormatError("empty article")
        m = HEADER.match(lines[0])
        if not m:
            raise FrameFormatError("article must start with 'frame is <description>'", lines[0])
        head = " ".join(m.group(1).split())
        body = lines[1:]
        frame = Frame(head=head, kind=self._frame_kind(head, body), header=lines[0])
        if frame.kind != "noun":
            self._qualify(frame)
        for line in body:
            frame.entries.extend(self._entries(frame, line))
            frame.body.append(line)
        self.frames.append(frame)
        return frame

    def _frame_kind(self, head: str, body: list) -> str:
        if any(STAGE.match(l) for l in body):
            return "operation"
        words = head.lower().split()
        analyses = self.lexicon.lookup(words[0])
        if any(a.pos == "verb" for a in analyses) and not (
                len(words) == 1 and any(a.pos == "noun" for a in analyses)):
            return "verb"
        if any(a.pos in ("noun", "determiner", "numeral", "adjective") for a in analyses):
            return "noun"
        raise FrameFormatError("frame head is neither a noun nor a verb", head)

    def _qualify(self, frame: Frame) -> None:
        """Key a verb head by lemma, particle and qualifier factors."""
        tree = self._parse_infinitive(f"to {frame.head}")
        if tree is None:
            raise FrameFormatError("cannot parse frame head", frame.head)
        constraints = []
        for child in tree.children[1:]:
            if not isinstance(child, ParseNode):
                if child.label == "verb":
                    frame.lemma = child.lemma
                else:
                    frame.particle = child.lemma
                continue
            for node in child.nodes():
                if node.label == NT.DIRECT and node.child(NT.NOUN_PHRASE) is not None:
                    constraints.append(FactorConstraint(
                        "dobj", frozenset({_np_kind(node.children[0])})))
                elif node.label in (NT.PREPOSITIONAL, NT.SIMPLE_ADVERBIAL):
                    leaves = [c for c in node.children if not isinstance(c, ParseNode)]
                    nps = [c for c in node.children if isinstance(c, ParseNode)]
                    if leaves and nps and leaves[-1].label == "preposition":
                        constraints.append(FactorConstraint(
                            "prep", frozenset({_np_kind(nps[0])}), leaves[-1].lemma))
        frame.constraints = tuple(constraints)

    # -- body lines ------------------------------------------------------

    def _tokens(self, text: str) -> list:
        sentences = tokenize(text, self.lexicon)
        return [t for s in sentences for t in s]

    def _parse_infinitive(self, text: str) -> Optional[ParseNode]:
        try:
            return Parser(self.lexicon).parse_infinitive(self._tokens(text))
        except ParseError:
            return None

    def _map_action(self, text: str) -> tuple:
        """Parse an infinitive or a declarative line and map it; return codes."""
        tokens = self._tokens(text)
        what = "infinitive" if tokens and tokens[0].lower == "to" else "declarative"
        _, codes = map_first(Parser(self.lexicon), tokens, self._mapper, what)
        return tuple(codes)

    def _entries(self, frame: Frame, line: str) -> list:
        text = line.strip()
        stage = STAGE.match(text)
        if stage:
            return [self._stage(int(stage.group(1)), stage.group(2), line)]
        structure = STRUCTURE.match(text)
        if structure:
            return self._structure(structure.group(1), structure.group(2), line)
        condition = None
        parts = CONDITION.split(text, maxsplit=1)
        if frame.kind == "noun":
            role = "function"
        elif len(parts) == 2:
            role, text, condition = "motive", parts[0], parts[1]
        else:
            role = "definition" if frame.constraints else "sub_action"
        try:
            codes = self._map_action(text)
        except (ParseError, MappingError, IntegrityError) as exc:
            raise FrameFormatError(f"cannot analyse body line ({exc})", line) from None
        return [FrameEntry(role, text, line, codes, condition=condition)]

    def _stage(self, number: int, text: str, line: str) -> FrameEntry:
        try:
            codes = self._map_action(text)
            warning = ""
        except (ParseError, MappingError, IntegrityError) as exc:
            codes, warning = (), f"stage kept as text only: {exc}"
            log.warning("%s: %s", text, warning)
            self.warnings.append((text, warning))
        return FrameEntry("stage", text, line, codes, alternative_no=number, warning=warning)

    def _structure(self, whole: str, rest: str, line: str) -> list:
        names = [p.strip().rstrip(".").strip() for p in rest.split(",")]
        names = [n for n in names if n]
        try:
            owner = self._map_phrase(whole)
            entries = []
            for name in names:
                part = self._map_phrase(name)
                with self.db.batch():
                    rel = self.db.insert(Record("relation", type="part", left=owner, right=part))
                entries.append(FrameEntry("structure_part", name, line, (rel, part)))
        except (ParseError, MappingError, IntegrityError) as exc:
            raise FrameFormatError(f"cannot analyse structure line ({exc})", line) from None
        return entries

    def _map_phrase(self, text: str) -> int:
        tokens = self._tokens(text)
        node, used = Parser(self.lexicon).parse_noun_phrase(tokens)
        if used != len(tokens):
            raise ParseError(f"trailing words after noun phrase in {text!r}")
        return self._mapper.map_phrase(node)

    # -- lookup ----------------------------------------------------------

    def frame_lookup(self, head: str, qualifier: Optional[FactorSet] = None) -> Frame:
        key = _normalize(head)
        for frame in self.frames:
            if frame.key == key:
                return frame
        words = key.split()
        if not words:
            raise FrameNotFound(head)
        lemmas = {a.lemma for a in self.lexicon.lookup(words[0]) if a.pos == "verb"}
        particle = words[1] if len(words) > 1 else None
        candidates = [f for f in self.frames if f.kind != "noun" and f.lemma in lemmas
                      and (particle is None or f.particle == particle)]
        best, best_score = None, -1
        for frame in candidates:
            satisfied, violated = score_sense(frame.constraints, qualifier or FactorSet())
            if not violated and satisfied > best_score:
                best, best_score = frame, satisfied
        if best is None:
            raise FrameNotFound(head)
        return best

    def operation_alternatives(self, goal: str) -> list:
        """Stage lists of every alternative for ``goal``, by alternative number."""
        key = _normalize(goal)
        groups: dict = {}
        for frame in self.frames:
            if frame.key == key:
                for entry in frame.by_role("stage"):
                    groups.setdefault(entry.alternative_no, []).append(entry)
        if not groups:
            raise FrameNotFound(goal)
        return [groups[n] for n in sorted(groups)]

    # -- output ----------------------------------------------------------

    def serialize(self, frames: Optional[Iterable[Frame]] = None) -> str:
        blocks = []
        for frame in frames if frames is not None else self.frames:
            blocks.append("\n".join([frame.header or f"frame is {frame.head}", *frame.body]))
        return "\n\n".join(blocks) + ("\n" if blocks else "")
