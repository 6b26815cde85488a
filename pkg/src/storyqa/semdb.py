"""Typed fact records, wildcard queries and the textual dump format.

Records live in a single flat store keyed by code.  Codes are unique across
all kinds, allocated from 1 upwards; 0 is the null reference and ``""`` the
null string value.  Every code-typed field is checked against the store on
insert (referential integrity), and enumerated fields against their domains.
"""

from __future__ import annotations

import contextlib
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Optional

__all__ = [
    "SCHEMAS",
    "FieldSpec",
    "Record",
    "SemanticDB",
    "QueryPattern",
    "WILDCARD",
    "IntegrityError",
    "PatternError",
    "DumpError",
    "alpha_equivalent",
    "dump",
    "load",
]


class IntegrityError(Exception):
    """A record violates referential integrity or a field domain."""


class PatternError(Exception):
    """A query pattern names a kind or field the schema does not have."""


class DumpError(Exception):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class FieldSpec:
    name: str
    type: str = "str"          # "str", "code" or "int"
    targets: tuple = ()        # acceptable kinds for code fields; () = any kind
    domain: tuple = ()         # acceptable values for enumerated str fields

    @property
    def default(self):
        return "" if self.type == "str" else 0


def _s(name, domain=()):
    return FieldSpec(name, "str", domain=tuple(domain))


def _c(name, *targets):
    return FieldSpec(name, "code", targets=tuple(targets))


def _i(name):
    return FieldSpec(name, "int")


TENSES = ("pres", "past", "fut", "futpast", "mod")
TENSE_TYPES = ("indef", "perf", "cont", "perfcont", "indpassiv", "perfpasiv")
SORTS = ("real", "sup")
SEXES = ("m", "f", "")
NORMATIVE_SCALES = ("health", "hunger", "condition")
SCALE_BOUND = 100

_ACTION_CORE = (
    _s("semantic_type"),
    _s("sort", SORTS),
    _s("negation", ("not", "")),
    _s("tense", TENSES),
    _s("tense_type", TENSE_TYPES),
    _s("adverb"),
    _s("verb"),
)

_ACTION_LINKS = (
    _c("directed_from", "person", "organization"),
    _c("directed_to", "person", "organization", "animal"),
    _s("result_state"),
    _c("start_time", "tim"),
    _c("start_location", "place"),
    _c("final_location", "place"),
    _c("tool", "machine", "thing"),
    _c("purpose"),
    _s("clause_role", ("main", "sub")),
    _c("linkage", "cadr"),
    _i("sentence_ordinal"),
)

_ENTITY = ("person", "machine", "thing", "organization", "animal", "place",
           "project", "abstr", "event", "tim")


def _action_like():
    return (
        *_ACTION_CORE,
        _c("subject"),
        _c("object_of_influence"),
        *_ACTION_LINKS,
    )


# Field layouts (code excluded; it is always the first column).
SCHEMAS: dict = {
    "person": (
        _s("designation"), _s("sex", SEXES), _s("first_name"), _s("last_name"),
        _s("additional_data"), _c("place_of_birth", "place"), _s("nationality"),
        _s("mother_tongue"), _s("other_tongue"), _c("place_of_residence", "place"),
        _s("face"), _s("nose"), _s("constitution"), _s("eyes"), _s("hair"),
        _c("date_of_birth", "tim"), _s("stature"), _s("temperament"),
        _s("psychological_type"), _s("profession"),
    ),
    "action": _action_like(),
    "message": _action_like(),
    "intelligence": _action_like(),
    "job": _action_like(),
    "event": (
        _s("sort", SORTS), _c("subject", *_ENTITY), _s("designation"), _s("scale"),
        _c("time", "tim"), _i("starting_state"), _i("result_state"),
        _c("location", "place"), _c("way_tool", "machine", "thing"),
        _c("object_of_influence"), _s("tense", TENSES + ("",)),
    ),
    "machine": (
        _s("designation"), _s("noun"), _s("name"), _s("size"), _s("color"),
        _s("condition"), _c("owner", "person", "organization"),
        _c("location", "place"), _c("built", "tim"),
    ),
    "tim": (
        _s("designation"), _s("unit"), _s("year"), _s("month"), _s("day"),
        _s("weekday"), _s("hour"), _s("minute"), _s("season"), _s("part_of_day"),
    ),
    "cause": (
        _s("cause_word"), _s("reserved_a"), _s("reserved_b"), _c("number", "number"),
        _s("reserved_c"), _c("time", "tim"),
    ),
    "number": (
        _s("value_word"), _s("reserved_a"), _s("reserved_b"), _c("referent"),
    ),
    "cadr": (_i("story"), _i("reserved_a"), _i("reserved_b"), _i("sentence_ordinal")),
    "organization": (
        _s("designation"), _s("name"), _s("type"), _c("place", "place"),
    ),
    "project": (_s("designation"), _s("name"), _c("organization", "organization")),
    "place": (_s("designation"), _s("name"), _s("kind")),
    "thing": (
        _s("designation"), _s("noun"), _s("name"), _s("size"), _s("color"),
        _s("condition"), _c("owner", "person", "organization"), _c("location", "place"),
    ),
    "animal": (
        _s("designation"), _s("noun"), _s("name"), _s("size"), _s("color"),
        _c("owner", "person", "organization"),
    ),
    "relation": (_s("type"), _c("left"), _c("right")),
    "abstr": (_s("designation"), _s("noun")),
}

KINDS = tuple(SCHEMAS)
CLAUSE_KINDS = ("action", "message", "intelligence", "job", "event")
_FIELD_INDEX = {kind: {f.name: f for f in fields} for kind, fields in SCHEMAS.items()}


def field_names(kind: str) -> tuple:
    return tuple(f.name for f in SCHEMAS[kind])


def field_spec(kind: str, name: str) -> FieldSpec:
    try:
        return _FIELD_INDEX[kind][name]
    except KeyError:
        raise PatternError(f"{kind} has no field {name!r}") from None


class Record:
    """A predicate instance: a kind, a code and the kind's named fields."""

    __slots__ = ("kind", "code", "_values")

    def __init__(self, kind: str, code: int = 0, /, **values):
        if kind not in SCHEMAS:
            raise IntegrityError(f"unknown record kind {kind!r}")
        unknown = set(values) - set(_FIELD_INDEX[kind])
        if unknown:
            raise IntegrityError(f"{kind} has no field(s) {', '.join(sorted(unknown))}")
        self.kind = kind
        self.code = code
        self._values = tuple(values.get(f.name, f.default) for f in SCHEMAS[kind])

    @classmethod
    def from_values(cls, kind: str, code: int, values: Iterable) -> "Record":
        values = tuple(values)
        if len(values) != len(SCHEMAS[kind]):
            raise IntegrityError(
                f"{kind} takes {len(SCHEMAS[kind])} fields, got {len(values)}")
        rec = cls(kind, code)
        rec._values = values
        return rec

    @property
    def values(self) -> tuple:
        return self._values

    def __getitem__(self, name: str):
        if name == "code":
            return self.code
        return self._values[_index(self.kind, name)]

    def get(self, name: str, default=None):
        try:
            return self[name]
        except (KeyError, PatternError):
            return default

    def as_dict(self) -> dict:
        return {f.name: v for f, v in zip(SCHEMAS[self.kind], self._values)}

    def replace(self, **changes) -> "Record":
        data = self.as_dict()
        data.update(changes)
        return Record(self.kind, self.code, **data)

    def with_code(self, code: int) -> "Record":
        return Record.from_values(self.kind, code, self._values)

    def references(self) -> Iterator[tuple]:
        """Yield (field name, code) for every non-null code field."""
        for spec, value in zip(SCHEMAS[self.kind], self._values):
            if spec.type == "code" and value:
                yield spec.name, value

    def __eq__(self, other):
        if not isinstance(other, Record):
            return NotImplemented
        return (self.kind, self.code, self._values) == (other.kind, other.code, other._values)

    def __hash__(self):
        return hash((self.kind, self.code, self._values))

    def __repr__(self):
        return format_record(self)


_INDEX_CACHE: dict = {}


def _index(kind: str, name: str) -> int:
    key = (kind, name)
    idx = _INDEX_CACHE.get(key)
    if idx is None:
        names = field_names(kind)
        if name not in names:
            raise PatternError(f"{kind} has no field {name!r}")
        idx = _INDEX_CACHE[key] = names.index(name)
    return idx


def validate_fields(record: Record) -> None:
    """Field-type and domain checks that need no store."""
    for spec, value in zip(SCHEMAS[record.kind], record.values):
        where = f"{record.kind}.{spec.name}"
        if spec.type == "str":
            if not isinstance(value, str):
                raise IntegrityError(f"{where} must be a string, got {value!r}")
            if spec.domain and value not in spec.domain:
                raise IntegrityError(f"{where} = {value!r} not in {spec.domain}")
        else:
            if not isinstance(value, int) or isinstance(value, bool):
                raise IntegrityError(f"{where} must be an integer, got {value!r}")
            if spec.type == "code" and value < 0:
                raise IntegrityError(f"{where} must be a code >= 0")
    if record.kind == "event" and record["scale"] in NORMATIVE_SCALES:
        for name in ("starting_state", "result_state"):
            if abs(record[name]) > SCALE_BOUND:
                raise IntegrityError(
                    f"event.{name} = {record[name]} outside "
                    f"[-{SCALE_BOUND}, {SCALE_BOUND}] for scale {record['scale']!r}")


class _Wildcard:
    def __repr__(self):
        return "_"


WILDCARD = _Wildcard()


@dataclass
class QueryPattern:
    """A record skeleton: field -> exact value, WILDCARD, or nested pattern.

    A nested pattern on a code field matches when the referenced record
    matches it.  Fields left out are unconstrained, like WILDCARD.
    """

    kind: str
    constraints: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise PatternError(f"unknown kind {self.kind!r}")
        for name, value in self.constraints.items():
            spec = field_spec(self.kind, name) if name != "code" else FieldSpec("code", "code")
            if isinstance(value, QueryPattern) and spec.type != "code":
                raise PatternError(f"nested pattern on non-code field {self.kind}.{name}")


class SemanticDB:
    """The fact store.  ``prefix`` names shadow kinds in dumps (``t`` for the KB)."""

    def __init__(self, prefix: str = ""):
        self.prefix = prefix
        self._records: dict = {}
        self._by_kind: dict = defaultdict(list)
        self._next = 1
        self._reserved: set = set()
        self._batch: Optional[list] = None
        self._saved: dict = {}

    # -- storage ---------------------------------------------------------

    def __len__(self):
        return len(self._records)

    def __iter__(self) -> Iterator[Record]:
        return iter(sorted(self._records.values(), key=lambda r: r.code))

    def __contains__(self, code: int) -> bool:
        return code in self._records

    def get(self, code: int) -> Optional[Record]:
        return self._records.get(code)

    def __getitem__(self, code: int) -> Record:
        return self._records[code]

    def records(self, kind: Optional[str] = None) -> list:
        if kind is None:
            return list(self)
        return [self._records[c] for c in sorted(self._by_kind.get(kind, ()))]

    @property
    def next_code(self) -> int:
        return self._next

    def reserve(self) -> int:
        """Allocate a code now, to be filled by ``insert(..., code=)`` later.

        Only valid inside ``batch()``; forward references to reserved codes are
        checked when the batch closes.
        """
        if self._batch is None:
            raise IntegrityError("reserve() outside a batch")
        code = self._next
        self._next += 1
        self._reserved.add(code)
        return code

    def insert(self, record: Record, code: Optional[int] = None) -> int:
        validate_fields(record)
        if self._batch is None:
            self._check_refs(record)
        if code is None:
            code = self._next
            self._next += 1
        elif code in self._reserved:
            self._reserved.discard(code)
        elif code in self._records:
            raise IntegrityError(f"code {code} already in use")
        else:
            if code <= 0:
                raise IntegrityError(f"bad code {code}")
            self._next = max(self._next, code + 1)
        rec = record.with_code(code)
        self._store(rec)
        if self._batch is not None:
            self._batch.append(code)
        return code

    def update(self, code: int, **changes) -> None:
        old = self._records[code]
        new = old.replace(**changes)
        validate_fields(new)
        if self._batch is None:
            self._check_refs(new)
        elif code not in self._batch:
            self._saved.setdefault(code, old)
        self._records[code] = new

    def _store(self, rec: Record) -> None:
        self._records[rec.code] = rec
        self._by_kind[rec.kind].append(rec.code)

    def _check_refs(self, rec: Record) -> None:
        for name, ref in rec.references():
            target = self._records.get(ref)
            if target is None:
                raise IntegrityError(
                    f"{rec.kind}.{name} references missing code {ref}")
            spec = field_spec(rec.kind, name)
            if spec.targets and target.kind not in spec.targets:
                raise IntegrityError(
                    f"{rec.kind}.{name} must reference {'|'.join(spec.targets)}, "
                    f"got {target.kind} {ref}")

    @contextlib.contextmanager
    def batch(self):
        """Insert a group atomically; integrity is checked when it closes."""
        if self._batch is not None:
            yield self
            return
        self._batch = []
        start_next = self._next
        try:
            yield self
            if self._reserved:
                raise IntegrityError(
                    f"reserved codes never filled: {sorted(self._reserved)}")
            for code in (*self._batch, *self._saved):
                self._check_refs(self._records[code])
        except BaseException:
            for code in self._batch:
                rec = self._records.pop(code, None)
                if rec is not None:
                    self._by_kind[rec.kind].remove(code)
            self._records.update(self._saved)
            self._saved = {}
            self._reserved.clear()
            self._next = start_next
            self._batch = None
            raise
        self._saved = {}
        self._batch = None

    # -- queries ---------------------------------------------------------

    def matches(self, record: Record, pattern: QueryPattern) -> bool:
        if record.kind != pattern.kind:
            return False
        for name, want in pattern.constraints.items():
            if want is WILDCARD:
                continue
            have = record.code if name == "code" else record[name]
            if isinstance(want, QueryPattern):
                target = self._records.get(have) if have else None
                if target is None or not self.matches(target, want):
                    return False
            elif have != want:
                return False
        return True

    def query(self, pattern: QueryPattern) -> list:
        return [r for r in self.records(pattern.kind) if self.matches(r, pattern)]

    # -- comparison ------------------------------------------------------

    def multiset(self) -> Counter:
        return Counter((r.kind, r.code, r.values) for r in self._records.values())

    def copy(self) -> "SemanticDB":
        other = SemanticDB(self.prefix)
        for rec in self:
            other._store(rec)
        other._next = self._next
        return other


# -- dump format -----------------------------------------------------------

def _quote(value: str) -> str:
    return '"' + value.replace('"', '""') + '"'


def format_record(rec: Record, prefix: str = "") -> str:
    parts = [str(rec.code)]
    for spec, value in zip(SCHEMAS[rec.kind], rec.values):
        parts.append(_quote(value) if spec.type == "str" else str(value))
    return f"{prefix}{rec.kind}({','.join(parts)})"


def dump(db: SemanticDB) -> str:
    """One record per line in functor syntax, ordered by code."""
    return "".join(format_record(r, db.prefix) + "\n" for r in db)


_LINE = re.compile(r"^\s*([a-z_]+)\((.*)\)\s*$")
_ARG = re.compile(r'\s*(?:"((?:[^"]|"")*)"|(-?\d+))\s*(,|$)')


def _parse_args(text: str, line_no: int) -> list:
    args, pos = [], 0
    while pos < len(text):
        m = _ARG.match(text, pos)
        if not m:
            raise DumpError(f"cannot parse argument at column {pos + 1}", line_no)
        if m.group(1) is not None:
            args.append(m.group(1).replace('""', '"'))
        else:
            args.append(int(m.group(2)))
        pos = m.end()
        if m.group(3) == "" and pos < len(text):
            raise DumpError("trailing characters", line_no)
    return args


def load(text: str, prefix: str = "") -> SemanticDB:
    """Inverse of :func:`dump`; integrity is checked over the whole file."""
    db = SemanticDB(prefix)
    parsed = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = _LINE.match(line)
        if not m:
            raise DumpError(f"malformed record {line.strip()!r}", line_no)
        kind = m.group(1)
        if prefix:
            if not kind.startswith(prefix):
                raise DumpError(f"expected {prefix!r}-prefixed kind, got {kind!r}", line_no)
            kind = kind[len(prefix):]
        if kind not in SCHEMAS:
            raise DumpError(f"unknown kind {kind!r}", line_no)
        args = _parse_args(m.group(2), line_no)
        if not args or not isinstance(args[0], int) or args[0] <= 0:
            raise DumpError("first argument must be a positive code", line_no)
        specs = SCHEMAS[kind]
        if len(args) - 1 != len(specs):
            raise DumpError(
                f"{kind} takes {len(specs) + 1} arguments, got {len(args)}", line_no)
        for spec, value in zip(specs, args[1:]):
            if (spec.type == "str") != isinstance(value, str):
                raise DumpError(f"{kind}.{spec.name}: wrong argument type", line_no)
        parsed.append((line_no, Record.from_values(kind, args[0], args[1:])))
    for line_no, rec in parsed:
        if rec.code in db:
            raise DumpError(f"code {rec.code} already in use", line_no)
        try:
            validate_fields(rec)
        except IntegrityError as exc:
            raise DumpError(str(exc), line_no) from None
        db._store(rec)
    for line_no, rec in parsed:
        try:
            db._check_refs(rec)
        except IntegrityError as exc:
            raise DumpError(str(exc), line_no) from None
    db._next = max((rec.code for _, rec in parsed), default=0) + 1
    return db


# -- alpha-equivalence -----------------------------------------------------

def _plain_signature(rec: Record) -> tuple:
    return (rec.kind, tuple(
        v for spec, v in zip(SCHEMAS[rec.kind], rec.values) if spec.type != "code"))


def _refine(db: SemanticDB, rounds: int) -> dict:
    """Colour refinement: a record's colour summarises its neighbourhood."""
    colour = {r.code: hash(_plain_signature(r)) for r in db}
    incoming: dict = defaultdict(list)
    for r in db:
        for name, ref in r.references():
            incoming[ref].append((name, r.code))
    for _ in range(rounds):
        new = {}
        for r in db:
            out = tuple((name, colour.get(ref)) for name, ref in r.references())
            inc = tuple(sorted((name, colour[src]) for name, src in incoming[r.code]))
            new[r.code] = hash((colour[r.code], out, inc))
        colour = new
    return colour


def alpha_equivalent(a: SemanticDB, b: SemanticDB) -> bool:
    """True iff a code bijection maps a's records onto b's."""
    if len(a) != len(b):
        return False
    if Counter(_plain_signature(r) for r in a) != Counter(_plain_signature(r) for r in b):
        return False
    rounds = min(len(a), 8)
    ca, cb = _refine(a, rounds), _refine(b, rounds)
    if Counter(ca.values()) != Counter(cb.values()):
        return False
    classes: dict = defaultdict(list)
    for r in b:
        classes[cb[r.code]].append(r.code)
    order = sorted((r.code for r in a), key=lambda c: len(classes[ca[c]]))
    mapping: dict = {}
    used: set = set()

    def consistent(code_a: int, code_b: int) -> bool:
        ra, rb = a[code_a], b[code_b]
        for spec, va, vb in zip(SCHEMAS[ra.kind], ra.values, rb.values):
            if spec.type != "code":
                continue
            if (va == 0) != (vb == 0):
                return False
            if va and va in mapping and mapping[va] != vb:
                return False
            if va == code_a and vb != code_b:
                return False
        # references into code_a from already-mapped records
        for src_a, src_b in mapping.items():
            ra2, rb2 = a[src_a], b[src_b]
            for spec, va, vb in zip(SCHEMAS[ra2.kind], ra2.values, rb2.values):
                if spec.type == "code" and (va == code_a) != (vb == code_b):
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        code_a = order[i]
        for code_b in classes[ca[code_a]]:
            if code_b in used or not consistent(code_a, code_b):
                continue
            mapping[code_a] = code_b
            used.add(code_b)
            if search(i + 1):
                return True
            del mapping[code_a]
            used.discard(code_b)
        return False

    return search(0)
