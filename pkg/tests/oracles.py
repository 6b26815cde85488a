"""Independent reference implementations used to check the package.

Nothing here imports the code under test except the record and pattern
containers; the logic is written separately and kept deliberately naive.
"""

import itertools

from storyqa.semdb import WILDCARD, QueryPattern


def naive_match(by_code, rec, pattern):
    if rec.kind != pattern.kind:
        return False
    for name, want in pattern.constraints.items():
        have = rec.code if name == "code" else rec.as_dict()[name]
        if want is WILDCARD:
            continue
        if isinstance(want, QueryPattern):
            target = by_code.get(have)
            if target is None or not naive_match(by_code, target, want):
                return False
        elif have != want:
            return False
    return True


def naive_query(records, pattern):
    by_code = {r.code: r for r in records}
    return sorted((r for r in records if naive_match(by_code, r, pattern)),
                  key=lambda r: r.code)


def brute_alpha_equivalent(a_records, b_records, code_fields):
    """Try every kind-preserving bijection.  Only for small databases.

    ``code_fields(kind)`` returns the names of code-typed fields.
    """
    a_records, b_records = list(a_records), list(b_records)
    if len(a_records) != len(b_records):
        return False
    kinds = sorted({r.kind for r in a_records})
    groups = []
    for kind in kinds:
        xs = [r for r in a_records if r.kind == kind]
        ys = [r for r in b_records if r.kind == kind]
        if len(xs) != len(ys):
            return False
        groups.append((xs, ys))
    b_by_code = {r.code: r for r in b_records}
    per_group = [list(itertools.permutations(ys)) for _, ys in groups]
    for choice in itertools.product(*per_group):
        mapping = {0: 0}
        for (xs, _), ys in zip(groups, choice):
            for x, y in zip(xs, ys):
                mapping[x.code] = y.code
        ok = True
        for x in a_records:
            y = b_by_code[mapping[x.code]]
            refs = code_fields(x.kind)
            for name, value in x.as_dict().items():
                other = y.as_dict()[name]
                if name in refs:
                    if mapping.get(value, -1) != other:
                        ok = False
                        break
                elif value != other:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


MODAL_FUTURE = {"will": "fut", "shall": "fut", "would": "futpast"}
MODAL_OTHER = {"can", "could", "may", "might", "must", "should"}
PAST_WORDS = {"was", "were", "had", "did"}
HAVE_WORDS = {"have", "has", "had"}
BE_WORDS = {"am", "is", "are", "was", "were", "be", "been", "being"}


def tense_oracle(words, main_form):
    """(tense, type) from auxiliary words and the main verb's form.

    Written from English grammar terms: the first finite word carries tense;
    have + participle is perfect, be + -ing is continuous, be + participle is
    passive.
    """
    words = [w.lower() for w in words]
    if words and words[0] in MODAL_FUTURE:
        tense, rest = MODAL_FUTURE[words[0]], words[1:]
    elif words and words[0] in MODAL_OTHER:
        tense, rest = "mod", words[1:]
    else:
        first_past = words[0] in PAST_WORDS if words else main_form == "past"
        tense, rest = ("past" if first_past else "pres"), words
        if rest and rest[0] in ("do", "does", "did"):
            rest = rest[1:]
    perfect = bool(rest) and rest[0] in HAVE_WORDS
    be_after = rest[1:] if perfect else rest
    has_be = bool(be_after) and be_after[0] in BE_WORDS
    if not rest:
        kind = "indef"
    elif perfect and not has_be:
        kind = "perf"
    elif has_be and main_form == "ing":
        kind = "perfcont" if perfect else "cont"
    elif has_be and main_form == "pastpart":
        kind = "perfpasiv" if perfect else "indpassiv"
    else:
        raise ValueError(f"not a tense chain: {words} + {main_form}")
    return tense, kind


# The reference listing for the golden sentence, by named field.  Only the
# fields it fixes are given; codes are symbolic names resolved by the test.
GOLDEN_RECORDS = {
    "brown": ("person", {"sex": "m", "last_name": "Brown", "profession": "mate"}),
    "mate": ("person", {"designation": "mate", "profession": "mate"}),
    "ship": ("machine", {"noun": "ship"}),
    "years": ("tim", {"unit": "years"}),
    "action": ("action", {"semantic_type": "IS", "tense": "past", "tense_type": "indef",
                          "verb": "be", "subject": "@brown", "object_of_influence": "@mate",
                          "start_time": "@years", "clause_role": "main",
                          "linkage": "@cadr", "sentence_ordinal": 1}),
    "cause": ("cause", {"cause_word": "ago", "number": "@number", "time": "@years"}),
    "number": ("number", {"value_word": "fifteen", "referent": "@years"}),
    "cadr": ("cadr", {"sentence_ordinal": 1}),
}


def resolve_golden(db):
    """Bind each symbolic golden record to a database code, or raise.

    Plain backtracking over same-kind records; references are checked once
    every name they mention is bound.
    """
    names = list(GOLDEN_RECORDS)
    records = list(db)
    binding = {}

    def ready(name):
        return all(not (isinstance(v, str) and v.startswith("@")) or v[1:] in binding
                   for v in GOLDEN_RECORDS[name][1].values())

    def search(i):
        if i == len(names):
            return all(_golden_fits(binding, n) for n in names)
        name = names[i]
        for rec in records:
            if rec.kind != GOLDEN_RECORDS[name][0] or rec in binding.values():
                continue
            binding[name] = rec
            if all(_golden_fits(binding, n) for n in binding if ready(n)) and search(i + 1):
                return True
            del binding[name]
        return False

    if not search(0):
        raise AssertionError("no binding of the golden listing fits the database")
    return {n: r.code for n, r in binding.items()}


def _golden_fits(binding, name):
    kind, fields = GOLDEN_RECORDS[name]
    rec = binding[name]
    if rec.kind != kind:
        return False
    for field, want in fields.items():
        if isinstance(want, str) and want.startswith("@"):
            want = binding[want[1:]].code
        if rec.as_dict()[field] != want:
            return False
    return True


def who_was_oracle(db, noun):
    """Persons linked by a 'be' clause to a person designated ``noun``."""
    names = []
    for rec in db:
        if rec.kind != "action" or rec["verb"] != "be":
            continue
        obj = db.get(rec["object_of_influence"])
        subj = db.get(rec["subject"])
        if obj is not None and obj.kind == "person" and obj["designation"] == noun:
            names.append(" ".join(filter(None, (subj["additional_data"], subj["first_name"],
                                               subj["last_name"]))))
    return names
