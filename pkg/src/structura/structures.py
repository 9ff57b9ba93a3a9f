"""Finite relational structures.

A :class:`Structure` is an immutable value: every mutation primitive returns a
new structure and leaves the argument untouched, so game positions can share
unmodified ancestors freely.

Elements are opaque hashable identifiers (``int`` or identifier-like ``str``).
Fresh elements are integers, one above the largest integer already present.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

Element = Union[int, str]
Tuple_ = Tuple[Element, ...]


class StructureError(ValueError):
    pass


class UnknownRelation(StructureError):
    pass


class ArityMismatch(StructureError):
    pass


class ElementNotInDomain(StructureError):
    pass


class SignatureMismatch(StructureError):
    pass


class StructureSyntaxError(StructureError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def element_key(e: Element):
    """Total order on mixed int/str elements: ints first."""
    return (0, e, "") if isinstance(e, int) else (1, 0, e)


def sorted_elements(elems: Iterable[Element]) -> list:
    return sorted(elems, key=element_key)


def tuple_key(t: Tuple_):
    return tuple(element_key(e) for e in t)


@dataclass(frozen=True)
class Signature:
    """Purely relational signature: an ordered tuple of ``(name, arity)``."""

    relations: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        rels = tuple((str(n), int(a)) for n, a in self.relations)
        object.__setattr__(self, "relations", rels)
        names = [n for n, _ in rels]
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate relation names in {names}")
        for n, a in rels:
            if a < 0:
                raise StructureError(f"negative arity for {n}")

    @classmethod
    def of(cls, **arities: int) -> "Signature":
        return cls(tuple(arities.items()))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.relations)

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise UnknownRelation(name)

    def __contains__(self, name) -> bool:
        return any(n == name for n, _ in self.relations)

    def __iter__(self):
        return iter(self.relations)

    def __len__(self):
        return len(self.relations)


@dataclass(frozen=True)
class TapeSymbol:
    """Auxiliary relation symbol outside the signature, writable during play."""

    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise StructureError(f"tape symbol {self.name} needs arity >= 1")


class Structure:
    """A finite relational structure with optional tape relations.

    ``relations`` maps each signature name to a frozenset of tuples; names that
    are missing default to the empty relation.  ``tape`` maps tape-symbol names
    to ``(arity, tuples)``.
    """

    __slots__ = ("signature", "domain", "_rels", "_tape", "_hash")

    def __init__(
        self,
        signature: Signature,
        domain: Iterable[Element] = (),
        relations: Optional[Mapping[str, Iterable[Tuple_]]] = None,
        tape: Optional[Mapping[str, Tuple[int, Iterable[Tuple_]]]] = None,
        *,
        check: bool = True,
    ):
        self.signature = signature
        self.domain: FrozenSet[Element] = frozenset(domain)
        relations = relations or {}
        if check:
            for name in relations:
                if name not in signature:
                    raise UnknownRelation(name)
        self._rels: Dict[str, FrozenSet[Tuple_]] = {
            n: frozenset(tuple(t) for t in relations.get(n, ())) for n in signature.names
        }
        self._tape: Dict[str, Tuple[int, FrozenSet[Tuple_]]] = {}
        for n, (a, ts) in (tape or {}).items():
            if n in signature:
                raise StructureError(f"tape symbol {n} clashes with the signature")
            self._tape[n] = (int(a), frozenset(tuple(t) for t in ts))
        self._hash = None
        if check:
            self._validate()

    def _validate(self):
        for name, ts in self._rels.items():
            self._check_tuples(name, self.signature.arity(name), ts)
        for name, (a, ts) in self._tape.items():
            if a < 1:
                raise StructureError(f"tape symbol {name} needs arity >= 1")
            self._check_tuples(name, a, ts)

    def _check_tuples(self, name, arity, ts):
        for t in ts:
            if len(t) != arity:
                raise ArityMismatch(f"{name}/{arity} got tuple {t!r}")
            for e in t:
                if e not in self.domain:
                    raise ElementNotInDomain(f"{e!r} in {name}{t!r}")

    # -- access ---------------------------------------------------------
    def rel(self, name: str) -> FrozenSet[Tuple_]:
        """Interpretation of a signature relation or tape symbol."""
        r = self._rels.get(name)
        if r is not None:
            return r
        t = self._tape.get(name)
        if t is not None:
            return t[1]
        raise UnknownRelation(name)

    def arity(self, name: str) -> int:
        if name in self._rels:
            return self.signature.arity(name)
        if name in self._tape:
            return self._tape[name][0]
        raise UnknownRelation(name)

    def is_tape(self, name: str) -> bool:
        return name in self._tape

    @property
    def relations(self) -> Dict[str, FrozenSet[Tuple_]]:
        return dict(self._rels)

    @property
    def tape(self) -> Dict[str, Tuple[int, FrozenSet[Tuple_]]]:
        return dict(self._tape)

    @property
    def tape_symbols(self) -> Tuple[TapeSymbol, ...]:
        return tuple(TapeSymbol(n, a) for n, (a, _) in sorted(self._tape.items()))

    def __len__(self):
        return len(self.domain)

    def is_empty(self) -> bool:
        return not self.domain

    # -- value semantics -----------------------------------------------
    def _key(self):
        return (
            self.signature,
            self.domain,
            tuple(sorted(self._rels.items())),
            tuple(sorted(self._tape.items())),
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.domain == other.domain
            and self._rels == other._rels
            and self._tape == other._tape
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(self._key())
        return h

    def __repr__(self):
        return f"Structure({dump_structure(self)!r})"

    # -- construction helpers -------------------------------------------
    def _replace(self, domain=None, rels=None, tape=None) -> "Structure":
        new = object.__new__(Structure)
        new.signature = self.signature
        new.domain = self.domain if domain is None else domain
        new._rels = self._rels if rels is None else rels
        new._tape = self._tape if tape is None else tape
        new._hash = None
        return new

    def with_tape(self, symbols: Iterable[TapeSymbol]) -> "Structure":
        """Declare tape symbols (initially empty) that are not yet present."""
        tape = dict(self._tape)
        changed = False
        for sym in symbols:
            if sym.name in self.signature:
                raise StructureError(f"tape symbol {sym.name} clashes with the signature")
            if sym.name in tape:
                if tape[sym.name][0] != sym.arity:
                    raise ArityMismatch(f"tape symbol {sym.name} declared with two arities")
                continue
            tape[sym.name] = (sym.arity, frozenset())
            changed = True
        return self._replace(tape=tape) if changed else self

    def without_tape(self) -> "Structure":
        return self._replace(tape={}) if self._tape else self

    def rename(self, mapping: Mapping[Element, Element]) -> "Structure":
        """Image of the structure under an injective element renaming."""
        m = lambda e: mapping.get(e, e)  # noqa: E731
        dom = frozenset(m(e) for e in self.domain)
        if len(dom) != len(self.domain):
            raise StructureError("renaming is not injective on the domain")
        rels = {n: frozenset(tuple(m(e) for e in t) for t in ts) for n, ts in self._rels.items()}
        tape = {
            n: (a, frozenset(tuple(m(e) for e in t) for t in ts))
            for n, (a, ts) in self._tape.items()
        }
        return self._replace(domain=dom, rels=rels, tape=tape)


def empty_structure(signature: Signature = Signature()) -> Structure:
    return Structure(signature)


def fresh_element(s: Structure) -> int:
    ints = [e for e in s.domain if isinstance(e, int)]
    return max(ints) + 1 if ints else 0


def insert_element(s: Structure) -> Tuple[Structure, int]:
    """Add a fresh isolated element; relations are untouched."""
    e = fresh_element(s)
    return s._replace(domain=s.domain | {e}), e


def delete_element(s: Structure, e: Element) -> Structure:
    """Remove ``e`` and every tuple, in any relation or tape, that mentions it."""
    if e not in s.domain:
        raise ElementNotInDomain(repr(e))
    rels = {n: _purge(ts, e) for n, ts in s._rels.items()}
    tape = {n: (a, _purge(ts, e)) for n, (a, ts) in s._tape.items()}
    return s._replace(domain=s.domain - {e}, rels=rels, tape=tape)


def _purge(ts: FrozenSet[Tuple_], e: Element) -> FrozenSet[Tuple_]:
    if not any(e in t for t in ts):
        return ts
    return frozenset(t for t in ts if e not in t)


def _checked(s: Structure, r: str, t: Tuple_, need_domain: bool) -> Tuple_:
    t = tuple(t)
    arity = s.arity(r)
    if len(t) != arity:
        raise ArityMismatch(f"{r}/{arity} got tuple {t!r}")
    if need_domain:
        for e in t:
            if e not in s.domain:
                raise ElementNotInDomain(repr(e))
    return t


def insert_tuple(s: Structure, r: str, t: Tuple_) -> Structure:
    t = _checked(s, r, t, True)
    if r in s._rels:
        if t in s._rels[r]:
            return s
        rels = dict(s._rels)
        rels[r] = rels[r] | {t}
        return s._replace(rels=rels)
    a, ts = s._tape[r]
    if t in ts:
        return s
    tape = dict(s._tape)
    tape[r] = (a, ts | {t})
    return s._replace(tape=tape)


def delete_tuple(s: Structure, r: str, t: Tuple_) -> Structure:
    """Remove ``t`` from ``r``; an absent tuple leaves the structure as it is."""
    t = _checked(s, r, t, False)
    if r in s._rels:
        if t not in s._rels[r]:
            return s
        rels = dict(s._rels)
        rels[r] = rels[r] - {t}
        return s._replace(rels=rels)
    a, ts = s._tape[r]
    if t not in ts:
        return s
    tape = dict(s._tape)
    tape[r] = (a, ts - {t})
    return s._replace(tape=tape)


def is_well_formed(s: Structure) -> bool:
    try:
        s._validate()
    except StructureError:
        return False
    return True


# -- isomorphism ---------------------------------------------------------

def _colours(s: Structure, names):
    """Per-element occurrence counts by (relation, position): an iso-invariant."""
    col = {e: [] for e in s.domain}
    for n in names:
        ts = s.rel(n)
        a = s.arity(n)
        for i in range(a):
            counts = {}
            for t in ts:
                counts[t[i]] = counts.get(t[i], 0) + 1
            for e in s.domain:
                col[e].append(counts.get(e, 0))
    return {e: tuple(c) for e, c in col.items()}


def find_isomorphism(
    s1: Structure, s2: Structure, fixed: Optional[Mapping[Element, Element]] = None
) -> Optional[Dict[Element, Element]]:
    """Return a bijection ``dom(s1) -> dom(s2)`` preserving every relation, or None.

    ``fixed`` pins some elements (used for pointed structures).  Search is a
    backtracking enumeration of bijections, pruned by occurrence colours.
    """
    if s1.signature != s2.signature:
        raise SignatureMismatch(f"{s1.signature} vs {s2.signature}")
    t1 = {n: a for n, (a, _) in s1._tape.items()}
    t2 = {n: a for n, (a, _) in s2._tape.items()}
    if t1 != t2 or len(s1.domain) != len(s2.domain):
        return None
    names = list(s1.signature.names) + sorted(t1)
    for n in names:
        if len(s1.rel(n)) != len(s2.rel(n)):
            return None
    c1, c2 = _colours(s1, names), _colours(s2, names)
    if sorted(c1.values()) != sorted(c2.values()):
        return None
    fixed = dict(fixed or {})
    for a, b in fixed.items():
        if a not in s1.domain or b not in s2.domain or c1[a] != c2[b]:
            return None
    if len(set(fixed.values())) != len(fixed):
        return None

    order = [e for e in sorted_elements(s1.domain) if e not in fixed]
    targets = sorted_elements(s2.domain)
    rels = [(s1.rel(n), s2.rel(n)) for n in names]
    # tuples of s1 indexed by the latest element (in search order) they mention
    rank = {e: -1 for e in fixed}
    rank.update({e: i for i, e in enumerate(order)})
    due = [[] for _ in order]
    fixed_only = []
    for k, (r1, r2) in enumerate(rels):
        for t in r1:
            last = max((rank[e] for e in t), default=-1)
            (due[last] if last >= 0 else fixed_only).append((t, r2))

    m = dict(fixed)
    for t, r2 in fixed_only:
        if tuple(m[e] for e in t) not in r2:
            return None
    used = set(m.values())

    def search(i):
        if i == len(order):
            return True
        e = order[i]
        for cand in targets:
            if cand in used or c1[e] != c2[cand]:
                continue
            m[e] = cand
            if all(tuple(m[x] for x in t) in r2 for t, r2 in due[i]):
                used.add(cand)
                if search(i + 1):
                    return True
                used.discard(cand)
            del m[e]
        return False

    return dict(m) if search(0) else None


def is_isomorphic(s1: Structure, s2: Structure) -> bool:
    return find_isomorphism(s1, s2) is not None


# -- atoms ----------------------------------------------------------------

class AtomValue(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDEFINED = "undefined-variable"


def eval_atom(s: Structure, f: Mapping[str, Element], atom) -> AtomValue:
    """Three-valued atom check: ``UNDEFINED`` when a variable has no value."""
    from .syntax import Atom, Eq, TapeAtom

    if isinstance(atom, Eq):
        if atom.left not in f or atom.right not in f:
            return AtomValue.UNDEFINED
        return AtomValue.HOLDS if f[atom.left] == f[atom.right] else AtomValue.FAILS
    if isinstance(atom, (Atom, TapeAtom)):
        try:
            t = tuple(f[v] for v in atom.args)
        except KeyError:
            return AtomValue.UNDEFINED
        return AtomValue.HOLDS if t in s.rel(atom.rel) else AtomValue.FAILS
    raise TypeError(f"not an atom: {atom!r}")


# -- text format ------------------------------------------------------------

_ELEM = re.compile(r"-?\d+|[A-Za-z_][A-Za-z0-9_]*")
_HEAD = re.compile(r"^(tape\s+)?([A-Za-z_][A-Za-z0-9_]*)/(\d+)\s*:(.*)$")


def _fmt_elem(e: Element) -> str:
    s = str(e)
    if isinstance(e, str) and (not _ELEM.fullmatch(s) or s.lstrip("-").isdigit()):
        raise StructureError(f"element {e!r} is not printable in the text format")
    return s


def _fmt_tuples(ts) -> str:
    return " ".join("(" + ",".join(_fmt_elem(e) for e in t) + ")" for t in sorted(ts, key=tuple_key))


def dump_structure(s: Structure) -> str:
    """Canonical text form; ``parse_structure(dump_structure(s)) == s``."""
    lines = ["domain:" + "".join(" " + _fmt_elem(e) for e in sorted_elements(s.domain))]
    for n, a in s.signature:
        body = _fmt_tuples(s.rel(n))
        lines.append(f"{n}/{a}:" + (" " + body if body else ""))
    for n, (a, ts) in sorted(s._tape.items()):
        body = _fmt_tuples(ts)
        lines.append(f"tape {n}/{a}:" + (" " + body if body else ""))
    return "\n".join(lines) + "\n"


def _parse_elem(tok: str) -> Element:
    return int(tok) if tok.lstrip("-").isdigit() else tok


def _parse_tuples(text: str, lineno: int):
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        if text[pos] != "(":
            raise StructureSyntaxError(f"expected '(' at column {pos + 1}", lineno)
        end = text.find(")", pos)
        if end < 0:
            raise StructureSyntaxError("unterminated tuple", lineno)
        inner = text[pos + 1 : end].strip()
        toks = [x.strip() for x in inner.split(",")] if inner else []
        for tok in toks:
            if not _ELEM.fullmatch(tok):
                raise StructureSyntaxError(f"bad element {tok!r}", lineno)
        out.append(tuple(_parse_elem(x) for x in toks))
        pos = end + 1
    return out


def parse_structure(text: str, signature: Optional[Signature] = None) -> Structure:
    """Parse the line-oriented structure format.

    ``domain: a b c`` followed by one ``R/2: (a,b) (b,c)`` line per relation;
    ``tape X/2: ...`` lines declare tape relations; ``#`` starts a comment.
    The signature is read from the relation lines unless one is supplied.
    """
    domain = None
    rels: Dict[str, Tuple[int, list]] = {}
    tape: Dict[str, Tuple[int, list]] = {}
    order = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("domain:"):
            if domain is not None:
                raise StructureSyntaxError("duplicate domain line", lineno)
            toks = line[len("domain:") :].split()
            for tok in toks:
                if not _ELEM.fullmatch(tok):
                    raise StructureSyntaxError(f"bad element {tok!r}", lineno)
            domain = [_parse_elem(t) for t in toks]
            continue
        m = _HEAD.match(line)
        if not m:
            raise StructureSyntaxError(f"cannot parse {line!r}", lineno)
        is_tape, name, arity, body = m.group(1), m.group(2), int(m.group(3)), m.group(4)
        target = tape if is_tape else rels
        if name in rels or name in tape:
            raise StructureSyntaxError(f"relation {name} given twice", lineno)
        tuples = _parse_tuples(body, lineno)
        for t in tuples:
            if len(t) != arity:
                raise StructureSyntaxError(f"tuple {t!r} does not match arity {arity}", lineno)
        target[name] = (arity, tuples)
        if not is_tape:
            order.append((name, arity))
    if domain is None:
        raise StructureSyntaxError("missing 'domain:' line")
    if signature is None:
        signature = Signature(tuple(order))
    else:
        for name, (a, _) in rels.items():
            if name not in signature:
                raise UnknownRelation(name)
            if signature.arity(name) != a:
                raise ArityMismatch(f"{name}: file says {a}, signature says {signature.arity(name)}")
    return Structure(
        signature,
        domain,
        {n: ts for n, (_, ts) in rels.items()},
        {n: (a, ts) for n, (a, ts) in tape.items()},
    )


def all_tuples(domain: Iterable[Element], arity: int):
    return product(sorted_elements(domain), repeat=arity)
