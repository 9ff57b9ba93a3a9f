"""Formulas of the structure-modifying logic: AST, grammar, printer, English reading.

Concrete grammar (lowest to highest precedence)::

    formula := disj [';' formula]                 composition, right associative
    disj    := conj {'|' conj}                    also 'a -> b' as sugar for '~a | b'
    conj    := unary {'&' unary}
    unary   := '~' unary | 'Cn' unary | 'Cn'
             | 'Ex' v '.' formula | 'All' v '.' formula
             | 'ins' v '.' formula | 'ins' R(v,..) '.' formula
             | 'del' v '.' formula | 'del' R(v,..) '.' formula
             | 'box[' mod ']' unary | 'dia[' mod ']' unary
             | 'true' | 'false' | R(v,..) | X:k(v,..) | v '=' v | '(' formula ')'

Relation names start with an upper-case letter, variables with a lower-case
one.  Tape atoms carry their arity explicitly, ``X:2(x1,x2)``.  Binders
(``Ex``, ``All``, ``ins``, ``del``) scope as far to the right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple, Union

__all__ = [
    "Formula", "Atom", "TapeAtom", "Eq", "Top", "Bottom", "ClaimAtom", "Not", "And", "Or",
    "Exists", "Forall", "InsertPoint", "InsertTuple", "DeletePoint", "DeleteTuple",
    "Claim", "Compose", "Box", "Diamond", "ModArg", "FormulaSyntaxError", "parse",
    "to_text", "translate_nl", "occurrences", "free_vars", "is_fo", "desugar",
    "var_index", "subformulas", "tape_symbols", "implies", "at_least", "exactly",
    "big_and", "big_or", "relation_arities",
]


class Formula:
    """Base class of all AST nodes (frozen dataclasses, structural equality)."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: Tuple[str, ...] = ()


@dataclass(frozen=True)
class TapeAtom(Formula):
    rel: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class ClaimAtom(Formula):
    index: int


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class InsertPoint(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class InsertTuple(Formula):
    rel: str
    args: Tuple[str, ...]
    body: Formula
    tape: bool = False


@dataclass(frozen=True)
class DeletePoint(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class DeleteTuple(Formula):
    rel: str
    args: Tuple[str, ...]
    body: Formula
    tape: bool = False


@dataclass(frozen=True)
class Claim(Formula):
    index: int
    body: Formula


@dataclass(frozen=True)
class Compose(Formula):
    left: Formula
    right: Formula


ModArg = Union[Formula, str, int]


@dataclass(frozen=True)
class Box(Formula):
    """``(m)φ``: φ holds in every output of the modifier ``name(args)``."""

    name: str
    args: Tuple[ModArg, ...]
    body: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    """``<m>φ``: φ holds in some output of the modifier ``name(args)``."""

    name: str
    args: Tuple[ModArg, ...]
    body: Formula


_UNARY = (Not, Exists, Forall, InsertPoint, InsertTuple, DeletePoint, DeleteTuple, Claim, Box, Diamond)
_BINARY = (And, Or, Compose)
_FO_NODES = (Atom, Eq, Top, Bottom, Not, And, Or, Exists, Forall)


def children(phi: Formula) -> Tuple[Formula, ...]:
    if isinstance(phi, _UNARY):
        return (phi.body,)
    if isinstance(phi, _BINARY):
        return (phi.left, phi.right)
    return ()


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order, left to right."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def is_fo(phi: Formula) -> bool:
    return all(isinstance(n, _FO_NODES) for n in subformulas(phi))


def var_index(v: str) -> int:
    """Subindex of a variable ``x<n>``; raises for other names."""
    m = re.fullmatch(r"x(\d+)", v)
    if not m:
        raise ValueError(f"variable {v!r} has no integer subindex")
    return int(m.group(1))


def free_vars(phi: Formula) -> frozenset:
    if isinstance(phi, (Atom, TapeAtom)):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, (Top, Bottom, ClaimAtom)):
        return frozenset()
    if isinstance(phi, (Exists, Forall, InsertPoint)):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, (InsertTuple, DeleteTuple)):
        return free_vars(phi.body) - set(phi.args)
    if isinstance(phi, DeletePoint):
        return free_vars(phi.body) | {phi.var}
    if isinstance(phi, (Box, Diamond)):
        # variables of a formula argument are filled in by the modifier itself
        return free_vars(phi.body)
    return frozenset().union(*(free_vars(c) for c in children(phi)))


def tape_symbols(phi: Formula) -> Dict[str, int]:
    """Tape relation names used in ``phi`` with their arities."""
    out: Dict[str, int] = {}
    for n in subformulas(phi):
        if isinstance(n, TapeAtom) or (isinstance(n, (InsertTuple, DeleteTuple)) and n.tape):
            a = len(n.args)
            if out.setdefault(n.rel, a) != a:
                raise FormulaSyntaxError(f"tape symbol {n.rel} used with two arities")
    return out


def relation_arities(phi: Formula) -> Dict[str, int]:
    """Signature relations used in ``phi`` (modifier arguments included)."""
    out: Dict[str, int] = {}
    stack = [phi]
    while stack:
        n = stack.pop()
        if isinstance(n, Atom) or (isinstance(n, (InsertTuple, DeleteTuple)) and not n.tape):
            a = len(n.args)
            if out.setdefault(n.rel, a) != a:
                raise FormulaSyntaxError(f"relation {n.rel} used with two arities")
        if isinstance(n, (Box, Diamond)):
            stack.extend(a for a in n.args if isinstance(a, Formula))
        stack.extend(children(n))
    return out


def desugar(phi: Formula) -> Formula:
    """Rewrite ``Or`` and ``Forall`` into ``~``, ``&`` and ``Ex``."""
    if isinstance(phi, Or):
        return Not(And(Not(desugar(phi.left)), Not(desugar(phi.right))))
    if isinstance(phi, Forall):
        return Not(Exists(phi.var, Not(desugar(phi.body))))
    if isinstance(phi, _BINARY):
        return type(phi)(desugar(phi.left), desugar(phi.right))
    if isinstance(phi, (Not,)):
        return Not(desugar(phi.body))
    if isinstance(phi, (Exists, InsertPoint, DeletePoint)):
        return type(phi)(phi.var, desugar(phi.body))
    if isinstance(phi, (InsertTuple, DeleteTuple)):
        return type(phi)(phi.rel, phi.args, desugar(phi.body), phi.tape)
    if isinstance(phi, Claim):
        return Claim(phi.index, desugar(phi.body))
    if isinstance(phi, (Box, Diamond)):
        return type(phi)(phi.name, phi.args, desugar(phi.body))
    return phi


# -- sugar ----------------------------------------------------------------

def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def big_and(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return Top()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def big_or(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return Bottom()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def _fresh_vars(phi: Formula, n: int) -> List[str]:
    used = set()
    for node in subformulas(phi):
        for name in ("var", "left", "right"):
            v = getattr(node, name, None)
            if isinstance(v, str):
                used.add(v)
        used.update(getattr(node, "args", ()) if not isinstance(node, (Box, Diamond)) else ())
    top = max((var_index(v) for v in used if re.fullmatch(r"x\d+", v)), default=0)
    return [f"x{top + 1 + i}" for i in range(n)]


def _rename_free(phi: Formula, old: str, new: str) -> Formula:
    if isinstance(phi, (Atom, TapeAtom)):
        return type(phi)(phi.rel, tuple(new if a == old else a for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(new if phi.left == old else phi.left, new if phi.right == old else phi.right)
    if isinstance(phi, (Exists, Forall, InsertPoint)):
        if phi.var == old:
            return phi
        return type(phi)(phi.var, _rename_free(phi.body, old, new))
    if isinstance(phi, DeletePoint):
        return DeletePoint(new if phi.var == old else phi.var, _rename_free(phi.body, old, new))
    if isinstance(phi, (InsertTuple, DeleteTuple)):
        if old in phi.args:
            return phi
        return type(phi)(phi.rel, phi.args, _rename_free(phi.body, old, new), phi.tape)
    if isinstance(phi, Not):
        return Not(_rename_free(phi.body, old, new))
    if isinstance(phi, Claim):
        return Claim(phi.index, _rename_free(phi.body, old, new))
    if isinstance(phi, _BINARY):
        return type(phi)(_rename_free(phi.left, old, new), _rename_free(phi.right, old, new))
    return phi


def substitute(phi: Formula, old: str, new: str) -> Formula:
    """Replace free occurrences of variable ``old`` by ``new`` (no capture check)."""
    return _rename_free(phi, old, new)


def at_least(k: int, var: str, body: Formula) -> Formula:
    """Counting quantifier: at least ``k`` distinct witnesses for ``var``.

    The inequalities are nested inward so that a brute-force evaluator can
    prune early.
    """
    if k <= 0:
        return Top()
    ys = _fresh_vars(body, k) if k > 1 else [var]
    inst = [_rename_free(body, var, y) for y in ys]

    def build(i: int) -> Formula:
        parts = [Not(Eq(ys[j], ys[i])) for j in range(i)] + [inst[i]]
        if i + 1 < k:
            parts.append(build(i + 1))
        return Exists(ys[i], big_and(parts))

    return build(0)


def exactly(k: int, var: str, body: Formula) -> Formula:
    return And(at_least(k, var, body), Not(at_least(k + 1, var, body)))


# -- tokens -----------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: Optional[int] = None):
        super().__init__(message if pos is None else f"{message} at offset {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<box>box\[|dia\[)"
    r"|(?P<count>Ex(?:>=|=)\d+)"
    r"|(?P<claim>C\d+)(?![A-Za-z0-9_])"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>\d+)"
    r"|(?P<op>->|[~&|;().,=:\]])"
    r")"
)
_KEYWORDS = {"Ex", "All", "ins", "del", "true", "false"}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> List[_Tok]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tok = m.group(kind)
        start = m.start(kind)
        if kind == "name" and tok in _KEYWORDS:
            kind = "kw"
        out.append(_Tok(kind, tok, start))
        pos = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


def _is_var(name: str) -> bool:
    return name[0].islower() or name[0] == "_"


class _Parser:
    def __init__(self, text: str, signature=None):
        self.toks = _tokenize(text)
        self.i = 0
        self.signature = signature
        self.tape_arity: Dict[str, int] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            raise FormulaSyntaxError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.advance()

    def var(self) -> str:
        t = self.tok
        if t.kind != "name" or not _is_var(t.text):
            raise FormulaSyntaxError(f"expected a variable, found {t.text or 'end of input'!r}", t.pos)
        return self.advance().text

    def formula(self) -> Formula:
        left = self.implication()
        if self.tok.text == ";":
            self.advance()
            return Compose(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.disj()
        if self.tok.text == "->":
            self.advance()
            return Or(Not(left), self.implication())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.tok.text == "|":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.tok.text == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def _starts_unary(self) -> bool:
        t = self.tok
        return t.text in ("~", "(") or t.kind in ("claim", "kw", "name", "box", "count")

    def args(self) -> Tuple[str, ...]:
        self.expect("(")
        out = []
        if self.tok.text != ")":
            out.append(self.var())
            while self.tok.text == ",":
                self.advance()
                out.append(self.var())
        self.expect(")")
        return tuple(out)

    def relref(self):
        """``R(v,..)`` or ``X:k(v,..)``; returns (name, args, is_tape)."""
        t = self.advance()
        if self.tok.text == ":":
            self.advance()
            k = self.tok
            if k.kind != "int":
                raise FormulaSyntaxError("expected tape arity", k.pos)
            self.advance()
            args = self.args()
            if int(k.text) != len(args):
                raise FormulaSyntaxError(
                    f"tape atom {t.text}:{k.text} has {len(args)} arguments", t.pos
                )
            if self.tape_arity.setdefault(t.text, len(args)) != len(args):
                raise FormulaSyntaxError(f"tape symbol {t.text} used with two arities", t.pos)
            return t.text, args, True
        args = self.args()
        if self.signature is not None:
            from .structures import UnknownRelation

            try:
                a = self.signature.arity(t.text)
            except UnknownRelation:
                raise FormulaSyntaxError(f"unknown relation {t.text}", t.pos) from None
            if a != len(args):
                raise FormulaSyntaxError(
                    f"arity mismatch: {t.text} has arity {a}, used with {len(args)}", t.pos
                )
        return t.text, args, False

    def modifier(self):
        self.advance()  # box[ / dia[
        t = self.tok
        if t.kind != "name":
            raise FormulaSyntaxError("expected modifier name", t.pos)
        name = self.advance().text
        args: List[ModArg] = []
        if self.tok.text == "(":
            self.advance()
            if self.tok.text != ")":
                args.append(self.modarg())
                while self.tok.text == ",":
                    self.advance()
                    args.append(self.modarg())
            self.expect(")")
        self.expect("]")
        return name, tuple(args)

    def modarg(self) -> ModArg:
        t = self.tok
        nxt = self.toks[self.i + 1].text
        if t.kind == "int":
            self.advance()
            return int(t.text)
        if t.kind == "name" and not _is_var(t.text) and nxt in (",", ")"):
            self.advance()
            return t.text
        return self.formula()

    def unary(self) -> Formula:
        t = self.tok
        if t.text == "~":
            self.advance()
            return Not(self.unary())
        if t.text == "(":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if t.kind == "box":
            kind = Box if t.text == "box[" else Diamond
            name, args = self.modifier()
            return kind(name, args, self.unary())
        if t.kind == "claim":
            self.advance()
            idx = int(t.text[1:])
            if self._starts_unary():
                return Claim(idx, self.unary())
            return ClaimAtom(idx)
        if t.kind == "count":
            self.advance()
            m = re.fullmatch(r"Ex(>=|=)(\d+)", t.text)
            v = self.var()
            self.expect(".")
            body = self.formula()
            k = int(m.group(2))
            return at_least(k, v, body) if m.group(1) == ">=" else exactly(k, v, body)
        if t.kind == "kw":
            self.advance()
            if t.text == "true":
                return Top()
            if t.text == "false":
                return Bottom()
            if t.text in ("Ex", "All"):
                v = self.var()
                self.expect(".")
                return (Exists if t.text == "Ex" else Forall)(v, self.formula())
            # ins / del
            nt = self.tok
            if nt.kind == "name" and _is_var(nt.text):
                v = self.var()
                self.expect(".")
                return (InsertPoint if t.text == "ins" else DeletePoint)(v, self.formula())
            if nt.kind == "name":
                name, args, tape = self.relref()
                self.expect(".")
                kind = InsertTuple if t.text == "ins" else DeleteTuple
                return kind(name, args, self.formula(), tape)
            raise FormulaSyntaxError(f"expected variable or relation after {t.text!r}", nt.pos)
        if t.kind == "name":
            if _is_var(t.text):
                left = self.advance().text
                self.expect("=")
                return Eq(left, self.var())
            name, args, tape = self.relref()
            return TapeAtom(name, args) if tape else Atom(name, args)
        raise FormulaSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def parse(text: str, signature=None) -> Formula:
    """Parse formula text; with a ``signature``, relation arities are checked."""
    p = _Parser(text, signature)
    phi = p.formula()
    if p.tok.kind != "eof":
        raise FormulaSyntaxError(f"trailing input {p.tok.text!r}", p.tok.pos)
    return phi


# -- printing -------------------------------------------------------------

_PREC = {Compose: 1, Or: 2, And: 3}


def _relref(name, args, tape):
    inner = "(" + ",".join(args) + ")"
    return f"{name}:{len(args)}{inner}" if tape else name + inner


def _modarg_text(a: ModArg) -> str:
    if isinstance(a, Formula):
        return to_text(a)
    return str(a)


def _pp(phi: Formula, prec: int, tail: bool) -> str:
    """``prec``: binding strength demanded by the context; ``tail``: nothing follows."""
    if isinstance(phi, Atom):
        return _relref(phi.rel, phi.args, False)
    if isinstance(phi, TapeAtom):
        return _relref(phi.rel, phi.args, True)
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, ClaimAtom):
        return f"C{phi.index}"
    if isinstance(phi, Not):
        return "~" + _pp(phi.body, 4, tail)
    if isinstance(phi, Claim):
        return f"C{phi.index} " + _pp(phi.body, 4, tail)
    if isinstance(phi, (Box, Diamond)):
        kw = "box" if isinstance(phi, Box) else "dia"
        args = ", ".join(_modarg_text(a) for a in phi.args)
        head = f"{kw}[{phi.name}({args})] " if phi.args else f"{kw}[{phi.name}] "
        return head + _pp(phi.body, 4, tail)
    if isinstance(phi, _BINARY):
        p = _PREC[type(phi)]
        wrap = p < prec
        inner_tail = True if wrap else tail
        if isinstance(phi, Compose):
            lhs = _pp(phi.left, p + 1, False)
            rhs = _pp(phi.right, p, inner_tail)
            text = f"{lhs} ; {rhs}"
        else:
            op = "&" if isinstance(phi, And) else "|"
            lhs = _pp(phi.left, p, False)
            rhs = _pp(phi.right, p + 1, inner_tail)
            text = f"{lhs} {op} {rhs}"
        return f"({text})" if wrap else text
    # binders
    if isinstance(phi, Exists):
        head = f"Ex {phi.var}. "
    elif isinstance(phi, Forall):
        head = f"All {phi.var}. "
    elif isinstance(phi, InsertPoint):
        head = f"ins {phi.var}. "
    elif isinstance(phi, DeletePoint):
        head = f"del {phi.var}. "
    elif isinstance(phi, InsertTuple):
        head = f"ins {_relref(phi.rel, phi.args, phi.tape)}. "
    elif isinstance(phi, DeleteTuple):
        head = f"del {_relref(phi.rel, phi.args, phi.tape)}. "
    else:
        raise TypeError(f"not a formula: {phi!r}")
    text = head + _pp(phi.body, 0, True)
    return text if tail else f"({text})"


def to_text(phi: Formula) -> str:
    """Canonical text; ``parse(to_text(phi)) == phi``."""
    return _pp(phi, 0, True)


# -- English reading --------------------------------------------------------

def translate_nl(phi: Formula, careful: bool = False) -> str:
    """Read a formula in English, with truth replaced by verification.

    ``careful`` selects the reading of first-order atoms that also covers
    variables without a referent.
    """
    T = lambda f: translate_nl(f, careful)  # noqa: E731
    if isinstance(phi, Eq):
        if careful:
            return f"the referent of {phi.left} is equal to the referent of {phi.right}"
        return f"{phi.left} equals {phi.right}"
    if isinstance(phi, (Atom, TapeAtom)):
        if careful:
            if not phi.args:
                return f"{phi.rel} holds"
            return f"the referents of {', '.join(phi.args)} form a tuple in {phi.rel} in the given order"
        return f"{phi.rel}({', '.join(phi.args)})"
    if isinstance(phi, Top):
        return "truth holds"
    if isinstance(phi, Bottom):
        return "falsity holds"
    if isinstance(phi, ClaimAtom):
        return f"C{phi.index}"
    if isinstance(phi, Exists):
        return f"there exists an {phi.var} such that {T(phi.body)}"
    if isinstance(phi, Forall):
        return f"for every {phi.var} it holds that {T(phi.body)}"
    if isinstance(phi, And):
        return f"{T(phi.left)} and {T(phi.right)}"
    if isinstance(phi, Or):
        return f"{T(phi.left)} or {T(phi.right)}"
    if isinstance(phi, Not):
        return f"it is falsifiable that {T(phi.body)}"
    if isinstance(phi, InsertPoint):
        return f"it is possible to insert a new element {phi.var} such that {T(phi.body)}"
    if isinstance(phi, InsertTuple):
        return f"it is possible to insert a tuple ({', '.join(phi.args)}) into {phi.rel} such that {T(phi.body)}"
    if isinstance(phi, DeletePoint):
        return f"it is possible to delete the element {phi.var} such that {T(phi.body)}"
    if isinstance(phi, DeleteTuple):
        return f"it is possible to delete a tuple ({', '.join(phi.args)}) from {phi.rel} such that {T(phi.body)}"
    if isinstance(phi, Claim):
        return f"it is possible to verify the claim C{phi.index} which states that {T(phi.body)}"
    if isinstance(phi, Compose):
        return f"{T(phi.left)}, and after that {T(phi.right)}"
    if isinstance(phi, Box):
        return f"after every application of {phi.name}, {T(phi.body)}"
    if isinstance(phi, Diamond):
        return f"after some application of {phi.name}, {T(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


# -- claim occurrences --------------------------------------------------------

Path = Tuple[int, ...]


def occurrences(root: Formula) -> Dict[int, List[Path]]:
    """Positions (child-index paths) of every ``Claim(i, .)`` node, left to right."""
    out: Dict[int, List[Path]] = {}

    def walk(node, path):
        if isinstance(node, Claim):
            out.setdefault(node.index, []).append(path)
        for i, c in enumerate(children(node)):
            walk(c, path + (i,))

    walk(root, ())
    return out


def at_path(root: Formula, path: Path) -> Formula:
    node = root
    for i in path:
        node = children(node)[i]
    return node
