"""Variable-free relation algebra over finite structures.

Terms are built from ``u``, relation symbols and the operators ``I``, ``not``,
``p``, ``s``, ``ex``, ``J``, plus registered extension operators.  Every value
carries its arity, so the empty relation of arity 2 differs from the empty
relation of arity 0, and the nullary relations are exactly ``{()}`` and the
empty one.

The compiler ``compile_fo`` turns a first-order formula into a term defining
the same relation, columns ordered by increasing variable subindex;
``term_to_fo`` goes the other way.
"""
from __future__ import annotations

import random
import re
import threading
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .structures import Signature, Structure, sorted_elements, tuple_key
from .syntax import (
    And, Atom, Bottom, Eq, Exists, Forall, Formula, Not, Or, Top, free_vars,
)


class RelAlgError(ValueError):
    pass


class EmptyDomain(RelAlgError):
    pass


class TermSyntaxError(RelAlgError):
    pass


# -- values -------------------------------------------------------------------

@dataclass(frozen=True)
class RelValue:
    arity: int
    tuples: FrozenSet[tuple]

    def __post_init__(self):
        object.__setattr__(self, "tuples", frozenset(tuple(t) for t in self.tuples))
        if self.arity < 0:
            raise RelAlgError("arity must be non-negative")
        for t in self.tuples:
            if len(t) != self.arity:
                raise RelAlgError(f"tuple {t} does not have arity {self.arity}")

    def __len__(self):
        return len(self.tuples)

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def sorted(self) -> List[tuple]:
        return sorted(self.tuples, key=tuple_key)

    def rename(self, mapping) -> "RelValue":
        return RelValue(self.arity, {tuple(mapping[e] for e in t) for t in self.tuples})

    def __str__(self):
        body = ", ".join("(" + ",".join(str(e) for e in t) + ")" for t in self.sorted())
        return f"{self.arity}:{{{body}}}"


TRUE0 = RelValue(0, {()})
FALSE0 = RelValue(0, ())


def empty(arity: int) -> RelValue:
    return RelValue(arity, ())


# -- terms --------------------------------------------------------------------

class LTerm:
    def __str__(self):
        return term_to_text(self)


@dataclass(frozen=True, repr=False)
class U(LTerm):
    def __repr__(self):
        return "U()"


@dataclass(frozen=True, repr=False)
class RelSym(LTerm):
    name: str

    def __repr__(self):
        return f"RelSym({self.name!r})"


@dataclass(frozen=True)
class Identity(LTerm):
    body: LTerm


@dataclass(frozen=True)
class Neg(LTerm):
    body: LTerm


@dataclass(frozen=True)
class Cyc(LTerm):
    body: LTerm


@dataclass(frozen=True)
class Swap(LTerm):
    body: LTerm


@dataclass(frozen=True)
class Ex(LTerm):
    body: LTerm


@dataclass(frozen=True)
class Join(LTerm):
    left: LTerm
    right: LTerm


@dataclass(frozen=True)
class OpApp(LTerm):
    name: str
    args: Tuple[LTerm, ...]


_UNARY_TERMS = (Identity, Neg, Cyc, Swap, Ex)


def term_children(t: LTerm) -> Tuple[LTerm, ...]:
    if isinstance(t, _UNARY_TERMS):
        return (t.body,)
    if isinstance(t, Join):
        return (t.left, t.right)
    if isinstance(t, OpApp):
        return t.args
    return ()


def term_depth(t: LTerm) -> int:
    return 1 + max((term_depth(c) for c in term_children(t)), default=0)


def relation_symbols(t: LTerm) -> set:
    out = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, RelSym):
            out.add(x.name)
        stack.extend(term_children(x))
    return out


# -- extension operators ------------------------------------------------------

@dataclass(frozen=True)
class Operator:
    name: str
    n_args: int
    fn: Callable  # (domain: frozenset, *values) -> RelValue
    out_arity: Callable[[Tuple[int, ...]], int]


_REGISTRY: Dict[str, Operator] = {}
_REGISTRY_LOCK = threading.Lock()


def register_operator(name: str, fn: Callable, n_args: int, out_arity=None) -> Operator:
    """Add an operator usable as ``op:name(t1,...,tk)``.

    ``out_arity`` is an int, a function of the argument arities, or None for
    "same as the first argument".  Operators are expected to be invariant
    under isomorphism; :func:`check_operator_invariance` tests that.
    """
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
        raise RelAlgError(f"bad operator name {name!r}")
    if out_arity is None:
        arity_fn = lambda ar: ar[0] if ar else 0
    elif isinstance(out_arity, int):
        arity_fn = lambda ar, k=out_arity: k
    else:
        arity_fn = out_arity
    op = Operator(name, n_args, fn, arity_fn)
    with _REGISTRY_LOCK:
        if name in _REGISTRY:
            raise RelAlgError(f"operator {name!r} is already registered")
        # copy-on-write keeps concurrent readers safe
        new = dict(_REGISTRY)
        new[name] = op
        _REGISTRY.clear()
        _REGISTRY.update(new)
    return op


def unregister_operator(name: str) -> None:
    with _REGISTRY_LOCK:
        _REGISTRY.pop(name, None)


def get_operator(name: str) -> Operator:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise RelAlgError(f"unknown operator {name!r}") from None


def registered_operators() -> List[str]:
    return sorted(_REGISTRY)


def _transitive_closure(domain, r: RelValue) -> RelValue:
    if r.arity != 2:
        raise RelAlgError("tc expects a binary relation")
    closure = set(r.tuples)
    while True:
        extra = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
        if not extra:
            return RelValue(2, closure)
        closure |= extra


def _parity(domain, r: RelValue) -> RelValue:
    return TRUE0 if len(r) % 2 == 0 else FALSE0


register_operator("tc", _transitive_closure, 1, 2)
register_operator("even", _parity, 1, 0)


def check_operator_invariance(
    name: str,
    input_arities: Sequence[int],
    *,
    trials: int = 50,
    max_domain: int = 4,
    rng: Optional[random.Random] = None,
):
    """Sample random inputs and renamings; return None if ``F`` commuted with
    every renaming, else a witness ``(domain, inputs, mapping)``."""
    op = get_operator(name)
    rng = rng or random.Random(0)
    for _ in range(trials):
        n = rng.randint(1, max_domain)
        dom = list(range(n))
        vals = []
        for k in input_arities:
            cells = list(product(dom, repeat=k))
            vals.append(RelValue(k, [t for t in cells if rng.random() < 0.4]))
        image = rng.sample(range(100, 100 + 3 * n), n)
        mapping = dict(zip(dom, image))
        lhs = op.fn(frozenset(image), *[v.rename(mapping) for v in vals])
        rhs = op.fn(frozenset(dom), *vals).rename(mapping)
        if lhs != rhs:
            return frozenset(dom), tuple(vals), mapping
    return None


# -- arity and evaluation -------------------------------------------------------

def term_arity(t: LTerm, signature: Signature) -> int:
    if isinstance(t, U):
        return 1
    if isinstance(t, RelSym):
        if t.name not in signature:
            raise RelAlgError(f"unknown relation symbol {t.name}")
        return signature.arity(t.name)
    if isinstance(t, Ex):
        k = term_arity(t.body, signature)
        return k - 1 if k else 0
    if isinstance(t, _UNARY_TERMS):
        return term_arity(t.body, signature)
    if isinstance(t, Join):
        return term_arity(t.left, signature) + term_arity(t.right, signature)
    if isinstance(t, OpApp):
        op = get_operator(t.name)
        return op.out_arity(tuple(term_arity(a, signature) for a in t.args))
    raise RelAlgError(f"not a term: {t!r}")


def eval_term(t: LTerm, s: Structure) -> RelValue:
    """Relation denoted by ``t`` over ``s``; the domain must be non-empty."""
    if not s.domain:
        raise EmptyDomain("terms are evaluated over non-empty domains only")
    return _eval(t, s, {})


def _eval(t: LTerm, s: Structure, memo) -> RelValue:
    hit = memo.get(t)
    if hit is not None:
        return hit
    if isinstance(t, U):
        out = RelValue(1, {(a,) for a in s.domain})
    elif isinstance(t, RelSym):
        if t.name not in s.signature:
            raise RelAlgError(f"unknown relation symbol {t.name}")
        out = RelValue(s.arity(t.name), s.rel(t.name))
    elif isinstance(t, OpApp):
        op = get_operator(t.name)
        if len(t.args) != op.n_args:
            raise RelAlgError(f"operator {t.name} takes {op.n_args} arguments")
        out = op.fn(s.domain, *[_eval(a, s, memo) for a in t.args])
    elif isinstance(t, Join):
        l, r = _eval(t.left, s, memo), _eval(t.right, s, memo)
        out = RelValue(l.arity + r.arity, {a + b for a in l.tuples for b in r.tuples})
    else:
        v = _eval(t.body, s, memo)
        k, ts = v.arity, v.tuples
        if isinstance(t, Neg):
            cells = product(sorted_elements(s.domain), repeat=k)
            out = RelValue(k, {c for c in cells if c not in ts})
        elif isinstance(t, Ex):
            out = RelValue(k - 1, {a[1:] for a in ts}) if k else v
        elif k < 2:
            out = v  # I, p and s do nothing below arity 2
        elif isinstance(t, Identity):
            out = RelValue(k, {a for a in ts if a[0] == a[1]})
        elif isinstance(t, Cyc):
            out = RelValue(k, {a[1:] + a[:1] for a in ts})
        elif isinstance(t, Swap):
            out = RelValue(k, {(a[1], a[0]) + a[2:] for a in ts})
        else:
            raise RelAlgError(f"not a term: {t!r}")
    memo[t] = out
    return out


# -- permutations -------------------------------------------------------------

def _apply_word(t: LTerm, word: str) -> LTerm:
    """Wrap ``t`` in ``p``/``s`` applications; the word is read left to right
    in application order."""
    for c in word:
        t = Cyc(t) if c == "p" else Swap(t)
    return t


def _simplify_word(word: str, k: int) -> str:
    changed = True
    while changed:
        changed = False
        if k >= 1 and "p" * k in word:
            word = word.replace("p" * k, "", 1)
            changed = True
        if "ss" in word:
            word = word.replace("ss", "", 1)
            changed = True
    return word


def permutation_word(perm: Sequence[int]) -> str:
    """Word over ``p``/``s`` turning ``(a_0..a_{k-1})`` into ``(a_perm[0], ...)``.

    Works on the cyclic order: each target element is rotated to the front
    and then walked one place to the right at a time (``s`` then ``p``) until
    it sits just after its predecessor in the target; a final rotation fixes
    the starting point.
    """
    k = len(perm)
    if sorted(perm) != list(range(k)):
        raise RelAlgError(f"{tuple(perm)} is not a permutation")
    if k == 2:
        return "" if perm[0] == 0 else "s"
    cur = list(range(k))
    word = []

    def op(c):
        nonlocal cur
        word.append(c)
        cur = cur[1:] + cur[:1] if c == "p" else [cur[1], cur[0]] + cur[2:]

    for m in range(1, k):
        while cur[0] != perm[m]:
            op("p")
        while cur[-1] != perm[m - 1]:
            op("s")
            op("p")
    while cur[0] != perm[0]:
        op("p")
    return _simplify_word("".join(word), k)


def permute_term(t: LTerm, perm: Sequence[int]) -> LTerm:
    return _apply_word(t, permutation_word(perm))


def _rotation_amount(perm: Sequence[int]) -> Optional[int]:
    k = len(perm)
    r = perm[0] if k else 0
    if all(perm[i] == (i + r) % k for i in range(k)):
        return r
    return None


def _reorder(t: LTerm, perm: Sequence[int]) -> LTerm:
    """Prefer plain rotations, fall back to the general p/s word."""
    r = _rotation_amount(perm)
    if r is not None:
        return _apply_word(t, "p" * r)
    return permute_term(t, perm)


# -- FO -> term ---------------------------------------------------------------

def var_key(v: str):
    m = re.fullmatch(r"x(\d+)", v)
    return (0, int(m.group(1)), v) if m else (1, 0, v)


def ordered_free_vars(phi: Formula) -> List[str]:
    return sorted(free_vars(phi), key=var_key)


def _normalise(t: LTerm, cols: List[str]) -> Tuple[LTerm, List[str]]:
    """Merge repeated columns (smallest variable first) and sort the rest."""
    while True:
        seen: Dict[str, int] = {}
        pair = None
        for j, v in enumerate(cols):
            if v in seen:
                if pair is None or var_key(v) < var_key(cols[pair[0]]):
                    pair = (seen[v], j)
            else:
                seen[v] = j
        if pair is None:
            break
        i, j = pair
        k = len(cols)
        if j == i + 1:
            perm = [(n + i) % k for n in range(k)]
        elif i == 0 and j == k - 1:
            perm = [(n + j) % k for n in range(k)]
        else:
            perm = [i, j] + [n for n in range(k) if n not in (i, j)]
        t = Ex(Identity(_reorder(t, perm)))
        cols = [cols[n] for n in perm][1:]
    target = sorted(cols, key=var_key)
    perm = [cols.index(v) for v in target]
    return _reorder(t, perm), target


def _compile(phi: Formula) -> Tuple[LTerm, List[str]]:
    if isinstance(phi, Top):
        return Ex(U()), []
    if isinstance(phi, Bottom):
        return Neg(Ex(U())), []
    if isinstance(phi, Eq):
        if phi.left == phi.right:
            return U(), [phi.left]
        return Identity(Join(U(), U())), sorted([phi.left, phi.right], key=var_key)
    if isinstance(phi, Atom):
        return _normalise(RelSym(phi.rel), list(phi.args))
    if isinstance(phi, Not):
        t, vs = _compile(phi.body)
        return Neg(t), vs
    if isinstance(phi, And):
        tl, vl = _compile(phi.left)
        tr, vr = _compile(phi.right)
        return _normalise(Join(tl, tr), vl + vr)
    if isinstance(phi, Or):
        return _compile(Not(And(Not(phi.left), Not(phi.right))))
    if isinstance(phi, Forall):
        return _compile(Not(Exists(phi.var, Not(phi.body))))
    if isinstance(phi, Exists):
        t, vs = _compile(phi.body)
        if phi.var not in vs:
            return t, vs
        k, n = len(vs), vs.index(phi.var)
        t = Ex(_apply_word(t, "p" * n))
        m = (k - 1 - n) % (k - 1) if k > 1 else 0
        return _apply_word(t, "p" * m), vs[:n] + vs[n + 1:]
    from .oracle import NotFirstOrder

    raise NotFirstOrder(f"{type(phi).__name__} cannot be compiled to a term")


def compile_fo(phi: Formula) -> LTerm:
    """Term defining the same relation as ``phi`` (columns by variable subindex)."""
    return _compile(phi)[0]


# -- term -> FO ---------------------------------------------------------------

def term_to_fo(t: LTerm, signature: Signature) -> Formula:
    """Formula in free variables ``x1..xk`` (k the term arity) defining the
    same relation."""
    k = term_arity(t, signature)
    counter = [k]

    def fresh():
        counter[0] += 1
        return f"x{counter[0]}"

    def tr(t: LTerm, vs: List[str]) -> Formula:
        if isinstance(t, U):
            return Eq(vs[0], vs[0])
        if isinstance(t, RelSym):
            return Atom(t.name, tuple(vs))
        if isinstance(t, OpApp):
            raise RelAlgError(f"extension operator {t.name} has no first-order reading")
        if isinstance(t, Neg):
            return Not(tr(t.body, vs))
        if isinstance(t, Join):
            a = term_arity(t.left, signature)
            return And(tr(t.left, vs[:a]), tr(t.right, vs[a:]))
        if isinstance(t, Ex):
            if term_arity(t.body, signature) == 0:
                return tr(t.body, vs)
            y = fresh()
            return Exists(y, tr(t.body, [y] + vs))
        if len(vs) < 2:
            return tr(t.body, vs)
        if isinstance(t, Identity):
            return And(tr(t.body, vs), Eq(vs[0], vs[1]))
        if isinstance(t, Cyc):
            return tr(t.body, vs[-1:] + vs[:-1])
        if isinstance(t, Swap):
            return tr(t.body, [vs[1], vs[0]] + vs[2:])
        raise RelAlgError(f"not a term: {t!r}")

    return tr(t, [f"x{i}" for i in range(1, k + 1)])


def defined_relation(s: Structure, phi: Formula) -> RelValue:
    """``{(a1..ak) | s |= phi(a1..ak)}`` with free variables by subindex."""
    from .oracle import compile_fo as checker

    if not s.domain:
        raise EmptyDomain("defined relations need a non-empty domain")
    vs = ordered_free_vars(phi)
    check = checker(phi)
    out = set()
    for tup in product(sorted_elements(s.domain), repeat=len(vs)):
        if check(s, dict(zip(vs, tup))):
            out.add(tup)
    return RelValue(len(vs), out)


# -- text form ------------------------------------------------------------------

_TTOK = re.compile(r"\s*(?:(?P<op>op:[A-Za-z_][A-Za-z0-9_]*)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<p>[(),]))")
_UNARY_NAMES = {"I": Identity, "not": Neg, "p": Cyc, "s": Swap, "ex": Ex}
_NAMES = {v: k for k, v in _UNARY_NAMES.items()}


def term_to_text(t: LTerm) -> str:
    if isinstance(t, U):
        return "u"
    if isinstance(t, RelSym):
        return t.name
    if isinstance(t, Join):
        return f"J({term_to_text(t.left)},{term_to_text(t.right)})"
    if isinstance(t, OpApp):
        return f"op:{t.name}(" + ",".join(term_to_text(a) for a in t.args) + ")"
    return f"{_NAMES[type(t)]}({term_to_text(t.body)})"


def parse_term(text: str, signature: Optional[Signature] = None) -> LTerm:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TTOK.match(text, pos)
        if not m or m.end() == pos:
            raise TermSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        toks.append(m.group(m.lastgroup))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def expect(tok):
        nonlocal i
        if peek() != tok:
            raise TermSyntaxError(f"expected {tok!r}, found {peek()!r}")
        i += 1

    def term() -> LTerm:
        nonlocal i
        tok = peek()
        if tok is None or tok in "(),":
            raise TermSyntaxError(f"expected a term, found {tok!r}")
        i += 1
        if tok.startswith("op:"):
            expect("(")
            args = [term()]
            while peek() == ",":
                i += 1
                args.append(term())
            expect(")")
            return OpApp(tok[3:], tuple(args))
        if peek() == "(" and tok in _UNARY_NAMES:
            i += 1
            body = term()
            expect(")")
            return _UNARY_NAMES[tok](body)
        if peek() == "(" and tok == "J":
            i += 1
            a = term()
            expect(",")
            b = term()
            expect(")")
            return Join(a, b)
        if peek() == "(":
            raise TermSyntaxError(f"{tok} is not an operator")
        if tok == "u":
            return U()
        if signature is not None and tok not in signature:
            raise TermSyntaxError(f"unknown relation symbol {tok}")
        return RelSym(tok)

    out = term()
    if peek() is not None:
        raise TermSyntaxError(f"trailing input at {peek()!r}")
    return out
