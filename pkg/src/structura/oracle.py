"""Brute-force Tarskian model checking, model-set (team) semantics, enumeration.

This is the ground truth the game solver and the l-term compiler are checked
against, so it deliberately shares no code with either.
"""
from __future__ import annotations

from itertools import product
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .structures import Element, Signature, Structure, sorted_elements
from .syntax import (
    And, Atom, Bottom, Eq, Exists, Forall, Formula, Not, Or, TapeAtom, Top, free_vars,
)

DEFAULT_ENUMERATION_CAP = 22  # relation bits, i.e. at most 2**22 structures


class OracleError(ValueError):
    pass


class UnboundVariable(OracleError):
    pass


class NotFirstOrder(OracleError):
    pass


class BoundTooLarge(OracleError):
    pass


Checker = Callable[[Structure, dict], bool]


def _compile(phi: Formula) -> Checker:
    """Turn a formula into a closure ``(structure, env) -> bool``."""
    if isinstance(phi, (Atom, TapeAtom)):
        rel, args = phi.rel, phi.args
        if len(args) == 1:
            a0 = args[0]
            return lambda s, env: (env[a0],) in s.rel(rel)
        if len(args) == 2:
            a0, a1 = args
            return lambda s, env: (env[a0], env[a1]) in s.rel(rel)
        return lambda s, env: tuple(env[a] for a in args) in s.rel(rel)
    if isinstance(phi, Eq):
        l, r = phi.left, phi.right
        return lambda s, env: env[l] == env[r]
    if isinstance(phi, Top):
        return lambda s, env: True
    if isinstance(phi, Bottom):
        return lambda s, env: False
    if isinstance(phi, Not):
        inner = _compile(phi.body)
        return lambda s, env: not inner(s, env)
    if isinstance(phi, And):
        a, b = _compile(phi.left), _compile(phi.right)
        return lambda s, env: a(s, env) and b(s, env)
    if isinstance(phi, Or):
        a, b = _compile(phi.left), _compile(phi.right)
        return lambda s, env: a(s, env) or b(s, env)
    if isinstance(phi, (Exists, Forall)):
        v = phi.var
        inner = _compile(phi.body)
        want = isinstance(phi, Exists)

        def quant(s, env):
            had = v in env
            old = env.get(v)
            try:
                for e in s.domain:
                    env[v] = e
                    if inner(s, env) == want:
                        return want
                return not want
            finally:
                if had:
                    env[v] = old
                else:
                    env.pop(v, None)

        return quant
    raise NotFirstOrder(f"{type(phi).__name__} is not a first-order connective")


_CACHE: dict = {}


def compile_fo(phi: Formula) -> Checker:
    """Memoised closure compilation (formulas are immutable and hashable)."""
    fn = _CACHE.get(phi)
    if fn is None:
        fn = _compile(phi)
        if len(_CACHE) > 50_000:
            _CACHE.clear()
        _CACHE[phi] = fn
    return fn


def eval_fo(s: Structure, f: Optional[Mapping[str, Element]], phi: Formula) -> bool:
    """Does ``(s, f)`` satisfy the first-order formula ``phi``?"""
    f = dict(f or {})
    missing = free_vars(phi) - f.keys()
    if missing:
        raise UnboundVariable(f"no value for {sorted(missing)}")
    return compile_fo(phi)(s, f)


def holds(s: Structure, phi: Formula) -> bool:
    return eval_fo(s, None, phi)


# -- model sets -------------------------------------------------------------

class ModelSet:
    """Finite collection of (structure, assignment) pairs with team semantics."""

    def __init__(self, members: Iterable[Tuple[Structure, Mapping[str, Element]]] = ()):
        self.members = [(s, dict(f)) for s, f in members]
        if self.members:
            sig = self.members[0][0].signature
            keys = set(self.members[0][1])
            for s, f in self.members:
                if s.signature != sig:
                    raise OracleError("model set members disagree on the signature")
                if set(f) != keys:
                    raise OracleError("model set members disagree on the assignment domain")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def model_set_sat(M, phi: Formula) -> bool:
    """``M |= phi`` iff every member satisfies ``phi``; vacuously true when empty."""
    return first_counterexample(M, phi) is None


def first_counterexample(M, phi: Formula):
    for s, f in M:
        if not eval_fo(s, f, phi):
            return s, f
    return None


# -- enumeration --------------------------------------------------------------

def _slots(signature: Signature, domain: Sequence[Element]):
    return [(n, t) for n, a in signature for t in product(domain, repeat=a)]


def count_bits(signature: Signature, domain_size: int) -> int:
    return sum(domain_size ** a for _, a in signature)


def enumerate_structures(
    signature: Signature,
    domain: Iterable[Element],
    constraint: Optional[Formula] = None,
    *,
    assignment: Optional[Mapping[str, Element]] = None,
    required: Iterable[Tuple[str, tuple]] = (),
    forbidden: Iterable[Tuple[str, tuple]] = (),
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[Structure]:
    """Every structure over exactly ``domain`` satisfying ``constraint``.

    Order is lexicographic over the relation bitmap, relations in signature
    order and tuples in product order.  ``required``/``forbidden`` pin single
    relation tuples; pinned slots are skipped rather than filtered, so the
    order of the remaining structures is unchanged.
    """
    dom = sorted_elements(domain)
    slots = _slots(signature, dom)
    required = {(n, tuple(t)) for n, t in required}
    forbidden = {(n, tuple(t)) for n, t in forbidden}
    if required & forbidden:
        return
    for n, t in required | forbidden:
        if n not in signature or len(t) != signature.arity(n) or any(e not in dom for e in t):
            raise OracleError(f"pinned tuple {n}{t} is not a slot of this signature/domain")
    free_slots = [sl for sl in slots if sl not in required and sl not in forbidden]
    if len(free_slots) > cap:
        raise BoundTooLarge(f"{len(free_slots)} free relation bits exceed the cap of {cap}")
    check = None
    env = dict(assignment or {})
    if constraint is not None:
        missing = free_vars(constraint) - env.keys()
        if missing:
            raise UnboundVariable(f"no value for {sorted(missing)}")
        check = compile_fo(constraint)
    base = {n: [] for n in signature.names}
    for n, t in required:
        base[n].append(t)
    k = len(free_slots)
    for mask in range(1 << k):
        rels = {n: list(ts) for n, ts in base.items()}
        # bit 0 of the mask is the last slot, so counting up is lexicographic
        for i, (n, t) in enumerate(free_slots):
            if mask >> (k - 1 - i) & 1:
                rels[n].append(t)
        s = Structure(signature, dom, rels, check=False)
        if check is None or check(s, env):
            yield s
