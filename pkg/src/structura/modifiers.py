"""Modifiers: maps from a pointed structure to a finite set of pointed structures.

``box[m] phi`` holds when ``phi`` holds in every output of ``m`` and
``dia[m] phi`` when it holds in some output.  A pointed structure here is a
structure together with an ordinary assignment.

Built-ins take their parameters from the modifier expression, e.g.
``dia[addpairs(E(x,y) & ~x=y, R)] ...`` or ``box[IY(Y, 2)] ...``.  Those that
choose nondeterministically among many sets take an explicit size cap.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .oracle import UnboundVariable, compile_fo
from .structures import (
    Element, Structure, delete_element, element_key, find_isomorphism, insert_element, sorted_elements,
)
from .syntax import (
    And, Box, Diamond, Exists, Forall, Formula, Not, Or, free_vars, is_fo,
)


class ModifierError(ValueError):
    pass


Pointed = Tuple[Structure, Tuple[Tuple[str, Element], ...]]


def _point(s: Structure, f: Mapping[str, Element]) -> Pointed:
    return s, tuple(sorted(f.items()))


@dataclass(frozen=True)
class Modifier:
    name: str
    fn: Callable  # (structure, assignment dict, *args) -> iterable of (structure, assignment dict)
    params: str = ""
    doc: str = ""


_MODIFIERS: Dict[str, Modifier] = {}


def register_modifier(name: str, fn: Callable, params: str = "", doc: str = "") -> Modifier:
    if name in _MODIFIERS:
        raise ModifierError(f"modifier {name!r} is already registered")
    m = Modifier(name, fn, params, doc)
    _MODIFIERS[name] = m
    return m


def get_modifier(name: str) -> Modifier:
    try:
        return _MODIFIERS[name]
    except KeyError:
        raise ModifierError(f"unknown modifier {name!r}") from None


def modifier_names() -> List[str]:
    return sorted(_MODIFIERS)


def apply_modifier(m, s: Structure, f: Optional[Mapping[str, Element]] = None, *args) -> List[Pointed]:
    """Outputs of ``m`` on ``(s, f)`` as a duplicate-free list."""
    if isinstance(m, str):
        m = get_modifier(m)
    out = []
    seen = set()
    for s2, f2 in m.fn(s, dict(f or {}), *args):
        p = _point(s2, f2)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


# -- helpers for the built-ins ------------------------------------------------------

def _rel_arg(s: Structure, r) -> str:
    if not isinstance(r, str) or r not in s.signature:
        raise ModifierError(f"{r!r} is not a relation of the signature")
    return r


def _cap_arg(c) -> int:
    if not isinstance(c, int) or c < 0:
        raise ModifierError(f"size cap must be a non-negative integer, got {c!r}")
    return c


def _formula_arg(phi) -> Formula:
    if not isinstance(phi, Formula) or not is_fo(phi):
        raise ModifierError("expected a first-order formula argument")
    return phi


def _extension(s: Structure, f: Mapping, phi: Formula, arity: Optional[int] = None) -> List[tuple]:
    """Tuples satisfying ``phi`` in its free variables not fixed by ``f``
    (ordered by subindex)."""
    from .relalg import var_key

    vs = sorted(free_vars(phi) - set(f), key=var_key)
    if arity == 1 and not vs:
        # a sentence as point condition selects all points or none
        return [(e,) for e in sorted_elements(s.domain)] if compile_fo(phi)(s, dict(f)) else []
    if arity is not None and len(vs) != arity:
        raise ModifierError(f"formula argument has {len(vs)} open variables, relation needs {arity}")
    check = compile_fo(phi)
    out = []
    for t in product(sorted_elements(s.domain), repeat=len(vs)):
        env = dict(f)
        env.update(zip(vs, t))
        if check(s, env):
            out.append(t)
    return out


def _with_rel(s: Structure, r: str, tuples) -> Structure:
    rels = {n: s.rel(n) for n in s.signature.names}
    rels[r] = frozenset(tuples)
    return Structure(s.signature, s.domain, rels, check=False)


def _drop_points(s: Structure, f: dict, points) -> Tuple[Structure, dict]:
    for e in points:
        s = delete_element(s, e)
    gone = set(points)
    return s, {v: e for v, e in f.items() if e not in gone}


def _add_points(s: Structure, n: int, label: Optional[str] = None) -> Structure:
    for _ in range(n):
        s, u = insert_element(s)
        if label is not None:
            s = _with_rel(s, label, s.rel(label) | {(u,)})
    return s


# -- built-ins ------------------------------------------------------------------------

def _identity(s, f):
    yield s, f


def _addpairs(s, f, phi, r):
    r = _rel_arg(s, r)
    ext = _extension(s, f, _formula_arg(phi), s.arity(r))
    yield _with_rel(s, r, s.rel(r) | set(ext)), f


def _delpairs(s, f, phi, r):
    r = _rel_arg(s, r)
    ext = _extension(s, f, _formula_arg(phi), s.arity(r))
    yield _with_rel(s, r, s.rel(r) - set(ext)), f


def _addpairs_some(s, f, phi, r, cap):
    r = _rel_arg(s, r)
    ext = [t for t in _extension(s, f, _formula_arg(phi), s.arity(r)) if t not in s.rel(r)]
    for k in range(min(_cap_arg(cap), len(ext)) + 1):
        for chosen in combinations(ext, k):
            yield _with_rel(s, r, s.rel(r) | set(chosen)), f


def _delpairs_some(s, f, phi, r, cap):
    r = _rel_arg(s, r)
    ext = [t for t in _extension(s, f, _formula_arg(phi), s.arity(r)) if t in s.rel(r)]
    for k in range(min(_cap_arg(cap), len(ext)) + 1):
        for chosen in combinations(ext, k):
            yield _with_rel(s, r, s.rel(r) - set(chosen)), f


def _delpoints(s, f, psi):
    ext = _extension(s, f, _formula_arg(psi), 1)
    yield _drop_points(s, f, [t[0] for t in ext])


def _delpoints_some(s, f, psi, cap):
    ext = [t[0] for t in _extension(s, f, _formula_arg(psi), 1)]
    for k in range(min(_cap_arg(cap), len(ext)) + 1):
        for chosen in combinations(ext, k):
            yield _drop_points(s, f, chosen)


def _delete_label(s, f, y):
    y = _rel_arg(s, y)
    if s.arity(y) != 1:
        raise ModifierError(f"{y} is not unary")
    yield _drop_points(s, f, [t[0] for t in s.rel(y)])


def _insert_labelled(s, f, y, cap):
    y = _rel_arg(s, y)
    if s.arity(y) != 1:
        raise ModifierError(f"{y} is not unary")
    for n in range(_cap_arg(cap) + 1):
        yield _add_points(s, n, y), f


def _insert_points(s, f, cap):
    for n in range(_cap_arg(cap) + 1):
        yield _add_points(s, n), f


def _delete_some_points(s, f, cap):
    dom = sorted_elements(s.domain)
    for k in range(min(_cap_arg(cap), len(dom)) + 1):
        for chosen in combinations(dom, k):
            yield _drop_points(s, f, chosen)


def _insert_some_tuples(s, f, r, cap):
    r = _rel_arg(s, r)
    absent = [t for t in product(sorted_elements(s.domain), repeat=s.arity(r)) if t not in s.rel(r)]
    for k in range(min(_cap_arg(cap), len(absent)) + 1):
        for chosen in combinations(absent, k):
            yield _with_rel(s, r, s.rel(r) | set(chosen)), f


def _delete_some_tuples(s, f, r, cap):
    r = _rel_arg(s, r)
    present = sorted(s.rel(r), key=lambda t: tuple(element_key(e) for e in t))
    for k in range(min(_cap_arg(cap), len(present)) + 1):
        for chosen in combinations(present, k):
            yield _with_rel(s, r, s.rel(r) - set(chosen)), f


BUILTINS = {
    "identity": (_identity, "", "leave the structure as it is"),
    "addpairs": (_addpairs, "phi, R", "add every tuple satisfying phi to R"),
    "delpairs": (_delpairs, "phi, R", "remove every tuple satisfying phi from R"),
    "addpairs_some": (_addpairs_some, "phi, R, cap", "add some (at most cap) tuples satisfying phi to R"),
    "delpairs_some": (_delpairs_some, "phi, R, cap", "remove some (at most cap) tuples satisfying phi from R"),
    "delpoints": (_delpoints, "psi", "delete every point satisfying psi"),
    "delpoints_some": (_delpoints_some, "psi, cap", "delete some (at most cap) points satisfying psi"),
    "dellabel": (_delete_label, "Y", "delete the points in the extension of unary Y"),
    "IY": (_insert_labelled, "Y, cap", "add 0..cap fresh points labelled Y"),
    "I": (_insert_points, "cap", "add 0..cap fresh unlabelled points"),
    "D": (_delete_some_points, "cap", "delete any set of at most cap points"),
    "IR": (_insert_some_tuples, "R, cap", "add any set of at most cap tuples to R"),
    "DR": (_delete_some_tuples, "R, cap", "remove any set of at most cap tuples from R"),
}

for _name, (_fn, _params, _doc) in BUILTINS.items():
    register_modifier(_name, _fn, _params, _doc)


# -- evaluation -------------------------------------------------------------------------

def evaluate(s: Structure, f: Optional[Mapping[str, Element]], phi: Formula) -> bool:
    """First-order semantics extended with ``box[...]`` and ``dia[...]``."""
    f = dict(f or {})
    missing = free_vars(phi) - f.keys()
    if missing:
        raise UnboundVariable(f"no value for {sorted(missing)}")
    return _ev(s, f, phi)


def _ev(s, f, phi) -> bool:
    if is_fo(phi):
        return compile_fo(phi)(s, dict(f))
    if isinstance(phi, (Box, Diamond)):
        outs = apply_modifier(phi.name, s, f, *phi.args)
        test = all if isinstance(phi, Box) else any
        return test(_ev_checked(s2, dict(f2), phi.body) for s2, f2 in outs)
    if isinstance(phi, Not):
        return not _ev(s, f, phi.body)
    if isinstance(phi, And):
        return _ev(s, f, phi.left) and _ev(s, f, phi.right)
    if isinstance(phi, Or):
        return _ev(s, f, phi.left) or _ev(s, f, phi.right)
    if isinstance(phi, (Exists, Forall)):
        test = any if isinstance(phi, Exists) else all
        return test(_ev(s, {**f, phi.var: e}, phi.body) for e in sorted_elements(s.domain))
    raise ModifierError(f"{type(phi).__name__} is outside first-order logic with modifiers")


def _ev_checked(s, f, phi):
    missing = free_vars(phi) - f.keys()
    if missing:
        raise UnboundVariable(f"modifier removed the value of {sorted(missing)}")
    return _ev(s, f, phi)


def eval_box(m, phi: Formula, s: Structure, f=None, *args) -> bool:
    return all(evaluate(s2, dict(f2), phi) for s2, f2 in apply_modifier(m, s, f, *args))


def eval_diamond(m, phi: Formula, s: Structure, f=None, *args) -> bool:
    return any(evaluate(s2, dict(f2), phi) for s2, f2 in apply_modifier(m, s, f, *args))


# -- invariance --------------------------------------------------------------------------

def pointed_isomorphic(a: Pointed, b: Pointed) -> bool:
    (s1, f1), (s2, f2) = a, b
    d1, d2 = dict(f1), dict(f2)
    if d1.keys() != d2.keys() or s1.signature != s2.signature:
        return False
    fixed = {}
    for v in d1:
        x, y = d1[v], d2[v]
        if fixed.get(x, y) != y:
            return False
        fixed[x] = y
    return find_isomorphism(s1, s2, fixed) is not None


def same_iso_multiset(xs: Sequence[Pointed], ys: Sequence[Pointed]) -> bool:
    if len(xs) != len(ys):
        return False
    left = list(ys)
    for x in xs:
        for i, y in enumerate(left):
            if pointed_isomorphic(x, y):
                del left[i]
                break
        else:
            return False
    return True


def rename_pointed(s: Structure, f: Mapping, mapping: Mapping) -> Pointed:
    return _point(s.rename(mapping), {v: mapping[e] for v, e in f.items()})


@dataclass
class InvarianceReport:
    modifier: str
    checked: int
    violations: List[tuple]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_invariance(
    m, samples: Sequence, *args, renamings: int = 5, rng: Optional[random.Random] = None,
) -> InvarianceReport:
    """Compare outputs on each sample and on renamed copies of it.

    ``samples`` holds structures or ``(structure, assignment)`` pairs.  A
    violation records ``(structure, assignment, mapping)``.
    """
    if isinstance(m, str):
        m = get_modifier(m)
    rng = rng or random.Random(0)
    bad = []
    n = 0
    for smp in samples:
        s, f = (smp, {}) if isinstance(smp, Structure) else (smp[0], dict(smp[1]))
        base = apply_modifier(m, s, f, *args)
        dom = sorted_elements(s.domain)
        for _ in range(renamings):
            image = rng.sample(range(1000, 1000 + 10 * max(1, len(dom))), len(dom))
            mapping = dict(zip(dom, image))
            s2, f2 = rename_pointed(s, f, mapping)
            other = apply_modifier(m, s2, dict(f2), *args)
            n += 1
            if not same_iso_multiset(base, other):
                bad.append((s, f, mapping))
    return InvarianceReport(m.name, n, bad)
