"""Seeded generators for formulas, structures and terms used by tests and selftest."""
from __future__ import annotations

import random
from itertools import product
from typing import Iterator, List, Optional, Sequence

from .oracle import enumerate_structures
from .relalg import Cyc, Ex, Identity, Join, LTerm, Neg, RelSym, Swap, U, term_arity
from .structures import Signature, Structure
from .syntax import And, Atom, Bottom, Eq, Exists, Forall, Formula, Not, Or, Top

VARS = ("x1", "x2", "x3")
DEFAULT_SIGNATURE = Signature.of(P=1, R=2, T=3)


def _atom(rng: random.Random, signature: Signature, pool: Sequence[str]) -> Formula:
    if rng.random() < 0.2 or not signature.relations:
        return Eq(rng.choice(pool), rng.choice(pool))
    name, ar = rng.choice(signature.relations)
    return Atom(name, tuple(rng.choice(pool) for _ in range(ar)))


def random_formula(
    rng: random.Random,
    signature: Signature,
    *,
    free: Sequence[str] = (),
    max_quant: int = 3,
    size: int = 6,
    variables: Sequence[str] = VARS,
) -> Formula:
    """Random FO formula whose free variables are among ``free``.

    ``max_quant`` bounds quantifier nesting; ``size`` roughly bounds the
    number of connectives.
    """

    def gen(scope: tuple, q: int, budget: int) -> Formula:
        if not scope:
            if q == 0:
                return rng.choice([Top(), Bottom()])
            v = rng.choice(variables)
            return rng.choice([Exists, Forall])(v, gen((v,), q - 1, budget - 1))
        r = rng.random()
        if budget <= 0 or r < 0.25:
            return _atom(rng, signature, scope)
        if r < 0.4:
            return Not(gen(scope, q, budget - 1))
        if r < 0.7 or q == 0:
            k = rng.choice([And, Or])
            return k(gen(scope, q, budget // 2), gen(scope, q, budget // 2))
        v = rng.choice(variables)
        inner = tuple(sorted(set(scope) | {v}))
        return rng.choice([Exists, Forall])(v, gen(inner, q - 1, budget - 1))

    return gen(tuple(free), max_quant, size)


def sentence_corpus(n: int, seed: int, signature: Signature, **kw) -> List[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, signature, **kw) for _ in range(n)]


def open_formula_corpus(n: int, seed: int, signature: Signature = DEFAULT_SIGNATURE, **kw) -> List[Formula]:
    """Formulas with up to three free variables (drawn from x1..x3)."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        k = rng.randint(0, 3)
        free = tuple(sorted(rng.sample(VARS, k)))
        out.append(random_formula(rng, signature, free=free, max_quant=2, **kw))
    return out


def all_structures(signature: Signature, max_size: int) -> Iterator[Structure]:
    """Every structure over domains ``{0..n-1}`` for ``n <= max_size``."""
    for n in range(max_size + 1):
        yield from enumerate_structures(signature, range(n))


def random_structure(rng: random.Random, signature: Signature, size: int, density: Optional[float] = None) -> Structure:
    dom = list(range(size))
    p = rng.uniform(0.15, 0.6) if density is None else density
    rels = {n: [t for t in product(dom, repeat=a) if rng.random() < p] for n, a in signature}
    return Structure(signature, dom, rels)


def random_term(rng: random.Random, signature: Signature, depth: int = 6, max_arity: int = 4) -> LTerm:
    """Random l-term of at most the given depth whose intermediate values
    never exceed ``max_arity`` columns (keeps complements cheap)."""

    def gen(d: int) -> LTerm:
        while True:
            if d <= 1 or rng.random() < 0.2:
                if rng.random() < 0.3 or not signature.relations:
                    t = U()
                else:
                    t = RelSym(rng.choice(signature.names))
            else:
                k = rng.random()
                if k < 0.2:
                    t = Join(gen(d - 1), gen(d - 1))
                else:
                    op = rng.choice([Identity, Neg, Cyc, Swap, Ex, Ex])
                    t = op(gen(d - 1))
            if term_arity(t, signature) <= max_arity:
                return t

    return gen(depth)
