"""Axiom-set mental models, bounded open-world reasoning, and certain answers.

A mental model lists facts, negative facts and other axioms over a finite
set of candidate element names.  Element names are used directly as free
variables of the formulas and are interpreted as themselves, so ``R(a,b)``
in a model whose domain contains ``a`` and ``b`` means ``(a,b)`` is in R.
Models are only considered if their domain contains every mentioned name.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .oracle import (
    DEFAULT_ENUMERATION_CAP, OracleError, compile_fo, enumerate_structures, eval_fo,
)
from .structures import Element, Signature, Structure, sorted_elements
from .syntax import (
    And, Atom, Eq, Forall, Formula, Not, Or, big_and, free_vars, parse, relation_arities, substitute,
    to_text,
)


class MentalModelError(ValueError):
    pass


def _is_literal(phi: Formula) -> bool:
    if isinstance(phi, Not):
        phi = phi.body
    return isinstance(phi, (Atom, Eq))


def _negate(phi: Formula) -> Formula:
    return phi.body if isinstance(phi, Not) else Not(phi)


def _signature_of(formulas: Iterable[Formula], extra: Optional[Signature] = None) -> Signature:
    ar: Dict[str, int] = dict(extra or ())
    for phi in formulas:
        for n, a in relation_arities(phi).items():
            if ar.setdefault(n, a) != a:
                raise MentalModelError(f"relation {n} used with two arities")
    return Signature(tuple(sorted(ar.items())))


@dataclass(frozen=True)
class MentalModel:
    facts: Tuple[Formula, ...]
    neg_facts: Tuple[Formula, ...]
    axioms: Tuple[Formula, ...]
    universe: Tuple[str, ...]
    signature: Optional[Signature] = None

    def __post_init__(self):
        facts = tuple(self.facts)
        negs = tuple(n if isinstance(n, Not) else Not(n) for n in self.neg_facts)
        for f in facts:
            if not isinstance(f, (Atom, Eq)):
                raise MentalModelError(f"fact {to_text(f)} is not an atom")
        for f in negs:
            if not isinstance(f.body, (Atom, Eq)):
                raise MentalModelError(f"negative fact {to_text(f)} is not a negated atom")
        object.__setattr__(self, "facts", facts)
        object.__setattr__(self, "neg_facts", negs)
        object.__setattr__(self, "axioms", tuple(self.axioms))
        object.__setattr__(self, "universe", tuple(self.universe))
        sig = _signature_of(self.formulas, self.signature)
        object.__setattr__(self, "signature", sig)
        stray = self.mentioned - set(self.universe)
        if stray:
            raise MentalModelError(f"names {sorted(stray)} are not in the universe")

    @property
    def formulas(self) -> Tuple[Formula, ...]:
        return self.facts + self.neg_facts + self.axioms

    @property
    def mentioned(self) -> FrozenSet[str]:
        out = set()
        for phi in self.formulas:
            out |= free_vars(phi)
        return frozenset(out)


def parse_mental_model(text: str, signature: Optional[Signature] = None) -> MentalModel:
    """Read the ``universe:`` / ``facts:`` / ``negfacts:`` / ``axioms:`` format.

    Each section header may carry items on the same line; further items follow
    one per line.  ``#`` starts a comment.  Negative facts may be written with
    or without the leading ``~``.
    """
    sections: Dict[str, List[str]] = {"universe": [], "facts": [], "negfacts": [], "axioms": []}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"(universe|facts|negfacts|axioms)\s*:(.*)$", line)
        if m:
            current = m.group(1)
            line = m.group(2).strip()
            if not line:
                continue
        if current is None:
            raise MentalModelError(f"line {lineno}: content before any section header")
        sections[current].append(line)
    universe = [e for line in sections["universe"] for e in re.split(r"[\s,]+", line) if e]

    def forms(key):
        out = []
        for line in sections[key]:
            try:
                out.append(parse(line))
            except ValueError as exc:
                raise MentalModelError(f"{key}: {exc}") from None
        return out

    return MentalModel(forms("facts"), forms("negfacts"), forms("axioms"), universe, signature)


def dump_mental_model(m: MentalModel) -> str:
    lines = ["universe: " + " ".join(m.universe), "facts:"]
    lines += [to_text(f) for f in m.facts]
    lines.append("negfacts:")
    lines += [to_text(f) for f in m.neg_facts]
    lines.append("axioms:")
    lines += [to_text(f) for f in m.axioms]
    return "\n".join(lines) + "\n"


# -- consistent models ----------------------------------------------------------

def _domains(required: Sequence, optional: Sequence, max_domain: int) -> Iterator[list]:
    for extra in range(0, max(0, max_domain - len(required)) + 1):
        for more in combinations(optional, extra):
            yield list(required) + list(more)


def _pins(literals: Iterable[Formula]):
    """Split literals into required/forbidden relation tuples and leftovers."""
    req, forb, rest = [], [], []
    for lit in literals:
        neg = isinstance(lit, Not)
        a = lit.body if neg else lit
        if isinstance(a, Atom):
            (forb if neg else req).append((a.rel, tuple(a.args)))
        else:
            rest.append(lit)
    return req, forb, rest


def consistent_models(
    m: MentalModel, max_domain: int, *, require: Iterable[str] = (), cap: int = DEFAULT_ENUMERATION_CAP,
) -> List[Structure]:
    """Every structure with mentioned names ⊆ domain ⊆ universe, at most
    ``max_domain`` elements, satisfying all facts, negative facts and axioms."""
    if max_domain > len(m.universe):
        raise OracleError("max_domain exceeds the size of the universe")
    names = sorted_elements(m.mentioned | set(require))
    if len(names) > max_domain:
        return []
    optional = [e for e in sorted_elements(m.universe) if e not in names]
    req, forb, rest = _pins(m.facts + m.neg_facts)
    constraint = big_and(rest + list(m.axioms))
    out = []
    for dom in _domains(names, optional, max_domain):
        env = {n: n for n in names}
        out.extend(enumerate_structures(
            m.signature, dom, constraint, assignment=env, required=req, forbidden=forb, cap=cap,
        ))
    return out


@dataclass(frozen=True)
class Knowledge:
    answer: str        # "yes", "no" or "unknown"
    vacuous: bool      # no consistent model at all
    models: int

    def __str__(self):
        return self.answer + (" (vacuous)" if self.vacuous else "")


def knows(m: MentalModel, phi: Formula, max_domain: int, **kw) -> Knowledge:
    """Does ``phi`` hold in all, none, or only some of the consistent models?

    Names used by ``phi`` but not by the model are added to the required
    domain, since the formula says nothing about models lacking them.
    """
    names = free_vars(phi)
    stray = names - set(m.universe)
    if stray:
        raise MentalModelError(f"names {sorted(stray)} are not in the universe")
    models = consistent_models(m, max_domain, require=names, **kw)
    if not models:
        return Knowledge("yes", True, 0)
    check = compile_fo(phi)
    env = {n: n for n in names}
    hits = sum(1 for s in models if check(s, dict(env)))
    if hits == len(models):
        ans = "yes"
    elif hits == 0:
        ans = "no"
    else:
        ans = "unknown"
    return Knowledge(ans, False, len(models))


# -- bounded forward chaining ------------------------------------------------------

def _rule_modus_ponens(phi, work, universe):
    if isinstance(phi, Or) and isinstance(phi.left, Not) and phi.left.body in work:
        yield phi.right


def _rule_and_elim(phi, work, universe):
    if isinstance(phi, And):
        yield phi.left
        yield phi.right


def _rule_disjunctive_syllogism(phi, work, universe):
    if isinstance(phi, Or):
        if _negate(phi.left) in work:
            yield phi.right
        if _negate(phi.right) in work:
            yield phi.left


def _rule_double_negation(phi, work, universe):
    if isinstance(phi, Not) and isinstance(phi.body, Not):
        yield phi.body.body


def _rule_universal_instantiation(phi, work, universe):
    if isinstance(phi, Forall):
        for c in universe:
            yield substitute(phi.body, phi.var, c)


RULES = {
    "modus_ponens": _rule_modus_ponens,
    "and_elim": _rule_and_elim,
    "disjunctive_syllogism": _rule_disjunctive_syllogism,
    "double_negation": _rule_double_negation,
    "universal_instantiation": _rule_universal_instantiation,
}


@dataclass(frozen=True)
class InferenceBudget:
    rules: Tuple[str, ...] = ("modus_ponens", "and_elim")
    max_applications: int = 10
    working_capacity: int = 20

    def __post_init__(self):
        if self.max_applications < 0 or self.working_capacity < 1:
            raise ValueError("inference bounds must be positive")
        for r in self.rules:
            if r not in RULES:
                raise ValueError(f"unknown inference rule {r!r}")


@dataclass
class Derivation:
    derived: FrozenSet[Formula]
    contradiction: bool
    applications: int
    working: Tuple[Formula, ...]
    sizes: List[int] = field(default_factory=list)


def derive(m: MentalModel, budget: InferenceBudget = InferenceBudget()) -> Derivation:
    """Forward chaining under a rule list, an application limit and a
    working-memory capacity.

    Axioms enter memory first, then facts, then negative facts; when memory is
    full the oldest formula is forgotten.  Each rule application adds one new
    formula.  The result lists the literals left in memory at the end.
    """
    work: List[Formula] = []
    present = set()
    contradiction = False
    sizes: List[int] = []

    def add(phi):
        nonlocal contradiction
        if phi in present:
            return False
        work.append(phi)
        present.add(phi)
        while len(work) > budget.working_capacity:
            present.discard(work.pop(0))
        if _is_literal(phi) and _negate(phi) in present:
            contradiction = True
        sizes.append(len(work))
        return True

    for phi in m.axioms + m.facts + m.neg_facts:
        add(phi)
    applied = 0
    progress = True
    rules = [RULES[r] for r in budget.rules]
    while progress and applied < budget.max_applications:
        progress = False
        for phi in list(work):
            if phi not in present:
                continue
            for rule in rules:
                for new in rule(phi, present, m.universe):
                    if applied >= budget.max_applications:
                        break
                    if add(new):
                        applied += 1
                        progress = True
    lits = frozenset(p for p in work if _is_literal(p))
    return Derivation(lits, contradiction, applied, tuple(work), sizes)


# -- ontology-mediated queries ---------------------------------------------------------

ENTAILED = "entailed-up-to-bound"
REFUTED = "refuted"


@dataclass
class OMQResult:
    answer: str
    bound: int
    models_checked: int
    countermodel: Optional[Structure] = None

    def __str__(self):
        return self.answer


def omq_models(signature, ontology, db, max_domain, *, cap=DEFAULT_ENUMERATION_CAP) -> Iterator[Structure]:
    """Structures with at most ``max_domain`` elements that contain the
    database elements, satisfy every database literal and every ontology
    sentence.  Extra elements are the integers 0, 1, ..."""
    names = sorted_elements({e for lit in db for e in free_vars(lit)})
    sig = _signature_of(list(ontology) + list(db), signature)
    req, forb, rest = _pins(db)
    constraint = big_and(rest + list(ontology))
    env = {n: n for n in names}
    for extra in range(0, max_domain - len(names) + 1):
        dom = names + list(range(extra))
        yield from enumerate_structures(sig, dom, constraint, assignment=env, required=req,
                                        forbidden=forb, cap=cap)


def _answer_vars(query: Formula, names) -> List[str]:
    """Free variables of the query that are not database names, by subindex."""
    from .relalg import var_key

    return sorted(free_vars(query) - set(names), key=var_key)


def omq_certain(
    signature, ontology: Sequence[Formula], query: Formula, db: Sequence[Formula],
    answer: Sequence[Element] = (), max_domain: int = 3, *, variables: Optional[Sequence[str]] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> OMQResult:
    """Is ``answer`` a certain answer of ``query`` over ``db`` under ``ontology``?

    Only models up to ``max_domain`` elements are examined: a countermodel
    refutes for good, while passing every model only shows entailment up to
    the bound.  ``variables`` fixes the order of the query's free variables
    (default: by subindex, then name).
    """
    for lit in db:
        if not _is_literal(lit):
            raise MentalModelError(f"database entry {to_text(lit)} is not a literal")
    names = {e for lit in db for e in free_vars(lit)}
    vs = list(variables) if variables is not None else _answer_vars(query, names)
    if len(vs) != len(answer):
        raise MentalModelError(f"query has {len(vs)} answer variables, got {len(answer)} values")
    if any(a not in names for a in answer):
        raise MentalModelError("answer elements must occur in the database")
    if len(names) > max_domain:
        raise MentalModelError("the database has more elements than the domain bound")
    check = compile_fo(query)
    env = {n: n for n in names}
    env.update(zip(vs, answer))
    n = 0
    for s in omq_models(signature, ontology, db, max_domain, cap=cap):
        n += 1
        if not check(s, dict(env)):
            return OMQResult(REFUTED, max_domain, n, s)
    return OMQResult(ENTAILED, max_domain, n)


def verify_countermodel(ontology, query, db, answer, result: OMQResult, variables=None) -> bool:
    """Independent check that a reported countermodel really is one."""
    s = result.countermodel
    if s is None:
        return False
    names = {e for lit in db for e in free_vars(lit)}
    if not names <= s.domain:
        return False
    env = {n: n for n in names}
    if not all(eval_fo(s, env, phi) for phi in list(ontology) + list(db)):
        return False
    vs = list(variables) if variables is not None else _answer_vars(query, names)
    env.update(zip(vs, answer))
    return not eval_fo(s, env, query)
