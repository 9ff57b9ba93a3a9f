"""Acceptance criteria as plain functions.

Each ``criterion_N`` returns a :class:`Result`; ``run_all`` runs them in
order.  The test suite and ``structura selftest`` both call into this module,
so the command line and pytest always check the same thing.
"""
from __future__ import annotations

import inspect
import random
import time
from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, Dict, List, Optional

from . import corpus
from .game import Budget, Outcome, solve, solve_fo
from .mentalmodels import (
    ENTAILED, REFUTED, consistent_models, knows, omq_certain, parse_mental_model, verify_countermodel,
)
from .modifiers import check_invariance, eval_box, eval_diamond
from .oracle import holds
from .relalg import (
    FALSE0, TRUE0, Cyc, Ex, Identity, Join, Neg, RelSym, RelValue, Swap, U, compile_fo, defined_relation,
    eval_term, permute_term, term_to_fo,
)
from .structures import Signature, Structure, empty_structure, is_well_formed
from .syntax import And, Atom, DeletePoint, Exists, Not, parse
from .systems import (
    END, UNDEFINED, StepBudget, SystemDef, counter_system, g_unique, game_system_outcome, is_finite_evolution, run,
    semantic_game_as_system,
)

SEED = 20240601


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:>2}. {self.title}: {self.detail}"


# -- 1 --------------------------------------------------------------------------------

FO_SIGNATURE = Signature.of(R=2)


def fo_corpus(seed: int = SEED, n: int = 500):
    sents = corpus.sentence_corpus(n, seed, FO_SIGNATURE)
    structs = list(corpus.all_structures(FO_SIGNATURE, 3))
    rng = random.Random(seed + 1)
    structs += [corpus.random_structure(rng, FO_SIGNATURE, 4) for _ in range(50)]
    return sents, structs


def criterion_1(seed: int = SEED, n: int = 500, time_limit: float = 300.0) -> Result:
    sents, structs = fo_corpus(seed, n)
    start = time.perf_counter()
    bad = 0
    undecided = 0
    for phi in sents:
        for s in structs:
            o = solve_fo(s, phi)
            if o not in (Outcome.ELOISE_WINS, Outcome.ABELARD_WINS):
                undecided += 1
            if (o is Outcome.ELOISE_WINS) != holds(s, phi):
                bad += 1
    took = time.perf_counter() - start
    ok = bad == 0 and undecided == 0 and took <= time_limit
    return Result(1, "FO determinacy and soundness", ok,
                  f"{len(sents)} sentences x {len(structs)} structures, {bad} disagreements, "
                  f"{undecided} undecided, {took:.1f}s")


# -- 2 --------------------------------------------------------------------------------

def criterion_2() -> Result:
    s = empty_structure()
    notes = []
    ok = True
    for text in ("C1 ~C1", "C1 C1"):
        sol = solve(s, parse(text))
        good = sol.outcome is Outcome.NEITHER and sol.closed
        ok &= good
        notes.append(f"{text} -> {sol.outcome.value} ({'closed' if sol.closed else 'cut'})")
    return Result(2, "liar and truth-teller", ok, "; ".join(notes))


# -- 3 --------------------------------------------------------------------------------

COMPILER_SIGNATURE = corpus.DEFAULT_SIGNATURE


def compiler_structures(seed: int = SEED, n: int = 50):
    rng = random.Random(seed + 3)
    return [corpus.random_structure(rng, COMPILER_SIGNATURE, rng.randint(1, 4)) for _ in range(n)]


def criterion_3(seed: int = SEED, n_formulas: int = 200) -> Result:
    phis = corpus.open_formula_corpus(n_formulas, seed + 2)
    structs = compiler_structures(seed)
    bad = 0
    for phi in phis:
        t = compile_fo(phi)
        for s in structs:
            if eval_term(t, s) != defined_relation(s, phi):
                bad += 1
    # the worked example
    ex = parse("R(x2,x1,x2)")
    want = Cyc(Ex(Identity(Cyc(Cyc(RelSym("R"))))))
    got = compile_fo(ex)
    rng = random.Random(seed + 4)
    sig = Signature.of(R=3)
    ex_bad = 0
    for _ in range(20):
        s = corpus.random_structure(rng, sig, rng.randint(1, 4), density=0.5)
        if eval_term(want, s) != defined_relation(s, ex):
            ex_bad += 1
    ok = bad == 0 and got == want and ex_bad == 0
    return Result(3, "compiler soundness", ok,
                  f"{len(phis)} formulas x {len(structs)} structures, {bad} mismatches; "
                  f"R(x2,x1,x2) -> {got} ({'as expected' if got == want else 'UNEXPECTED'}), "
                  f"{ex_bad}/20 mismatches")


# -- 4 --------------------------------------------------------------------------------

def criterion_4(seed: int = SEED, n_terms: int = 200) -> Result:
    rng = random.Random(seed + 5)
    sig = Signature.of(P=1, R=2)
    structs = [corpus.random_structure(rng, sig, rng.randint(1, 3)) for _ in range(8)]
    bad = 0
    for _ in range(n_terms):
        t = corpus.random_term(rng, sig, depth=6)
        back = compile_fo(term_to_fo(t, sig))
        for s in structs:
            if eval_term(back, s) != eval_term(t, s):
                bad += 1
    return Result(4, "term -> FO -> term round trip", bad == 0,
                  f"{n_terms} terms x {len(structs)} structures, {bad} mismatches")


# -- 5 --------------------------------------------------------------------------------

def criterion_5() -> Result:
    n = bad = 0
    for k in range(1, 6):
        sig = Signature.of(R=k)
        s = Structure(sig, range(1, k + 1), {"R": [tuple(range(1, k + 1))]})
        for perm in permutations(range(k)):
            n += 1
            v = eval_term(permute_term(RelSym("R"), perm), s)
            if v != RelValue(k, {tuple(i + 1 for i in perm)}):
                bad += 1
    return Result(5, "permutation completeness", bad == 0 and n == 153, f"{n} permutations, {bad} failures")


# -- 6 --------------------------------------------------------------------------------

def clause_cases():
    """``(label, term, structure, expected)`` for the algebra clause examples."""
    sig = Signature.of(A=3, B=3, C=1, E=2)
    s = Structure(sig, [1, 2, 3], {"A": [(1, 2, 3)], "B": [(1, 1, 2), (1, 2, 2)], "C": [(1,)], "E": [(1, 2)]})
    top, bot = Ex(U()), Neg(Ex(U()))
    R = RelSym
    return [
        ("u is the domain", U(), s, RelValue(1, {(1,), (2,), (3,)})),
        ("p rotates left", Cyc(R("A")), s, RelValue(3, {(2, 3, 1)})),
        ("I keeps a1=a2", Identity(R("B")), s, RelValue(3, {(1, 1, 2)})),
        ("I on unary is identity", Identity(R("C")), s, RelValue(1, {(1,)})),
        ("p on unary is identity", Cyc(R("C")), s, RelValue(1, {(1,)})),
        ("s on unary is identity", Swap(R("C")), s, RelValue(1, {(1,)})),
        ("s swaps the first two", Swap(R("A")), s, RelValue(3, {(2, 1, 3)})),
        ("ex drops the first", Ex(R("A")), s, RelValue(2, {(2, 3)})),
        ("ex u is the nullary truth", top, s, TRUE0),
        ("not on nullary truth", bot, s, FALSE0),
        ("not twice on nullary truth", Neg(bot), s, TRUE0),
        ("not twice on nullary empty", Neg(Neg(bot)), s, FALSE0),
        ("not on binary", Neg(R("E")), s,
         RelValue(2, {t for t in product([1, 2, 3], repeat=2) if t != (1, 2)})),
        ("not twice on binary empty", Neg(Neg(Identity(Swap(R("E"))))), s, RelValue(2, ())),
        ("J with nullary truth on the left", Join(top, R("C")), s, RelValue(1, {(1,)})),
        ("J with nullary truth on the right", Join(R("C"), top), s, RelValue(1, {(1,)})),
        ("J with nullary empty", Join(bot, R("C")), s, RelValue(1, ())),
        ("J of two nullary truths", Join(top, top), s, TRUE0),
        ("J concatenates", Join(R("C"), R("E")), s, RelValue(3, {(1, 1, 2)})),
        ("ex on nullary is identity", Ex(top), s, TRUE0),
    ]


def criterion_6() -> Result:
    fails = [label for label, t, s, want in clause_cases() if eval_term(t, s) != want]
    n = len(clause_cases())
    return Result(6, "algebra clause suite", not fails,
                  f"{n - len(fails)}/{n} clauses" + (f", failing: {', '.join(fails)}" if fails else ""))


# -- 7 --------------------------------------------------------------------------------

def scripted_systems() -> Dict[str, SystemDef]:
    """One small system per termination reason."""
    sig = Signature.of(P=1)
    s0 = Structure(sig, [0], {})
    s1 = Structure(sig, [0], {"P": [(0,)]})
    go = {"a": lambda e: "go"}

    def f_forbid(h):
        return {s0} if not h.items else UNDEFINED

    def f_allowed_end(h):
        return set() if h.rounds >= 2 else {s0}

    def g_end(h, W):
        return END if h.rounds >= 1 else g_unique(h, W)

    def f_two(h):
        return {s0} if not h.items else {s0, s1}

    def agent_quits(e):
        return UNDEFINED if e.rounds >= 1 else "go"

    loop = lambda h: {s0}
    return {
        "FForbidden": SystemDef({"go"}, ("a",), f_forbid, g_unique, go),
        "FAllowedEnd": SystemDef({"go"}, ("a",), f_allowed_end, g_unique, go),
        "GEnd": SystemDef({"go"}, ("a",), loop, g_end, go),
        "GUndefined": SystemDef({"go"}, ("a",), f_two, g_unique, go),
        "AgentUndefined": SystemDef({"go"}, ("a",), loop, g_unique, {"a": agent_quits}),
        "StepBudget": SystemDef({"go"}, ("a",), loop, g_unique, go),
    }


def criterion_7() -> Result:
    notes = []
    ok = True
    sys = counter_system()
    for n in range(11):
        e, r = run(sys, n)
        good = len(e.last.rel("P")) == n and isinstance(r, StepBudget) and is_finite_evolution(sys, e)
        ok &= good
    notes.append("counter |P| = n for n <= 10" if ok else "counter FAILED")
    seen = []
    for name, sys in scripted_systems().items():
        e, r = run(sys, 5)
        good = r.kind == name and is_finite_evolution(sys, e)
        ok &= good
        seen.append(f"{name}:{'ok' if good else r.kind}")
    notes.append(" ".join(seen))
    return Result(7, "systems", ok, "; ".join(notes))


# -- 8 --------------------------------------------------------------------------------

def criterion_8(seed: int = SEED, n: int = 50) -> Result:
    rng = random.Random(seed + 8)
    sents = corpus.sentence_corpus(n, seed + 9, FO_SIGNATURE)
    bad = 0
    for phi in sents:
        s = corpus.random_structure(rng, FO_SIGNATURE, rng.randint(1, 3))
        want = solve(s, phi).outcome
        sys, game = semantic_game_as_system(s, phi)
        e, r = run(sys, 100)
        got = game_system_outcome(game, e, r)
        if got is not want or not is_finite_evolution(sys, e):
            bad += 1
    return Result(8, "game-as-system bridge", bad == 0, f"{n} sentences, {bad} mismatches")


# -- 9 --------------------------------------------------------------------------------

WORKED_MODEL = """\
universe: a b c
facts: R(a,a)
negfacts: ~R(b,a)
axioms: ~Ex>=8 x. x=x
"""

FULL_DIAGRAM = """\
universe: a b c
facts:
R(a,a)
R(a,b)
negfacts:
~R(b,a)
~R(b,b)
axioms: Ex=2 x. x=x
"""


def criterion_9() -> Result:
    m = parse_mental_model(WORKED_MODEL)
    got = {q: knows(m, parse(q), 3).answer for q in ("R(a,a)", "R(b,b)", "Ex>=8 x. x=x")}
    want = {"R(a,a)": "yes", "R(b,b)": "unknown", "Ex>=8 x. x=x": "no"}
    full = consistent_models(parse_mental_model(FULL_DIAGRAM), 3)
    unique = (len(full) == 1 and full[0].domain == {"a", "b"}
              and full[0].rel("R") == {("a", "a"), ("a", "b")})
    ok = got == want and unique
    return Result(9, "mental-model worked example", ok,
                  ", ".join(f"knows({q})={a}" for q, a in got.items())
                  + f"; full diagram -> {len(full)} model(s)")


# -- 10 -------------------------------------------------------------------------------

HORN_AXIOMS = [
    "All x. All y. R(x,y) -> R(y,x)",
    "All x. All y. All z. R(x,y) & R(y,z) -> R(x,z)",
    "All x. All y. R(x,y) -> R(x,x)",
    "All x. All y. R(x,y) -> R(y,y)",
]


def omq_instances(seed: int = SEED, n: int = 100):
    rng = random.Random(seed + 10)
    names = ["a", "b", "c"]
    out = []
    for _ in range(n):
        k = rng.randint(2, 3)
        pairs = list(product(names[:k], repeat=2))
        db = [Atom("R", p) for p in rng.sample(pairs, rng.randint(1, 3))]
        consts = sorted({e for a in db for e in a.args})
        onto = [parse(a) for a in HORN_AXIOMS if rng.random() < 0.5]
        kind = rng.random()
        if kind < 0.5:
            q, ans = Atom("R", tuple(rng.choice(consts) for _ in range(2))), ()
        elif kind < 0.8:
            q, ans = parse("R(x1,x2)"), tuple(rng.choice(consts) for _ in range(2))
        else:
            u, v = rng.choice(consts), rng.choice(consts)
            q, ans = Exists("y", And(Atom("R", (u, "y")), Atom("R", ("y", v)))), ()
        out.append((onto, db, q, ans))
    return out


def criterion_10(seed: int = SEED, n: int = 100) -> Result:
    refuted = entailed = flips = unconfirmed = 0
    for onto, db, q, ans in omq_instances(seed, n):
        r4 = omq_certain(FO_SIGNATURE, onto, q, db, ans, 4)
        r3 = omq_certain(FO_SIGNATURE, onto, q, db, ans, 3)
        for r in (r3, r4):
            if r.answer == REFUTED and not verify_countermodel(onto, q, db, ans, r):
                unconfirmed += 1
        if r3.answer == ENTAILED:
            entailed += 1
            if r4.answer != ENTAILED:
                flips += 1
        else:
            refuted += 1
            if r4.answer != REFUTED:
                flips += 1  # refutations must persist as the bound grows
    ok = flips == 0 and unconfirmed == 0
    return Result(10, "OMQ bounded soundness", ok,
                  f"{n} instances: {entailed} entailed-up-to-bound, {refuted} refuted, "
                  f"{unconfirmed} unconfirmed countermodels, {flips} flips between bounds 3 and 4")


# -- 11 -------------------------------------------------------------------------------

MOD_SIGNATURE = Signature.of(P=1, R=2)


def builtin_modifier_calls():
    f = parse
    return [
        ("identity", ()),
        ("addpairs", (f("R(x2,x1)"), "R")),
        ("delpairs", (f("R(x1,x2) & P(x1)"), "R")),
        ("addpairs_some", (f("~R(x1,x2)"), "R", 2)),
        ("delpairs_some", (f("R(x1,x2)"), "R", 2)),
        ("delpoints", (f("P(x1)"),)),
        ("delpoints_some", (f("Ex y. R(x1,y)"), 2)),
        ("dellabel", ("P",)),
        ("IY", ("P", 2)),
        ("I", (2,)),
        ("D", (2,)),
        ("IR", ("R", 2)),
        ("DR", ("R", 2)),
    ]


def modifier_samples(seed: int = SEED, n: int = 20):
    rng = random.Random(seed + 11)
    out = []
    for i in range(n):
        s = corpus.random_structure(rng, MOD_SIGNATURE, rng.randint(1, 3))
        f = {"z": rng.choice(sorted(s.domain))} if i % 2 else {}
        out.append((s, f))
    return out


def criterion_11(seed: int = SEED) -> Result:
    samples = modifier_samples(seed)
    failing = []
    for name, args in builtin_modifier_calls():
        rep = check_invariance(name, samples, *args, renamings=5, rng=random.Random(seed))
        if not rep.ok:
            failing.append(name)
    rng = random.Random(seed + 12)
    calls = builtin_modifier_calls()
    bad = 0
    for i in range(200):
        name, args = rng.choice(calls)
        s, f = rng.choice(samples)
        phi = corpus.random_formula(rng, MOD_SIGNATURE, max_quant=2, size=4)
        if eval_diamond(name, phi, s, f, *args) != (not eval_box(name, Not(phi), s, f, *args)):
            bad += 1
    ok = not failing and bad == 0
    return Result(11, "modifier invariance and duality", ok,
                  f"{len(calls)} built-ins x {len(samples)} samples x 5 renamings, "
                  f"failing: {failing or 'none'}; duality {200 - bad}/200")


# -- 12 -------------------------------------------------------------------------------

DELETION_FORMULAS = [
    "Ex x1. del x1. ~Ex x2. x2=x2",
    "Ex x1. Ex x2. del x1. R(x2,x2)",
    "All x1. Ex x2. del x1. Ex x3. R(x3,x2) | x3=x2",
    "Ex x1. Ex x2. del x1. R(x1,x2)",
    "Ex x1. del x1. del x1. All x2. Ex x3. R(x2,x3)",
    "ins x1. Ex x2. R(x2,x1) | del x2. Ex x3. x3=x1",
    "Ex x1. Ex x2. ~x1=x2 & del x2. All x3. R(x1,x3)",
    "Ex x1. ins R(x1,x2). del x2. R(x1,x1)",
]


def criterion_12(seed: int = SEED) -> Result:
    rng = random.Random(seed + 13)
    steps = bad = 0
    for text in DELETION_FORMULAS:
        phi = parse(text)
        for _ in range(10):
            s = corpus.random_structure(rng, FO_SIGNATURE, rng.randint(1, 3))
            sol = solve(s, phi, Budget(20_000, 2))
            game = sol.game
            for pos in sol.positions:
                node = game.subformula(pos.node)
                if not isinstance(node, DeletePoint) or node.var not in dict(pos.assignment):
                    continue
                u = dict(pos.assignment)[node.var]
                r = game.expand(pos)
                steps += 1
                (nxt,) = r.successors
                if (not is_well_formed(nxt.structure) or u in nxt.structure.domain
                        or u in dict(nxt.assignment).values()):
                    bad += 1
    return Result(12, "deletion semantics", bad == 0 and steps > 0,
                  f"{steps} deletion steps checked, {bad} violations")


CRITERIA: List[Callable[[], Result]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
]


def run_all(
    only: Optional[List[int]] = None, report: Callable[[str], None] = print, seed: Optional[int] = None,
) -> List[Result]:
    out = []
    for i, crit in enumerate(CRITERIA, 1):
        if only and i not in only:
            continue
        kw = {}
        if seed is not None and "seed" in inspect.signature(crit).parameters:
            kw["seed"] = seed
        try:
            res = crit(**kw)
        except Exception as exc:  # a crash is a failure, not an abort of the suite
            res = Result(i, crit.__name__, False, f"raised {type(exc).__name__}: {exc}")
        report(res.line())
        out.append(res)
    return out
