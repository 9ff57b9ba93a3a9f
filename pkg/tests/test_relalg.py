import random
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from structura import corpus
from structura.relalg import (
    FALSE0, TRUE0, Cyc, EmptyDomain, Ex, Identity, Join, Neg, OpApp, RelAlgError, RelSym, RelValue, Swap,
    TermSyntaxError, U, check_operator_invariance, compile_fo, defined_relation, eval_term, parse_term,
    permutation_word, permute_term, register_operator, registered_operators, term_arity, term_to_fo,
    term_to_text, unregister_operator,
)
from structura.structures import Signature, Structure, empty_structure
from structura.syntax import parse

SIG = Signature.of(P=1, R=2, T=3)


def test_clause_u_and_identity():
    s = Structure(SIG, [1, 2], {"T": [(1, 1, 2), (1, 2, 2)], "P": [(1,)]})
    assert eval_term(U(), s) == RelValue(1, {(1,), (2,)})
    assert eval_term(Identity(RelSym("T")), s) == RelValue(3, {(1, 1, 2)})
    assert eval_term(Identity(RelSym("P")), s) == RelValue(1, {(1,)})


def test_clause_p_s_ex():
    s = Structure(SIG, [1, 2, 3], {"T": [(1, 2, 3)], "R": [(1, 2)]})
    assert eval_term(Cyc(RelSym("T")), s) == RelValue(3, {(2, 3, 1)})
    assert eval_term(Swap(RelSym("T")), s) == RelValue(3, {(2, 1, 3)})
    assert eval_term(Ex(RelSym("R")), s) == RelValue(1, {(2,)})
    assert eval_term(Ex(RelSym("P")), s) == FALSE0


def test_negation_on_nullary():
    s = Structure(SIG, [1], {})
    true0 = Ex(U())
    assert eval_term(true0, s) == TRUE0
    assert eval_term(Neg(true0), s) == FALSE0
    assert eval_term(Neg(Neg(true0)), s) == TRUE0
    # complement of the complement of the empty k-ary relation
    assert eval_term(Neg(Neg(RelSym("R"))), s) == RelValue(2, ())


def test_join_with_nullary_operands():
    s = Structure(SIG, [1, 2], {"P": [(1,)]})
    true0, false0 = Ex(U()), Neg(Ex(U()))
    assert eval_term(Join(true0, RelSym("P")), s) == RelValue(1, {(1,)})
    assert eval_term(Join(RelSym("P"), false0), s) == RelValue(1, ())
    assert eval_term(Join(true0, true0), s) == TRUE0


def test_empty_domain_rejected():
    with pytest.raises(EmptyDomain):
        eval_term(U(), empty_structure(SIG))


def test_compile_examples():
    assert term_to_text(compile_fo(parse("x1=x2"))) == "I(J(u,u))"
    assert compile_fo(parse("true")) == Ex(U())
    assert compile_fo(parse("false")) == Neg(Ex(U()))
    assert compile_fo(parse("R(x2,x1,x2)")) == Cyc(Ex(Identity(Cyc(Cyc(RelSym("R"))))))


def test_worked_example_on_ternary_relations():
    rng = random.Random(5)
    sig = Signature.of(R=3)
    term = compile_fo(parse("R(x2,x1,x2)"))
    for _ in range(20):
        s = corpus.random_structure(rng, sig, rng.randint(1, 3))
        assert eval_term(term, s) == defined_relation(s, parse("R(x2,x1,x2)"))


def test_defined_relation_examples():
    s = Structure(SIG, ["a", "b"], {"R": [("a", "b")]})
    assert defined_relation(s, parse("Ex x. x=x")) == TRUE0
    assert defined_relation(s, parse("R(x1,x2)")) == RelValue(2, {("a", "b")})
    # renaming variables order-preservingly gives the same relation
    assert defined_relation(s, parse("R(x1,x2)")) == defined_relation(s, parse("R(x2,x3)"))


def test_term_to_fo_examples():
    assert term_to_fo(U(), SIG) == parse("x1=x1")
    j = Join(RelSym("R"), RelSym("R"))
    assert term_to_fo(j, SIG) == parse("R(x1,x2) & R(x3,x4)")


def test_permutation_words():
    assert permutation_word((1, 0)) == "s"
    assert permute_term(RelSym("R"), (0, 1, 2)) == RelSym("R")
    with pytest.raises(RelAlgError):
        permutation_word((0, 0))


@pytest.mark.parametrize("k", range(1, 6))
def test_every_permutation_is_realised(k):
    sig = Signature.of(Q=k)
    canon = tuple(range(1, k + 1))
    s = Structure(sig, canon, {"Q": [canon]})
    for perm in permutations(range(k)):
        got = eval_term(permute_term(RelSym("Q"), perm), s)
        assert got == RelValue(k, {tuple(canon[i] for i in perm)})


def test_text_roundtrip_and_errors():
    t = parse_term("p(ex(I(p(p(R)))))", SIG)
    assert term_to_text(t) == "p(ex(I(p(p(R)))))"
    with pytest.raises(TermSyntaxError):
        parse_term("p(R", SIG)


def test_builtin_operators():
    assert {"tc", "even"} <= set(registered_operators())
    s = Structure(SIG, [1, 2, 3], {"R": [(1, 2), (2, 3)]})
    assert eval_term(OpApp("tc", (RelSym("R"),)), s) == RelValue(2, {(1, 2), (2, 3), (1, 3)})
    assert eval_term(OpApp("even", (RelSym("R"),)), s) == TRUE0
    assert eval_term(OpApp("even", (U(),)), s) == FALSE0
    assert term_arity(OpApp("tc", (RelSym("R"),)), SIG) == 2
    assert check_operator_invariance("tc", [2]) is None
    assert check_operator_invariance("even", [1]) is None


def test_registry_rejects_duplicates_and_finds_violations():
    with pytest.raises(RelAlgError):
        register_operator("tc", lambda dom, r: r, 1)

    def smallest(dom, r):
        # depends on which element is named smallest
        return RelValue(1, {(min(dom),)})

    register_operator("smallest_point", smallest, 1, 1)
    try:
        witness = check_operator_invariance("smallest_point", [1])
        assert witness is not None
        dom, vals, mapping = witness
        assert set(mapping) == set(dom)
    finally:
        unregister_operator("smallest_point")


@st.composite
def values(draw):
    n = draw(st.integers(1, 3))
    k = draw(st.integers(0, 3))
    dom = list(range(n))
    cells = [tuple(draw(st.sampled_from(dom)) for _ in range(k)) for _ in range(draw(st.integers(0, 5)))]
    return Structure(Signature.of(Q=k), dom, {"Q": cells}), k


@given(values())
def test_pointwise_identities(sk):
    s, k = sk
    q = RelSym("Q")
    base = eval_term(q, s)
    assert eval_term(Neg(Neg(q)), s) == base
    t = q
    for _ in range(k):
        t = Cyc(t)
    assert eval_term(t, s) == base
    assert eval_term(Swap(Swap(q)), s) == base
    assert eval_term(Neg(q), s).arity == k


@given(st.integers(0, 10**6))
def test_compiler_soundness(seed):
    rng = random.Random(seed)
    phi = corpus.open_formula_corpus(1, seed)[0]
    term = compile_fo(phi)
    for _ in range(3):
        s = corpus.random_structure(rng, corpus.DEFAULT_SIGNATURE, rng.randint(1, 3))
        assert eval_term(term, s) == defined_relation(s, phi)


@given(st.integers(0, 10**6))
def test_term_roundtrip(seed):
    rng = random.Random(seed)
    t = corpus.random_term(rng, corpus.DEFAULT_SIGNATURE, depth=5)
    phi = term_to_fo(t, corpus.DEFAULT_SIGNATURE)
    s = corpus.random_structure(rng, corpus.DEFAULT_SIGNATURE, rng.randint(1, 3))
    assert eval_term(compile_fo(phi), s) == eval_term(t, s)
    assert defined_relation(s, phi).tuples == eval_term(t, s).tuples
