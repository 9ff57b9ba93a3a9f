import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from structura import corpus
from structura.acceptance import MOD_SIGNATURE, builtin_modifier_calls, modifier_samples
from structura.modifiers import (
    ModifierError, apply_modifier, check_invariance, eval_box, eval_diamond, evaluate, get_modifier,
    modifier_names, register_modifier,
)
from structura.oracle import holds
from structura.structures import Signature, Structure, delete_element, sorted_elements
from structura.syntax import Not, parse

SIG = Signature.of(P=1, R=2, Y=1)
S = Structure(SIG, [0, 1, 2], {"P": [(0,)], "R": [(0, 1)]})


def _nothing(s, f):
    return iter(())


def _dropmin(s, f):
    # deletes whichever element happens to be named smallest
    if s.domain:
        yield delete_element(s, min(s.domain)), f
    else:
        yield s, f


register_modifier("nothing_test", _nothing)
register_modifier("dropmin_test", _dropmin)


def test_registry():
    assert {"identity", "addpairs", "delpoints", "IY"} <= set(modifier_names())
    with pytest.raises(ModifierError):
        register_modifier("identity", _nothing)
    with pytest.raises(ModifierError):
        get_modifier("no_such_modifier")


def test_addpairs_adds_every_satisfying_pair():
    [(s2, f2)] = apply_modifier("addpairs", S, {}, parse("~x=y"), "R")
    dom = sorted_elements(S.domain)
    assert s2.rel("R") == {(a, b) for a in dom for b in dom if a != b}
    assert f2 == ()


def test_delpoints_removes_extension():
    [(s2, _)] = apply_modifier("delpoints", S, {}, parse("P(x)"))
    assert s2.domain == {1, 2} and s2.rel("R") == frozenset()


def test_point_modifier_purges_assignment():
    [(_, f2)] = apply_modifier("delpoints", S, {"z": 0}, parse("P(x)"))
    assert f2 == ()


def test_iy_with_cap_two():
    outs = apply_modifier("IY", S, {}, "Y", 2)
    assert sorted(len(s.rel("Y")) for s, _ in outs) == [0, 1, 2]
    assert all(len(s.domain) == 3 + len(s.rel("Y")) for s, _ in outs)


def test_argument_errors():
    with pytest.raises(ModifierError):
        apply_modifier("IY", S, {}, "Q", 2)
    with pytest.raises(ModifierError):
        apply_modifier("I", S, {}, -1)
    with pytest.raises(ModifierError):
        apply_modifier("addpairs", S, {}, parse("P(x)"), "R")


def test_box_and_diamond_examples():
    assert eval_box("nothing_test", parse("false"), S)
    assert not eval_diamond("nothing_test", parse("true"), S)
    assert eval_box("delpoints", parse("~Ex x. x=x"), S, {}, parse("true"))
    assert eval_box("addpairs", parse("R(x1,x1)"), S, {"x1": 2}, parse("x=y"), "R")
    assert eval_diamond("IY", parse("Ex x. Y(x)"), S, {}, "Y", 2)
    assert not eval_box("IY", parse("Ex x. Y(x)"), S, {}, "Y", 2)


def test_modifier_syntax_in_formulas():
    assert evaluate(S, {}, parse("box[delpoints(true)] ~Ex x. x=x"))
    assert evaluate(S, {}, parse("dia[IY(Y, 2)] Ex x. Y(x)"))
    assert evaluate(S, {}, parse("All x1. box[addpairs(x=x1 & y=x1, R)] R(x1,x1)"))
    assert not evaluate(S, {}, parse("box[I(1)] Ex x1. Ex x2. Ex x3. Ex x4. ~x1=x2 & ~x1=x3 & ~x1=x4 & ~x2=x3 & ~x2=x4 & ~x3=x4"))


def test_invariance_reports():
    samples = modifier_samples(n=20)
    for name, args in builtin_modifier_calls():
        assert check_invariance(name, samples, *args, renamings=5).ok, name
    assert check_invariance("identity", samples).ok
    rep = check_invariance("dropmin_test", samples, renamings=5)
    assert not rep.ok
    s, f, mapping = rep.violations[0]
    assert set(mapping) == set(s.domain)


CALLS = builtin_modifier_calls()


@given(st.integers(0, 10**6), st.sampled_from(CALLS))
def test_box_diamond_duality(seed, call):
    rng = random.Random(seed)
    name, args = call
    s = corpus.random_structure(rng, MOD_SIGNATURE, rng.randint(0, 3))
    phi = corpus.random_formula(rng, MOD_SIGNATURE, max_quant=2, size=4)
    assert eval_diamond(name, phi, s, {}, *args) == (not eval_box(name, Not(phi), s, {}, *args))


@given(st.integers(0, 10**6), st.sampled_from(CALLS))
def test_output_count_depends_only_on_iso_type(seed, call):
    rng = random.Random(seed)
    name, args = call
    s = corpus.random_structure(rng, MOD_SIGNATURE, rng.randint(0, 3))
    renamed = s.rename({e: e + 50 for e in s.domain})
    a = apply_modifier(name, s, {}, *args)
    assert len(a) == len(apply_modifier(name, s, {}, *args)) == len(apply_modifier(name, renamed, {}, *args))


@given(st.integers(0, 10**6))
def test_fo_part_agrees_with_oracle(seed):
    rng = random.Random(seed)
    s = corpus.random_structure(rng, MOD_SIGNATURE, rng.randint(0, 3))
    phi = corpus.random_formula(rng, MOD_SIGNATURE)
    assert evaluate(s, {}, phi) == holds(s, phi)
