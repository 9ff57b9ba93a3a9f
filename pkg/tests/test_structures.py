import pytest
from hypothesis import given
from hypothesis import strategies as st

from structura.structures import (
    ArityMismatch, AtomValue, ElementNotInDomain, Signature, Structure, StructureSyntaxError, TapeSymbol,
    UnknownRelation, delete_element, delete_tuple, dump_structure, empty_structure, eval_atom, insert_element,
    insert_tuple, is_isomorphic, is_well_formed, parse_structure,
)
from structura.syntax import parse

from conftest import SIG, structures

R2 = Signature.of(R=2)


def ab(*pairs, dom=("a", "b")):
    return Structure(R2, dom, {"R": pairs})


def test_insert_element_into_empty():
    s, u = insert_element(empty_structure(R2))
    assert s.domain == {u}
    assert s.rel("R") == frozenset()


def test_insert_element_leaves_relations():
    s = Structure(R2, ["a"], {"R": [("a", "a")]})
    s2, u = insert_element(s)
    assert u not in s.domain and s2.domain == {"a", u}
    assert s2.rel("R") == {("a", "a")}


def test_insert_twice_gives_distinct_fresh_elements():
    s, u = insert_element(empty_structure(R2))
    _, v = insert_element(s)
    assert u != v


def test_delete_element_purges_tuples():
    s = delete_element(ab(("a", "b"), ("b", "b")), "a")
    assert s.domain == {"b"} and s.rel("R") == {("b", "b")}
    assert is_well_formed(s)


def test_delete_sole_element_and_isolated_element():
    assert delete_element(Structure(R2, ["a"]), "a").is_empty()
    s = Structure(R2, ["a", "b", "c"], {"R": [("a", "b")]})
    assert delete_element(s, "c").rel("R") == s.rel("R")


def test_tuple_insert_and_delete():
    s = ab()
    s1 = insert_tuple(s, "R", ("a", "b"))
    assert s1.rel("R") == {("a", "b")}
    assert insert_tuple(s1, "R", ("a", "b")) == s1
    assert delete_tuple(s1, "R", ("a", "b")).rel("R") == frozenset()
    # deleting an absent tuple leaves the relation as it is
    assert delete_tuple(s1, "R", ("b", "a")) == s1
    assert delete_tuple(s, "R", ("a", "a")) == s


def test_tape_relation_grows():
    s = ab().with_tape([TapeSymbol("X", 2)])
    s2 = insert_tuple(s, "X", ("a", "b"))
    assert s2.rel("X") == {("a", "b")} and s.rel("X") == frozenset()


def test_constructor_errors():
    with pytest.raises(UnknownRelation):
        Structure(R2, ["a"], {"S": []})
    with pytest.raises(ArityMismatch):
        Structure(R2, ["a"], {"R": [("a",)]})
    with pytest.raises(ElementNotInDomain):
        Structure(R2, ["a"], {"R": [("a", "z")]})


def test_isomorphism_examples():
    s = ab(("a", "b"), ("b", "a"))
    assert is_isomorphic(s, s)
    assert not is_isomorphic(s, ab())
    g1 = Structure(R2, [1, 2, 3], {"R": [(1, 2), (2, 3)]})
    g2 = Structure(R2, ["u", "v", "w"], {"R": [("w", "u"), ("u", "v")]})
    assert is_isomorphic(g1, g2)


def test_eval_atom_three_valued():
    s = ab(("a", "b"))
    assert eval_atom(s, {"x": "a", "y": "b"}, parse("R(x,y)")) is AtomValue.HOLDS
    assert eval_atom(s, {"x": "a"}, parse("x=y")) is AtomValue.UNDEFINED
    assert eval_atom(s, {}, parse("x=x")) is AtomValue.UNDEFINED


def test_text_format_roundtrip_and_errors():
    text = "domain: a b 3\nR/2: (a,b) (3,3)\ntape X/1: (a)\n"
    s = parse_structure(text)
    assert s.domain == {"a", "b", 3}
    assert parse_structure(dump_structure(s)) == s
    with pytest.raises(StructureSyntaxError):
        parse_structure("R/2: (a,b)\n")
    with pytest.raises(StructureSyntaxError):
        parse_structure("domain: a\nR/2: (a)\n")


@given(structures(), st.data())
def test_mutations_keep_well_formedness(s, data):
    s2, u = insert_element(s)
    assert is_well_formed(s2)
    # insert then delete the fresh element is the identity
    assert delete_element(s2, u) == s
    if s.domain:
        e = data.draw(st.sampled_from(sorted(s.domain)))
        assert is_well_formed(delete_element(s, e))
        t = (e, data.draw(st.sampled_from(sorted(s.domain))))
        if t in s.rel("R"):
            assert insert_tuple(delete_tuple(s, "R", t), "R", t) == s
        else:
            assert delete_tuple(insert_tuple(s, "R", t), "R", t) == s


@given(structures(), structures(), structures())
def test_isomorphism_is_an_equivalence(a, b, c):
    assert is_isomorphic(a, a)
    assert is_isomorphic(a, b) == is_isomorphic(b, a)
    if is_isomorphic(a, b) and is_isomorphic(b, c):
        assert is_isomorphic(a, c)


@given(structures())
def test_renaming_gives_isomorphic_copy(s):
    mapping = {e: f"e{e}" for e in s.domain}
    assert is_isomorphic(s, s.rename(mapping))


@given(structures(signature=SIG))
def test_dump_parse_roundtrip(s):
    assert parse_structure(dump_structure(s), SIG) == s
