import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from structura import corpus
from structura.structures import Signature, Structure
from structura.syntax import (
    And, Atom, Bottom, Box, Claim, ClaimAtom, Compose, DeletePoint, DeleteTuple, Diamond, Eq, Exists,
    Forall, InsertPoint, InsertTuple, Not, Or, TapeAtom, Top,
)

settings.register_profile(
    "repo", deadline=None, max_examples=60, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

SIG = Signature.of(P=1, R=2)
VARS = ("x1", "x2", "x3", "y", "z")


@st.composite
def structures(draw, signature=SIG, max_size=3, min_size=0):
    n = draw(st.integers(min_size, max_size))
    dom = list(range(n))
    rels = {}
    for name, ar in signature:
        cells = [tuple(draw(st.sampled_from(dom)) for _ in range(ar)) for _ in range(draw(st.integers(0, 4)))] if dom else []
        rels[name] = cells
    return Structure(signature, dom, rels)


@st.composite
def fo_sentences(draw, signature=SIG, size=6):
    """Seeded draws from the corpus generator (the same one the acceptance suite uses)."""
    seed = draw(st.integers(0, 10**6))
    return corpus.random_formula(random.Random(seed), signature, size=size)


_var = st.sampled_from(VARS)


def _leaf():
    return st.one_of(
        st.builds(lambda n, a: Atom(n, tuple(a)), st.sampled_from("RSP"), st.lists(_var, max_size=3)),
        st.builds(lambda a: TapeAtom("X", (a,)), _var),
        st.builds(lambda a, b: TapeAtom("Y", (a, b)), _var, _var),
        st.builds(Eq, _var, _var),
        st.just(Top()), st.just(Bottom()),
        st.builds(ClaimAtom, st.integers(1, 3)),
    )


def _extend(inner):
    modarg = st.one_of(st.sampled_from(["R", "Y"]), st.integers(0, 3), inner)
    return st.one_of(
        st.builds(Not, inner),
        st.builds(And, inner, inner),
        st.builds(Or, inner, inner),
        st.builds(Compose, inner, inner),
        st.builds(Exists, _var, inner),
        st.builds(Forall, _var, inner),
        st.builds(InsertPoint, _var, inner),
        st.builds(DeletePoint, _var, inner),
        st.builds(lambda a, b, f: InsertTuple("R", (a, b), f), _var, _var, inner),
        st.builds(lambda a, f: DeleteTuple("X", (a,), f, True), _var, inner),
        st.builds(Claim, st.integers(1, 3), inner),
        st.builds(lambda n, a, f: Box(n, tuple(a), f), st.sampled_from(["identity", "IY"]), st.lists(modarg, max_size=2), inner),
        st.builds(lambda n, a, f: Diamond(n, tuple(a), f), st.sampled_from(["addpairs", "D"]), st.lists(modarg, max_size=2), inner),
    )


formula_asts = st.recursive(_leaf(), _extend, max_leaves=12)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT:
            terminalreporter.write_line(line)
