import pytest
from hypothesis import given

from structura.game import (
    ABELARD, ELOISE, Budget, Game, JumpMode, Move, Outcome, Terminal, play_interactive, replay, solve, solve_fo,
)
from structura.oracle import NotFirstOrder, holds
from structura.structures import Signature, Structure, empty_structure
from structura.syntax import Bottom, Claim, Compose, Not, Top, parse

from conftest import fo_sentences, structures

R2 = Signature.of(R=2)
E = empty_structure()


def test_solver_examples():
    s = Structure(R2, ["a"], {"R": [("a", "a")]})
    assert solve(s, parse("Ex x1. R(x1,x1)")).outcome is Outcome.ELOISE_WINS
    assert solve(E, parse("C1 ~C1")).outcome is Outcome.NEITHER
    # delete the only element; Abelard then has to pick from an empty domain
    empty_r = Structure(R2, ["a"])
    assert solve(empty_r, parse("Ex x1. del x1. ~Ex x2. x2=x2")).outcome is Outcome.ELOISE_WINS


def test_liar_and_truth_teller_are_closed():
    for text in ("C1 ~C1", "C1 C1"):
        sol = solve(E, parse(text))
        assert sol.outcome is Outcome.NEITHER and sol.closed


def test_solve_fo():
    assert solve_fo(empty_structure(R2), parse("Ex x1. x1=x1")) is Outcome.ABELARD_WINS
    with pytest.raises(NotFirstOrder):
        solve_fo(E, parse("C1 ~C1"))


def test_exit_codes():
    assert [o.exit_code for o in Outcome] == [0, 1, 2, 3]


def test_claim_step_keeps_roles():
    g = Game(parse("C1 ~C1"))
    pos = g.initial(E)
    r = g.expand(pos)
    assert isinstance(r, Move) and len(r.successors) == 1
    nxt = r.successors[0]
    assert isinstance(g.subformula(nxt.node), Not) and nxt.verifier is pos.verifier


def test_atom_is_terminal():
    s = Structure(R2, ["a", "b"], {"R": [("a", "b")]})
    g = Game(parse("R(x,y)"))
    r = g.expand(g.initial(s, {"x": "a", "y": "b"}))
    assert isinstance(r, Terminal) and r.winner is ELOISE
    r = g.expand(g.initial(s, {"x": "b", "y": "a"}))
    assert isinstance(r, Terminal) and r.winner is ABELARD
    # an undefined atom is won by neither
    r = g.expand(g.initial(s, {"x": "a"}))
    assert isinstance(r, Terminal) and r.winner is None


def test_tuple_insertion_branches_over_all_pairs():
    g = Game(parse("ins R(x1,x2). true"))
    r = g.expand(g.initial(Structure(R2, ["a", "b"])))
    assert len(r.successors) == 4


def test_empty_choice_loses_for_mover():
    assert solve(E, parse("Ex x. true")).outcome is Outcome.ABELARD_WINS
    assert solve(E, parse("All x. false")).outcome is Outcome.ELOISE_WINS


def test_jump_modes_differ():
    # the C2 atom sits outside any C2 claim: only a free jump reaches "C2 true"
    phi = parse("(C2 true) & C1 (false | C2)")
    assert solve(E, phi, jump=JumpMode.FREE).outcome is Outcome.ELOISE_WINS
    assert solve(E, phi, jump=JumpMode.SUPERORDINATE).outcome is Outcome.NEITHER


def test_budget_cut_gives_unknown():
    phi = parse("C1 ins x. C1")
    sol = solve(E, phi, Budget(max_positions=50, max_domain_growth=2))
    assert sol.outcome is Outcome.UNKNOWN and not sol.closed


NON_FO = [
    "C1 ins x. C1",
    "ins x. ins y. ~x=y",
    "All x. del x. ~Ex y. y=x",
    "C1 (Ex x. R(x,x) | ins R(x,y). C1)",
    "Ex x. ins R(x,x). R(x,x) ; All y. R(y,y)",
    "C1 ~C1 | true",
    "C1 ~C1 & true",
]


@pytest.mark.parametrize("text", NON_FO)
def test_budget_monotonicity(text):
    s = Structure(R2, ["a"], {"R": [("a", "a")]})
    outcomes = [solve(s, parse(text), Budget(n, g)).outcome for n, g in [(5, 1), (30, 1), (300, 2), (20_000, 3)]]
    decided = {o for o in outcomes if o in (Outcome.ELOISE_WINS, Outcome.ABELARD_WINS)}
    assert len(decided) <= 1
    for a, b in zip(outcomes, outcomes[1:]):
        if a is not Outcome.UNKNOWN:
            assert b is a


@given(structures(max_size=2), fo_sentences())
def test_fo_soundness(s, phi):
    expected = Outcome.ELOISE_WINS if holds(s, phi) else Outcome.ABELARD_WINS
    assert solve_fo(s, phi) is expected


@given(structures(max_size=2), fo_sentences())
def test_negation_duality(s, phi):
    a, b = solve(s, phi), solve(s, Not(phi))
    assert a.closed and b.closed
    assert (b.outcome is Outcome.ELOISE_WINS) == (a.outcome is Outcome.ABELARD_WINS)


@given(structures(max_size=2), fo_sentences())
def test_claim_unfolding(s, phi):
    assert solve(s, Claim(7, phi)).outcome is solve(s, phi).outcome


@given(structures(max_size=2), fo_sentences())
def test_compose_with_decided_left(s, phi):
    assert solve(s, Compose(Top(), phi)).outcome is solve(s, phi).outcome
    assert solve(s, Compose(Bottom(), phi)).outcome is Outcome.ABELARD_WINS


def minimax(game, pos, depth):
    """Winner forced within ``depth`` moves, else None."""
    r = game.expand(pos)
    if isinstance(r, Terminal):
        return r.winner
    if depth == 0:
        return None
    vals = [minimax(game, p, depth - 1) for p in r.successors]
    if r.mover in vals:
        return r.mover
    if vals and all(v is r.mover.opponent for v in vals):
        return r.mover.opponent
    return None


def reachable(game, root, depth):
    seen, frontier = {root}, [root]
    for _ in range(depth):
        nxt = []
        for p in frontier:
            r = game.expand(p)
            if isinstance(r, Move):
                nxt += [q for q in r.successors if q not in seen]
                seen.update(r.successors)
        frontier = nxt
    return seen


MINIMAX_CASES = NON_FO + ["Ex x. All y. R(x,y)", "All x. Ex y. (R(x,y) & ~x=y)", "C1 C1", "C2 (R(x1,x1) | C2)"]


@pytest.mark.parametrize("text", MINIMAX_CASES)
def test_solver_matches_bounded_minimax(text):
    s = Structure(R2, ["a", "b"], {"R": [("a", "b"), ("b", "b")]})
    phi = parse(text)
    sol = solve(s, phi, Budget(20_000, 2))
    positions = [p for p in reachable(sol.game, sol.root, 4) if p in sol.index]
    assert positions
    for p in positions:
        m = minimax(sol.game, p, 12)
        if m is not None:
            assert sol.winner(p) is m


@given(structures(max_size=2), fo_sentences(size=4))
def test_minimax_decides_fo_roots(s, phi):
    sol = solve(s, phi)
    assert minimax(sol.game, sol.root, 40) is sol.winner(sol.root)


def test_interactive_play_and_replay():
    s = Structure(R2, ["a", "b"], {"R": [("b", "b")]})
    phi = parse("Ex x1. R(x1,x1)")
    out = []
    tr = play_interactive(s, phi, ELOISE, input_fn=lambda _: "1", output_fn=out.append)
    assert tr.result is Outcome.ELOISE_WINS and any("Eloise wins" in line for line in out)
    assert replay(s, phi, tr.choices) is tr.result


def test_interactive_quit():
    s = Structure(R2, ["a", "b"], {"R": [("b", "b")]})
    tr = play_interactive(s, parse("Ex x1. R(x1,x1)"), ELOISE, input_fn=lambda _: "q", output_fn=lambda _: None)
    assert tr.abandoned and tr.result is None
