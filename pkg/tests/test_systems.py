import json
from pathlib import Path

import pytest
from hypothesis import given

from structura.acceptance import scripted_systems
from structura.game import Outcome, solve
from structura.structures import Signature, Structure, empty_structure
from structura.syntax import parse
from structura.systems import (
    END, UNDEFINED, AgentUndefined, Evolution, FAllowedEnd, FForbidden, GUndefined, StepBudget, SystemDef,
    counter_system, g_first, g_random, g_unique, game_system_outcome, initial, is_finite_evolution, load_config,
    perception_agent, positional_lift, run, semantic_game_as_system, step, write_trace,
)

from conftest import fo_sentences, structures

DEMO_CONFIG = Path(__file__).resolve().parents[1] / "demos" / "data" / "light_switch.json"
P1 = Signature.of(P=1)
S0 = Structure(P1, [0])
S1 = Structure(P1, [0], {"P": [(0,)]})


def test_initial_structure_and_empty_candidates():
    assert initial(SystemDef({"go"}, ("a",), lambda h: {S0}, g_unique, {"a": lambda e: "go"})) == S0
    assert isinstance(initial(SystemDef({"go"}, ("a",), lambda h: set(), g_unique, {"a": lambda e: "go"})), FAllowedEnd)
    assert isinstance(initial(SystemDef({"go"}, ("a",), lambda h: UNDEFINED, g_unique, {"a": lambda e: "go"})), FForbidden)


def two_agent(second=lambda e: "go"):
    return SystemDef({"go", "stay"}, (1, 2), lambda h: {S0}, g_unique, {1: lambda e: "stay", 2: second})


def test_step_adds_one_round():
    sys = two_agent()
    e = Evolution((S0,))
    e2 = step(sys, e)
    assert e2.rounds == 1 and e2.actions == (("stay", "go"),)
    assert step(two_agent(lambda e: UNDEFINED), e) == AgentUndefined(2)


def test_counter_system():
    e, r = run(counter_system(), 3)
    assert len(e.last.rel("P")) == 3
    e, r = run(counter_system(), 5)
    assert e.rounds == 5 and isinstance(r, StepBudget)
    e, r = run(counter_system(), 0)
    assert e.items == (empty_structure(P1),) and isinstance(r, StepBudget)


def test_each_termination_reason_has_a_script():
    for name, sys in scripted_systems().items():
        e, r = run(sys, 4)
        assert r.kind == name
        assert is_finite_evolution(sys, e)


def test_f_empty_at_round_two():
    e, r = run(scripted_systems()["FAllowedEnd"], 10)
    assert isinstance(r, FAllowedEnd) and e.rounds == 1


def test_finite_evolution_checks():
    sys = counter_system()
    e, _ = run(sys, 3)
    assert is_finite_evolution(sys, e)
    assert is_finite_evolution(sys, Evolution())
    bad = list(e.items)
    bad[3] = ("dec",)
    assert not is_finite_evolution(sys, Evolution(tuple(bad)))
    assert not is_finite_evolution(sys, Evolution(e.items[:2]))


def test_g_helpers():
    W = frozenset({S0, S1})
    assert g_unique(Evolution(), W) is UNDEFINED
    assert g_unique(Evolution(), frozenset()) is END
    assert g_first(Evolution(), W) in W
    G = g_random(3)
    assert G(Evolution(), W) == G(Evolution(), W)


@given(structures(signature=P1), structures(signature=P1), structures(signature=P1))
def test_positional_agents_ignore_history(a, b, c):
    fns = positional_lift({"x": lambda s: "big" if len(s.domain) > 1 else UNDEFINED if not s.domain else "small"})
    agent = fns["x"]
    h1 = Evolution((a, ("small",), c))
    h2 = Evolution((b, ("big",), b, ("small",), c))
    assert agent(h1) == agent(h2)
    assert agent(Evolution((c,))) == agent(h1)
    if not c.domain:
        assert agent(h1) is UNDEFINED


def test_perception_agents():
    const = perception_agent(lambda s: s, lambda view: "go")
    assert const(Evolution((S0,))) == "go"
    # partial view: only whether element 0 is marked
    view = lambda s: (0,) in s.rel("P")
    partial = perception_agent(view, lambda marked: "stop" if marked else "go")
    full = lambda e: "stop" if (0,) in e.last.rel("P") else "go"
    for s in (S0, S1):
        assert partial(Evolution((s,))) == full(Evolution((s,)))
    hist_agent = perception_agent(lambda e: e.rounds, lambda n: "go" if n < 2 else UNDEFINED, general=True)
    assert hist_agent(Evolution((S0, ("go",), S0, ("go",), S0))) is UNDEFINED


def test_strongly_regular_system_never_fails():
    sys = counter_system()
    _, r = run(sys, 7)
    assert not isinstance(r, (FForbidden, GUndefined, AgentUndefined))


def test_config_and_trace():
    sys, steps = load_config(DEMO_CONFIG.read_text())
    assert steps == 6
    e, r = run(sys, steps)
    assert is_finite_evolution(sys, e)
    text = write_trace(e, r, sys.names)
    assert text.count("action:") == e.rounds and text.rstrip().endswith(f"# end: {r}")
    again, _ = load_config(json.loads(DEMO_CONFIG.read_text()))
    assert run(again, steps)[0] == e


def test_config_seed_override_changes_nothing_structural():
    sys, steps = load_config(DEMO_CONFIG.read_text(), seed=3)
    e, r = run(sys, steps)
    assert is_finite_evolution(sys, e) and isinstance(r, StepBudget)


@given(structures(max_size=2), fo_sentences(size=4))
def test_bridge_reproduces_solver(s, phi):
    sys, game = semantic_game_as_system(s, phi)
    e, r = run(sys, 200)
    assert is_finite_evolution(sys, e)
    assert game_system_outcome(game, e, r) is solve(s, phi).outcome


def test_bridge_on_liar_and_false_atom():
    sys, game = semantic_game_as_system(empty_structure(), parse("C1 ~C1"))
    e, r = run(sys, 25)
    assert isinstance(r, StepBudget) and game_system_outcome(game, e, r) is Outcome.UNKNOWN
    sys, game = semantic_game_as_system(empty_structure(), parse("false"))
    e, r = run(sys, 25)
    # the first round already ends it, so only the root position is recorded
    assert e.rounds == 0 and isinstance(r, FAllowedEnd)
    assert game_system_outcome(game, e, r) is Outcome.ABELARD_WINS


def test_bad_action_is_rejected():
    sys = SystemDef({"go"}, ("a",), lambda h: {S0}, g_unique, {"a": lambda e: "jump"})
    with pytest.raises(ValueError):
        run(sys, 1)
