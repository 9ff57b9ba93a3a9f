"""Discrete-time multi-agent systems over structures.

A system is ``(S, F, G, (f_i))``: ``F`` maps an action-ended history to the
set of structures allowed next, ``G`` picks one of them (or ends the run),
and each agent ``f_i`` maps a structure-ended history to an action.  All
three are partial; :data:`UNDEFINED` marks a missing value and :data:`END`
is the explicit stop signal of ``G``.

Histories are :class:`Evolution` objects, alternating structures and action
tuples (one action per agent, in agent order).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

from .structures import Signature, Structure, dump_structure, insert_element, insert_tuple, parse_structure


class _Sentinel:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


UNDEFINED = _Sentinel("UNDEFINED")
END = _Sentinel("END")

# actions conventionally used for "not acting"; nothing enforces them
NOOP, REMOVED, ABSENT, AWAY = "noop", "removed", "absent", "away"


class SystemError_(ValueError):
    """A system broke its own contract (e.g. G chose outside F's set)."""


# -- evolutions ----------------------------------------------------------------

@dataclass(frozen=True)
class Evolution:
    items: Tuple[Any, ...] = ()

    @property
    def structures(self) -> Tuple[Any, ...]:
        return self.items[0::2]

    @property
    def actions(self) -> Tuple[Tuple[str, ...], ...]:
        return self.items[1::2]

    @property
    def structure_ended(self) -> bool:
        return len(self.items) % 2 == 1

    @property
    def rounds(self) -> int:
        return len(self.items) // 2

    @property
    def last(self):
        return self.items[-1] if self.items else None

    def extend(self, *xs) -> "Evolution":
        return Evolution(self.items + tuple(xs))

    def __len__(self):
        return len(self.items)


# -- termination reasons --------------------------------------------------------

@dataclass(frozen=True)
class Termination:
    @property
    def kind(self) -> str:
        return type(self).__name__

    def __str__(self):
        return self.kind


@dataclass(frozen=True)
class FForbidden(Termination):
    """F is undefined: the history contains forbidden actions."""


@dataclass(frozen=True)
class FAllowedEnd(Termination):
    """F returned the empty set: the actions legitimately end the evolution."""


@dataclass(frozen=True)
class GEnd(Termination):
    """G chose to stop."""


@dataclass(frozen=True)
class GUndefined(Termination):
    pass


@dataclass(frozen=True)
class AgentUndefined(Termination):
    agent: Any = None

    def __str__(self):
        return f"AgentUndefined({self.agent})"


@dataclass(frozen=True)
class StepBudget(Termination):
    pass


TERMINATION_KINDS = (FForbidden, FAllowedEnd, GEnd, GUndefined, AgentUndefined, StepBudget)


# -- systems ----------------------------------------------------------------------

AgentFn = Callable[[Evolution], Any]


@dataclass(frozen=True)
class SystemDef:
    actions: FrozenSet[str]
    agents: Tuple[Any, ...]
    F: Callable[[Evolution], Any]
    G: Callable[[Evolution, FrozenSet], Any]
    agent_fns: Mapping[Any, AgentFn]
    universe: Callable[[Any], bool] = lambda s: isinstance(s, Structure)
    names: Mapping[Any, str] = field(default_factory=dict)  # optional labels for traces

    def __post_init__(self):
        if not isinstance(self.actions, frozenset):
            object.__setattr__(self, "actions", frozenset(self.actions))
        object.__setattr__(self, "agents", tuple(self.agents))
        missing = [a for a in self.agents if a not in self.agent_fns]
        if missing:
            raise SystemError_(f"no agent function for {missing}")


def _choose(sys: SystemDef, hist: Evolution):
    """Apply F then G to an action-ended (or empty) history."""
    W = sys.F(hist)
    if W is UNDEFINED:
        return FForbidden()
    W = frozenset(W)
    g = sys.G(hist, W)
    if not W:
        if g is END or g is UNDEFINED:
            return FAllowedEnd()
        raise SystemError_("G produced a structure although F allowed none")
    if g is END:
        return GEnd()
    if g is UNDEFINED:
        return GUndefined()
    if g not in W:
        raise SystemError_("G chose a structure outside F's candidate set")
    if not sys.universe(g):
        raise SystemError_("G chose an object outside the structure universe")
    return g


def initial(sys: SystemDef):
    """``G((empty, F(empty)))`` or the reason there is none."""
    return _choose(sys, Evolution())


def agent_actions(sys: SystemDef, e: Evolution):
    acts = []
    for ag in sys.agents:
        a = sys.agent_fns[ag](e)
        if a is UNDEFINED:
            return AgentUndefined(ag)
        if a not in sys.actions:
            raise SystemError_(f"agent {ag} produced {a!r}, which is not an action")
        acts.append(a)
    return tuple(acts)


def step(sys: SystemDef, e: Evolution):
    """One round: every agent acts, then F and G produce the next structure."""
    if not e.structure_ended:
        raise SystemError_("step needs a structure-ended evolution")
    acts = agent_actions(sys, e)
    if isinstance(acts, Termination):
        return acts
    hist = e.extend(acts)
    nxt = _choose(sys, hist)
    if isinstance(nxt, Termination):
        return nxt
    return hist.extend(nxt)


def run(sys: SystemDef, max_steps: int) -> Tuple[Evolution, Termination]:
    """Iterate :func:`step` at most ``max_steps`` times."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    b0 = initial(sys)
    if isinstance(b0, Termination):
        return Evolution(), b0
    e = Evolution((b0,))
    for _ in range(max_steps):
        nxt = step(sys, e)
        if isinstance(nxt, Termination):
            return e, nxt
        e = nxt
    return e, StepBudget()


def is_finite_evolution(sys: SystemDef, cand: Evolution) -> bool:
    """Check the defining conditions round by round."""
    items = cand.items
    if not items:
        return True
    if not cand.structure_ended:
        return False
    try:
        if _choose(sys, Evolution()) != items[0]:
            return False
        for i in range(1, len(items), 2):
            prefix = Evolution(items[:i])
            if agent_actions(sys, prefix) != items[i]:
                return False
            if _choose(sys, Evolution(items[:i + 1])) != items[i + 1]:
                return False
    except SystemError_:
        return False
    return all(sys.universe(b) for b in cand.structures)


# -- agents ---------------------------------------------------------------------------

def positional_lift(h: Mapping[Any, Callable[[Any], Any]]) -> Dict[Any, AgentFn]:
    """Agents that only look at the current structure."""
    return {ag: (lambda e, fn=fn: fn(e.last)) for ag, fn in h.items()}


def perception_agent(p: Callable, d: Callable, general: bool = False) -> AgentFn:
    """``d(p(current structure))``, or ``d(p(history))`` when ``general``.

    ``p`` builds the agent's mental model, ``d`` decides from it.  Either
    may return UNDEFINED, which makes the agent undefined there.
    """

    def agent(e: Evolution):
        view = p(e if general else e.last)
        if view is UNDEFINED:
            return UNDEFINED
        return d(view)

    return agent


def g_unique(hist: Evolution, W: FrozenSet):
    """Deterministic G: the sole candidate, END if none, undefined otherwise."""
    if not W:
        return END
    if len(W) == 1:
        return next(iter(W))
    return UNDEFINED


def g_first(hist: Evolution, W: FrozenSet):
    """Deterministic G: the candidate with the smallest text dump."""
    if not W:
        return END
    return min(W, key=_world_key)


def g_random(seed: int = 0):
    """Chance as a G: the choice is a function of the history and the seed."""

    def G(hist: Evolution, W: FrozenSet):
        if not W:
            return END
        cands = sorted(W, key=_world_key)
        rng = random.Random(f"{seed}:{len(hist)}:{len(cands)}")
        return rng.choice(cands)

    return G


def _world_key(w):
    return dump_structure(w) if isinstance(w, Structure) else repr(w)


# -- the toy counter -----------------------------------------------------------------

def counter_system(signature: Signature = Signature.of(P=1)) -> SystemDef:
    """One agent always says ``inc``; F adds one fresh element to ``P``."""
    start = Structure(signature, (), {})

    def F(hist: Evolution):
        if not hist.items:
            return {start}
        last, acts = hist.items[-2], hist.items[-1]
        if acts != ("inc",):
            return UNDEFINED
        s2, u = insert_element(last)
        return {insert_tuple(s2, "P", (u,))}

    return SystemDef({"inc"}, ("counter",), F, g_unique, {"counter": lambda e: "inc"})


# -- table-driven systems ---------------------------------------------------------------

class ConfigError(ValueError):
    pass


def _fit(s: Structure, sig: Signature) -> Structure:
    return s if s.signature == sig else Structure(sig, s.domain, {n: s.rel(n) for n in s.signature.names})


def load_config(data: Union[str, Mapping], seed: Optional[int] = None) -> Tuple[SystemDef, int]:
    """Build a system from a JSON config (text or parsed); returns the system
    and the configured step cap.

    Tables are keyed by the history written as structure names and action
    tuples joined with ``|`` (actions of one tuple joined with ``,``); the
    empty history is ``""``.  A key ``*|<tail>`` matches any history ending
    in ``<tail>``.  Missing keys mean "undefined".  See the README for an
    example.
    """
    cfg = json.loads(data) if isinstance(data, str) else dict(data)
    try:
        sig = Signature(tuple((n, int(a)) for n, a in cfg.get("signature", {}).items()))
        worlds = {name: parse_structure(text, sig) for name, text in cfg["structures"].items()}
        worlds = {name: _fit(s, sig) for name, s in worlds.items()}
        agents = tuple(cfg["agents"])
        actions = frozenset(cfg["actions"])
    except KeyError as exc:
        raise ConfigError(f"config is missing {exc}") from None
    name_of: Dict[Structure, str] = {}
    for n, s in worlds.items():
        name_of.setdefault(s, n)

    def key(hist: Evolution) -> List[str]:
        parts = []
        for i, x in enumerate(hist.items):
            if i % 2 == 0:
                if x not in name_of:
                    raise ConfigError("history reached a structure with no name in the config")
                parts.append(name_of[x])
            else:
                parts.append(",".join(x))
        return parts

    def lookup(table: Mapping[str, Any], hist: Evolution):
        parts = key(hist)
        full = "|".join(parts)
        if full in table:
            return table[full]
        for n in range(len(parts), 0, -1):  # longest positional suffix first
            k = "*|" + "|".join(parts[-n:])
            if k in table:
                return table[k]
        return UNDEFINED

    def world(name):
        if name not in worlds:
            raise ConfigError(f"unknown structure name {name!r}")
        return worlds[name]

    ftab = cfg.get("F", {})

    def F(hist):
        v = lookup(ftab, hist)
        if v is UNDEFINED or v is None:
            return UNDEFINED
        return {world(n) for n in v}

    gspec = cfg.get("G", "unique")
    if isinstance(gspec, dict):
        def G(hist, W):
            v = lookup(gspec, hist)
            if v is UNDEFINED:
                return UNDEFINED
            if v == "end":
                return END
            return world(v)
    elif gspec == "unique":
        G = g_unique
    elif gspec == "first":
        G = g_first
    elif gspec == "random":
        G = g_random(int(cfg.get("seed", 0)) if seed is None else seed)
    else:
        raise ConfigError(f"unknown G rule {gspec!r}")

    fns = {}
    atab = cfg.get("agent_tables", {})
    for ag in agents:
        spec = atab.get(ag)
        if spec is None:
            raise ConfigError(f"no table for agent {ag}")
        if isinstance(spec, str):
            fns[ag] = lambda e, a=spec: a
        else:
            fns[ag] = lambda e, t=spec: lookup(t, e)

    sys = SystemDef(actions, agents, F, G, fns, names={s: n for s, n in name_of.items()})
    return sys, int(cfg.get("steps", 10))


def write_trace(e: Evolution, reason: Optional[Termination], names: Mapping = {}) -> str:
    """Evolution as text: structure blocks and ``action:`` lines between
    ``---`` separators, then the termination reason."""
    out = []
    for i, x in enumerate(e.items):
        if i % 2 == 0:
            label = names.get(x) if isinstance(x, Structure) else None
            out.append(f"# structure {i // 2}" + (f" ({label})" if label else ""))
            out.append(dump_structure(x).rstrip("\n") if isinstance(x, Structure) else repr(x))
        else:
            out.append("action: " + " ".join(str(a) for a in x))
        out.append("---")
    out.append(f"# end: {reason if reason is not None else 'running'}")
    return "\n".join(out) + "\n"


# -- semantic games as systems ----------------------------------------------------------

def semantic_game_as_system(
    structure: Structure,
    formula,
    *,
    budget=None,
    eloise: Optional[Callable] = None,
    abelard: Optional[Callable] = None,
    jump="free",
):
    """The semantic game of ``formula`` on ``structure`` run as a system.

    The world is the whole game position (structure, assignment, current
    subformula, roles, pending ``;``).  Eloise is the sole agent, acting
    ``pick:i`` at her choice points and ``noop`` elsewhere; Abelard's choices
    are made by G.  By default both follow the solver's winning strategy where
    one exists and the first option otherwise.  Returns ``(system, game)``.
    """
    from .game import ELOISE, Budget, Game, Move, Position, Terminal, solve

    game = Game(formula, jump)
    sol = solve(structure, formula, budget or Budget(), game=game)
    root = sol.root

    def expand(pos):
        return game.expand(pos)

    def default_pick(pos, move):
        tgt = sol.choice(pos)
        if tgt is not None and tgt in move.successors:
            return move.successors.index(tgt)
        return 0

    eloise = eloise or default_pick
    abelard = abelard or default_pick

    def agent(e: Evolution):
        pos = e.last
        r = expand(pos)
        if isinstance(r, Move) and r.mover is ELOISE and len(r.successors) > 1:
            return f"pick:{eloise(pos, r)}"
        return NOOP

    def F(hist: Evolution):
        if not hist.items:
            return {root}
        pos, (act,) = hist.items[-2], hist.items[-1]
        r = expand(pos)
        if isinstance(r, Terminal):
            return set()
        if len(r.successors) == 1:
            return set(r.successors) if act == NOOP else UNDEFINED
        if r.mover is ELOISE:
            if not act.startswith("pick:"):
                return UNDEFINED
            i = int(act[5:])
            return {r.successors[i]} if i < len(r.successors) else UNDEFINED
        return set(r.successors) if act == NOOP else UNDEFINED

    def G(hist: Evolution, W):
        if not W:
            return END
        if len(W) == 1:
            return next(iter(W))
        pos = hist.items[-2]
        r = expand(pos)
        return r.successors[abelard(pos, r)]

    class _Actions(frozenset):
        def __contains__(self, a):
            return a == NOOP or (isinstance(a, str) and a.startswith("pick:") and a[5:].isdigit())

    sys = SystemDef(_Actions({NOOP}), ("Eloise",), F, G, {"Eloise": agent},
                    universe=lambda w: isinstance(w, Position))
    return sys, game


def game_system_outcome(game, e: Evolution, reason: Termination):
    """Read the game result off a finished bridge run."""
    from .game import Outcome, Terminal, outcome_for

    if isinstance(reason, FAllowedEnd) and e.items:
        r = game.expand(e.last)
        if isinstance(r, Terminal):
            return outcome_for(r.winner)
    if isinstance(reason, StepBudget):
        return Outcome.UNKNOWN
    return None
