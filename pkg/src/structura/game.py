"""Semantic games for the structure-modifying logic and a bounded solver.

A play moves through positions ``(structure, assignment, node, verifier,
continuations)``.  ``node`` indexes a subformula of the root formula;
``continuations`` is the stack of right-hand sides of pending ``;`` together
with the player obliged to win the left-hand side.

The solver builds the reachable position graph breadth-first (exact position
equality, no isomorphism reduction), then computes each player's attractor of
won terminal positions.  Whatever neither attractor covers is a draw if the
graph was closed and unknown otherwise.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from .structures import (
    AtomValue, Element, Structure, TapeSymbol, delete_element, delete_tuple, eval_atom,
    insert_element, insert_tuple, sorted_elements,
)
from .syntax import (
    And, Atom, Bottom, Box, Claim, ClaimAtom, Compose, DeletePoint, DeleteTuple, Diamond,
    Eq, Exists, Forall, Formula, InsertPoint, InsertTuple, Not, Or, TapeAtom, Top, children,
    is_fo, tape_symbols, to_text,
)


class Player(enum.Enum):
    ELOISE = "Eloise"
    ABELARD = "Abelard"

    @property
    def opponent(self) -> "Player":
        return Player.ABELARD if self is Player.ELOISE else Player.ELOISE


ELOISE, ABELARD = Player.ELOISE, Player.ABELARD


class Outcome(enum.Enum):
    ELOISE_WINS = "EloiseWins"
    ABELARD_WINS = "AbelardWins"
    NEITHER = "Neither"
    UNKNOWN = "Unknown"

    @property
    def exit_code(self) -> int:
        return _EXIT[self]


_EXIT = {
    Outcome.ELOISE_WINS: 0, Outcome.ABELARD_WINS: 1, Outcome.NEITHER: 2, Outcome.UNKNOWN: 3,
}


def outcome_for(player: Optional[Player]) -> Outcome:
    if player is None:
        return Outcome.NEITHER
    return Outcome.ELOISE_WINS if player is ELOISE else Outcome.ABELARD_WINS


class JumpMode(str, enum.Enum):
    FREE = "free"                    # verifier picks any Claim(i, .) occurrence
    SUPERORDINATE = "superordinate"  # nearest enclosing Claim(i, .) only


@dataclass(frozen=True)
class Budget:
    max_positions: int = 200_000
    max_domain_growth: int = 3

    def __post_init__(self):
        if self.max_positions < 1 or self.max_domain_growth < 1:
            raise ValueError("budget bounds must be positive")


Assignment = Tuple[Tuple[str, Element], ...]


class Position(NamedTuple):
    structure: Structure
    assignment: Assignment
    node: int
    verifier: Player
    continuations: Tuple[Tuple[int, Player], ...] = ()

    @property
    def f(self) -> Dict[str, Element]:
        return dict(self.assignment)


@dataclass(frozen=True)
class Terminal:
    """The play ends; ``winner`` is None when neither player wins."""

    winner: Optional[Player]
    reason: str


@dataclass(frozen=True)
class Move:
    mover: Player
    successors: Tuple[Position, ...]
    labels: Tuple[str, ...]


def freeze(f) -> Assignment:
    return tuple(sorted(dict(f or {}).items()))


def _bind(a: Assignment, pairs) -> Assignment:
    d = dict(a)
    d.update(pairs)
    return tuple(sorted(d.items()))


class GameError(ValueError):
    pass


class Game:
    """Rule book for one root formula.

    Subformula occurrences are numbered in pre-order; ``path(node)`` recovers
    the child-index path of a node inside the root.
    """

    def __init__(self, formula: Formula, jump: JumpMode = JumpMode.FREE):
        self.formula = formula
        self.jump = JumpMode(jump)
        self.nodes: List[Formula] = []
        self.kids: List[Tuple[int, ...]] = []
        self.parent: List[int] = []
        self._paths: List[Tuple[int, ...]] = []
        self.claims: Dict[int, List[int]] = {}
        stack = [(formula, -1, ())]
        while stack:
            phi, par, path = stack.pop()
            if isinstance(phi, (Box, Diamond)):
                raise GameError("modifier operators have no game rules; use modifiers.evaluate")
            nid = len(self.nodes)
            self.nodes.append(phi)
            self.parent.append(par)
            self._paths.append(path)
            self.kids.append(())
            if par >= 0:
                self.kids[par] = self.kids[par] + (nid,)
            if isinstance(phi, Claim):
                self.claims.setdefault(phi.index, []).append(nid)
            cs = children(phi)
            for i in reversed(range(len(cs))):
                stack.append((cs[i], nid, path + (i,)))
        self.tape = [TapeSymbol(n, a) for n, a in sorted(tape_symbols(formula).items())]

    def path(self, node: int) -> Tuple[int, ...]:
        return self._paths[node]

    def subformula(self, node: int) -> Formula:
        return self.nodes[node]

    def initial(self, structure: Structure, assignment=None, verifier: Player = ELOISE) -> Position:
        """Root position; tape relations of the formula start out empty."""
        for sym in self.tape:
            if structure.is_tape(sym.name) and structure.rel(sym.name):
                raise GameError(f"tape relation {sym.name} must start empty")
        return Position(structure.with_tape(self.tape), freeze(assignment), 0, verifier, ())

    def _superordinate(self, node: int, index: int) -> Optional[int]:
        p = self.parent[node]
        while p >= 0:
            phi = self.nodes[p]
            if isinstance(phi, Claim) and phi.index == index:
                return p
            p = self.parent[p]
        return None

    def _atom_end(self, pos: Position, winner: Optional[Player], reason: str):
        """Resolve the end of a (sub)play, popping one pending ``;`` if any."""
        if winner is None or not pos.continuations:
            return Terminal(winner, reason)
        (node, obliged), rest = pos.continuations[-1], pos.continuations[:-1]
        if winner is obliged:
            nxt = Position(pos.structure, pos.assignment, node, obliged, rest)
            return Move(obliged, (nxt,), (f"{reason}; continue after ';'",))
        return Terminal(winner, reason + "; left side of ';' lost")

    def expand(self, pos: Position):
        """Either a :class:`Terminal` or a :class:`Move` listing the successors."""
        phi = self.nodes[pos.node]
        s, a, ver, k = pos.structure, pos.assignment, pos.verifier, pos.continuations
        fal = ver.opponent
        kids = self.kids[pos.node]

        if isinstance(phi, (Atom, TapeAtom, Eq)):
            val = eval_atom(s, dict(a), phi)
            if val is AtomValue.UNDEFINED:
                return Terminal(None, f"unassigned variable in {to_text(phi)}")
            win = ver if val is AtomValue.HOLDS else fal
            return self._atom_end(pos, win, f"{to_text(phi)} {'holds' if val is AtomValue.HOLDS else 'fails'}")
        if isinstance(phi, Top):
            return self._atom_end(pos, ver, "true")
        if isinstance(phi, Bottom):
            return self._atom_end(pos, fal, "false")
        if isinstance(phi, Not):
            return Move(ver, (Position(s, a, kids[0], fal, k),), ("swap roles",))
        if isinstance(phi, (And, Or)):
            chooser = fal if isinstance(phi, And) else ver
            succ = tuple(Position(s, a, c, ver, k) for c in kids)
            return Move(chooser, succ, ("left", "right"))
        if isinstance(phi, (Exists, Forall)):
            chooser = ver if isinstance(phi, Exists) else fal
            if not s.domain:
                return Terminal(chooser.opponent, f"{chooser.value} has no element to pick")
            elems = sorted_elements(s.domain)
            succ = tuple(Position(s, _bind(a, ((phi.var, e),)), kids[0], ver, k) for e in elems)
            return Move(chooser, succ, tuple(f"{phi.var} := {e}" for e in elems))
        if isinstance(phi, InsertPoint):
            s2, u = insert_element(s)
            return Move(ver, (Position(s2, _bind(a, ((phi.var, u),)), kids[0], ver, k),),
                        (f"insert fresh {u} as {phi.var}",))
        if isinstance(phi, DeletePoint):
            f = dict(a)
            if phi.var not in f:
                return Move(ver, (Position(s, a, kids[0], ver, k),), ("nothing to delete",))
            u = f[phi.var]
            s2 = delete_element(s, u)
            a2 = tuple((z, e) for z, e in a if e != u)
            return Move(ver, (Position(s2, a2, kids[0], ver, k),), (f"delete {u}",))
        if isinstance(phi, (InsertTuple, DeleteTuple)):
            n = len(phi.args)
            if n and not s.domain:
                return Terminal(fal, f"{ver.value} has no tuple to pick")
            op = insert_tuple if isinstance(phi, InsertTuple) else delete_tuple
            word = "insert" if isinstance(phi, InsertTuple) else "delete"
            succ, labels = [], []
            for t in product(sorted_elements(s.domain), repeat=n):
                succ.append(Position(op(s, phi.rel, t), _bind(a, zip(phi.args, t)), kids[0], ver, k))
                labels.append(f"{word} {t} {'into' if word == 'insert' else 'from'} {phi.rel}")
            return Move(ver, tuple(succ), tuple(labels))
        if isinstance(phi, Claim):
            return Move(ver, (Position(s, a, kids[0], ver, k),), (f"enter C{phi.index}",))
        if isinstance(phi, ClaimAtom):
            if self.jump is JumpMode.FREE:
                targets = self.claims.get(phi.index, [])
            else:
                t = self._superordinate(pos.node, phi.index)
                targets = [] if t is None else [t]
            if not targets:
                return Terminal(None, f"C{phi.index} names no formula")
            succ = tuple(Position(s, a, t, ver, k) for t in targets)
            return Move(ver, succ, tuple(f"jump to C{phi.index} at {self.path(t)}" for t in targets))
        if isinstance(phi, Compose):
            left, right = kids
            return Move(ver, (Position(s, a, left, ver, k + ((right, ver),)),), ("play left side of ';'",))
        raise GameError(f"no rule for {type(phi).__name__}")

    def describe(self, pos: Position) -> str:
        f = ", ".join(f"{v}={e}" for v, e in pos.assignment) or "-"
        stack = " | ".join(to_text(self.nodes[n]) for n, _ in reversed(pos.continuations))
        lines = [
            f"verifier: {pos.verifier.value}",
            f"formula:  {to_text(self.nodes[pos.node])}",
            f"assign:   {f}",
            "domain:   " + " ".join(str(e) for e in sorted_elements(pos.structure.domain)),
        ]
        if stack:
            lines.append(f"pending:  {stack}")
        return "\n".join(lines)


def expand(game: Game, pos: Position):
    return game.expand(pos)


# -- solving ----------------------------------------------------------------

_E_WIN, _A_WIN, _NONE, _E_MOVE, _A_MOVE, _OPEN = range(6)


@dataclass
class Solution:
    outcome: Outcome
    game: Game
    root: Position
    closed: bool
    positions: List[Position]
    index: Dict[Position, int]
    label: Dict[int, Player]
    strategy: Dict[Position, Position] = field(default_factory=dict)

    def winner(self, pos: Position) -> Optional[Player]:
        i = self.index.get(pos)
        return None if i is None else self.label.get(i)

    def outcome_at(self, pos: Position) -> Outcome:
        w = self.winner(pos)
        if w is not None:
            return outcome_for(w)
        return Outcome.NEITHER if self.closed else Outcome.UNKNOWN

    def choice(self, pos: Position) -> Optional[Position]:
        """Winning move of the player who wins from ``pos``, if it is theirs to make."""
        return self.strategy.get(pos)


def solve(
    structure: Structure,
    formula: Formula,
    budget: Budget = Budget(),
    *,
    jump: JumpMode = JumpMode.FREE,
    assignment=None,
    game: Optional[Game] = None,
) -> Solution:
    game = game or Game(formula, jump)
    root = game.initial(structure, assignment)
    index = {root: 0}
    plist = [root]
    kind: List[int] = []
    succ: List[Tuple[int, ...]] = []
    limit = len(root.structure.domain) + budget.max_domain_growth
    closed = True
    i = 0
    while i < len(plist):
        pos = plist[i]
        if not closed:
            kind.append(_OPEN)
            succ.append(())
            i += 1
            continue
        r = game.expand(pos)
        if isinstance(r, Terminal):
            kind.append(_E_WIN if r.winner is ELOISE else _A_WIN if r.winner is ABELARD else _NONE)
            succ.append(())
            i += 1
            continue
        fresh = [p for p in dict.fromkeys(r.successors) if p not in index]
        if any(len(p.structure.domain) > limit for p in fresh) or len(plist) + len(fresh) > budget.max_positions:
            closed = False
            continue  # re-enter this position as open
        for p in fresh:
            index[p] = len(plist)
            plist.append(p)
        kind.append(_E_MOVE if r.mover is ELOISE else _A_MOVE)
        succ.append(tuple(index[p] for p in r.successors))
        i += 1

    preds: List[List[int]] = [[] for _ in plist]
    for u, vs in enumerate(succ):
        for v in vs:
            preds[v].append(u)

    label: Dict[int, Player] = {}
    strategy: Dict[Position, Position] = {}
    for player, won, mine, theirs in ((ELOISE, _E_WIN, _E_MOVE, _A_MOVE), (ABELARD, _A_WIN, _A_MOVE, _E_MOVE)):
        count = [len(vs) for vs in succ]
        queue = deque(j for j, kd in enumerate(kind) if kd == won)
        for j in queue:
            label[j] = player
        while queue:
            v = queue.popleft()
            for u in preds[v]:
                if u in label:
                    continue
                if kind[u] == mine:
                    label[u] = player
                    strategy[plist[u]] = plist[v]
                    queue.append(u)
                elif kind[u] == theirs:
                    count[u] -= 1
                    if count[u] == 0:
                        label[u] = player
                        queue.append(u)

    w = label.get(0)
    if w is not None:
        outcome = outcome_for(w)
    else:
        outcome = Outcome.NEITHER if closed else Outcome.UNKNOWN
    return Solution(outcome, game, root, closed, plist, index, label, strategy)


def solve_fo(structure: Structure, formula: Formula, budget: Budget = Budget()) -> Outcome:
    """Solve a plain first-order sentence; such games are always determined."""
    if not is_fo(formula):
        from .oracle import NotFirstOrder

        raise NotFirstOrder("formula uses operators outside first-order logic")
    return solve(structure, formula, budget).outcome


# -- interactive play ---------------------------------------------------------

@dataclass
class Transcript:
    formula: str
    human: Player
    choices: List[int] = field(default_factory=list)
    log: List[str] = field(default_factory=list)
    result: Optional[Outcome] = None
    abandoned: bool = False


def _machine_choice(sol: Optional[Solution], pos: Position, move: Move) -> int:
    if sol is not None:
        target = sol.choice(pos)
        if target is not None and target in move.successors:
            return move.successors.index(target)
    return 0


def play_interactive(
    structure: Structure,
    formula: Formula,
    human: Player = ELOISE,
    *,
    input_fn: Callable[[str], str] = input,
    output_fn: Callable[[str], None] = print,
    budget: Budget = Budget(),
    jump: JumpMode = JumpMode.FREE,
    max_steps: int = 500,
) -> Transcript:
    """Terminal game loop: the human picks at their choice points, the machine
    follows the solved strategy where one exists and otherwise the first move.
    Typing ``q`` abandons the play."""
    game = Game(formula, jump)
    sol = solve(structure, formula, budget, game=game)
    pos = sol.root
    tr = Transcript(to_text(formula), human)
    for _ in range(max_steps):
        r = game.expand(pos)
        if isinstance(r, Terminal):
            tr.result = outcome_for(r.winner)
            msg = f"{r.reason}: " + (f"{r.winner.value} wins" if r.winner else "neither player wins")
            tr.log.append(msg)
            output_fn(msg)
            return tr
        if len(r.successors) == 1:
            j = 0
        elif r.mover is human:
            output_fn(game.describe(pos))
            for n, lab in enumerate(r.labels):
                output_fn(f"  [{n}] {lab}")
            while True:
                try:
                    ans = input_fn(f"{human.value}, choose 0-{len(r.labels) - 1} (q to quit): ").strip()
                except EOFError:  # end of input counts as quitting
                    ans = "q"
                if ans.lower() in ("q", "quit"):
                    tr.abandoned = True
                    tr.log.append("abandoned")
                    output_fn("play abandoned")
                    return tr
                if ans.isdigit() and int(ans) < len(r.successors):
                    j = int(ans)
                    break
                output_fn("not a legal choice")
        else:
            j = _machine_choice(sol, pos, r)
        tr.choices.append(j)
        tr.log.append(f"{r.mover.value}: {r.labels[j]}")
        if len(r.successors) > 1 and r.mover is not human:
            output_fn(f"{r.mover.value} plays: {r.labels[j]}")
        pos = r.successors[j]
    tr.result = Outcome.NEITHER
    tr.log.append(f"no end after {max_steps} steps")
    output_fn(f"the play did not end within {max_steps} steps")
    return tr


def replay(structure: Structure, formula: Formula, choices: Sequence[int], jump: JumpMode = JumpMode.FREE) -> Optional[Outcome]:
    """Re-run recorded choices; returns the terminal outcome, or None if the
    choices run out before the play ends."""
    game = Game(formula, jump)
    pos = game.initial(structure)
    it = iter(choices)
    while True:
        r = game.expand(pos)
        if isinstance(r, Terminal):
            return outcome_for(r.winner)
        j = next(it, None)
        if j is None:
            return None
        pos = r.successors[j]
