"""Semantic games: ordinary truth, self-reference and structure editing."""
from pathlib import Path

from structura import Outcome, dump_structure, holds, parse, parse_structure, solve
from structura.game import ELOISE, play_interactive, replay
from structura.structures import empty_structure

DATA = Path(__file__).parent / "data"
path = parse_structure((DATA / "path3.txt").read_text())
print(dump_structure(path))

for text in ("Ex x. Ex y. R(x,y) & R(y,x)", "All x. Ex y. R(x,y)", "Ex x. All y. ~R(y,x)"):
    phi = parse(text)
    sol = solve(path, phi)
    print(f"{text:32} game: {sol.outcome.value:12} oracle: {holds(path, phi)}")

# Claims let a formula refer to itself.  The liar never ends.
for text in ("C1 ~C1", "C1 C1", "C1 (true | C1)"):
    sol = solve(empty_structure(), parse(text))
    print(f"{text:16} -> {sol.outcome.value} ({len(sol.positions)} positions, closed={sol.closed})")

# Insertion makes a false universal true: every point gets an outgoing edge.
phi = parse("All x. Ex y. R(x,y) | ins R(x,y). R(x,y)")
print("with insertion:", solve(path, phi).outcome.value)

# Deleting the only point leaves Abelard with nothing to choose.
one = parse_structure("domain: a\nR/2:\n")
print("delete then ask:", solve(one, parse("Ex x1. del x1. ~Ex x2. x2=x2")).outcome.value)

# A scripted play: Eloise picks a then b; the recorded choices replay to the same end.
answers = iter(["0", "1"])
tr = play_interactive(path, parse("Ex x. Ex y. R(x,y)"), ELOISE, input_fn=lambda _: next(answers),
                      output_fn=lambda _: None)
print("played:", tr.log, "replay:", replay(path, parse("Ex x. Ex y. R(x,y)"), tr.choices).value)
assert tr.result is Outcome.ELOISE_WINS
