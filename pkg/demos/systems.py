"""Multi-agent systems: a counter, a table-driven light switch and a game run as a system."""
from pathlib import Path

from structura import parse, parse_structure, run, semantic_game_as_system, solve
from structura.systems import counter_system, game_system_outcome, load_config, write_trace

e, reason = run(counter_system(), 4)
print("counter after 4 rounds: |P| =", len(e.last.rel("P")), "end:", reason)

sys_def, steps = load_config((Path(__file__).parent / "data" / "light_switch.json").read_text())
e, reason = run(sys_def, steps)
print(write_trace(e, reason, sys_def.names))

# The semantic game as a system: worlds are game positions, Eloise is the agent,
# Abelard's choices are made by the chance function G.
path = parse_structure("domain: a b c\nR/2: (a,b) (b,c)\n")
for text in ("Ex x. All y. ~R(y,x)", "All x. Ex y. R(x,y)"):
    phi = parse(text)
    sys_def, game = semantic_game_as_system(path, phi)
    e, reason = run(sys_def, 50)
    print(f"{text:24} rounds={e.rounds} system says {game_system_outcome(game, e, reason).value}, "
          f"solver says {solve(path, phi).outcome.value}")
