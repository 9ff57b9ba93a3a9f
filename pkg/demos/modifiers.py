"""Modifiers: box and diamond over the outputs of a structure transformation."""
from structura import evaluate, parse, parse_structure
from structura.modifiers import apply_modifier, check_invariance, register_modifier
from structura.structures import delete_element, dump_structure

s = parse_structure("domain: 0 1 2\nP/1: (0)\nR/2: (0,1)\nY/1:\n")

for text in (
    "box[addpairs(~x=y, R)] All x. All y. x=y | R(x,y)",
    "box[delpoints(P(x))] ~Ex x. P(x)",
    "dia[IY(Y, 2)] Ex x. Ex y. ~x=y & Y(x) & Y(y)",
    "box[IY(Y, 2)] Ex x. Y(x)",
    "All z. dia[DR(R, 1)] ~R(z,z)",
):
    print(f"{evaluate(s, {}, parse(text))!s:5} {text}")

for out, _ in apply_modifier("IY", s, {}, "Y", 2):
    print("IY output:", dump_structure(out).replace("\n", "; "))


def drop_smallest(st, f):
    yield delete_element(st, min(st.domain)), f


register_modifier("drop_smallest", drop_smallest)
rep = check_invariance("drop_smallest", [s])
print("drop_smallest invariant:", rep.ok, "witness renaming:", rep.violations[0][2] if rep.violations else None)
print("delpoints invariant:", check_invariance("delpoints", [s], parse("P(x)")).ok)
