"""First-order formulas compiled to variable-free terms and back."""
from itertools import permutations

from structura import compile_fo, defined_relation, eval_term, parse, parse_structure, permute_term, term_to_fo
from structura.relalg import OpApp, RelSym, parse_term, permutation_word, term_to_text
from structura.syntax import to_text

s = parse_structure("domain: 1 2 3\nR/2: (1,2) (2,3)\nT/3: (1,2,3)\n")

for text in ("x1=x2", "true", "false", "R(x2,x1)", "Ex x2. R(x1,x2) & R(x2,x3)", "T(x2,x1,x2)"):
    phi = parse(text)
    term = compile_fo(phi)
    same = eval_term(term, s) == defined_relation(s, phi)
    print(f"{text:28} -> {term_to_text(term):40} agrees: {same}")

# Terms read back as formulas over x1, x2, ...
for text in ("J(R,not(R))", "ex(p(T))", "I(s(R))"):
    t = parse_term(text, s.signature)
    print(f"{text:14} -> {to_text(term_to_fo(t, s.signature))}")

# Every reordering of columns is a word over p (rotate) and s (swap the first two).
for perm in permutations(range(3)):
    t = permute_term(RelSym("T"), perm)
    print(perm, permutation_word(perm) or "(identity)", eval_term(t, s))

# Registered extension operators: transitive closure and parity.
print("tc(R) =", eval_term(OpApp("tc", (RelSym("R"),)), s))
print("even(R) =", eval_term(OpApp("even", (RelSym("R"),)), s))
