"""What an agent knows from facts, negative facts and axioms."""
from pathlib import Path

from structura import consistent_models, derive, knows, omq_certain, parse, parse_mental_model
from structura.mentalmodels import InferenceBudget, MentalModel, verify_countermodel
from structura.structures import dump_structure

DATA = Path(__file__).parent / "data"
m = parse_mental_model((DATA / "worked_model.txt").read_text())
for q in ("R(a,a)", "R(b,b)", "R(b,a)", "Ex>=8 x. x=x"):
    print(f"knows {q:14} -> {knows(m, parse(q), 3)}")
print("consistent models up to 3 elements:", len(consistent_models(m, 3)))

# Bounded reasoning: few rule applications, small working memory.
agent = MentalModel([parse("P(a)")], [], [parse("All x. P(x) -> Q(x)"), parse("Q(a) -> S(a)")], ["a", "b"])
for n in (1, 3, 5):
    d = derive(agent, InferenceBudget(("universal_instantiation", "modus_ponens"), max_applications=n))
    print(f"{n} applications -> literals {sorted(map(str, d.derived))}")

# Certain answers of a query under an ontology, checked on all models up to a bound.
onto = [parse(line) for line in (DATA / "ontology.txt").read_text().splitlines() if line and not line.startswith("#")]
db = [parse(line) for line in (DATA / "db.txt").read_text().splitlines() if line]
for q in ("R(b,a)", "R(b,b)", "R(c,a)", "Ex y. R(c,y)"):
    r = omq_certain(None, onto, parse(q), db, (), 3)
    print(f"{q:24} {r}")
    if r.countermodel is not None:
        print(f"  countermodel, independently checked: {verify_countermodel(onto, parse(q), db, (), r)}")
        print("  " + dump_structure(r.countermodel).replace("\n", "\n  ").rstrip())
