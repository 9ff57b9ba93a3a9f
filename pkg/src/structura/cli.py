"""Command-line front end.

Exit status: 0 success (``eval``: EloiseWins), 1 AbelardWins or failed
selftest, 2 Neither, 3 Unknown, 64 usage error, 65 bad input data.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from .structures import Signature, StructureError, dump_structure, parse_structure
from .syntax import FormulaSyntaxError, free_vars, is_fo, parse, to_text, translate_nl

EX_USAGE = 64
EX_DATAERR = 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _signature_arg(text: Optional[str]) -> Optional[Signature]:
    if not text:
        return None
    rels = []
    for part in text.split(","):
        name, _, ar = part.strip().partition("/")
        if not ar.isdigit():
            raise UsageError(f"bad signature entry {part!r}; expected NAME/ARITY")
        rels.append((name, int(ar)))
    return Signature(tuple(rels))


def _formula_text(args) -> str:
    if getattr(args, "expr", None) is not None:
        return args.expr
    if getattr(args, "formula", None):
        return _read(args.formula).strip()
    raise UsageError("give a formula with --formula FILE or --expr TEXT")


def _formula(args, signature=None):
    text = _formula_text(args)
    try:
        return parse(text, signature)
    except FormulaSyntaxError as exc:
        raise DataError(f"formula: {exc}") from None


def _structure(path: str):
    try:
        return parse_structure(_read(path))
    except StructureError as exc:
        raise DataError(f"{path}: {exc}") from None


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _seed(args) -> Optional[int]:
    env = os.environ.get("STRUCTURA_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError("STRUCTURA_SEED must be an integer") from None
    return args.seed


# -- subcommands -----------------------------------------------------------------

def cmd_parse(args) -> int:
    phi = _formula(args, _signature_arg(args.signature))
    fv = sorted(free_vars(phi))
    _emit(args, {"formula": to_text(phi), "free": fv, "first_order": is_fo(phi)}, to_text(phi))
    return 0


def cmd_translate(args) -> int:
    phi = _formula(args, _signature_arg(args.signature))
    text = translate_nl(phi, careful=args.careful)
    _emit(args, {"formula": to_text(phi), "translation": text}, text)
    return 0


def cmd_eval(args) -> int:
    from .game import Budget, JumpMode, solve

    s = _structure(args.structure)
    phi = _formula(args, s.signature)
    try:
        budget = Budget(args.max_positions, args.max_growth)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sol = solve(s, phi, budget, jump=JumpMode(args.jump))
    payload = {
        "outcome": sol.outcome.value,
        "positions": len(sol.positions),
        "closed": sol.closed,
        "formula": to_text(phi),
    }
    _emit(args, payload, sol.outcome.value)
    return sol.outcome.exit_code


def cmd_oracle(args) -> int:
    from .oracle import OracleError, eval_fo

    s = _structure(args.structure)
    phi = _formula(args, s.signature)
    if not is_fo(phi):
        raise DataError("the oracle only evaluates first-order formulas")
    f = {}
    for item in args.assign or []:
        var, _, val = item.partition("=")
        if not val:
            raise UsageError(f"bad assignment {item!r}; expected VAR=ELEMENT")
        f[var] = int(val) if val.lstrip("-").isdigit() else val
    try:
        value = eval_fo(s, f, phi)
    except OracleError as exc:
        raise DataError(str(exc)) from None
    _emit(args, {"value": value, "formula": to_text(phi)}, "true" if value else "false")
    return 0


def cmd_compile(args) -> int:
    from .oracle import NotFirstOrder
    from .relalg import compile_fo, ordered_free_vars, term_to_text

    phi = _formula(args, _signature_arg(args.signature))
    try:
        t = compile_fo(phi)
    except NotFirstOrder as exc:
        raise DataError(str(exc)) from None
    _emit(args, {"term": term_to_text(t), "columns": ordered_free_vars(phi)}, term_to_text(t))
    return 0


def cmd_alg_eval(args) -> int:
    from .relalg import RelAlgError, eval_term, parse_term, term_to_text

    s = _structure(args.structure)
    text = args.term_expr if args.term_expr is not None else (_read(args.term) if args.term else None)
    if text is None:
        raise UsageError("give a term with --term FILE or --term-expr TEXT")
    try:
        t = parse_term(text, s.signature)
        v = eval_term(t, s)
    except RelAlgError as exc:
        raise DataError(str(exc)) from None
    rows = [list(r) for r in v.sorted()]
    _emit(args, {"term": term_to_text(t), "arity": v.arity, "tuples": rows}, str(v))
    return 0


def cmd_simulate(args) -> int:
    from .systems import ConfigError, load_config, run, write_trace

    try:
        sys_def, steps = load_config(_read(args.config), _seed(args))
    except (ConfigError, StructureError, ValueError, KeyError) as exc:
        raise DataError(f"{args.config}: {exc}") from None
    if args.steps is not None:
        steps = args.steps
    if steps < 0:
        raise UsageError("--steps must be non-negative")
    try:
        e, reason = run(sys_def, steps)
    except ConfigError as exc:
        raise DataError(str(exc)) from None
    trace = write_trace(e, reason, sys_def.names)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace)
    names = [sys_def.names.get(b, "?") for b in e.structures]
    payload = {"rounds": e.rounds, "termination": str(reason), "structures": names,
               "actions": [list(a) for a in e.actions]}
    _emit(args, payload, f"rounds: {e.rounds}\ntermination: {reason}\npath: {' '.join(names)}")
    return 0


def _lines(text: str) -> List[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def cmd_omq(args) -> int:
    from .mentalmodels import MentalModelError, omq_certain
    from .oracle import OracleError

    try:
        onto = [parse(l) for l in _lines(_read(args.ontology))] if args.ontology else []
        db = [parse(l) for l in _lines(_read(args.db))]
        q = parse(args.query)
    except FormulaSyntaxError as exc:
        raise DataError(str(exc)) from None
    answer = tuple(a for a in (args.answer or "").split(",") if a)
    if args.bound < 1:
        raise UsageError("--bound must be positive")
    try:
        r = omq_certain(_signature_arg(args.signature), onto, q, db, answer, args.bound)
    except (MentalModelError, OracleError) as exc:
        raise DataError(str(exc)) from None
    payload = {"answer": r.answer, "bound": r.bound, "models_checked": r.models_checked,
               "countermodel": dump_structure(r.countermodel) if r.countermodel is not None else None}
    text = f"{r.answer} (bound {r.bound}, {r.models_checked} models checked)"
    if r.countermodel is not None:
        text += "\ncountermodel:\n" + dump_structure(r.countermodel).rstrip("\n")
    _emit(args, payload, text)
    return 0


def cmd_play(args) -> int:
    from .game import ABELARD, ELOISE, Budget, JumpMode, play_interactive

    s = _structure(args.structure)
    phi = _formula(args, s.signature)
    human = ELOISE if args.role == "eloise" else ABELARD
    tr = play_interactive(s, phi, human, budget=Budget(args.max_positions, args.max_growth),
                          jump=JumpMode(args.jump))
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            json.dump({"formula": tr.formula, "human": tr.human.value, "choices": tr.choices,
                       "result": tr.result.value if tr.result else None, "abandoned": tr.abandoned,
                       "log": tr.log}, fh, indent=1)
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_all(only, seed=_seed(args))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


# -- wiring -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="structura", description="Games, algebra and systems over finite structures.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--seed", type=int, default=None, help="random seed (STRUCTURA_SEED overrides)")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    def formula_opts(sp):
        sp.add_argument("--formula", metavar="FILE", help="file holding the formula")
        sp.add_argument("--expr", metavar="TEXT", help="formula given inline")

    def budget_opts(sp):
        sp.add_argument("--max-positions", type=int, default=200_000)
        sp.add_argument("--max-growth", type=int, default=3)
        sp.add_argument("--jump", choices=["free", "superordinate"], default="free")

    sp = sub.add_parser("parse", help="parse and pretty-print a formula")
    formula_opts(sp)
    sp.add_argument("--signature", help="e.g. R/2,P/1 (enables arity checks)")
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("translate", help="read a formula out in English")
    formula_opts(sp)
    sp.add_argument("--signature")
    sp.add_argument("--careful", action="store_true", help="spell out atoms with missing referents")
    sp.set_defaults(fn=cmd_translate)

    sp = sub.add_parser("eval", help="solve the semantic game")
    sp.add_argument("--structure", required=True, metavar="FILE")
    formula_opts(sp)
    budget_opts(sp)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("oracle", help="brute-force first-order truth")
    sp.add_argument("--structure", required=True, metavar="FILE")
    formula_opts(sp)
    sp.add_argument("--assign", action="append", metavar="VAR=ELEMENT")
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("compile", help="first-order formula to l-term")
    formula_opts(sp)
    sp.add_argument("--signature")
    sp.set_defaults(fn=cmd_compile)

    sp = sub.add_parser("alg-eval", help="evaluate an l-term on a structure")
    sp.add_argument("--term", metavar="FILE")
    sp.add_argument("--term-expr", metavar="TEXT")
    sp.add_argument("--structure", required=True, metavar="FILE")
    sp.set_defaults(fn=cmd_alg_eval)

    sp = sub.add_parser("simulate", help="run a table-driven system")
    sp.add_argument("--config", required=True, metavar="FILE")
    sp.add_argument("--steps", type=int)
    sp.add_argument("--trace", metavar="FILE")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("omq", help="bounded certain answers")
    sp.add_argument("--ontology", metavar="FILE")
    sp.add_argument("--db", required=True, metavar="FILE")
    sp.add_argument("--query", required=True)
    sp.add_argument("--answer", help="comma-separated answer tuple")
    sp.add_argument("--bound", type=int, default=3)
    sp.add_argument("--signature")
    sp.set_defaults(fn=cmd_omq)

    sp = sub.add_parser("play", help="play the semantic game in the terminal")
    sp.add_argument("--structure", required=True, metavar="FILE")
    formula_opts(sp)
    budget_opts(sp)
    sp.add_argument("--role", choices=["eloise", "abelard"], default="eloise")
    sp.add_argument("--transcript", metavar="FILE")
    sp.set_defaults(fn=cmd_play)

    sp = sub.add_parser("selftest", help="run the acceptance criteria")
    sp.add_argument("--only", help="comma-separated criterion numbers")
    sp.set_defaults(fn=cmd_selftest)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # global flags are accepted after the subcommand too
    front = [a for a in argv if a == "--json"]
    rest = [a for a in argv if a != "--json"]
    args = parser.parse_args(front + rest)
    if not getattr(args, "fn", None):
        parser.print_usage(sys.stderr)
        return EX_USAGE
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"structura: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except DataError as exc:
        print(f"structura: error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except (StructureError, FormulaSyntaxError) as exc:
        print(f"structura: error: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
