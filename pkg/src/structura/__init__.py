"""Finite structures, semantic games for a structure-modifying logic, a
variable-free relation algebra, multi-agent systems and mental models."""
from .structures import (
    Signature, Structure, TapeSymbol, dump_structure, empty_structure, find_isomorphism, is_isomorphic,
    parse_structure,
)
from .syntax import parse, to_text, translate_nl
from .oracle import ModelSet, enumerate_structures, eval_fo, holds, model_set_sat
from .game import Budget, Game, JumpMode, Outcome, Player, solve, solve_fo
from .relalg import RelValue, compile_fo, defined_relation, eval_term, parse_term, permute_term, term_to_fo
from .systems import SystemDef, initial, is_finite_evolution, run, semantic_game_as_system, step
from .mentalmodels import MentalModel, consistent_models, derive, knows, omq_certain, parse_mental_model
from .modifiers import apply_modifier, check_invariance, eval_box, eval_diamond, evaluate

__version__ = "0.1.0"

__all__ = [
    "Signature", "Structure", "TapeSymbol", "dump_structure", "empty_structure", "find_isomorphism",
    "is_isomorphic", "parse_structure", "parse", "to_text", "translate_nl", "ModelSet", "enumerate_structures",
    "eval_fo", "holds", "model_set_sat", "Budget", "Game", "JumpMode", "Outcome", "Player", "solve", "solve_fo",
    "RelValue", "compile_fo", "defined_relation", "eval_term", "parse_term", "permute_term", "term_to_fo",
    "SystemDef", "initial", "is_finite_evolution", "run", "semantic_game_as_system", "step", "MentalModel",
    "consistent_models", "derive", "knows", "omq_certain", "parse_mental_model", "apply_modifier",
    "check_invariance", "eval_box", "eval_diamond", "evaluate",
]
