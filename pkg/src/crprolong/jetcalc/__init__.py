"""Jet-level rewriting, identity checks, membership proofs and the order-3 report."""
from .engine import (L, Lb, RuleSet, T_OP, W, atom, bind_atoms, conj_poly, f, fb, gamma,
                     is_normal_order, model_binding, parse_word, poly_text, standard_binding,
                     var_text, word_poly)
from .identities import (Identity, IdentityResult, identity_suite, negative_control, run_suite,
                         run_standard_suite, tangency_expansion, verify_identity)
from .membership import Prover, Space, check_membership, normal_words, run_chain
from .report import complete_system_report

__all__ = ["L", "Lb", "RuleSet", "T_OP", "W", "atom", "bind_atoms", "conj_poly", "f", "fb", "gamma",
           "is_normal_order", "model_binding", "parse_word", "poly_text", "standard_binding",
           "var_text", "word_poly", "Identity", "IdentityResult", "identity_suite",
           "negative_control", "run_suite", "run_standard_suite", "tangency_expansion",
           "verify_identity", "Prover", "Space", "check_membership", "normal_words", "run_chain",
           "complete_system_report"]
