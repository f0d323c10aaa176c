"""Parameterized ALC concept satisfiability: tableau engines, a finite-model
oracle, a CNF encoding with a DPLL solver, and parameter analysis."""
from .analysis import (
    AnalysisReport, ImpactedSet, analyze, impacted_concepts, input_size,
    reduce_to_nearly_acyclic,
)
from .concepts import (
    And, Atom, BOT, Bot, Concept, Exists, Forall, FragmentClass, Not, Or, Signature, TOP,
    Top, classify_fragment, count_full_existentials, count_unions, is_nnf, nnf, subconcepts,
)
from .generate import GenSpec, generate
from .satenc import CnfFormula, TraceNode, encode_trace_cnf, export_dimacs, parse_dimacs, solve_cnf
from .semantics import Found, Interpretation, NoModelUpTo, brute_force_sat, eval_concept, verify_model
from .syntax import (
    KnowledgeBase, ParseDiagnostic, ParseError, check_acyclic, make_kb, parse_concept,
    parse_knowledge_base, print_concept, print_knowledge_base,
)
from .tableau import (
    CompletionState, SatResult, SearchStats, decide_alc, decide_with_tboxes, extract_model,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
