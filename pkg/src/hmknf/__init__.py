"""Conflict-driven reasoning for ground hybrid MKNF knowledge bases."""

from .errors import ContractError, GateExceeded, HmknfError, ParseError
from .kb import BOT, KnowledgeBase, Ontology, Rule, load_kb, parse_kb, serialize_kb
from .ontology import ClausalOracle, EntailmentOracle
from .solver import SolverOptions, SolveResult, cdnl_solve, enumerate_all

__all__ = [
    "BOT",
    "ClausalOracle",
    "ContractError",
    "EntailmentOracle",
    "GateExceeded",
    "HmknfError",
    "KnowledgeBase",
    "Ontology",
    "ParseError",
    "Rule",
    "SolveResult",
    "SolverOptions",
    "cdnl_solve",
    "enumerate_all",
    "load_kb",
    "parse_kb",
    "serialize_kb",
]

__version__ = "0.1.0"
