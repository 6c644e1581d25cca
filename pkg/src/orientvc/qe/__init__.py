"""Quantifier elimination, sentence decision and one-variable solution sets."""
from .engine import (QEResult, QEStats, UnsupportedTheoryError, decide_sentence,
                     eliminate, eliminate_one)
from .simplify import canonical_atom, simplify
from .solve import cell_samples, solve_unary

__all__ = ["QEResult", "QEStats", "UnsupportedTheoryError", "canonical_atom",
           "cell_samples", "decide_sentence", "eliminate", "eliminate_one", "simplify",
           "solve_unary"]
