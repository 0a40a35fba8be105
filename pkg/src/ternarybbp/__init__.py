"""Ternary BBP-type formulas: notation, evaluation, verification and digit extraction."""

__version__ = "0.1.0"
