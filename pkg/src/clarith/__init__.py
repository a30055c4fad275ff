"""Clarithmetic toolkit: formulas, games, bounds, strategy composition and proofs."""

__version__ = "0.1.0"
