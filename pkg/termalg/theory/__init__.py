"""Theories: signatures, axioms and the oracles that decide entailment."""
