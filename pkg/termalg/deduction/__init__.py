"""Derivations: proof objects, the checker, search and closures."""

from termalg.deduction.checker import check_proof, check_step
from termalg.deduction.closure import closure_sample
from termalg.deduction.script import load_proof, parse_proof, render_proof
from termalg.deduction.search import derive
from termalg.deduction.sigma_r import sigma_r_satisfies
from termalg.deduction.types import DeriveResult, DeriveStatus, Proof, ProofStep, Rule, System

__all__ = [
    "DeriveResult",
    "DeriveStatus",
    "Proof",
    "ProofStep",
    "Rule",
    "System",
    "check_proof",
    "check_step",
    "closure_sample",
    "derive",
    "load_proof",
    "parse_proof",
    "render_proof",
    "sigma_r_satisfies",
]
