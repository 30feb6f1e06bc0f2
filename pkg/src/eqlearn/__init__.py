"""Equational theorem proving with learned term-pattern abstractions.

Submodules
----------
terms        first-order terms, matching, unification
kbo          Knuth-Bendix orderings
abstraction  abstractions and the abstracted weight function
completion   unfailing completion prover with replayable proofs
compressor   compressive pattern discovery over term corpora
lambda_io    s-expression exchange format for patterns
miner        partial-proof and domain abstraction mining
tptp         TPTP CNF input, abstraction files, proof output
cli          the ``eqlearn`` command
"""

from .abstraction import Abstraction, ConstantWeight, WeightFactor, abstracted_weight, with_weights
from .completion import Limits, Outcome, Proof, Status, complete, replay_proof
from .compressor import compress
from .kbo import KBO
from .miner import MiningConfig, Strategy, domain_abstractions, partial_proof_abstractions
from .problem import Problem
from .terms import App, Equation, Var
from .tptp import load_problem, parse_problem, parse_term

__all__ = [
    "Abstraction", "App", "ConstantWeight", "Equation", "KBO", "Limits", "MiningConfig",
    "Outcome", "Problem", "Proof", "Status", "Strategy", "Var", "WeightFactor",
    "abstracted_weight", "complete", "compress", "domain_abstractions", "load_problem",
    "parse_problem", "parse_term", "partial_proof_abstractions", "replay_proof", "with_weights",
]
