"""pax: a workbench for a probabilistic process algebra with data.

Terms are built from actions, sequential, alternative, parallel and
probabilistic composition, guarded commands, assignments and evaluation
operators.  The package computes their operational semantics, decides
(rooted) branching bisimilarity, rewrites with the equational axioms and
simulates executions.
"""

from .bisim import (Verdict, branching_equivalent, branching_partition, brute_force_partition,
                    interference_free, rooted_equivalent, rooted_partition)
from .data import DataUniverse, EvalMap, eval_cond, eval_data
from .parser import ParseError, SpecFile, parse, parse_file, parse_term
from .pretty import pretty
from .pts import PTS, BudgetExceeded, explore, export, import_json, outcome_distribution, reach_probability
from .rewrite import normalize, prove_equal
from .simulate import estimate, run_once
from .sos import Engine, action_steps, distribution, terminates
from .terms import CommFunction, Context

__version__ = "0.1.0"

__all__ = [
    "Verdict", "branching_equivalent", "branching_partition", "brute_force_partition",
    "interference_free", "rooted_equivalent", "rooted_partition", "DataUniverse", "EvalMap",
    "eval_cond", "eval_data", "ParseError", "SpecFile", "parse", "parse_file", "parse_term", "pretty",
    "PTS", "BudgetExceeded", "explore", "export", "import_json", "outcome_distribution",
    "reach_probability", "normalize", "prove_equal", "estimate", "run_once", "Engine",
    "action_steps", "distribution", "terminates", "CommFunction", "Context",
]
