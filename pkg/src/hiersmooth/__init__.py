"""Smoothing of per-node target values under hierarchy dominance constraints.

Given a DAG whose edges point child -> parent and non-negative targets a,
find non-negative x minimizing the distance to a (l1, weighted l1 or linf)
subject to x[parent] >= sum of x over its children.
"""

from .rational import BACKEND, Rat, is_integral, rat_str, to_rat
from .model import (Instance, ModelError, ParseError, ShapeError, ShapeReport,
                    is_feasible, objective, parse_instance, serialize_instance,
                    solution_text, validate)
from .l1tree import (INF, PathParams, PushStats, SolveReport, expand_weighted,
                     improve_subtree_abstract, push_path, push_search, set_params,
                     solve_l1_abstract, solve_l1_dfs)
from .linf import ThresholdResult, assign_for_threshold, default_linf_tol, solve_linf
from .bilayer import (CoveringLP, covering_optimum_exact, lift_solution,
                      most_violated_constraint, reduce_bilayer, solve_covering_mw)
from .oracle import (DualCertificate, LPProblem, LPSolution, brute_force_integral,
                     check_certificate, extract_dual, solve_lp_exact, solve_simplex)
from .gen import (SetCoverSpec, SplitMix64, figure1_instance, gen_random_bilayer,
                  gen_random_tree, gen_setcover_instance)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Rat", "is_integral", "rat_str", "to_rat",
    "Instance", "ModelError", "ParseError", "ShapeError", "ShapeReport",
    "is_feasible", "objective", "parse_instance", "serialize_instance",
    "solution_text", "validate",
    "INF", "PathParams", "PushStats", "SolveReport", "expand_weighted",
    "improve_subtree_abstract", "push_path", "push_search", "set_params",
    "solve_l1_abstract", "solve_l1_dfs",
    "ThresholdResult", "assign_for_threshold", "default_linf_tol", "solve_linf",
    "CoveringLP", "covering_optimum_exact", "lift_solution",
    "most_violated_constraint", "reduce_bilayer", "solve_covering_mw",
    "DualCertificate", "LPProblem", "LPSolution", "brute_force_integral",
    "check_certificate", "extract_dual", "solve_lp_exact", "solve_simplex",
    "SetCoverSpec", "SplitMix64", "figure1_instance", "gen_random_bilayer",
    "gen_random_tree", "gen_setcover_instance",
    "__version__",
]
