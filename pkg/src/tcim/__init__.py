"""Competitive influence maximization under general competitive
independent cascade models: reverse-instance sampling, a two-phase
near-optimal seed selector, Monte-Carlo baselines, and exact oracles."""

from ._backend import BACKEND_NAME
from .baselines import (BaselineResult, celf, estimate_sigma_mc, exhaustive_opt,
                        greedy_mc, greedymc_min_r, single_discount)
from .engine import (MarginalGainVector, TcimParams, TcimResult, estimate_lb,
                     greedy_select, lambda_main, node_selection, refine_lb, tcim)
from .errors import ContractViolation, EdgeListParseError, SizeGuardError
from .graph import (DirectedGraph, NodeSet, assign_weighted_ic,
                    generate_synthetic, load_edge_list, restricted_edge_count,
                    serialize_edge_list)
from .models import (ModelKind, commit, exact_sigma, forward_simulate,
                     init_state, marginal_gain, pool_scores, score)
from .rapg import (InstancePool, RapgInstance, alpha, pool_alphas, pool_widths,
                   rapg_width, sample_pool, sample_rapg)
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME", "BaselineResult", "ContractViolation", "DirectedGraph",
    "EdgeListParseError", "InstancePool", "MarginalGainVector", "ModelKind",
    "NodeSet", "RapgInstance", "RngStream", "SizeGuardError", "TcimParams",
    "TcimResult", "alpha", "assign_weighted_ic", "celf", "commit",
    "estimate_lb", "estimate_sigma_mc", "exact_sigma", "exhaustive_opt",
    "forward_simulate", "generate_synthetic", "greedy_mc", "greedy_select",
    "greedymc_min_r", "init_state", "lambda_main", "load_edge_list",
    "marginal_gain", "node_selection", "pool_alphas", "pool_scores",
    "pool_widths", "rapg_width", "refine_lb", "restricted_edge_count",
    "sample_pool", "sample_rapg", "score", "serialize_edge_list",
    "single_discount", "tcim",
]
