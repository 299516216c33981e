"""Solvers for fault-tolerant resource allocation (FTRA) and its k-bounded variant."""
from .model import (Instance, IntegralSolution, FractionalSolution, DualSolution, InstanceError,
                    cost, check_feasible, check_metric, site_distance, generate_euclidean,
                    generate_graph_metric)
from .lp import build_primal, solve, solve_instance, lp_optimum, make_complete, verify_csc
from .oracle import exact_ilp, optimal_connections
from .primal_dual import PdConfig, pd_solve, apd_solve, build_dual_certificate
from .aga import aga, optimize_connections, scaled_152_pipeline
from .ulpr import ulpr_solve
from .reduction import shrink, split, expand_to_ftfl, reduce_solve
from .kftra import binary_search, greedy_pairing, randomized_round, pk_solve

__version__ = "0.1.0"
