"""Team interception games on s-t DAGs: costs, team values and the price of uncorrelation."""
from .config import Caps
from .cost import CostKind, InterceptorProfile, F_max, f_max_response, f_sum, worst_case_cost
from .equilibrium import (
    GameParams,
    convert_payoff_to_cost,
    max_disjoint_analysis,
    plateau_threshold,
    pou_report,
    r_u,
    tme_numeric,
    tme_sum_disjoint,
    tme_value,
    tmecor_value,
)
from .errors import PouLabError
from .estimator import TeamMaxminSolver, UniformPriceOfUncorrelation
from .graph import Edge, Graph, Path, disjoint_paths_graph, enumerate_st_paths, mincut, prefix_table
from .search import SearchConfig
from .strategy import PathDistribution, ProductStrategy, expected_distinct, uniform_strategy

__version__ = "0.1.0"
