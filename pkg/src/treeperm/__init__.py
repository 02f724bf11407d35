"""treeperm: rooted plane trees, 321-avoiding permutations, the bijection
between them, exact and Monte Carlo samplers, and the fixed-point limit laws
at desk scale."""

__version__ = "0.1.0"

from .bijection import perm_to_tree, tree_to_perm
from .distributions import (
    EmpiricalDist,
    Pmf,
    catalan,
    chi_square_gof,
    chi_square_independence,
    convolve_pmf,
    exact_fp_distribution,
    exact_front_back_joint,
    exact_window_probability,
    geometric,
    gw_progeny,
    midrange_fp_probability,
    negative_binomial_2_one_third,
    size_biased_geometric_half,
    theoretical_pmf,
    tv_distance,
)
from .perms import (
    FixedPointMeasure,
    Permutation,
    contains_321,
    contains_pattern,
    enumerate_avoiders,
    validate_permutation,
)
from .rng import RngStream
from .samplers import (
    GWOverflowError,
    LimitProcessSample,
    gw_total_progeny,
    gw_tree_truncated,
    kesten_truncated,
    sample_limit_process,
    sample_progeny,
    sample_progeny_batch,
    uniform_avoider_321,
    uniform_dyck_path,
    uniform_tree,
)
from .trees import (
    DyckPath,
    LeafStats,
    PlaneTree,
    dyck_from_tree,
    enumerate_trees,
    fringe_decomposition,
    leaf_stats,
    tree_fixed_point_measures,
    tree_from_dyck,
    truncate_tree,
)

__all__ = [
    "__version__",
    "DyckPath",
    "EmpiricalDist",
    "FixedPointMeasure",
    "GWOverflowError",
    "LeafStats",
    "LimitProcessSample",
    "Permutation",
    "PlaneTree",
    "Pmf",
    "RngStream",
    "catalan",
    "chi_square_gof",
    "chi_square_independence",
    "contains_321",
    "contains_pattern",
    "convolve_pmf",
    "dyck_from_tree",
    "enumerate_avoiders",
    "enumerate_trees",
    "exact_fp_distribution",
    "exact_front_back_joint",
    "exact_window_probability",
    "fringe_decomposition",
    "geometric",
    "gw_progeny",
    "gw_total_progeny",
    "gw_tree_truncated",
    "kesten_truncated",
    "leaf_stats",
    "midrange_fp_probability",
    "negative_binomial_2_one_third",
    "perm_to_tree",
    "sample_limit_process",
    "sample_progeny",
    "sample_progeny_batch",
    "size_biased_geometric_half",
    "theoretical_pmf",
    "tree_fixed_point_measures",
    "tree_from_dyck",
    "tree_to_perm",
    "truncate_tree",
    "tv_distance",
    "uniform_avoider_321",
    "uniform_dyck_path",
    "uniform_tree",
    "validate_permutation",
]
