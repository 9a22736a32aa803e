"""Certifying decompositions of graphs that exclude a tree or a long path as a minor.

Every entry point returns either a structured partition of the input graph or
an explicit obstruction (a minor model, or a long path), and both kinds of
answer are checked by an independent validator before they leave the library.
"""
from .covering import FunctionFinder, Hitting, MemberFinder, Packing, packing_or_hitting
from .decompositions import (
    EliminationForest,
    PathDecomposition,
    TreeDecomposition,
    exact_pathwidth,
    exact_treedepth,
    exact_treewidth,
    parse_td,
    format_td,
    validate_path_decomposition,
    validate_tree_decomposition,
)
from .errors import BudgetExceeded, CapExceeded, CertificateError, GraphError, TmpkError
from .excluded_path import LongPath, PathPartitionResult, decompose_excluded_path
from .excluded_tree import (
    TheoremOutcome,
    TreePartitionResult,
    decompose_excluded_tree,
    decompose_excluded_tree_theorem,
    validate_tree_partition,
)
from .gadgets import lower_bound_graph, random_screened_instance, verify_gadget_claims
from .graph import (
    Graph,
    MinorModel,
    Partition,
    RootedTree,
    complete_dary_tree,
    parse_graph,
    quotient,
    strong_product,
    tree_params,
)
from .minors import RootConstraint, find_path, find_rooted_tree_model, longest_path, validate_model

__version__ = "0.1.0"
