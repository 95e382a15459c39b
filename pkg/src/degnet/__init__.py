"""Degree-constrained network design: convex relaxations, randomized iterative rounding,
tree labeling and group Steiner tree on bounded treewidth graphs."""

__version__ = "0.1.0"

from .graph import Graph, Requirements, degrees, lp_norm, verify_requirements
from .relaxation import GoodPolytope, solve_convex_program
from .rounding import RoundingEngine, round_loop
from .treelabel import LabelTreeInstance, build_supertree, recursive_rounding, solve_fractional
from .gst import GSTProblem, TreeDecomposition, solve_gst

__all__ = [
    "Graph", "Requirements", "degrees", "lp_norm", "verify_requirements",
    "GoodPolytope", "solve_convex_program", "RoundingEngine", "round_loop",
    "LabelTreeInstance", "build_supertree", "recursive_rounding", "solve_fractional",
    "GSTProblem", "TreeDecomposition", "solve_gst",
]
