"""Counting, radius classification and zero-one law checks for recursively
specified classes of unordered rooted trees and their forests."""

from .errors import ForestlabError
from .laws import RatioVerdict, check_main_theorem, detect_period, ratio_test
from .polya import AtLeast, Exactly, polya_exp, polya_exp_geq, polya_exp_m
from .series import TruncatedSeries
from .spec import evaluate_expr, evaluate_gexpr, evaluate_system, parse_gexpr, parse_system
from .structure import Verdict, build_digraph, classify_radius, to_explicit
from .trees import RootedTree, TreeModule, count_by_enumeration, enumerate_trees

__all__ = [
    "AtLeast",
    "Exactly",
    "ForestlabError",
    "RatioVerdict",
    "RootedTree",
    "TreeModule",
    "TruncatedSeries",
    "Verdict",
    "build_digraph",
    "check_main_theorem",
    "classify_radius",
    "count_by_enumeration",
    "detect_period",
    "enumerate_trees",
    "evaluate_expr",
    "evaluate_gexpr",
    "evaluate_system",
    "parse_gexpr",
    "parse_system",
    "polya_exp",
    "polya_exp_geq",
    "polya_exp_m",
    "ratio_test",
    "to_explicit",
]
