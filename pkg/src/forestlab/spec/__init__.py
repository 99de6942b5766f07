"""Compton systems, class expressions and explicit-form expressions."""

from .evaluate import DEFAULT_MAX_ORDER, evaluate_expr, evaluate_system, max_order_from_env
from .gexpr import evaluate_gexpr, format_gexpr
from .parser import format_class_expr, format_system, parse_gexpr, parse_system
from .system import (
    ComptonSystem,
    Multiset,
    NodeClass,
    Ref,
    RootAppend,
    Sum,
    Union,
    ValidationReport,
    live_productions,
    productive_classes,
    validate,
)

__all__ = [
    "DEFAULT_MAX_ORDER",
    "ComptonSystem",
    "Multiset",
    "NodeClass",
    "Ref",
    "RootAppend",
    "Sum",
    "Union",
    "ValidationReport",
    "evaluate_expr",
    "evaluate_gexpr",
    "evaluate_system",
    "format_class_expr",
    "format_gexpr",
    "format_system",
    "live_productions",
    "max_order_from_env",
    "parse_gexpr",
    "parse_system",
    "productive_classes",
    "validate",
]
