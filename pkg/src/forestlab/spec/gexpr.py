"""Expressions over ``x`` and ``x/(1-x^m)`` closed under ``+``, ``*``, ``E_m``, ``E_{>=m}``.

Every such expression denotes a counting series with radius of convergence at
least one.  ``Let`` names a subexpression so explicit forms stay linear in size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union as _TypeUnion

from ..polya import polya_exp_geq, polya_exp_m
from ..series import TruncatedSeries, add, cauchy_mul, geometric
from .evaluate import _check_order


@dataclass(frozen=True)
class X:
    pass


@dataclass(frozen=True)
class Geometric:
    """``x / (1 - x^m)``."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("geometric atom needs m >= 1")


@dataclass(frozen=True)
class Add:
    terms: tuple


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class EExact:
    m: int
    arg: "GExpr"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("E(m, .) needs m >= 1")


@dataclass(frozen=True)
class EAtLeast:
    m: int
    arg: "GExpr"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("Egeq(m, .) needs m >= 1")


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Let:
    name: str
    value: "GExpr"
    body: "GExpr"


GExpr = _TypeUnion[X, Geometric, Add, Mul, EExact, EAtLeast, Name, Let]


def add_of(terms) -> GExpr:
    terms = tuple(terms)
    if not terms:
        raise ValueError("empty sum")
    return terms[0] if len(terms) == 1 else Add(terms)


def mul_of(factors) -> GExpr:
    factors = tuple(factors)
    if not factors:
        raise ValueError("empty product")
    return factors[0] if len(factors) == 1 else Mul(factors)


def format_gexpr(expr: GExpr) -> str:
    """Render in the GExpr DSL; parsing the result gives back ``expr``."""
    if isinstance(expr, X):
        return "x"
    if isinstance(expr, Geometric):
        return f"x/(1-x^{expr.m})"
    if isinstance(expr, Name):
        return expr.name
    if isinstance(expr, EExact):
        return f"E({expr.m}, {format_gexpr(expr.arg)})"
    if isinstance(expr, EAtLeast):
        return f"Egeq({expr.m}, {format_gexpr(expr.arg)})"
    if isinstance(expr, Add):
        return " + ".join(
            f"({format_gexpr(t)})" if isinstance(t, (Add, Let)) else format_gexpr(t) for t in expr.terms
        )
    if isinstance(expr, Mul):
        return " * ".join(
            f"({format_gexpr(f)})" if isinstance(f, (Add, Mul, Let)) else format_gexpr(f)
            for f in expr.factors
        )
    if isinstance(expr, Let):
        return f"let {expr.name} = {format_gexpr(expr.value)} in\n{format_gexpr(expr.body)}"
    raise TypeError(f"not a GExpr: {expr!r}")


def free_names(expr: GExpr, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(expr, Name):
        return set() if expr.name in bound else {expr.name}
    if isinstance(expr, (X, Geometric)):
        return set()
    if isinstance(expr, (EExact, EAtLeast)):
        return free_names(expr.arg, bound)
    if isinstance(expr, Add):
        return set().union(*(free_names(t, bound) for t in expr.terms))
    if isinstance(expr, Mul):
        return set().union(*(free_names(f, bound) for f in expr.factors))
    if isinstance(expr, Let):
        return free_names(expr.value, bound) | free_names(expr.body, bound | {expr.name})
    raise TypeError(f"not a GExpr: {expr!r}")


def evaluate_gexpr(
    expr: GExpr,
    order: int,
    env: dict[str, TruncatedSeries] | None = None,
    max_order: int | None = None,
) -> TruncatedSeries:
    """Evaluate exactly to the given order by structural recursion."""
    _check_order(order, max_order)
    env = dict(env or {})

    def ev(e: GExpr) -> TruncatedSeries:
        if isinstance(e, X):
            return TruncatedSeries.x(order)
        if isinstance(e, Geometric):
            return geometric(1, e.m, order)
        if isinstance(e, Name):
            try:
                return env[e.name].truncate(order)
            except KeyError:
                raise KeyError(f"unbound name '{e.name}'") from None
        if isinstance(e, Add):
            out = ev(e.terms[0])
            for t in e.terms[1:]:
                out = add(out, ev(t))
            return out
        if isinstance(e, Mul):
            out = ev(e.factors[0])
            for f in e.factors[1:]:
                out = cauchy_mul(out, ev(f))
            return out
        if isinstance(e, EExact):
            inner = ev(e.arg)
            return inner if e.m == 1 else polya_exp_m(inner, e.m)
        if isinstance(e, EAtLeast):
            return polya_exp_geq(ev(e.arg), e.m)
        if isinstance(e, Let):
            saved = env.get(e.name)
            env[e.name] = ev(e.value)
            try:
                return ev(e.body)
            finally:
                if saved is None:
                    env.pop(e.name, None)
                else:
                    env[e.name] = saved
        raise TypeError(f"not a GExpr: {e!r}")

    return ev(expr)
