"""Multiset (Pólya exponentiation) operators on counting series.

``E_m(A)`` counts multisets of exactly ``m`` objects drawn from a class with
generating function ``A``; ``E_{>=m}(A)`` counts multisets of at least ``m``;
``E = E_{>=0}``.  Inputs count objects, so they must have nonnegative integer
coefficients and a zero constant term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .series import (
    TruncatedSeries,
    canon,
    cauchy_mul,
    derivative,
    substitute_power,
)


@dataclass(frozen=True, order=True)
class MultiplicityBound:
    """``Exactly(m)`` (``at_least=False``) or ``AtLeast(m)`` (``at_least=True``)."""

    m: int
    at_least: bool = False

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("multiplicity must be nonnegative")

    @property
    def is_zero(self) -> bool:
        return not self.at_least and self.m == 0

    @property
    def allows_zero(self) -> bool:
        return self.m == 0

    def admits(self, count: int) -> bool:
        return count >= self.m if self.at_least else count == self.m

    def __str__(self) -> str:
        return f">={self.m}" if self.at_least else str(self.m)


def Exactly(m: int) -> MultiplicityBound:
    return MultiplicityBound(m, False)


def AtLeast(m: int) -> MultiplicityBound:
    return MultiplicityBound(m, True)


def _require_counting(p: TruncatedSeries) -> None:
    if p[0] != 0:
        raise ValueError("Pólya operators need a zero constant term")
    for n, c in enumerate(p.coeffs):
        if type(c) is not int or c < 0:
            raise ValueError(f"coefficient {c} at degree {n} is not a nonnegative integer")


def star_transform(p: TruncatedSeries) -> TruncatedSeries:
    """``P*(x) = sum_{m>=1} P(x^m)/m``, i.e. ``p*(n) = (1/n) sum_{d|n} d p(d)``."""
    if p[0] != 0:
        raise ValueError("star transform needs a zero constant term")
    order = p.order
    acc = [0] * (order + 1)
    for d in range(1, order + 1):
        c = p[d]
        if c:
            dc = d * c
            for n in range(d, order + 1, d):
                acc[n] += dc
    return TruncatedSeries._raw([0] + [canon(Fraction(acc[n]) / n) for n in range(1, order + 1)])


def polya_exp(p: TruncatedSeries) -> TruncatedSeries:
    """``E(P) = prod_n (1 - x^n)^{-p(n)}``, expanded factor by factor in integers."""
    _require_counting(p)
    order = p.order
    c = [0] * (order + 1)
    c[0] = 1
    for n in range(1, order + 1):
        e = p[n]
        if e == 0:
            continue
        steps = order // n
        if e <= steps:
            # e successive multiplications by 1/(1 - x^n)
            for _ in range(e):
                for k in range(n, order + 1):
                    c[k] += c[k - n]
        else:
            # (1 - x^n)^{-e} = sum_j C(e-1+j, j) x^{nj}
            binom = [1]
            for j in range(1, steps + 1):
                binom.append(binom[-1] * (e - 1 + j) // j)
            new = c[:]
            for k in range(n, order + 1):
                new[k] = sum(binom[j] * c[k - j * n] for j in range(k // n + 1))
            c = new
    return TruncatedSeries._raw(c)


def partition_product(p: TruncatedSeries) -> TruncatedSeries:
    """Same value as :func:`polya_exp`, by explicit multiplication of factor series.

    Each factor ``(1 - x^n)^{-p(n)}`` is materialised as its own series and
    combined with :func:`cauchy_mul`; kept deliberately naive as a cross-check.
    """
    _require_counting(p)
    order = p.order
    result = TruncatedSeries.one(order)
    for n in range(1, order + 1):
        e = p[n]
        if e == 0:
            continue
        terms = {j * n: math.comb(e - 1 + j, j) for j in range(order // n + 1)}
        result = cauchy_mul(result, TruncatedSeries.from_dict(terms, order))
    return result


def _exact_tables(p: TruncatedSeries, m: int) -> list[list[int]]:
    """``[E_0, ..., E_m]`` via ``k E_k = sum_{s=1}^{k} P(x^s) E_{k-s}``."""
    order = p.order
    pc = p.coeffs
    support = [i for i in range(1, order + 1) if pc[i]]
    tables = [[1] + [0] * order]
    for k in range(1, m + 1):
        acc = [0] * (order + 1)
        for s in range(1, k + 1):
            prev = tables[k - s]
            prev_support = [j for j in range(order + 1) if prev[j]]
            for i in support:
                deg = i * s
                if deg > order:
                    break
                w = pc[i]
                for j in prev_support:
                    if deg + j > order:
                        break
                    acc[deg + j] += w * prev[j]
        row = []
        for v in acc:
            q, r = divmod(v, k)
            if r:
                raise ArithmeticError("non-integral multiset count; input is not a counting series")
            row.append(q)
        tables.append(row)
    return tables


def polya_exp_m(p: TruncatedSeries, m: int) -> TruncatedSeries:
    """Generating function of multisets of exactly ``m`` objects."""
    _require_counting(p)
    if m < 0:
        raise ValueError("m must be nonnegative")
    return TruncatedSeries._raw(_exact_tables(p, m)[m])


def polya_exp_geq(p: TruncatedSeries, m: int) -> TruncatedSeries:
    """Generating function of multisets of at least ``m`` objects.

    Computed as ``E(P) - sum_{j<m} E_j(P)``; exact because ``E_j`` only
    contributes from degree ``j`` upward.
    """
    _require_counting(p)
    if m < 0:
        raise ValueError("m must be nonnegative")
    full = list(polya_exp(p).coeffs)
    if m:
        for row in _exact_tables(p, m - 1):
            for n, v in enumerate(row):
                full[n] -= v
    return TruncatedSeries._raw(full)


def polya_apply(bound: MultiplicityBound, p: TruncatedSeries) -> TruncatedSeries:
    """``E_gamma(P)`` for a multiplicity bound ``gamma``."""
    if bound.at_least:
        return polya_exp_geq(p, bound.m)
    if bound.m == 1:
        _require_counting(p)
        return p
    return polya_exp_m(p, bound.m)


def _compositions(m: int):
    if m == 0:
        yield ()
        return
    for first in range(1, m + 1):
        for rest in _compositions(m - first):
            yield (first,) + rest


def polya_exp_m_composition(p: TruncatedSeries, m: int) -> TruncatedSeries:
    """``E_m`` by the nested-composition formula.

    ``E_m(A) = sum_j 1/j! sum_{m_1+..+m_j=m} 1/(m_1..m_j) A(x^{m_1})..A(x^{m_j})``.
    Cost grows like ``2^m`` series products; used to cross-check
    :func:`polya_exp_m`.
    """
    _require_counting(p)
    order = p.order
    if m == 0:
        return TruncatedSeries.one(order)
    substituted = {}
    total = TruncatedSeries.zero(order)
    for comp in _compositions(m):
        j = len(comp)
        weight = Fraction(1, math.factorial(j) * math.prod(comp))
        term = TruncatedSeries.one(order)
        for part in comp:
            if part not in substituted:
                substituted[part] = substitute_power(p, part)
            term = cauchy_mul(term, substituted[part])
        total = total + term.scale(weight)
    return total


def hat_transform(q: TruncatedSeries) -> TruncatedSeries:
    """``Q^(x) = x/(1-x) * d/dx Q*(x)``.

    Coefficients are ``q^(n) = sum_{m<=n} m q*(m) = sum_{m<=n} floor(n/m) m q(m)``,
    a nondecreasing sequence of nonnegative integers for nonnegative ``q``.
    """
    if q[0] != 0:
        raise ValueError("hat transform needs a zero constant term")
    if any(c < 0 for c in q.coeffs):
        raise ValueError("hat transform needs nonnegative coefficients")
    order = q.order
    if order == 0:
        return TruncatedSeries.zero(0)
    d = derivative(star_transform(q))
    return TruncatedSeries._raw((0,) + d.coeffs).partial_sums()

