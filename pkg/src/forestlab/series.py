"""Exact truncated power series.

A :class:`TruncatedSeries` stores the coefficients of ``A(x) = sum a(n) x^n``
for ``n = 0..order``.  Coefficients are exact rationals; values that happen to
be integral are kept as plain ``int`` so that counting series (the common case)
run at integer speed.  Binary operations truncate to the smaller order.
"""

from __future__ import annotations

import csv
import io
import numbers
from fractions import Fraction
from itertools import islice
from operator import mul
from typing import Iterable, Sequence, Union

Coefficient = Union[int, Fraction]


def canon(value) -> Coefficient:
    """Return ``value`` as an ``int`` when integral, otherwise a reduced Fraction."""
    if type(value) is int:
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Rational):
        return canon(Fraction(value.numerator, value.denominator))
    if isinstance(value, str):
        return canon(Fraction(value))
    raise TypeError(f"coefficient must be an exact rational, got {type(value).__name__}")


def _dot(a: Sequence[Coefficient], b_reversed: Iterable[Coefficient]) -> Coefficient:
    return canon(sum(map(mul, a, b_reversed)))


class TruncatedSeries:
    """Immutable power series known exactly up to degree ``order``."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        values = [canon(c) for c in coeffs]
        if order is not None:
            if order < 0:
                raise ValueError("order must be nonnegative")
            values = values[: order + 1] + [0] * (order + 1 - len(values))
        if not values:
            raise ValueError("a truncated series needs at least one coefficient")
        self._coeffs = tuple(values)

    # constructors

    @classmethod
    def _raw(cls, values: Sequence[Coefficient]) -> "TruncatedSeries":
        obj = cls.__new__(cls)
        obj._coeffs = tuple(values)
        return obj

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls._raw([0] * (order + 1))

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls.monomial(0, order)

    @classmethod
    def monomial(cls, degree: int, order: int, coefficient: Coefficient = 1) -> "TruncatedSeries":
        values = [0] * (order + 1)
        if degree <= order:
            values[degree] = canon(coefficient)
        return cls._raw(values)

    @classmethod
    def x(cls, order: int) -> "TruncatedSeries":
        return cls.monomial(1, order)

    @classmethod
    def from_dict(cls, terms: dict[int, Coefficient], order: int) -> "TruncatedSeries":
        values = [0] * (order + 1)
        for degree, c in terms.items():
            if degree < 0:
                raise ValueError("negative degree")
            if degree <= order:
                values[degree] = canon(values[degree] + canon(c))
        return cls._raw(values)

    # container protocol

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Coefficient, ...]:
        return self._coeffs

    def __getitem__(self, n):
        return self._coeffs[n]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in islice(self._coeffs, 12))
        more = ", ..." if len(self._coeffs) > 12 else ""
        return f"TruncatedSeries([{shown}{more}], order={self.order})"

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries._raw(self._coeffs[: order + 1])

    def is_integral(self) -> bool:
        return all(type(c) is int for c in self._coeffs)

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self._coeffs)

    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def support(self) -> list[int]:
        return [n for n, c in enumerate(self._coeffs) if c != 0]

    def valuation(self) -> int | None:
        """Lowest degree with a nonzero coefficient, or None for the zero series."""
        for n, c in enumerate(self._coeffs):
            if c != 0:
                return n
        return None

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return add(self, other.scale(-1))

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return cauchy_mul(self, other)
        if isinstance(other, numbers.Rational):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, factor) -> "TruncatedSeries":
        f = canon(factor)
        return TruncatedSeries._raw([canon(f * c) for c in self._coeffs])

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``x**k`` keeping the same order."""
        if k < 0:
            raise ValueError("shift must be nonnegative")
        n = len(self._coeffs)
        return TruncatedSeries._raw(([0] * k + list(self._coeffs))[:n])

    def partial_sums(self) -> "TruncatedSeries":
        """Multiply by ``1/(1-x)``."""
        out, acc = [], 0
        for c in self._coeffs:
            acc = acc + c
            out.append(canon(acc))
        return TruncatedSeries._raw(out)

    def to_csv(self, start: int = 0) -> str:
        """Dump as CSV ``n,coefficient`` with exact ``num/den`` values."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "coefficient"])
        for n in range(start, len(self._coeffs)):
            writer.writerow([n, format_coefficient(self._coeffs[n])])
        return buf.getvalue()


def format_coefficient(c: Coefficient) -> str:
    return str(c) if type(c) is int else f"{c.numerator}/{c.denominator}"


def parse_csv(text: str) -> TruncatedSeries:
    """Read a coefficient dump back; missing degrees are zero."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != ["n", "coefficient"]:
        raise ValueError("expected header 'n,coefficient'")
    terms = {int(n): Fraction(c.strip()) for n, c in rows[1:] if n.strip()}
    order = max(terms) if terms else 0
    return TruncatedSeries.from_dict(terms, order)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    n = min(a.order, b.order) + 1
    return TruncatedSeries._raw([canon(u + v) for u, v in zip(a.coeffs[:n], b.coeffs[:n])])


def cauchy_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product ``c(n) = sum_{j<=n} a(j) b(n-j)`` to the smaller order."""
    order = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    # skip leading zeros: counting series usually start at x or higher
    va, vb = a.valuation(), b.valuation()
    if va is None or vb is None:
        return TruncatedSeries.zero(order)
    out = [0] * (order + 1)
    for n in range(va + vb, order + 1):
        lo, hi = va, n - vb
        out[n] = _dot(ac[lo : hi + 1], bc[n - lo : vb - 1 : -1] if vb > 0 else bc[n - lo :: -1])
    return TruncatedSeries._raw(out)


def substitute_power(a: TruncatedSeries, d: int) -> TruncatedSeries:
    """Return ``A(x^d)`` at the same truncation order."""
    if d < 1:
        raise ValueError("substitution exponent must be >= 1")
    order = a.order
    out = [0] * (order + 1)
    for k in range(0, order // d + 1):
        out[k * d] = a.coeffs[k]
    return TruncatedSeries._raw(out)


def derivative(a: TruncatedSeries) -> TruncatedSeries:
    """Formal derivative; the result has order one less than ``a``."""
    if a.order == 0:
        raise ValueError("derivative of an order-0 series has no known coefficients")
    return TruncatedSeries._raw([canon(n * c) for n, c in enumerate(a.coeffs) if n > 0])


def exp_truncated(a: TruncatedSeries) -> TruncatedSeries:
    """``exp(A)`` for ``a(0) = 0`` via ``n b(n) = sum_k k a(k) b(n-k)``."""
    if a[0] != 0:
        raise ValueError("exp_truncated needs a zero constant term")
    order = a.order
    w = [canon(k * c) for k, c in enumerate(a.coeffs)]
    b: list[Coefficient] = [1]
    for n in range(1, order + 1):
        s = _dot(w[1 : n + 1], reversed(b))
        b.append(s // n if type(s) is int and s % n == 0 else canon(Fraction(s) / n))
    return TruncatedSeries._raw(b)


def log_truncated(a: TruncatedSeries) -> TruncatedSeries:
    """``log(A)`` for ``a(0) = 1``; inverse of :func:`exp_truncated`."""
    if a[0] != 1:
        raise ValueError("log_truncated needs constant term 1")
    order = a.order
    ac = a.coeffs
    # w(n) = n * log(A)[n]; from A' = A * L'  =>  n a(n) = sum_{k=1}^{n} w(k) a(n-k)
    w: list[Coefficient] = [0]
    for n in range(1, order + 1):
        s = _dot(w[1:n], reversed(ac[1:n])) if n > 1 else 0
        w.append(canon(n * ac[n] - s))
    return TruncatedSeries._raw([0] + [canon(Fraction(w[n]) / n) for n in range(1, order + 1)])


def geometric(c: int, m: int, order: int) -> TruncatedSeries:
    """``x^c / (1 - x^m)`` truncated at ``order``."""
    if m < 1:
        raise ValueError("geometric period m must be >= 1")
    if c < 0:
        raise ValueError("geometric offset c must be >= 0")
    out = [0] * (order + 1)
    for n in range(c, order + 1, m):
        out[n] = 1
    return TruncatedSeries._raw(out)


def polynomial(coeffs: Sequence, order: int) -> TruncatedSeries:
    """Series of the polynomial with the given low-to-high coefficients."""
    return TruncatedSeries(coeffs, order=order)
