"""Empirical zero-one law checks on counting sequences.

``ratio_test`` watches ``a((n-1)d) / a(nd)`` over a window of degrees, where
``d`` is the gcd of the sizes present, and reports CONVERGES_TO_ONE, DIVERGES
or INCONCLUSIVE from the trend.  ``check_main_theorem`` compares that outcome on
the forests of a tree class with the structural radius verdict.

Calibration: tolerance ``TAU = 0.05`` and a window ending at degree >= 2000.
Partition counts, the slowest standard radius-one case, have gap
``1 - p(n-1)/p(n)`` close to ``pi/sqrt(6n)``: about 0.029 at 2000.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from statistics import fmean

from .errors import InsufficientDataError
from .polya import polya_exp_geq
from .series import TruncatedSeries, format_coefficient
from .spec.evaluate import evaluate_expr, evaluate_system
from .spec.system import ComptonSystem
from .structure import RadiusClassification, Verdict, classify_radius

TAU = 0.05
MIN_END = 2000
STABLE_FACTOR = 0.95
MIN_RATIOS = 8
ESCALATION = (250, 500, 1000, 2000, 4000)


class RatioVerdict(enum.Enum):
    CONVERGES_TO_ONE = "CONVERGES_TO_ONE"
    DIVERGES = "DIVERGES"
    INCONCLUSIVE = "INCONCLUSIVE"


def decimal_string(q: Fraction, places: int = 12) -> str:
    """Approximate decimal rendering of an exact rational, rounded to ``places`` digits."""
    with localcontext() as ctx:
        ctx.prec = places + 40
        value = Decimal(q.numerator) / Decimal(q.denominator)
        return str(value.quantize(Decimal(1).scaleb(-places)))


# period --------------------------------------------------------------------


@dataclass
class PeriodInfo:
    d: int
    support: tuple[int, ...]  # first few positive degrees
    onset: int | None  # from here on every multiple of d within the truncation is positive

    def to_dict(self) -> dict:
        return {"d": self.d, "support": list(self.support), "onset": self.onset}


def detect_period(a: TruncatedSeries) -> PeriodInfo:
    coeffs = a.coeffs
    support = [n for n in range(1, a.order + 1) if coeffs[n] > 0]
    if not support:
        raise InsufficientDataError("series has no positive coefficient of positive degree")
    d = 0
    for n in support:
        d = math.gcd(d, n)
    onset = None
    for n in range(a.order - a.order % d, 0, -d):
        if coeffs[n] > 0:
            onset = n
        else:
            break
    return PeriodInfo(d, tuple(support[:10]), onset)


# ratio test ------------------------------------------------------------------


@dataclass
class RatioReport:
    period: int
    window: tuple[int, int]
    degrees: list[int]  # degree nd of each ratio
    ratios: list[Fraction]  # a((n-1)d) / a(nd)
    verdict: RatioVerdict
    trend: dict = field(default_factory=dict)

    @property
    def last(self) -> Fraction:
        return self.ratios[-1]

    def gaps(self) -> list[float]:
        return [1 - float(r) for r in self.ratios]

    def to_dict(self, samples: int = 25) -> dict:
        m = len(self.ratios)
        idx = sorted({round(k * (m - 1) / (samples - 1)) for k in range(samples)}) if m > samples else range(m)
        return {
            "period": self.period,
            "window": list(self.window),
            "verdict": self.verdict.value,
            "trend": self.trend,
            "ratios": [
                {
                    "n": self.degrees[k],
                    "exact": format_coefficient(self.ratios[k]),
                    "approx": decimal_string(self.ratios[k]),
                }
                for k in idx
            ],
        }


def _extrapolated_gap(degrees: list[int], gaps: list[float]) -> float:
    """Intercept of the least-squares line ``gap ~ alpha + beta / sqrt(n)``."""
    xs = [1 / math.sqrt(n) for n in degrees]
    mx, my = fmean(xs), fmean(gaps)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return my
    beta = sum((x - mx) * (y - my) for x, y in zip(xs, gaps)) / sxx
    return my - beta * mx


def ratio_test(a: TruncatedSeries, window: tuple[int, int] | None = None) -> RatioReport:
    """Trend of ``a((n-1)d)/a(nd)`` over degrees ``nd`` in the window (default: second half)."""
    info = detect_period(a)
    d = info.d
    lo, hi = window if window is not None else (a.order // 2, a.order)
    if not 1 <= lo <= hi <= a.order:
        raise ValueError(f"window {lo}..{hi} outside 1..{a.order}")
    coeffs = a.coeffs
    degrees, ratios = [], []
    for deg in range(max(d, lo + (-lo) % d), hi + 1, d):
        prev, cur = coeffs[deg - d], coeffs[deg]
        if prev > 0 and cur > 0:
            degrees.append(deg)
            ratios.append(Fraction(prev, cur))
    if len(ratios) < MIN_RATIOS:
        raise InsufficientDataError(f"only {len(ratios)} usable ratios in window {lo}..{hi}")

    gaps = [1 - float(r) for r in ratios]
    m = len(gaps)
    q = max(1, m // 4)
    last_q = gaps[-q:]
    prev_q = gaps[-2 * q : -q]
    half = gaps[m // 2 :]
    mean_last = fmean(abs(x) for x in last_q)
    mean_prev = fmean(abs(x) for x in prev_q)
    shrinking = mean_last <= mean_prev
    stable = mean_last >= STABLE_FACTOR * mean_prev
    end = degrees[-1]

    if end >= MIN_END and max(abs(x) for x in last_q) < TAU and shrinking:
        verdict = RatioVerdict.CONVERGES_TO_ONE
    elif min(half) > TAU and stable:
        verdict = RatioVerdict.DIVERGES
    else:
        verdict = RatioVerdict.INCONCLUSIVE

    trend = {
        "last_ratio": decimal_string(ratios[-1]),
        "last_gap": round(gaps[-1], 12),
        "monotone_increasing": all(x < y for x, y in zip(ratios, ratios[1:])),
        "mean_gap_last_quarter": round(mean_last, 12),
        "mean_gap_previous_quarter": round(mean_prev, 12),
        "shrinking": shrinking,
        "extrapolated_gap": round(_extrapolated_gap(degrees, gaps), 12),
        "tau": TAU,
        "window_end": end,
    }
    return RatioReport(d, (lo, hi), degrees, ratios, verdict, trend)


# density and Schur samples ---------------------------------------------------


def density(b: TruncatedSeries, a: TruncatedSeries, d: int = 1) -> list[tuple[int, Fraction]]:
    """Samples ``b(nd)/a(nd)`` wherever ``a(nd) != 0``."""
    if d < 1:
        raise ValueError("period must be positive")
    order = min(a.order, b.order)
    return [
        (n, Fraction(b.coeffs[n]) / a.coeffs[n])
        for n in range(d, order + 1, d)
        if a.coeffs[n] != 0
    ]


def schur_ratio(a: TruncatedSeries, c: TruncatedSeries, window: tuple[int, int]) -> list[tuple[int, Fraction]]:
    """Samples ``a(n)/c(n)`` for ``n`` in the window; ``c`` must be positive there."""
    lo, hi = window
    if hi > min(a.order, c.order):
        raise ValueError("window exceeds the truncation order")
    out = []
    for n in range(lo, hi + 1):
        if c.coeffs[n] <= 0:
            raise ValueError(f"c({n}) is not positive")
        out.append((n, Fraction(a.coeffs[n]) / c.coeffs[n]))
    return out


# coherence with the structural classification ------------------------------


@dataclass
class CoherenceReport:
    tree_class: str
    structural: Verdict
    nonempty: bool
    order: int
    ratio: RatioReport | None
    coherence: str  # AGREE / CONFLICT
    note: str = ""

    @property
    def ratio_verdict(self) -> RatioVerdict:
        return self.ratio.verdict if self.ratio else RatioVerdict.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "tree_class": self.tree_class,
            "structural": self.structural.label,
            "nonempty": self.nonempty,
            "order": self.order,
            "verdict": self.ratio_verdict.value,
            "coherence": self.coherence,
            "note": self.note,
            "ratio_test": self.ratio.to_dict() if self.ratio else None,
        }


def forest_series(system: ComptonSystem, tree_class, order: int, max_order: int | None = None) -> TruncatedSeries:
    """``E_{>=1}(T(x))`` for the tree class."""
    if isinstance(tree_class, str):
        tree_class = system.resolve(tree_class)
    series = evaluate_expr(system, tree_class, order, max_order, evaluate_system(system, order, max_order))
    return polya_exp_geq(series, 1)


def check_main_theorem(
    system: ComptonSystem,
    tree_class,
    order: int = ESCALATION[-1],
    classification: RadiusClassification | None = None,
    max_order: int | None = None,
    escalate: bool = True,
) -> CoherenceReport:
    """Compare the structural radius verdict with the ratio test on the forests of ``tree_class``.

    With ``escalate`` the forest series is evaluated at growing orders up to
    ``order`` until the ratio test leaves INCONCLUSIVE.
    """
    label = tree_class if isinstance(tree_class, str) else repr(tree_class)
    expr = system.resolve(tree_class) if isinstance(tree_class, str) else tree_class
    if system.kind(expr) != "tree":
        raise ValueError("check_main_theorem needs a class of trees")
    cl = classification or classify_radius(system)
    structural = cl.expr_verdict(expr)

    orders = [o for o in ESCALATION if o < order] + [order] if escalate else [order]
    report = None
    nonempty = False
    used = order
    for o in orders:
        forests = forest_series(system, expr, o, max_order)
        used = o
        nonempty = not forests.is_zero()
        if not nonempty:
            break
        try:
            report = ratio_test(forests)
        except InsufficientDataError:
            report = None
            continue
        if report.verdict is not RatioVerdict.INCONCLUSIVE:
            break

    radius_one = structural is Verdict.RADIUS_ONE or (structural is Verdict.FINITE and nonempty)
    converges = report is not None and report.verdict is RatioVerdict.CONVERGES_TO_ONE
    coherence = "AGREE" if radius_one == converges else "CONFLICT"
    note = ""
    if report is not None and report.verdict is RatioVerdict.INCONCLUSIVE:
        note = "ratio test inconclusive at the largest order tried"
    return CoherenceReport(label, structural, nonempty, used, report, coherence, note)
