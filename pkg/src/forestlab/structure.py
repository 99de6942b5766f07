"""Dependency digraph, radius classification and explicit closed forms.

Edges ``i -> j`` come from live productions of ``T_i`` (every class they
require is nonempty) and point only at nonempty classes.  A nontrivial strong
component whose members each have a single way to stay inside it, with unit
multiplicity and rigid side trees, is a *unit cycle*: its classes grow like
``1/(1 - x^L)`` times lower-rank pieces and so keep radius one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import product

from .errors import ComponentTestFailed, ExplicitFormUnavailable
from .polya import MultiplicityBound, polya_apply
from .series import TruncatedSeries, cauchy_mul
from .spec import gexpr as g
from .spec.evaluate import evaluate_system
from .spec.system import (
    ComptonSystem,
    Multiset,
    NodeClass,
    Ref,
    RootAppend,
    Sum,
    Union,
    live_productions,
    productive_classes,
)
from .trees import NODE, RootedTree, TreeModule


class Verdict(enum.IntEnum):
    """Ordered so that ``i -> j`` implies ``verdict(i) <= verdict(j)``."""

    SUB_ONE = 0
    RADIUS_ONE = 1
    FINITE = 2

    @property
    def label(self) -> str:
        return "RADIUS_SUB_ONE" if self is Verdict.SUB_ONE else self.name


# digraph -------------------------------------------------------------------


@dataclass
class DependencyDigraph:
    n: int
    edges: list[list[int]]
    components: list[tuple[int, ...]]  # strong components, sinks first
    component_of: list[int]
    nontrivial: list[bool]  # per component
    rank: list[int]  # per vertex
    productive: list[bool]
    live: list[tuple]

    def successors(self, i: int) -> list[int]:
        return self.edges[i]

    def reachable(self, i: int) -> set[int]:
        seen = {i}
        stack = [i]
        while stack:
            for j in self.edges[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    def component(self, i: int) -> tuple[int, ...]:
        return self.components[self.component_of[i]]

    def in_nontrivial(self, i: int) -> bool:
        return self.nontrivial[self.component_of[i]]


def _tarjan(n: int, edges: list[list[int]]) -> list[tuple[int, ...]]:
    """Iterative Tarjan; components come out in reverse topological order (sinks first)."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[tuple[int, ...]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(edges[v]):
                work[-1] = (v, pos + 1)
                w = edges[v][pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(tuple(sorted(comp)))
    return out


def build_digraph(system: ComptonSystem) -> DependencyDigraph:
    productive = productive_classes(system)
    live = live_productions(system, productive)
    n = system.size
    edges: list[list[int]] = []
    for i in range(n):
        targets = set()
        for gamma in live[i]:
            for j, b in enumerate(gamma):
                if not b.is_zero and productive[j]:
                    targets.add(j)
        edges.append(sorted(targets))
    comps = _tarjan(n, edges)
    comp_of = [0] * n
    for c, members in enumerate(comps):
        for v in members:
            comp_of[v] = c
    nontrivial = [len(m) > 1 or m[0] in edges[m[0]] for m in comps]
    # sinks come first, so successor components already have a height
    comp_rank = [0] * len(comps)
    for c, members in enumerate(comps):
        succ = {comp_of[w] for v in members for w in edges[v]} - {c}
        comp_rank[c] = 1 + max(comp_rank[s] for s in succ) if succ else 0
    return DependencyDigraph(
        n=n,
        edges=edges,
        components=comps,
        component_of=comp_of,
        nontrivial=nontrivial,
        rank=[comp_rank[comp_of[v]] for v in range(n)],
        productive=productive,
        live=live,
    )


# finite classes -------------------------------------------------------------


def _finite_polynomials(system: ComptonSystem, dg: DependencyDigraph, finite: list[bool]):
    """Exact polynomials of FINITE classes, each to its structural degree bound."""
    bound: dict[int, int] = {}
    poly: dict[int, TruncatedSeries] = {}
    order = sorted((i for i in range(dg.n) if finite[i]), key=lambda i: (dg.rank[i], i))
    for i in order:
        if i == 0:
            bound[0] = 1
            poly[0] = TruncatedSeries.x(1)
            continue
        if not dg.productive[i]:
            bound[i] = 0
            poly[i] = TruncatedSeries.zero(0)
            continue
        d = 1 + max(
            sum(b.m * bound[j] for j, b in enumerate(gamma) if not b.is_zero and dg.productive[j])
            for gamma in dg.live[i]
        )
        total = TruncatedSeries.zero(d)
        for gamma in dg.live[i]:
            term = TruncatedSeries.one(d)
            for j, b in enumerate(gamma):
                if b.is_zero or not dg.productive[j]:
                    continue  # bounds over empty classes admit only zero copies here
                padded = TruncatedSeries.from_dict(dict(enumerate(poly[j].coeffs)), d)
                term = cauchy_mul(term, polya_apply(b, padded))
            total = total + term.shift(1)
        bound[i] = d
        poly[i] = total
    return bound, poly


# classification ------------------------------------------------------------


@dataclass
class ComponentEvidence:
    members: tuple[str, ...]
    passed: bool
    rule: str


@dataclass
class ClassVerdict:
    name: str
    verdict: Verdict
    evidence: str
    component: tuple[str, ...]
    rank: int
    degree_bound: int | None = None
    polynomial: TruncatedSeries | None = None
    member_count: int | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "verdict": self.verdict.label,
            "evidence": self.evidence,
            "component": list(self.component),
            "rank": self.rank,
        }
        if self.polynomial is not None:
            out["degree_bound"] = self.degree_bound
            out["polynomial"] = [str(c) for c in self.polynomial.coeffs]
            out["member_count"] = self.member_count
        return out


@dataclass
class RadiusClassification:
    system: ComptonSystem
    digraph: DependencyDigraph
    classes: list[ClassVerdict]
    components: dict[int, ComponentEvidence] = field(default_factory=dict)
    cycles: dict[int, "CycleModuleInfo"] = field(default_factory=dict)

    def verdict(self, name: str) -> Verdict:
        return self.classes[self.system.index(name)].verdict

    def __getitem__(self, name: str) -> ClassVerdict:
        return self.classes[self.system.index(name)]

    def singleton_size(self, j: int) -> int | None:
        """Size of the unique member of class ``j``, or None if it is not a singleton."""
        cv = self.classes[j]
        if cv.polynomial is None or cv.member_count != 1:
            return None
        return next(n for n, c in enumerate(cv.polynomial.coeffs) if c)

    def unique_member(self, j: int) -> RootedTree:
        """The only tree of a singleton class, rebuilt from its one live production."""
        if self.singleton_size(j) is None:
            raise ValueError(f"{self.system.classes[j]} is not a singleton class")
        if j == 0:
            return NODE
        dg = self.digraph
        (gamma,) = dg.live[j]
        kids = []
        for l, b in enumerate(gamma):
            if not b.is_zero and dg.productive[l]:
                kids.extend([self.unique_member(l)] * b.m)
        return RootedTree(kids)

    def expr_verdict(self, expr) -> Verdict:
        """Smallest verdict among the classes an expression refers to."""
        refs: set[int] = set()
        _collect_refs(self.system, expr, refs)
        return min((self.classes[i].verdict for i in refs), default=Verdict.FINITE)

    def to_dict(self) -> dict:
        rows = []
        for cv in self.classes:
            row = cv.to_dict()
            comp = self.digraph.component_of[self.system.index(cv.name)]
            info = self.cycles.get(comp)
            if info is not None:
                row["M_ii"] = info.cycle_size
                row["M_hat"] = {
                    self.system.classes[k]: info.hat_size(self.system.index(cv.name), k) for k in info.order
                }
            rows.append(row)
        return {"system": self.system.name, "classes": rows}


def _collect_refs(system: ComptonSystem, expr, out: set[int]) -> None:
    if isinstance(expr, NodeClass):
        out.add(0)
    elif isinstance(expr, Ref):
        if system.is_class(expr.name):
            out.add(system.index(expr.name))
        else:
            _collect_refs(system, system.resolve(expr.name), out)
    elif isinstance(expr, (Union, Sum)):
        for e in expr.items:
            _collect_refs(system, e, out)
    elif isinstance(expr, (Multiset, RootAppend)):
        _collect_refs(system, expr.arg, out)


def _meets(gamma, members: set[int]) -> bool:
    return any(not gamma[j].is_zero for j in members)


def _unit_cycle_test(system, dg: DependencyDigraph, comp: tuple[int, ...], singleton) -> tuple[bool, str]:
    members = set(comp)
    names = system.classes
    for k in comp:
        inside = [gamma for gamma in dg.live[k] if _meets(gamma, members)]
        if len(inside) != 1:
            return False, f"{names[k]} has {len(inside)} productions staying inside the component"
        gamma = inside[0]
        used = [(j, gamma[j]) for j in members if not gamma[j].is_zero]
        if len(used) != 1 or used[0][1] != MultiplicityBound(1):
            return False, f"{names[k]} stays inside with multiplicity other than exactly 1"
        for j, b in enumerate(gamma):
            if j in members or b.is_zero:
                continue
            if not dg.productive[j] and b.allows_zero:
                continue  # admits only the empty choice
            if b.at_least or singleton(j) is None:
                return False, f"{names[k]} carries a non-rigid side factor {names[j]}:{b}"
    return True, "unit cycle"


def classify_radius(system: ComptonSystem, digraph: DependencyDigraph | None = None) -> RadiusClassification:
    dg = digraph or build_digraph(system)
    n = dg.n
    names = system.classes

    def has_unbounded(i: int) -> bool:
        return any(
            b.at_least and dg.productive[j]
            for gamma in dg.live[i]
            for j, b in enumerate(gamma)
        )

    reach = [dg.reachable(i) for i in range(n)]
    finite = [
        not any(dg.in_nontrivial(j) or has_unbounded(j) for j in reach[i])
        for i in range(n)
    ]
    bounds, polys = _finite_polynomials(system, dg, finite)

    def singleton(j: int) -> int | None:
        if not finite[j]:
            return None
        coeffs = polys[j].coeffs
        if sum(coeffs) != 1:
            return None
        return next(d for d, c in enumerate(coeffs) if c)

    comp_evidence: dict[int, ComponentEvidence] = {}
    for c, comp in enumerate(dg.components):
        if dg.nontrivial[c]:
            ok, rule = _unit_cycle_test(system, dg, comp, singleton)
            comp_evidence[c] = ComponentEvidence(tuple(names[k] for k in comp), ok, rule)

    classes: list[ClassVerdict] = []
    for i in range(n):
        comp = tuple(names[k] for k in dg.component(i))
        if finite[i]:
            p = polys[i]
            evidence = "empty class" if not dg.productive[i] else "reaches no cycle and no unbounded multiplicity"
            classes.append(
                ClassVerdict(names[i], Verdict.FINITE, evidence, comp, dg.rank[i], bounds[i], p, sum(p.coeffs))
            )
            continue
        failing = [
            comp_evidence[dg.component_of[j]]
            for j in sorted(reach[i])
            if dg.in_nontrivial(j) and not comp_evidence[dg.component_of[j]].passed
        ]
        if failing:
            f = failing[0]
            verdict = Verdict.SUB_ONE
            evidence = f"reaches component {{{', '.join(f.members)}}}: {f.rule}"
        else:
            verdict = Verdict.RADIUS_ONE
            cycles = {dg.component_of[j] for j in reach[i] if dg.in_nontrivial(j)}
            evidence = "every reachable cycle is a unit cycle" if cycles else "unbounded multiplicity, no cycle"
        classes.append(ClassVerdict(names[i], verdict, evidence, comp, dg.rank[i]))

    result = RadiusClassification(system, dg, classes, comp_evidence)
    for c, ev in comp_evidence.items():
        if ev.passed:
            result.cycles[c] = extract_cycle_modules(system, dg.components[c], result)
    return result


# cycle modules -------------------------------------------------------------


@dataclass
class CycleModuleInfo:
    order: tuple[int, ...]  # c_0 -> c_1 -> ... -> c_{r-1} -> c_0
    steps: tuple[int, ...]  # module size from c_t to c_{t+1}
    modules: tuple  # one TreeModule per step
    escapes: dict[int, tuple]  # Gamma_k^0 per member

    @property
    def cycle_size(self) -> int:
        return sum(self.steps)

    def hat_size(self, i: int, k: int) -> int:
        """``|M^_ik|``: size of the connector walking the cycle from ``i`` to ``k``."""
        a = self.order.index(i)
        b = self.order.index(k)
        r = len(self.order)
        return sum(self.steps[(a + t) % r] for t in range((b - a) % r))


def extract_cycle_modules(system: ComptonSystem, component, classification: RadiusClassification) -> CycleModuleInfo:
    """Walk a unit cycle; raises ComponentTestFailed if it is not one."""
    dg = classification.digraph
    comp = tuple(sorted(component))
    c = dg.component_of[comp[0]]
    if not dg.nontrivial[c] or set(comp) != set(dg.components[c]):
        raise ComponentTestFailed("not a nontrivial strong component")
    ev = classification.components.get(c)
    if ev is None or not ev.passed:
        raise ComponentTestFailed(ev.rule if ev else "component failed the unit-cycle test")
    members = set(comp)

    succ: dict[int, int] = {}
    step: dict[int, int] = {}
    module: dict[int, object] = {}
    for k in comp:
        (gamma,) = [gm for gm in dg.live[k] if _meets(gm, members)]
        inside = [j for j in members if not gamma[j].is_zero]
        assert len(inside) == 1, "unit cycle must have out-degree one inside its component"
        succ[k] = inside[0]
        side = []
        for j, b in enumerate(gamma):
            if j in members or b.is_zero or not dg.productive[j]:
                continue
            side.extend([classification.unique_member(j)] * b.m)
        tree = RootedTree(side + [NODE])
        module[k] = TreeModule(tree, (tree.children.index(NODE),))
        step[k] = module[k].size

    start = comp[0]
    walk = [start]
    while succ[walk[-1]] != start:
        nxt = succ[walk[-1]]
        assert nxt not in walk, "successor walk must close into one cycle"
        walk.append(nxt)
    assert set(walk) == members, "component must be a single directed cycle"

    escapes = {
        k: tuple(gm for gm in dg.live[k] if not _meets(gm, members)) for k in comp
    }
    return CycleModuleInfo(
        order=tuple(walk),
        steps=tuple(step[k] for k in walk),
        modules=tuple(module[k] for k in walk),
        escapes=escapes,
    )


# explicit forms --------------------------------------------------------------


def _power_of_x(k: int) -> list:
    return [g.X()] * k


def _factor_options(b: MultiplicityBound, name: str) -> list[list]:
    """Alternative factor lists whose sum is ``E_b(T)``; ``E_{>=0}`` splits as ``1 + E_{>=1}``."""
    ref = g.Name(name)
    if b.at_least:
        if b.m == 0:
            return [[], [g.EAtLeast(1, ref)]]
        return [[g.EAtLeast(b.m, ref)]]
    if b.m == 1:
        return [[ref]]
    return [[g.EExact(b.m, ref)]]


def _production_terms(system: ComptonSystem, dg: DependencyDigraph, gamma, prefix: list) -> list:
    choices = []
    for j, b in enumerate(gamma):
        if b.is_zero:
            continue
        if not dg.productive[j]:
            continue  # live production, so only the empty choice exists
        choices.append(_factor_options(b, system.classes[j]))
    return [g.mul_of(prefix + [f for part in pick for f in part]) for pick in product(*choices)]


@dataclass
class ExplicitForm:
    """Let-bound closed forms, one binding per nonempty class, dependencies first."""

    bindings: list[tuple[str, g.GExpr]]
    skipped: list[str]

    def names(self) -> list[str]:
        return [n for n, _ in self.bindings]

    def expr_for(self, body: g.GExpr | str) -> g.GExpr:
        if isinstance(body, str):
            body = g.Name(body)
        needed = g.free_names(body)
        out = body
        for name, value in reversed(self.bindings):
            if name in needed:
                out = g.Let(name, value, out)
                needed = (needed - {name}) | g.free_names(value)
        if needed:
            raise KeyError(f"unbound names {sorted(needed)}")
        return out

    def evaluate(self, order: int) -> dict[str, TruncatedSeries]:
        env: dict[str, TruncatedSeries] = {}
        for name, value in self.bindings:
            env[name] = g.evaluate_gexpr(value, order, env)
        return env


def to_explicit(system: ComptonSystem, classification: RadiusClassification | None = None) -> ExplicitForm:
    cl = classification or classify_radius(system)
    dg = cl.digraph
    bad = [cv.name for cv in cl.classes if cv.verdict is Verdict.SUB_ONE]
    if bad:
        raise ExplicitFormUnavailable("explicit form unavailable")
    names = system.classes
    cycle_of = {k: info for info in cl.cycles.values() for k in info.order}
    bindings = []
    skipped = []
    for i in sorted(range(dg.n), key=lambda v: (dg.rank[v], v)):
        if i == 0:
            bindings.append((names[0], g.X()))
            continue
        if not dg.productive[i]:
            skipped.append(names[i])
            continue
        terms = []
        info = cycle_of.get(i)
        if info is None:
            for gamma in dg.live[i]:
                terms.extend(_production_terms(system, dg, gamma, [g.X()]))
        else:
            period = info.cycle_size
            for k in info.order:
                prefix = _power_of_x(info.hat_size(i, k)) + [g.Geometric(period)]
                for gamma in info.escapes[k]:
                    terms.extend(_production_terms(system, dg, gamma, prefix))
        bindings.append((names[i], g.add_of(terms)))
    return ExplicitForm(bindings, skipped)


def class_expr_to_gexpr(system: ComptonSystem, expr) -> g.GExpr:
    """Translate a class expression into the explicit-form language."""
    if isinstance(expr, NodeClass):
        return g.X()
    if isinstance(expr, Ref):
        if system.is_class(expr.name):
            return g.Name(expr.name)
        return class_expr_to_gexpr(system, system.resolve(expr.name))
    if isinstance(expr, Union):
        return g.add_of(class_expr_to_gexpr(system, e) for e in expr.items)
    if isinstance(expr, Sum):
        return g.mul_of(class_expr_to_gexpr(system, e) for e in expr.items)
    if isinstance(expr, Multiset):
        b = expr.bound
        inner = class_expr_to_gexpr(system, expr.arg)
        if b.m == 0:
            raise ValueError("multisets allowing zero copies have a constant term and no explicit form")
        if b.at_least:
            return g.EAtLeast(b.m, inner)
        return inner if b.m == 1 else g.EExact(b.m, inner)
    if isinstance(expr, RootAppend):
        arg = expr.arg
        if isinstance(arg, Multiset) and arg.bound.allows_zero:
            if arg.bound.at_least:
                return g.add_of([g.X(), g.mul_of([g.X(), class_expr_to_gexpr(system, Multiset(MultiplicityBound(1, True), arg.arg))])])
            return g.X()
        return g.mul_of([g.X(), class_expr_to_gexpr(system, arg)])
    raise TypeError(f"not a class expression: {expr!r}")


# numeric guard ---------------------------------------------------------------


@dataclass
class CrosscheckRow:
    name: str
    verdict: Verdict
    estimate: float | None
    flag: str  # OK, DISAGREE, SKIPPED

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict.label,
            "estimate": None if self.estimate is None else round(self.estimate, 6),
            "flag": self.flag,
        }


@dataclass
class CrosscheckReport:
    order: int
    rows: list[CrosscheckRow]

    @property
    def disagreements(self) -> list[str]:
        return [r.name for r in self.rows if r.flag == "DISAGREE"]

    def to_dict(self) -> dict:
        return {"order": self.order, "rows": [r.to_dict() for r in self.rows]}


def growth_estimate(series: TruncatedSeries, lo: int, hi: int) -> float | None:
    """``sup t(n)^(1/n)`` over positive coefficients with ``lo <= n <= hi``."""
    coeffs = series.coeffs
    best = None
    for n in range(max(lo, 1), min(hi, series.order) + 1):
        c = coeffs[n]
        if c > 0:
            v = math.exp(math.log(c) / n)
            best = v if best is None else max(best, v)
    return best


def growth_crosscheck(
    system: ComptonSystem,
    classification: RadiusClassification | None = None,
    order: int = 200,
    max_order: int | None = None,
) -> CrosscheckReport:
    cl = classification or classify_radius(system)
    series = evaluate_system(system, order, max_order)
    rows = []
    for cv in cl.classes:
        est = growth_estimate(series[cv.name], order // 2, order)
        if est is None:
            flag = "SKIPPED"
        elif order < 200:
            flag = "OK"
        elif cv.verdict is Verdict.SUB_ONE:
            flag = "DISAGREE" if est <= 1.05 else "OK"
        else:
            flag = "DISAGREE" if est >= 1.5 else "OK"
        rows.append(CrosscheckRow(cv.name, cv.verdict, est, flag))
    return CrosscheckReport(order, rows)
