import pytest
from hypothesis import given, settings

from forestlab import corpus
from forestlab.errors import ComponentTestFailed, ExplicitFormUnavailable
from forestlab.series import geometric
from forestlab.spec import evaluate_expr, evaluate_gexpr, evaluate_system, format_gexpr, parse_gexpr, parse_system
from forestlab.structure import (
    Verdict,
    build_digraph,
    class_expr_to_gexpr,
    classify_radius,
    extract_cycle_modules,
    growth_crosscheck,
    to_explicit,
)
from forestlab.trees import TreeModule, chain, classify_tree, compose_all, stack_apply

from systems import compton_systems

EXPECTED = {
    "alltrees": Verdict.SUB_ONE,
    "binary": Verdict.SUB_ONE,
    "linear": Verdict.RADIUS_ONE,
    "height1": Verdict.RADIUS_ONE,
    "evenchains": Verdict.RADIUS_ONE,
    "bamboo": Verdict.RADIUS_ONE,
}


def comp_names(s, dg, i):
    return {s.classes[v] for v in dg.component(i)}


# digraph --------------------------------------------------------------------


def test_linear_digraph():
    s = corpus.load("linear")
    dg = build_digraph(s)
    assert dg.edges[1] == [0, 1]
    assert dg.in_nontrivial(1) and not dg.in_nontrivial(0)
    assert dg.rank == [0, 1]


def test_bamboo_digraph():
    s = corpus.load("bamboo")
    dg = build_digraph(s)
    assert comp_names(s, dg, 1) == {"Ta", "Tb"}
    assert sum(dg.nontrivial) == 1


def test_height_one_is_acyclic():
    dg = build_digraph(corpus.load("height1"))
    assert not any(dg.nontrivial)


def test_edges_ignore_dead_productions_and_empty_targets():
    s = parse_system("class T1 = node / [T0:1] | [T1:1, T2:1]\nclass T2 = node / [T2:1]")
    dg = build_digraph(s)
    assert dg.edges[1] == [0]
    assert dg.edges[2] == []


def test_ranks_are_heights():
    s = parse_system(
        "class A = node / [T0:1]\nclass B = node / [A:1] | [B:1]\nclass C = node / [B:2, T0:1]\n"
    )
    dg = build_digraph(s)
    assert dg.rank == [0, 1, 2, 3]


# classification ---------------------------------------------------------------


@pytest.mark.parametrize("name,verdict", EXPECTED.items())
def test_corpus_verdicts(name, verdict):
    s = corpus.load(name)
    cl = classify_radius(s)
    tree_class = s.resolve(corpus.TREE_CLASSES[name])
    assert cl.expr_verdict(tree_class) is verdict
    assert cl.verdict("T0") is Verdict.FINITE


def test_finite_classes_report_polynomials():
    s = parse_system(
        "class A = node / [T0:2]\nclass B = node / [A:1, T0:1] | [T0:1]\nclass C = node / [B:2]\n"
    )
    cl = classify_radius(s)
    for name in ("A", "B", "C"):
        cv = cl[name]
        assert cv.verdict is Verdict.FINITE
        series = evaluate_system(s, cv.degree_bound + 10)[name]
        assert series.coeffs[: cv.degree_bound + 1] == cv.polynomial.coeffs
        assert not any(series.coeffs[cv.degree_bound + 1 :])
        assert cv.member_count == sum(series.coeffs)
    assert cl["C"].member_count == 3  # multisets of two from {cherry-ish, node-chain}


def test_atleast_over_nonempty_class_is_not_finite():
    s = parse_system("class T1 = node / [T0:>=1]\nclass T2 = node / [T3:>=0]\nclass T3 = empty")
    cl = classify_radius(s)
    assert cl.verdict("T1") is Verdict.RADIUS_ONE
    assert cl.verdict("T2") is Verdict.FINITE
    assert cl.verdict("T3") is Verdict.FINITE and cl["T3"].member_count == 0


@pytest.mark.parametrize(
    "text,reason",
    [
        ("class T1 = node / [T0:1] | [T1:2]", "multiplicity"),
        ("class T1 = node / [T0:1] | [T1:>=1]", "multiplicity"),
        ("class T1 = node / [T0:1] | [T1:1] | [T1:1, T0:1]", "productions"),
        ("class T1 = node / [T0:1] | [T1:1, T0:>=1]", "non-rigid"),
        ("class T1 = node / [T0:>=1]\nclass T2 = node / [T0:1] | [T2:1, T1:1]", "non-rigid"),
    ],
)
def test_unit_cycle_failures(text, reason):
    s = parse_system(text)
    cl = classify_radius(s)
    assert Verdict.SUB_ONE in {cv.verdict for cv in cl.classes}
    assert any(reason in ev.rule for ev in cl.components.values())


def test_rigid_side_trees_pass():
    s = parse_system("class C = node / [T0:2]\nclass T1 = node / [T0:1] | [T1:1, C:2, T0:1]")
    cl = classify_radius(s)
    assert cl.verdict("T1") is Verdict.RADIUS_ONE
    (info,) = cl.cycles.values()
    assert info.steps == (1 + 2 * 3 + 1,)
    assert info.modules[0].size == info.steps[0]


def test_growth_crosscheck_examples():
    for name in corpus.NAMES:
        s = corpus.load(name)
        rep = growth_crosscheck(s, order=200)
        assert rep.disagreements == []
    rows = {r.name: r for r in growth_crosscheck(corpus.load("alltrees"), order=200).rows}
    assert rows["T1"].estimate >= 1.5
    rows = {r.name: r for r in growth_crosscheck(corpus.load("linear"), order=200).rows}
    assert rows["T1"].estimate == pytest.approx(1.0)
    empty = growth_crosscheck(parse_system("class T1 = node / [T1:1]"), order=200)
    assert {r.name: r.flag for r in empty.rows}["T1"] == "SKIPPED"


@settings(max_examples=60, deadline=None)
@given(compton_systems())
def test_verdicts_are_monotone_along_edges(s):
    cl = classify_radius(s)
    dg = cl.digraph
    for i in range(dg.n):
        for j in dg.edges[i]:
            assert cl.classes[i].verdict <= cl.classes[j].verdict


@settings(max_examples=60, deadline=None)
@given(compton_systems())
def test_finite_degree_bounds_hold(s):
    cl = classify_radius(s)
    series = evaluate_system(s, 40)
    for cv in cl.classes:
        if cv.verdict is Verdict.FINITE and cv.degree_bound <= 40:
            assert not any(series[cv.name].coeffs[cv.degree_bound + 1 :])


# cycle modules -------------------------------------------------------------------


def test_linear_cycle_modules():
    s = corpus.load("linear")
    cl = classify_radius(s)
    info = extract_cycle_modules(s, (1,), cl)
    assert info.cycle_size == 1
    assert info.hat_size(1, 1) == 0
    assert info.escapes[1] == (s.productions[1][0],)
    assert str(info.modules[0]) == "(())@0"


def test_bamboo_cycle_modules():
    s = corpus.load("bamboo")
    cl = classify_radius(s)
    a, b = s.index("Ta"), s.index("Tb")
    info = extract_cycle_modules(s, (a, b), cl)
    assert info.order == (a, b)
    assert info.steps == (1, 2)
    assert info.cycle_size == 3
    assert info.hat_size(a, b) == 1 and info.hat_size(b, a) == 2
    assert info.escapes[a] == ()
    # module t sends members of c_{t+1} into c_t, so the composite pumps Ta
    pump = compose_all(info.modules)
    assert pump.size == 3
    t = chain(3)
    for _ in range(4):
        assert classify_tree(t, s) == {a}
        t = stack_apply(pump, t)
    assert classify_tree(stack_apply(info.modules[0], chain(2)), s) == {a}


def test_even_chain_cycle_modules():
    s = corpus.load("evenchains")
    cl = classify_radius(s)
    info = extract_cycle_modules(s, (1, 2), cl)
    assert info.cycle_size == 2


def test_cycle_modules_refused_on_failing_component():
    s = corpus.load("alltrees")
    cl = classify_radius(s)
    with pytest.raises(ComponentTestFailed):
        extract_cycle_modules(s, (1,), cl)


def test_cycle_step_sizes_match_formula():
    s = parse_system("class C = node / [T0:2]\nclass A = node / [B:1, C:1]\nclass B = node / [A:1, T0:3] | [T0:1]")
    cl = classify_radius(s)
    (info,) = cl.cycles.values()
    sizes = dict(zip(info.order, info.steps))
    assert sizes[s.index("A")] == 1 + 3
    assert sizes[s.index("B")] == 1 + 3
    assert all(isinstance(m, TreeModule) for m in info.modules)


# explicit forms -----------------------------------------------------------------


@pytest.mark.parametrize("name", [n for n, v in EXPECTED.items() if v is Verdict.RADIUS_ONE])
def test_explicit_equals_fixed_point(name):
    s = corpus.load(name)
    form = to_explicit(s)
    explicit = form.evaluate(300)
    reference = evaluate_system(s, 300)
    for cname, series in explicit.items():
        assert series == reference[cname]


def test_explicit_examples():
    s = corpus.load("bamboo")
    ta = evaluate_gexpr(to_explicit(s).expr_for("Ta"), 60)
    assert ta == geometric(3, 3, 60)
    lin = to_explicit(corpus.load("linear"))
    assert evaluate_gexpr(lin.expr_for("T1"), 20) == geometric(2, 1, 20)
    h1 = dict(to_explicit(corpus.load("height1")).bindings)
    assert format_gexpr(h1["T1"]) == "x * Egeq(1, T0)"


def test_explicit_refused_for_sub_one():
    with pytest.raises(ExplicitFormUnavailable, match="RADIUS_SUB_ONE: explicit form unavailable"):
        to_explicit(corpus.load("alltrees"))


def test_explicit_output_parses_back():
    s = corpus.load("bamboo")
    form = to_explicit(s)
    e = form.expr_for(class_expr_to_gexpr(s, s.resolve("Forests")))
    assert parse_gexpr(format_gexpr(e)) == e
    assert evaluate_gexpr(e, 40) == evaluate_expr(s, s.resolve("Forests"), 40)


def test_explicit_expands_atleast_zero_and_skips_empty():
    s = parse_system(
        "class A = node / [T0:1] | [A:1, T0:1]\nclass B = node / [A:>=0, T0:1, Z:>=0]\nclass Z = empty"
    )
    cl = classify_radius(s)
    assert cl.verdict("B") is Verdict.RADIUS_ONE
    form = to_explicit(s, cl)
    assert form.skipped == ["Z"]
    ref = evaluate_system(s, 80)
    for name, series in form.evaluate(80).items():
        assert series == ref[name]


@settings(max_examples=60, deadline=None)
@given(compton_systems())
def test_random_explicit_forms(s):
    cl = classify_radius(s)
    if any(cv.verdict is Verdict.SUB_ONE for cv in cl.classes):
        with pytest.raises(ExplicitFormUnavailable):
            to_explicit(s, cl)
        return
    ref = evaluate_system(s, 60)
    for name, series in to_explicit(s, cl).evaluate(60).items():
        assert series == ref[name]
