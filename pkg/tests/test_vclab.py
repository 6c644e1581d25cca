import json
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from orientvc.circle import ZERO_ELEMENT, element, orient
from orientvc.formula import TheoryId, free_vars, is_quantifier_free, parse_formula
from orientvc.models import canonical_model, eval as eval_qf, random_element
from orientvc.qe import solve_unary
from orientvc.vclab import (ICT_MAX_N, SetFamily, ShatterError, anchored_arc, arc,
                            binomial_lower, breadth_check, build_ict_pattern,
                            build_sharpness_instance, check_regions, coset, empty, full,
                            ict_sequence, minimal_cover, points,
                            region_complement, region_difference, region_equal,
                            region_intersect, region_is_empty, region_subset, region_union,
                            sampled_traces, sharpness_basis, shatter_exact_unary,
                            shatter_report, sigma_formula, trace)
from orientvc.qe.generator import FormulaGenerator

from conftest import elements

PAIR_IDS = [TheoryId.PAIR_TOR_TOR, TheoryId.PAIR_TOR_TF, TheoryId.PAIR_TF_TF]
Q = canonical_model(TheoryId.DOG_TOR)
TT = canonical_model(TheoryId.PAIR_TOR_TOR)


def e(*args):
    return element(*[mpq(x) for x in args])


# -- region algebra ----------------------------------------------------------

def test_anchored_arcs_nest():
    a, b = anchored_arc(Q, e("1/3")), anchored_arc(Q, e("1/2"))
    assert region_equal(region_intersect(a, b), a)
    assert region_subset(a, b) and not region_subset(b, a)
    assert str(region_intersect(a, b)) == "arc(0,1/3)"


def test_coset_intersections():
    c1, c2 = coset(TT, e("1/4")), coset(TT, e("3/4"))
    # 3/4 - 1/4 lies in G = Q, so the cosets coincide
    assert region_equal(c1, c2)
    assert region_equal(region_intersect(c1, c2), c1)
    c3 = coset(TT, e(0, "1/8"))
    assert region_is_empty(region_intersect(c1, c3))


def test_wrapping_arcs_split():
    r = region_intersect(arc(Q, e("9/10"), e("4/5")), arc(Q, e("1/10"), e("19/20")))
    assert str(r) == "arc(1/10,4/5) ∪ arc(9/10,19/20)"
    for x, inside in [(e("1/2"), True), (e("93/100"), True), (e("17/20"), False),
                      (e("1/20"), False), (e("1/10"), False)]:
        assert r.contains(x) == inside


def test_region_printing():
    assert str(points(Q, [e("2/3"), e("1/3")])) == "{1/3, 2/3}"
    assert str(region_complement(points(Q, [e("1/3")]))) == "all ∖ {1/3}"
    assert str(region_difference(arc(TT, e("1/4"), e("1/2")), coset(TT, e("1/4")))) \
        == "arc(1/4,1/2) ∖ coset(1/4+G)"
    assert region_is_empty(empty(Q)) and not region_is_empty(full(Q))


def _random_region(theory, seed):
    m = canonical_model(theory)
    f = FormulaGenerator(theory, seed=seed).formula()
    while hasattr(f, "var"):
        f = f.body
    rng = random.Random(seed)
    if not is_quantifier_free(f):
        return None, m
    names = free_vars(f)
    var = sorted(names)[0] if names else "x"
    sigma = {v: random_element(m, rng) for v in names - {var}}
    return solve_unary(f, var, m, sigma), m


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(TheoryId)), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_region_operations_are_pointwise(theory, s1, s2):
    r1, m = _random_region(theory, s1)
    r2, _ = _random_region(theory, s2)
    if r1 is None or r2 is None:
        return
    ops = [(region_intersect, lambda a, b: a and b), (region_union, lambda a, b: a or b),
           (region_difference, lambda a, b: a and not b)]
    rng = random.Random(s1 ^ s2)
    results = [(op(r1, r2), f) for op, f in ops]
    comp = region_complement(r1)
    cuts = list(r1.generic.cuts) + list(r2.generic.cuts)
    samples = [random_element(m, rng) for _ in range(60)] + [c for c in cuts if m.contains(c)]
    for x in samples:
        a, b = r1.contains(x), r2.contains(x)
        for r, f in results:
            assert r.contains(x) == f(a, b)
        assert comp.contains(x) != a


@settings(max_examples=60)
@given(elements(Q.support), elements(Q.support))
def test_anchored_nesting_property(a, b):
    ra, rb = anchored_arc(Q, a), anchored_arc(Q, b)
    meet = region_intersect(ra, rb)
    assert region_equal(meet, ra) or region_equal(meet, rb)


def test_region_equality_is_semantic():
    # the same set written two ways
    a = region_union(arc(Q, e("0"), e("1/2")), arc(Q, e("1/3"), e("3/4")))
    b = region_difference(arc(Q, e("0"), e("3/4")), empty(Q))
    assert region_equal(a, b) and a == b


# -- breadth -----------------------------------------------------------------

@pytest.mark.parametrize("theory", [TheoryId.DOG_TF, TheoryId.DOG_TOR])
def test_breadth_one_single_groups(theory):
    rep = breadth_check(SetFamily("omega", canonical_model(theory), seed=3), d=1, m=6, trials=150)
    assert rep.ok and rep.nonempty == 150


@pytest.mark.parametrize("theory", PAIR_IDS)
def test_breadth_two_pairs(theory):
    rep = breadth_check(SetFamily("pair-omega", canonical_model(theory), seed=3), d=2, m=6,
                        trials=150)
    assert rep.ok and rep.nonempty == 150
    assert rep.exact_d_example is not None


def test_breadth_checker_detects_violation():
    arcs = [arc(Q, e("0"), e("1/2")), arc(Q, e("1/4"), e("3/4")), arc(Q, e("5/16"), e("3/8"))]
    # the third arc alone is the intersection: breadth 1 holds here
    assert check_regions(arcs, 1) == (2,)
    arcs = [arc(Q, e("0"), e("1/2")), arc(Q, e("1/4"), e("3/4")), arc(Q, e("3/8"), e("7/8"))]
    assert check_regions(arcs, 1) is None
    assert minimal_cover(arcs, 3) == (0, 2)


def test_family_rejects_unknown():
    with pytest.raises(ValueError):
        SetFamily("delta", Q)
    with pytest.raises(ValueError):
        SetFamily("pair-omega", Q)


# -- sharpness ---------------------------------------------------------------

@pytest.mark.parametrize("theory", PAIR_IDS)
def test_sharpness_k4(theory):
    _, _, rep = build_sharpness_instance(4, canonical_model(theory))
    assert rep.ok and rep.distinct_traces >= 11 and rep.lower_bound == 11


def test_sharpness_k2_shatters():
    B, alphas, rep = build_sharpness_instance(2, TT)
    got = {trace(sigma_formula(), B, a, TT) for a in alphas.values()}
    assert got == {frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})}


def test_singleton_traces_use_the_point_itself():
    B, alphas, _ = build_sharpness_instance(5, TT)
    for i, b in enumerate(B):
        assert alphas[(i,)] == b
        assert trace(sigma_formula(), B, b, TT) == {i}


def test_sharpness_basis_shape():
    B = sharpness_basis(6, TT)
    for i in range(len(B) - 1):
        assert orient(ZERO_ELEMENT, B[i], B[i] + B[i]) and orient(B[i], B[i] + B[i], B[i + 1])
    for i, a in enumerate(B):
        for b in B[i + 1:]:
            assert not TT.sub.contains(a - b)


# -- shatter functions -------------------------------------------------------

def test_exact_traces_of_anchored_arcs():
    B = [e("1/4"), e("1/2"), e("3/4")]
    got = shatter_exact_unary(parse_formula("O(0, x, y)"), B, Q)
    assert got == {frozenset(), frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2})}


@pytest.mark.parametrize("theory", PAIR_IDS)
def test_exact_traces_of_cosets(theory):
    pd = canonical_model(theory)
    B = sharpness_basis(5, pd)
    got = shatter_exact_unary(parse_formula("V(x - y)"), B, pd)
    assert got == {frozenset()} | {frozenset({i}) for i in range(5)}


def test_sigma_exact_count():
    B, _, _ = build_sharpness_instance(3, TT)
    traces = shatter_exact_unary(sigma_formula(), B, TT)
    assert len(traces) == 8 >= binomial_lower(3)
    # frozen counts for k = 2..8; they follow k^2 - k + 2
    counts = [len(shatter_exact_unary(sigma_formula(), sharpness_basis(k, TT), TT))
              for k in range(2, 9)]
    assert counts == [4, 8, 14, 22, 32, 44, 58]


@pytest.mark.parametrize("theory", PAIR_IDS)
def test_cell_enumeration_is_complete(theory):
    pd = canonical_model(theory)
    B = sharpness_basis(6, pd)
    exact = shatter_exact_unary(sigma_formula(), B, pd)
    rng = random.Random(17)
    for _ in range(1000):
        c = random_element(pd, rng)
        assert trace(sigma_formula(), B, c, pd) in exact
    for want in exact:
        assert len(want) <= 6


def test_exact_traces_need_one_parameter():
    with pytest.raises(ShatterError):
        shatter_exact_unary(parse_formula("O(0, x, y) & O(0, z, x)"), [e("1/2")], Q)
    with pytest.raises(ShatterError):
        shatter_exact_unary(parse_formula("E z. O(z, x, y)"), [e("1/2")], Q)


def test_sampled_traces_are_a_lower_bound():
    B = [e("1/5"), e("2/5"), e("3/5")]
    phi = parse_formula("O(0, x, y)")
    assert sampled_traces(phi, B, Q, 300, seed=1) <= shatter_exact_unary(phi, B, Q)


def test_shatter_report_sigma():
    rep = shatter_report(sigma_formula(), range(2, 13), TT, basis=lambda k: sharpness_basis(k, TT),
                         lower_bound=binomial_lower, slope_range=(4, 12))
    assert all(r.exact and r.pi_k >= r.lower_bound for r in rep.rows)
    assert 1.8 <= rep.slope <= 2.2
    assert rep.vc_upper == 2
    table = rep.to_tsv().splitlines()
    assert table[0].split("\t") == ["k", "pi_k", "lower_bound", "exact", "slope", "vc_upper"]
    assert len(table) == 12
    assert json.loads(rep.to_json())["rows"][2]["pi_k"] == 14


@pytest.mark.parametrize("text", ["O(0, x, y)", "x = y"])
def test_single_group_slopes_are_linear(text):
    m = canonical_model(TheoryId.DOG_TF)
    rep = shatter_report(parse_formula(text), range(2, 13), m)
    assert rep.slope <= 1.2
    if text == "x = y":
        assert [r.pi_k for r in rep.rows] == [k + 1 for k in range(2, 13)]


def test_report_deterministic():
    phi = parse_formula("O(0, x, y) & O(z, x, 2*y)")
    a = shatter_report(phi, range(2, 6), Q, samples=200, seed=9).to_json()
    b = shatter_report(phi, range(2, 6), Q, samples=200, seed=9).to_json()
    assert a == b and '"exact": false' in a


# -- ict patterns ------------------------------------------------------------

def test_ict_examples():
    assert build_ict_pattern(10, 4, 7, TT).ok
    p = build_ict_pattern(10, 4, 7, TT)
    assert p.checks == 20
    assert build_ict_pattern(2, 0, 1, TT).ok
    assert build_ict_pattern(6, 3, 3, TT).ok


@pytest.mark.parametrize("theory", PAIR_IDS)
def test_ict_witness_rows(theory):
    pd = canonical_model(theory)
    alphas = ict_sequence(7, pd)
    phi, psi = parse_formula("O(y, x, 2*y)"), parse_formula("V(x - y)")
    for i in range(7):
        for j in range(7):
            c = build_ict_pattern(7, i, j, pd, alphas).witness
            assert [eval_qf(phi, {"x": c, "y": a}, pd) for a in alphas] == [k == i for k in range(7)]
            assert [eval_qf(psi, {"x": c, "y": a}, pd) for a in alphas] == [k == j for k in range(7)]


def test_ict_range():
    assert len(ict_sequence(ICT_MAX_N, TT)) == ICT_MAX_N
    with pytest.raises(ValueError):
        ict_sequence(ICT_MAX_N + 1, TT)
    with pytest.raises(ValueError):
        build_ict_pattern(3, 3, 0, TT)
    with pytest.raises(TypeError):
        ict_sequence(3, Q)
