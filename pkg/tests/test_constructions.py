import itertools
from collections import Counter

import pytest

from totalcol.budget import Budget
from totalcol.constructions import (build_E_i, build_E_m, build_P, build_Q, build_T, build_Z,
                                    check_Z_nonzero, choose_vertex_monomial, eval_CP,
                                    expand_vertex_polynomial_at_zero, make_setting, reconstruct_CP,
                                    tensor_degrees, vertex_coefficient, z_anchor)
from totalcol.graph import from_edges
from totalcol.mpoly import SparsePoly, e, v


def point(vs, es):
    pt = {v(i): c for i, c in enumerate(vs, 1)}
    pt.update({e(k): c for k, c in enumerate(es, 1)})
    return pt


def is_total(g, vs, es, K):
    """Direct reading of the total-coloring conditions with vertex colors in 1..delta+1."""
    if any(not 1 <= c <= g.delta + 1 for c in vs) or any(c not in K for c in es):
        return False
    for k, (a, b) in enumerate(g.edges):
        if vs[a - 1] == vs[b - 1] or es[k] in (vs[a - 1], vs[b - 1]):
            return False
        for j, (c, d) in enumerate(g.edges):
            if j != k and {a, b} & {c, d} and es[j] == es[k]:
                return False
    return True


def test_make_setting_rejects_tiny_prime(p3):
    with pytest.raises(ValueError):
        make_setting(p3, 3)


def test_P_factor_multiset_k2(k2):
    s = make_setting(k2, 5)
    got = Counter(repr(f) for f in build_P(s).factors.factors)
    want = [SparsePoly.difference(5, v(1), v(2)), SparsePoly.difference(5, v(1), e(1)),
            SparsePoly.difference(5, v(2), e(1))]
    want += [SparsePoly.linear(5, v(i), l) for i in (1, 2) for l in (3, 4, 0)]
    assert got == Counter(repr(f) for f in want)


def test_P_examples(k2):
    P = build_P(make_setting(k2, 5))
    assert P.eval(point((1, 2), (3,)))
    assert P.eval(point((2, 2), (3,))) == 0


def test_E_examples(k2, p3):
    s = make_setting(k2, 5)
    E1 = build_E_i(1, s)
    for a in range(5):
        assert E1.eval({e(1): a}) == a * (a - 4) % 5
    s3 = make_setting(p3, 29)
    Em = build_E_m(s3)
    assert Em.eval({e(1): 1, e(2): 1}) == 0
    assert Em.eval({e(1): 1, e(2): 2})
    with pytest.raises(ValueError):
        build_E_i(3, s3)


def test_T_examples(k2):
    T = build_T(make_setting(k2, 5))
    assert T.eval(point((1, 2), (3,)))
    assert T.eval(point((1, 2), (1,))) == 0
    assert T.eval(point((1, 2), (0,))) == 0


@pytest.mark.parametrize("edges, p", [([(1, 2)], 5), ([(1, 2)], 7), ([(1, 2), (2, 3)], 5)])
def test_T_characterizes_total_colorings(edges, p):
    g = from_edges(edges)
    s = make_setting(g, p)
    T = build_T(s)
    K = s.colors().colors
    for vs in itertools.product(range(p), repeat=g.n):
        for es in itertools.product(range(p), repeat=g.m):
            assert bool(T.eval(point(vs, es))) == is_total(g, vs, es, K), (vs, es)


def test_vertex_monomial_k2_against_expansion(k2):
    s = make_setting(k2, 5)
    ch = choose_vertex_monomial(s)
    assert all(0 <= t <= 4 for t in ch.exponents)
    naive = expand_vertex_polynomial_at_zero(s)
    mono = tuple((v(i), t) for i, t in enumerate(ch.exponents, 1) if t)
    assert naive.coefficient(mono) == ch.coefficient_at_zero != 0
    assert eval_CP(ch, {e(1): 0}, s) == ch.coefficient_at_zero


def test_strategies_pick_extremes(k2):
    s = make_setting(k2, 5)
    naive = expand_vertex_polynomial_at_zero(s)
    exps = [tuple(dict(m).get(v(i), 0) for i in (1, 2)) for m in naive.terms]
    assert choose_vertex_monomial(s, "lexmin").exponents == min(exps)
    assert choose_vertex_monomial(s, "gradedlex").exponents == max(exps, key=lambda t: (sum(t), t))
    with pytest.raises(ValueError):
        choose_vertex_monomial(s, "random")


def test_probe_path_agrees_with_dense(p3):
    s = make_setting(p3, 7)
    dense = choose_vertex_monomial(s)
    probe = choose_vertex_monomial(s, budget=Budget(7 ** 3))
    assert dense.method == "dense" and probe.method == "probe"
    assert dense.exponents == probe.exponents
    assert dense.coefficient_at_zero == probe.coefficient_at_zero


def test_p3_vertex_monomial_against_expansion(p3):
    s = make_setting(p3, 29)
    ch = choose_vertex_monomial(s)
    naive = expand_vertex_polynomial_at_zero(s)
    exps = [tuple(dict(m).get(v(i), 0) for i in (1, 2, 3)) for m in naive.terms]
    assert ch.exponents == max(exps, key=lambda t: (sum(t), t)) == (28, 28, 28)
    mono = tuple((v(i), t) for i, t in enumerate(ch.exponents, 1))
    assert naive.coefficient(mono) == ch.coefficient_at_zero != 0


def test_cp_matches_naive_expansion_k2(k2):
    s = make_setting(k2, 5)
    ch = choose_vertex_monomial(s)
    mono = tuple((v(i), t) for i, t in enumerate(ch.exponents, 1) if t)
    P = build_P(s).factors
    for a in range(5):
        naive = P.substitute({e(1): a}).expand_reduced()
        assert eval_CP(ch, {e(1): a}, s) == naive.coefficient(mono)


def test_fast_and_slow_cp_agree(p3):
    s = make_setting(p3, 7)
    ch = choose_vertex_monomial(s)
    cp = vertex_coefficient(s, ch.exponents)
    for a, b in itertools.product(range(7), repeat=2):
        pt = {e(1): a, e(2): b}
        assert cp.eval(pt) == cp.eval_slow(pt)


def test_cp_degree_at_most_two_p3(p3):
    s = make_setting(p3, 29)
    coeffs = reconstruct_CP(choose_vertex_monomial(s), s)
    degs = tensor_degrees(coeffs)
    assert all(d <= 2 for d in degs) and max(degs) >= 0


def test_Q1_identity_k2(k2):
    s = make_setting(k2, 5)
    ch = choose_vertex_monomial(s)
    Q1 = build_Q(1, ch, s)
    assert Q1.eval({e(1): 3}) == -3 * eval_CP(ch, {e(1): 3}, s) % 5
    assert Q1.eval({e(1): 4}) == 0


def test_Q_vanishes_off_palette_and_on_conflicts(p3):
    s = make_setting(p3, 29)
    ch = choose_vertex_monomial(s)
    Q2 = build_Q(2, ch, s)
    assert Q2.eval({e(1): 2, e(2): 2}) == 0
    assert Q2.eval({e(1): 5, e(2): 1}) == 0
    # E^1 already holds the forward factor (e1 - e2)
    assert build_Q(1, ch, s).eval({e(1): 2, e(2): 2}) == 0
    with pytest.raises(ValueError):
        build_Q(3, ch, s)


def test_Z_k2(k2):
    s = make_setting(k2, 5)
    ch = choose_vertex_monomial(s)
    Z = build_Z(1, ch, s)
    assert Z.meta["S"] == [1]
    for a in range(5):
        want = eval_CP(ch, {e(1): a}, s) * (a - 4) * a % 5
        assert Z.eval({e(1): a}) == want
    assert check_Z_nonzero(1, ch, s).nonzero


def test_Z_anchor_p3(p3):
    s = make_setting(p3, 29)
    assert z_anchor(s, 1) == 2 and z_anchor(s, 2) == 2
    ch = choose_vertex_monomial(s)
    assert sorted(build_Z(1, ch, s).meta["S"]) == [1, 2]
