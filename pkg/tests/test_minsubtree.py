import itertools

import pytest

from treecore import minsubtree as MS
from treecore import stallings as S
from treecore import word as W
from treecore.bass_serre import AMALGAM, HNN, Splitting

p = W.parse


def F2():
    return Splitting(2, AMALGAM, [p("a")], [], B=[p("b")], label="F")


def Ta():
    return Splitting(2, HNN, [p("a"), p("baB")], [p("a")], t=p("b"), label="Ta")


def Tb():
    return Splitting(2, HNN, [p("b"), p("abA")], [p("b")], t=p("a"), label="Tb")


def G(*ws):
    return S.build([p(w) for w in ws], 2)


def short_products(H, k=3):
    letters = list(H.gens) + [W.inverse(g) for g in H.gens]
    out = set()
    for n in range(1, k + 1):
        for combo in itertools.product(letters, repeat=n):
            out.add(W.multiply(*combo))
    out.discard(())
    return sorted(out, key=W.shortlex_key)


def on_axis(T, h, e):
    ell = T.translation_length(h)
    return ell > 0 and all(T.displacement(h, v) == ell for v in T.endpoints(e))


def test_nontrivial_action_examples():
    assert not MS.is_nontrivial_action(G("a"), F2())
    assert MS.is_nontrivial_action(G("ab"), F2())
    assert not MS.is_nontrivial_action(S.trivial(2), F2())


def test_quotient_of_whole_group_is_the_splitting():
    for T in (F2(), Ta()):
        q = MS.min_subtree_quotient(S.full(2), T)
        assert len(q.edges) == 1
        assert len(q.vertices) == len(T.vertex_kinds())


def test_quotient_of_ab_is_a_two_edge_circuit():
    q = MS.min_subtree_quotient(G("ab"), F2())
    assert len(q.edges) == 2 and len(q.vertices) == 2
    assert all(a != b for a, b in q.edges.values())


def test_quotient_of_a_in_tb_has_one_edge():
    q = MS.min_subtree_quotient(G("a"), Tb())
    assert len(q.edges) == 1
    (a, b), = q.edges.values()
    assert a == b


def test_trivial_action_raises():
    with pytest.raises(MS.TrivialAction):
        MS.min_subtree_quotient(G("a"), F2())


def test_crosses_strongly_examples():
    ta, tb = Ta(), Tb()
    assert not MS.crosses_strongly(F2(), ta, ta.base_edge())
    assert MS.crosses_strongly(ta, tb, tb.base_edge())
    far = tb.act(p("abab"), tb.base_edge())
    assert not MS.crosses_strongly(ta, tb, far)


def test_strong_intersection_examples():
    assert MS.strong_intersection(F2(), Ta()) == 0
    assert MS.strong_intersection(Ta(), Tb()) == 1
    assert MS.strong_intersection(Tb(), Ta()) == 1
    assert MS.strong_intersection(Ta(), Ta()) == 0


def test_asymmetric_core_examples():
    A = MS.asymmetric_core(Ta(), Tb())
    assert A.canonical and len(A.squares()) == MS.strong_intersection(Ta(), Tb()) == 1
    A = MS.asymmetric_core(F2(), F2())
    assert len(A.squares()) == 0
    assert not A.canonical


CASES = [(G("ab"), F2()), (G("a"), Tb()), (G("ab", "aB"), Ta()), (G("abAB"), F2()),
         (G("b", "aba"), Ta()), (S.full(2), Tb())]


@pytest.mark.parametrize("H,T", CASES)
def test_pruning_is_confluent(H, T):
    ref = MS.min_subtree_quotient(H, T)
    for seed in range(6):
        q = MS.min_subtree_quotient(H, T, seed=seed)
        assert q.edges == ref.edges and q.vertices == ref.vertices


@pytest.mark.parametrize("H,T", CASES)
def test_quotient_edges_lie_on_axes(H, T):
    q = MS.min_subtree_quotient(H, T)
    hs = short_products(H)
    for e in q.edges:
        assert any(on_axis(T, h, e) for h in hs), e


@pytest.mark.parametrize("H,T", CASES)
def test_axes_lie_in_quotient(H, T):
    q = MS.min_subtree_quotient(H, T)
    for h in short_products(H, 2):
        if not T.is_hyperbolic(h):
            continue
        anchor, period = T.axis_segment(h)
        for e in period:
            assert q.contains_edge(e)


def test_exports():
    q = MS.min_subtree_quotient(G("ab"), F2())
    assert q.to_json()["edges"]
    assert q.to_dot().startswith("graph")
