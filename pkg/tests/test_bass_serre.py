import random

import pytest
from hypothesis import given, settings, strategies as st

from treecore import stallings as S
from treecore import word as W
from treecore import oracle as O
from treecore.bass_serre import (AMALGAM, HNN, Cell, DirectionRef, EllipticError, NotAMember,
                                 Splitting, SplittingError, express)

p = W.parse


def F2():
    return Splitting(2, AMALGAM, [p("a")], [], B=[p("b")], label="F")


def Ta():
    return Splitting(2, HNN, [p("a"), p("baB")], [p("a")], t=p("b"), label="Ta")


def Tb():
    return Splitting(2, HNN, [p("b"), p("abA")], [p("b")], t=p("a"), label="Tb")


def S1():
    return Splitting(3, AMALGAM, [p("a")], [], B=[p("b"), p("c")], label="S1")


ALL = [F2(), Ta(), Tb(), S1()]


def test_validate_examples():
    assert F2().validate().ok
    assert Ta().validate().ok
    bad = Splitting(2, AMALGAM, [p("a")], [p("b")], B=[p("b")], label="X").validate()
    assert not bad.ok
    failed = [c for c in bad.checks if not c.ok]
    assert failed[0].name == "C in A" and "b" in failed[0].detail


def test_validate_marks_injectivity_asserted():
    lines = list(F2().validate().lines())
    assert any("injective: ASSERTED" in line for line in lines)


def test_index_check_fails_for_proper_subgroup():
    rep = Splitting(2, AMALGAM, [p("aa")], [], B=[p("b")], label="Y").validate()
    assert not rep.ok


def test_from_json_rejects_unknown_fields():
    with pytest.raises(SplittingError):
        Splitting.from_json("Z", {"kind": "amalgam", "A": ["a"], "B": ["b"], "C": [],
                                  "extra": 1}, 2)


def test_express_examples():
    gens = [p("a"), p("b")]
    assert express(p("b"), gens, 2) == (2,)
    assert express((), gens, 2) == ()
    with pytest.raises(NotAMember):
        express(p("a"), [p("aa"), p("b")], 2)
    rng = random.Random(0)
    T = Ta()
    for _ in range(100):
        w = W.reduce([rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 8))])
        assert S.evaluate(T.express(w), T._gens) == w


def test_normal_form_examples():
    assert F2().normal_form(p("aaa")) == (("A", p("aaa")),)
    assert F2().displacement(p("aaa")) == 0
    assert len(F2().normal_form(p("ab"))) == 2
    assert F2().displacement(p("ab")) == 2
    assert Ta().displacement(p("b")) == 1


def test_normal_form_round_trip():
    rng = random.Random(1)
    for T in ALL:
        for _ in range(50):
            w = W.reduce([rng.choice([1, -1]) * rng.randint(1, T.rank)
                          for _ in range(rng.randint(0, 8))])
            assert W.multiply(*[x for _, x in T.normal_form(w)]) == w


def test_geodesic_examples():
    T = F2()
    A = T.base_vertex()
    assert T.geodesic(A, A) == []
    bA = T.act(p("b"), A)
    assert T.geodesic(A, bA) == [Cell("E", ()), T.cell("E", p("b"))]
    assert T.path_vertices(A, bA)[1] == Cell("B", ())


def test_translation_length_examples():
    assert F2().translation_length(p("a")) == 0
    assert F2().translation_length(p("ab")) == 2
    assert Ta().translation_length(p("b")) == 1


def test_translation_length_matches_window():
    for T, L in [(F2(), 4), (Ta(), 4)]:
        win = O.tree_window(T, L)
        for g in ["a", "b", "ab", "aB", "abAB", "aab"]:
            assert O.window_translation_length(win, p(g)) == T.translation_length(p(g))


def test_axis_examples():
    T = F2()
    anchor, period = T.axis_segment(p("ab"))
    assert T.distance(anchor, T.act(p("ab"), anchor)) == 2 == len(period)
    verts = set()
    for k in (-1, 0, 1):
        for e in period:
            verts.update(T.endpoints(T.act(W.power(p("ab"), k), e)))
    assert Cell("A", ()) in verts and Cell("B", ()) in verts
    with pytest.raises(EllipticError):
        T.axis_segment(p("a"))


def test_distances_match_window_bfs():
    for T in ALL:
        L = 3 if T.rank == 2 else 2
        win = O.tree_window(T, L)
        verts = sorted(win.vertices)
        for v in verts[:25]:
            d = win.bfs(v)
            for w in verts:
                assert T.distance(v, w) == d[w]


def test_window_examples():
    T = F2()
    assert O.tree_window(T, 0).vertices == {T.base_vertex()}
    win = O.tree_window(T, 2)
    abA = T.act(p("ab"), T.base_vertex())
    for v in (Cell("A", ()), Cell("B", ()), abA):
        assert v in win.vertices
    assert win.distance(Cell("A", ()), abA) == T.distance(Cell("A", ()), abA) == 2


def test_end_in_direction_examples():
    rng = random.Random(2)
    for T in ALL:
        for _ in range(15):
            g = W.reduce([rng.choice([1, -1]) * rng.randint(1, T.rank)
                          for _ in range(rng.randint(1, 5))])
            if not T.is_hyperbolic(g):
                continue
            anchor, period = T.axis_segment(g)
            e = period[0]
            gA = T.act(g, anchor)
            a, b = T.endpoints(e)
            tow = 0 if T.distance(a, gA) < T.distance(b, gA) else 1
            d = DirectionRef(e, tow)
            assert T.end_in_direction(g, d)
            assert T.end_in_direction(g, d) != T.end_in_direction(W.inverse(g), d)
            v = T.act(p("ab"), T.base_vertex())
            for dd in (DirectionRef(e, 0), DirectionRef(e, 1)):
                ys = [T.in_direction(T.act(W.power(g, k), v), dd) for k in range(15, 21)]
                assert all(ys) == T.end_in_direction(g, dd)


def test_fixed_point():
    T = Ta()
    for g in ["a", "baB", "bbaBB"]:
        q = T.fixed_point([p(g)])
        assert T.act(p(g), q) == q
    with pytest.raises(EllipticError):
        T.fixed_point([p("b")])


word2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(W.reduce)


@settings(max_examples=50, deadline=None)
@given(word2, word2, st.sampled_from(["A", "E"]), word2)
def test_action_is_a_group_action(g, h, kind, r):
    for T in (F2(), Ta()):
        c = T.cell(kind, r)
        assert T.act(g, T.act(h, c)) == T.act(W.multiply(g, h), c)


@settings(max_examples=50, deadline=None)
@given(word2, word2, word2)
def test_triangle_inequality(x, y, z):
    T = Ta()
    u, v, w = (T.act(q, T.base_vertex()) for q in (x, y, z))
    assert len(T.geodesic(u, w)) <= len(T.geodesic(u, v)) + len(T.geodesic(v, w))
    assert len(T.geodesic(u, v)) == T.distance(u, v)
