import pytest

from treecore import corecomplex as CC
from treecore import oracle as O
from treecore import word as W
from treecore.bass_serre import DirectionRef

p = W.parse


def test_ball_examples():
    assert O.ball(2, 0) == [()]
    assert len(O.ball(2, 1)) == 5
    assert len(O.ball(2, 2)) == 17
    for L in range(5):
        assert len(O.ball(3, L)) == O.ball_size(3, L)
    b = O.ball(2, 3)
    assert b == sorted(b, key=W.shortlex_key)


def test_window_distances_match_geodesics(f2, torus):
    for T in (f2.splittings["F"], torus.splittings["Ta"]):
        win = O.tree_window(T, 3)
        vs = sorted(win.vertices)
        for v in vs[:15]:
            d = win.bfs(v)
            for w in vs:
                assert d[w] == T.distance(v, w) == win.distance(v, w)


def test_approx_heavy_examples(f2, torus):
    F = f2.splittings["F"]
    e = F.base_edge()
    heavy = CC.QuadrantRef(DirectionRef(e, 0), DirectionRef(e, 0))
    assert O.approx_heavy(F, F, heavy, 6, 3) is not None
    for s, t in [(0, 1), (1, 0)]:
        light = CC.QuadrantRef(DirectionRef(e, s), DirectionRef(e, t))
        for L, D in [(4, 2), (6, 2), (6, 3)]:
            assert O.approx_heavy(F, F, light, L, D) is None
    # D = 0: the base point itself when it lies in the quadrant
    Ta, Tb = torus.splittings["Ta"], torus.splittings["Tb"]
    for q in CC.square_quadrants(Ta.base_edge(), Tb.base_edge()):
        in_q = Ta.in_direction(Ta.base_vertex(), q.d1) and Tb.in_direction(Tb.base_vertex(), q.d2)
        if in_q:
            assert O.approx_heavy(Ta, Tb, q, 3, 0) == ()


def test_approx_heavy_is_monotone(torus):
    Ta, Tb = torus.splittings["Ta"], torus.splittings["Tb"]
    for q in CC.square_quadrants(Ta.base_edge(), Tb.base_edge()):
        for L in (3, 4, 5):
            if O.approx_heavy(Ta, Tb, q, L, 2) is not None:
                assert O.approx_heavy(Ta, Tb, q, L + 1, 2) is not None


def test_powers_of_hyperbolic_are_heavy(torus):
    Ta, Tb = torus.splittings["Ta"], torus.splittings["Tb"]
    h = p("ab")
    q = None
    for cand in CC.square_quadrants(Ta.base_edge(), Tb.base_edge()):
        if Ta.end_in_direction(h, cand.d1) and Tb.end_in_direction(h, cand.d2):
            q = cand
    assert q is not None
    assert O.approx_heavy(Ta, Tb, q, 6, 2) is not None


def test_window_translation_length(torus):
    Ta = torus.splittings["Ta"]
    win = O.tree_window(Ta, 3)
    for g in ["a", "b", "ab", "abAB"]:
        assert O.window_translation_length(win, p(g)) == Ta.translation_length(p(g))


@pytest.mark.parametrize("names,session,L", [(("F", "F"), "f2", 6), (("Ta", "Tb"), "torus", 6),
                                             (("S1", "S2"), "f3", 4)])
def test_crosscheck_clean(names, session, L, request):
    s = request.getfixturevalue(session)
    s1, s2 = (s.splittings[n] for n in names)
    core = CC.compute_core(s1, s2)
    rep = O.crosscheck(core, s1, s2, L)
    assert rep.ok, rep.to_json()


def test_crosscheck_catches_mutation(torus):
    s1, s2 = torus.splittings["Ta"], torus.splittings["Tb"]
    core = CC.compute_core(s1, s2)
    sq = core.upper.of_dim(2)[0]
    core.upper.cells.discard(sq)
    rep = O.crosscheck(core, s1, s2, 6)
    assert not rep.ok
    failed = {c.name for c in rep.checks if not c.ok}
    assert "upper fibers convex" in failed or "lower squares heavy" in failed
