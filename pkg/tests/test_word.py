from hypothesis import given, strategies as st

from treecore import word as W

p = W.parse
raw = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=14)


def test_reduce_examples():
    assert W.reduce(p("a") + p("A")) == ()
    assert W.reduce((1, 2, -2, 1)) == p("aa")
    assert W.reduce(p("ab")) == p("ab")


def test_multiply_examples():
    assert W.multiply(p("a"), p("A")) == ()
    assert W.multiply(p("ab"), p("Bc")) == p("ac")
    assert W.multiply(p("abc"), ()) == p("abc")


def test_inverse_examples():
    assert W.inverse(p("ab")) == p("BA")
    assert W.inverse(()) == ()


def test_cyclic_reduce_examples():
    assert W.cyclic_reduce(p("abA")) == (p("b"), p("a"))
    assert W.cyclic_reduce(p("ab")) == (p("ab"), ())
    assert W.cyclic_reduce(()) == ((), ())


def test_parse_format_round_trip():
    for s in ["1", "a", "abAB", "cBa"]:
        assert W.format_word(p(s)) == s


def test_letter_order():
    assert W.letters(2) == (1, -1, 2, -2)


@given(raw)
def test_reduce_idempotent(xs):
    w = W.reduce(xs)
    assert W.is_reduced(w)
    assert W.reduce(w) == w


@given(raw, raw, raw)
def test_multiply_associative_and_parity(x, y, z):
    u, v, w = W.reduce(x), W.reduce(y), W.reduce(z)
    assert W.multiply(W.multiply(u, v), w) == W.multiply(u, W.multiply(v, w))
    assert (len(W.multiply(u, v)) - len(u) - len(v)) % 2 == 0


@given(raw)
def test_inverse_involution(xs):
    w = W.reduce(xs)
    assert W.inverse(W.inverse(w)) == w
    assert W.multiply(w, W.inverse(w)) == ()


@given(raw)
def test_cyclic_reduce_is_conjugate(xs):
    w = W.reduce(xs)
    core, g = W.cyclic_reduce(w)
    assert W.multiply(g, core, W.inverse(g)) == w
    if len(core) > 1:
        assert core[0] != -core[-1]
