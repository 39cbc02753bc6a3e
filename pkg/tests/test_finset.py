import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cohnet.finset import (INITIAL, TERMINAL, FinFunction, FinSet, Subobject, equalizer,
                           find_natural_iso, image, join, meet, preimage, product, pullback,
                           sub_lattice, transport_ops, tupling)


def fn(dom, cod, table):
    return FinFunction(FinSet(dom), FinSet(cod), tuple(table))


def random_fn(rng, dom, cod):
    return fn(dom, cod, [rng.randrange(cod) for _ in range(dom)])


def test_finset_basics():
    assert TERMINAL.size == 1 and INITIAL.size == 0
    assert FinSet(2, ("a", "b")).label(1) == "b"
    with pytest.raises(ValueError):
        FinSet(-1)
    with pytest.raises(ValueError):
        FinSet(2, ("a", "a"))
    with pytest.raises(ValueError):
        FinSet(2, ("a",))


def test_function_totality_and_composition():
    with pytest.raises(ValueError):
        fn(2, 2, [0, 2])
    with pytest.raises(ValueError):
        fn(2, 2, [0])
    f, g = fn(3, 2, [1, 0, 1]), fn(2, 4, [3, 2])
    assert f.then(g).table == (2, 3, 2)
    assert FinFunction.identity(FinSet(3)).then(f) == f
    with pytest.raises(ValueError):
        g.then(f)
    assert FinFunction.element(FinSet(5), 4).table == (4,)
    p = fn(3, 3, [2, 0, 1])
    assert p.is_bijection() and p.then(p.inverse()) == FinFunction.identity(FinSet(3))
    with pytest.raises(ValueError):
        f.inverse()


def test_product_examples():
    assert product([FinSet(2), FinSet(3)]).size == 6
    empty = product([])
    assert empty.size == 1 and empty.index_to_tuple(0) == ()
    sq = product([FinSet(16), FinSet(16)])
    assert sq.size == 256 and sq.tuple_to_index((1, 0)) == 16
    assert product([FinSet(3), FinSet(0)]).size == 0


@settings(max_examples=50)
@given(st.lists(st.integers(0, 5), max_size=4))
def test_mixed_radix_round_trip(sizes):
    p = product(FinSet(s) for s in sizes)
    tuples = list(itertools.product(*(range(s) for s in sizes)))
    assert len(tuples) == p.size
    for i, tup in enumerate(tuples):
        assert p.index_to_tuple(i) == tup
        assert p.tuple_to_index(tup) == i


def test_projection_and_tupling():
    p = product([FinSet(2), FinSet(3)])
    pi0, pi1 = p.projection(0), p.projection(1)
    assert tupling([pi0, pi1]).table == tuple(range(6))
    with pytest.raises(ValueError):
        tupling([])


def test_equalizer_examples():
    rng = random.Random(1)
    f = random_fn(rng, 5, 5)
    assert equalizer(f, f).members == tuple(range(5))
    c1 = FinFunction.constant(FinSet(4), FinSet(3), 0)
    c2 = FinFunction.constant(FinSet(4), FinSet(3), 2)
    assert equalizer(c1, c2).members == ()
    with pytest.raises(ValueError):
        equalizer(f, c1)
    for _ in range(50):
        f, g = random_fn(rng, 5, 5), random_fn(rng, 5, 5)
        assert equalizer(f, g).members == tuple(i for i in range(5) if f(i) == g(i))


def test_pullback_examples():
    a = FinSet(4)
    x, y = FinFunction.element(a, 1), FinFunction.element(a, 3)
    sub, p1, p2 = pullback(x, y)
    assert sub.members == () and p1.dom.size == 0
    rng = random.Random(2)
    f = random_fn(rng, 4, 3)
    sub, p1, p2 = pullback(f, FinFunction.identity(FinSet(3)))
    assert p1.table == (0, 1, 2, 3) and p2.table == f.table
    for _ in range(50):
        f, g = random_fn(rng, 4, 3), random_fn(rng, 5, 3)
        sub, p1, p2 = pullback(f, g)
        assert sub.tuples() == [(a, b) for a in range(4) for b in range(5) if f(a) == g(b)]
        assert list(zip(p1.table, p2.table)) == sub.tuples()
        swapped, _, _ = pullback(g, f)
        assert sorted((b, a) for a, b in swapped.tuples()) == sub.tuples()
    with pytest.raises(ValueError):
        pullback(random_fn(rng, 2, 2), random_fn(rng, 2, 3))


def test_image_examples():
    c = FinFunction.constant(FinSet(4), FinSet(5), 3)
    assert image(c).members == (3,)
    s = fn(4, 3, [2, 0, 1, 0])
    assert image(s).is_full()
    rng = random.Random(3)
    for _ in range(30):
        f = random_fn(rng, rng.randint(0, 64), 64)
        singles = [Subobject(product([f.cod]), (v,)) for v in f.table]
        assert image(f) == join(singles, product([f.cod]))
        assert image(f).members == tuple(sorted(set(f.table)))


def test_preimage():
    f = fn(4, 3, [2, 0, 1, 0])
    sub = Subobject(product([FinSet(3)]), (0, 2))
    assert preimage(sub, f).members == (0, 1, 3)


def test_lattice():
    amb = product([FinSet(2), FinSet(2)])
    assert meet([], amb).is_full()
    assert join([], amb).members == ()
    with pytest.raises(ValueError):
        meet([])
    singles = [Subobject(amb, (i,)) for i in range(4)]
    assert join(singles).is_full()
    a, b = Subobject(amb, (0, 1, 3)), Subobject(amb, (1, 2, 3))
    assert meet([a, b]).members == (1, 3)
    assert sub_lattice("join", [a, b]).members == (0, 1, 2, 3)
    other = Subobject(product([FinSet(4)]), (0,))
    with pytest.raises(ValueError):
        meet([a, other])
    with pytest.raises(ValueError):
        sub_lattice("xor", [a])
    assert a.le(join([a, b])) and not a.le(b)
    assert 3 in a and 2 not in a


def test_subobject_canonical():
    amb = product([FinSet(5)])
    assert Subobject.from_indices(amb, [4, 1, 1, 0]) == Subobject.from_indices(amb, [0, 4, 1])
    with pytest.raises(ValueError):
        Subobject(amb, (2, 1))
    with pytest.raises(ValueError):
        Subobject(amb, (5,))


def test_equalizer_via_pullback():
    rng = random.Random(4)
    for _ in range(40):
        f, g = random_fn(rng, 5, 4), random_fn(rng, 5, 4)
        ident = FinFunction.identity(f.dom)
        left, right = tupling([ident, f]), tupling([ident, g])
        _, p1, _ = pullback(left, right)
        assert equalizer(f, g).members == p1.table


def _algebra(rng):
    sets = {"A": FinSet(4), "B": FinSet(3)}
    ops = {"c": FinFunction.element(sets["A"], 2),
           "f": random_fn(rng, 4, 3),
           "g": FinFunction(product([sets["B"], sets["A"]]).as_finset(), sets["A"],
                            tuple(rng.randrange(4) for _ in range(12)))}
    typing = {"c": ((), "A"), "f": (("A",), "B"), "g": (("B", "A"), "A")}
    return sets, ops, typing


def test_natural_iso_identity_and_transport():
    rng = random.Random(5)
    sets, ops, typing = _algebra(rng)
    alpha = find_natural_iso(sets, ops, sets, ops, typing)
    assert alpha is not None
    for s in sets:
        assert alpha[s].is_bijection()
    for _ in range(20):
        perm = {s: FinFunction(sets[s], sets[s], tuple(rng.sample(range(sets[s].size),
                                                                   sets[s].size)))
                for s in sets}
        ops2 = transport_ops(sets, ops, typing, perm)
        found = find_natural_iso(sets, ops, sets, ops2, typing)
        assert found is not None
        assert transport_ops(sets, ops, typing, found) == ops2


def test_natural_iso_absent():
    rng = random.Random(6)
    sets, ops, typing = _algebra(rng)
    f = ops["f"]
    broken = dict(ops)
    # a constant map cannot be isomorphic to a surjection
    broken["f"] = FinFunction.constant(f.dom, f.cod, 0)
    ops = dict(ops)
    ops["f"] = fn(4, 3, [0, 1, 2, 0])
    assert find_natural_iso(sets, ops, sets, broken, typing) is None
    assert find_natural_iso(sets, ops, {"A": FinSet(4), "B": FinSet(2)}, ops, typing) is None
