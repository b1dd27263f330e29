import itertools
import random

import numpy as np
import pytest

from ggsbranch.permgroups import (PermGroup, TreeChain, closure_by_bfs, comm, identity_perm, inv,
                                  is_identity, mul, perm_power)


def wreath_perm(m, depth, exps):
    """Leaf permutation of the portrait with exponent ``exps[(u)]`` of the m-cycle at vertex u."""
    words = list(itertools.product(range(m), repeat=depth))
    index = {w: i for i, w in enumerate(words)}
    out = np.empty(len(words), dtype=np.int64)
    for w in words:
        img = tuple((w[j] + exps.get(w[:j], 0)) % m for j in range(depth))
        out[index[w]] = index[img]
    return out


def random_wreath(rng, m, depth, density=0.5):
    exps = {}
    for j in range(depth):
        for u in itertools.product(range(m), repeat=j):
            if rng.random() < density:
                exps[u] = rng.randrange(m)
    return wreath_perm(m, depth, exps)


def test_basic_operations():
    x = np.array([1, 2, 0, 3])
    y = np.array([0, 1, 3, 2])
    assert np.array_equal(mul(x, y), y[x])
    assert is_identity(mul(x, inv(x)))
    assert np.array_equal(perm_power(x, 3), identity_perm(4))
    assert np.array_equal(perm_power(x, -1), inv(x))
    assert np.array_equal(comm(x, y), mul(inv(x), inv(y), x, y))


SHAPES = [(2, 1, 3), (3, 1, 2), (2, 2, 2), (2, 1, 4)]


@pytest.mark.parametrize('p,n,depth', SHAPES)
def test_chain_orders_agree_with_bfs_and_schreier_sims(p, n, depth):
    m = p ** n
    rng = random.Random(p * 100 + n * 10 + depth)
    for trial in range(6):
        gens = [random_wreath(rng, m, depth, density=0.3 + 0.1 * trial) for _ in range(rng.randint(1, 3))]
        chain = TreeChain(p, n, depth, gens)
        bfs = closure_by_bfs(gens)
        ss = PermGroup(gens)
        assert chain.order() == len(bfs) == ss.order()


@pytest.mark.parametrize('p,n,depth', SHAPES)
def test_membership_agrees_with_bfs(p, n, depth):
    m = p ** n
    rng = random.Random(7 + depth)
    gens = [random_wreath(rng, m, depth, 0.3), random_wreath(rng, m, depth, 0.3)]
    chain = TreeChain(p, n, depth, gens)
    ss = PermGroup(gens)
    members = closure_by_bfs(gens)
    for _ in range(40):
        x = random_wreath(rng, m, depth, 0.6)
        inside = x.tobytes() in members
        assert chain.contains(x) == inside
        assert ss.contains(x) == inside


def test_whole_wreath_product_order():
    # the first-level rooted cycle plus a rooted cycle below vertex 0 generate C_2 wr C_2 wr C_2
    a = wreath_perm(2, 3, {(): 1})
    c = wreath_perm(2, 3, {(0,): 1})
    d = wreath_perm(2, 3, {(0, 0): 1})
    assert TreeChain(2, 1, 3, [a, c, d]).order() == 2 ** 7


def test_trivial_group():
    chain = TreeChain(2, 1, 3)
    assert chain.order() == 1
    assert chain.contains(identity_perm(8))
    assert PermGroup([], degree=8).order() == 1


def test_add_reports_growth():
    a = wreath_perm(3, 2, {(): 1})
    chain = TreeChain(3, 1, 2)
    assert chain.add(a)
    assert not chain.add(mul(a, a))
    assert chain.order() == 3


def test_rejects_wrong_degree():
    chain = TreeChain(2, 1, 2)
    with pytest.raises(ValueError):
        chain.add(identity_perm(8))


def test_element_outside_the_wreath_product_is_reported():
    chain = TreeChain(3, 1, 1, [np.array([1, 2, 0])])
    with pytest.raises(ValueError):
        chain.contains(np.array([1, 0, 2]))


def test_pointwise_stabilizer_matches_filter():
    rng = random.Random(3)
    gens = [random_wreath(rng, 2, 3, 0.5) for _ in range(3)]
    G = PermGroup(gens)
    stab = G.pointwise_stabilizer([0, 4])
    brute = [x for x in closure_by_bfs(gens) if (np.frombuffer(x, dtype=np.int64)[[0, 4]] == [0, 4]).all()]
    assert stab.order() == len(brute)


def test_strong_generators_generate_the_group():
    rng = random.Random(11)
    gens = [random_wreath(rng, 4, 2, 0.4) for _ in range(2)]
    chain = TreeChain(2, 2, 2, gens)
    again = TreeChain(2, 2, 2, chain.strong_generators())
    assert again.order() == chain.order()
    assert all(again.contains(g) for g in gens)


def test_tail_is_the_level_stabilizer():
    rng = random.Random(5)
    gens = [random_wreath(rng, 2, 3, 0.6) for _ in range(3)]
    chain = TreeChain(2, 1, 3, gens)
    elems = [np.frombuffer(x, dtype=np.int64) for x in closure_by_bfs(gens)]
    # st(1) fixes the first letter of every leaf
    st1 = [x for x in elems if (x // 4 == np.arange(8) // 4).all()]
    assert chain.tail(1).order() == len(st1)
