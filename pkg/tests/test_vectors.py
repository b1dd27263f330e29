import math

import pytest

from conftest import all_vectors, sample_vectors
from ggsbranch.tree import equal_at_depth, power, conjugate
from ggsbranch.vectors import (DefiningVector, NotApplicable, Route, VectorError, check_reduction,
                              classify, delta, delta_values, in_E, in_Eprime, in_F, invertible_set,
                              is_periodic, partially_constant, periodicity_sums, r0,
                              reduce_vector, t_value, y_maximal)


def V(p, n, *e):
    return DefiningVector(p, n, e)


def test_constructor_rejects_bad_input():
    with pytest.raises(VectorError):
        V(2, 2, 0, 0, 0)
    with pytest.raises(VectorError):
        V(2, 2, 4, 0, 8)  # zero mod 4
    with pytest.raises(VectorError):
        V(2, 2, 1, 0)
    with pytest.raises(ValueError):
        V(4, 1, 1, 0, 0)


def test_text_round_trip():
    e = DefiningVector.parse('p=3 n=2 e=0,0,1,0,0,2,0,0')
    assert e.entries == (0, 0, 1, 0, 0, 2, 0, 0)
    assert DefiningVector.parse(e.to_text()) == e
    with pytest.raises(VectorError):
        DefiningVector.parse('p=3 e=1,2')


def test_r0_examples():
    assert r0(V(2, 2, 2, 0, 2)) == 1
    assert r0(V(3, 1, 1, 2)) == 0
    assert r0(V(2, 3, 4, 4, 4, 4, 4, 4, 4)) == 2


def test_invertible_set_and_t():
    e = V(2, 2, 1, 0, 1)
    assert invertible_set(e) == {1, 3} and t_value(e) == 0
    e = V(2, 2, 0, 1, 0)
    assert invertible_set(e) == {2} and t_value(e) == 1
    e = V(3, 2, 0, 0, 1, 0, 0, 2, 0, 0)
    assert invertible_set(e) == {3, 6} and t_value(e) == 1
    with pytest.raises(NotApplicable):
        t_value(V(2, 2, 2, 0, 2))


def test_periodicity_examples():
    assert is_periodic(V(3, 1, 1, 2))
    assert not is_periodic(V(3, 1, 1, 1))
    assert periodicity_sums(V(2, 2, 1, 2, 1)) == [4, 2]
    assert not is_periodic(V(2, 2, 1, 2, 1))


@pytest.mark.parametrize('p,n', [(2, 1), (3, 1), (2, 2), (5, 1)])
def test_periodicity_matches_direct_sums(p, n):
    m = p ** n
    for e in all_vectors(p, n):
        ent = (None,) + e.entries  # 1-based
        direct = True
        for i in range(n):
            step = p ** i
            s = sum(ent[j] for j in range(step, m, step))
            direct &= s % p ** (i + 1) == 0
        assert is_periodic(e) == direct, e


def test_delta_examples():
    assert delta(V(2, 2, 1, 1, 1), 2) == 0
    with pytest.raises(NotApplicable):
        delta(V(3, 1, 1, 2), 1)
    assert delta_values(V(3, 1, 1, 2)) == {}
    assert delta(V(5, 1, 1, 2, 4, 3), 2) == 0
    with pytest.raises(NotApplicable):
        delta(V(5, 1, 1, 2, 4, 3), 1)


def test_reduction_example():
    data = reduce_vector(V(5, 1, 0, 2, 0, 1))
    assert (data.k, data.s, data.r) == (2, 0, 3)
    assert data.alpha == (2, 4, 1, 3)
    assert data.reduced.entries == (1, 3, 0, 0)
    assert all(check_reduction(data, 3).values())


def test_reduction_is_trivial_when_already_normalised():
    e = V(3, 1, 1, 2)
    data = reduce_vector(e)
    assert data.r == 1 and data.reduced == e
    with pytest.raises(NotApplicable):
        reduce_vector(V(2, 2, 2, 0, 2))


def test_reduction_conjugates_a_to_a_power():
    data = reduce_vector(V(2, 3, 0, 0, 3, 0, 0, 0, 0))
    G = data.vector.group
    assert equal_at_depth(conjugate(G.a, data.conjugator), power(G.a, data.r), 3)


def test_classify_examples():
    assert classify(V(2, 2, 1, 0, 0)).route == Route.REGULAR_BRANCH_G1
    rep = classify(V(3, 1, 1, 2))
    assert rep.route == Route.REGULAR_BRANCH_GAMMA3 and rep.is_periodic and not rep.in_E
    assert classify(V(2, 2, 1, 1, 1)).route == Route.CONSTANT_NOT_BRANCH
    assert classify(V(2, 2, 2, 0, 2)).route == Route.NOT_TRANSITIVE
    assert classify(V(2, 2, 2, 1, 0)).route == Route.OPEN_EPRIME


def test_eprime_vector_with_partially_constant_shape_keeps_the_open_note():
    # (0,1,0) is partially constant, so the gamma_3 route wins, but E' membership is reported
    rep = classify(V(2, 2, 0, 1, 0))
    assert rep.in_Eprime and rep.partially_constant
    assert rep.route == Route.REGULAR_BRANCH_GAMMA3
    assert 'open' in rep.note
    assert 'partially_constant_regular_branch_gamma3' in rep.theorems


def test_route_nine_never_claims_branch():
    found = [v for v in sample_vectors(3, 2, 3000, seed=2)
             if classify(v).route == Route.WEAKLY_BRANCH_G2_ONLY]
    found.append(V(3, 2, 0, 0, 5, 0, 0, 2, 6, 0))
    for v in found:
        rep = classify(v)
        assert rep.route == Route.WEAKLY_BRANCH_G2_ONLY
        assert 'unknown' in rep.note


@pytest.mark.parametrize('p,n', [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)])
def test_report_invariants(p, n):
    vecs = list(all_vectors(p, n)) if p ** n <= 5 else sample_vectors(p, n, 200, seed=3, non_f=20)
    for e in vecs:
        rep = classify(e)
        assert rep.in_F == (rep.R0 == 0)
        if rep.in_F:
            assert set(rep.Y) <= set(range(rep.k, e.m, rep.k))
        if rep.in_Eprime:
            assert rep.in_E
        if rep.is_constant:
            assert rep.in_E or not rep.in_F


@pytest.mark.parametrize('p,n', [(2, 2), (3, 1), (5, 1), (2, 3), (3, 2)])
def test_in_E_matches_definition(p, n):
    vecs = list(all_vectors(p, n)) if p ** n <= 5 else sample_vectors(p, n, 300, seed=5)
    for e in vecs:
        if not in_F(e):
            assert not in_E(e)
            continue
        t = t_value(e)
        k = p ** t
        direct = y_maximal(e) and all((e[i * k] - e[j * k]) % p == 0
                                      for i in range(1, e.m // k) for j in range(1, e.m // k))
        assert in_E(e) == direct


@pytest.mark.parametrize('p,n', [(2, 2), (3, 1), (5, 1), (2, 3), (3, 2)])
def test_route_is_invariant_under_unit_rescaling(p, n):
    m = p ** n
    units = [u for u in range(2, m) if math.gcd(u, p) == 1]
    vecs = list(all_vectors(p, n)) if m <= 5 else sample_vectors(p, n, 60, seed=9, non_f=5)
    for e in vecs:
        route = classify(e).route
        for u in units:
            assert classify(e.scaled(u)).route == route, (e, u)


@pytest.mark.parametrize('p,n', [(3, 1), (2, 2)])
def test_periodic_vectors_route_to_gamma3_exhaustive(p, n):
    hits = 0
    for e in all_vectors(p, n):
        if in_F(e) and is_periodic(e):
            hits += 1
            assert classify(e).route == Route.REGULAR_BRANCH_GAMMA3, e
    assert hits > 0


@pytest.mark.parametrize('p,n', [(5, 1), (2, 3), (3, 2)])
def test_periodic_vectors_are_regular_branch_over_gamma3(p, n):
    # larger shapes have periodic non-IS vectors, which route to the stronger G' verdict
    vecs = list(all_vectors(p, n)) if p ** n <= 5 else sample_vectors(p, n, 400, seed=1)
    hits = 0
    for e in vecs:
        if in_F(e) and is_periodic(e):
            hits += 1
            rep = classify(e)
            assert rep.route in (Route.REGULAR_BRANCH_GAMMA3, Route.REGULAR_BRANCH_G1), e
            assert rep.route == Route.REGULAR_BRANCH_GAMMA3 or not rep.is_IS
            assert 'periodic_regular_branch_gamma3' in rep.theorems
    assert hits > 0


def test_periodic_non_symmetric_vector_takes_the_stronger_route():
    rep = classify(V(5, 1, 0, 0, 1, 4))
    assert rep.is_periodic and not rep.is_IS
    assert rep.route == Route.REGULAR_BRANCH_G1


def test_constant_vectors_are_never_periodic_in_F():
    # keeps the route order consistent with the periodic corollary
    for p, n in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)]:
        e = DefiningVector(p, n, (1,) * (p ** n - 1))
        assert not is_periodic(e)


def test_partially_constant_flag():
    assert partially_constant(V(2, 2, 0, 1, 0))
    assert not partially_constant(V(2, 2, 1, 1, 1))
    assert not partially_constant(V(3, 2, 0, 0, 1, 0, 0, 1, 0, 3))
    assert partially_constant(V(3, 2, 0, 0, 2, 0, 0, 2, 0, 0))
    assert not in_Eprime(V(3, 2, 0, 0, 2, 0, 0, 2, 0, 0))
