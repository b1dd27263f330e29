import numpy as np
import pytest

from ggsbranch.battery import (CATALOGUE, IS_sequence, Verdict, identity_battery, lift_to_section,
                               nonIS_sequence, psi_matches, truncated_rigid_stabilizer,
                               verify_branch_over, word_element)
from ggsbranch.permgroups import closure_by_bfs
from ggsbranch.quotient import build_quotient, embed_at
from ggsbranch.tree import commutator, equal_at_depth, power, section
from ggsbranch.vectors import DefiningVector, NotApplicable, reduce_vector


def V(p, n, *e):
    return DefiningVector(p, n, e)


def by_key(rows):
    out = {}
    for r in rows:
        out.setdefault(r.key, []).append(r.verdict)
    return out


def test_non_symmetric_example():
    rows = by_key(identity_battery(V(2, 2, 1, 0, 0), 4))
    assert set(rows['B1']) == {Verdict.PASS}
    assert set(rows['B2']) == {Verdict.PASS}
    assert rows['B3'] == [Verdict.NOT_APPLICABLE]


def test_constant_example():
    rows = by_key(identity_battery(V(3, 1, 1, 1), 4))
    assert set(rows['B6']) == {Verdict.PASS, Verdict.NOT_APPLICABLE}
    assert Verdict.PASS in rows['B6']
    assert set(rows['B8']) == {Verdict.PASS}


def test_sanity_row_and_catalogue_order():
    rows = identity_battery(V(2, 2, 1, 0, 1), 2)
    assert rows[0].key == 'sanity' and rows[0].verdict == Verdict.PASS
    keys = [r.key for r in rows[1:]]
    assert sorted(set(keys), key=keys.index) == list(CATALOGUE)


def test_vector_outside_F_is_not_applicable():
    rows = identity_battery(V(2, 2, 2, 0, 2), 3)
    assert all(r.verdict == Verdict.NOT_APPLICABLE for r in rows[1:])
    with pytest.raises(ValueError):
        identity_battery(V(2, 2, 1, 0, 0), 1)


def test_battery_runs_on_the_reduced_vector():
    e = V(5, 1, 0, 2, 0, 1)
    rows = identity_battery(e, 3)
    assert rows[1].vector == reduce_vector(e).reduced.to_text()
    assert all(r.verdict != Verdict.FAIL for r in rows)


def test_wrong_tuple_is_detected():
    G = V(2, 2, 1, 0, 0).group
    a, b = G.a, G.b
    f = commutator(b, G.b_(1))
    assert psi_matches(f, {1: commutator(a, b)}, 4) is None
    assert psi_matches(f, {2: commutator(a, b)}, 4) is not None
    assert psi_matches(G.a, {}, 3) == 'element does not fix the first level'


def test_nonIS_sequence_base_and_q_zero():
    e = V(2, 2, 1, 0, 0)
    g0 = nonIS_sequence(e, 0)
    G = e.group
    assert g0.params == {'k': 1, 'q': 0}
    assert equal_at_depth(g0.element, commutator(G.b, G.b_(1)), 4)
    # q = 0: the second closed-form factor is trivial and g_0 is already single-coordinate
    assert g0.single_coordinate(4)
    assert equal_at_depth(g0.closed_form[1], commutator(G.a, G.b), 3)


@pytest.mark.parametrize('entries', [(1, 0, 0, 0, 0, 0, 2), (1, 0, 2, 0, 0, 4, 6), (1, 2, 0, 0, 0, 0, 4)])
def test_nonIS_sequence_stabilises_at_n(entries):
    e = DefiningVector(2, 3, entries)
    assert nonIS_sequence(e, 0).params['q'] % 2 == 0
    for i in range(0, e.n + 3):
        st = nonIS_sequence(e, i)
        assert psi_matches(st.element, st.closed_form, 4) is None
        if i >= e.n:
            assert st.single_coordinate(4)
    G = e.group
    assert equal_at_depth(section(nonIS_sequence(e, e.n).element, (1,)), commutator(G.a, G.b), 3)


def test_nonIS_sequence_lies_in_derived_level_one_stabilizer():
    e = V(2, 3, 1, 0, 0, 0, 0, 0, 2)
    q = build_quotient(e, 2)
    inner = q.stabilizer_subgroup(1).derived()
    for i in range(0, 4):
        assert inner.contains(q.image(nonIS_sequence(e, i).element))


def test_nonIS_sequence_preconditions():
    with pytest.raises(NotApplicable):
        nonIS_sequence(V(2, 2, 1, 0, 1), 1)  # symmetric
    with pytest.raises(NotApplicable):
        nonIS_sequence(V(3, 1, 2, 0), 1)  # e_k = 2, not normalised
    with pytest.raises(NotApplicable):
        nonIS_sequence(V(5, 1, 1, 1, 0, 1), 1)  # not symmetric, but q = e_4 = 1 is a unit
    with pytest.raises(NotApplicable):
        nonIS_sequence(V(2, 2, 2, 0, 2), 0)  # outside F


@pytest.mark.parametrize('entries', [(1, 0, 0, 0, 0, 2, 1), (1, 0, 0, 0, 0, 0, 1), (1, 0, 4, 0, 4, 2, 3)])
def test_IS_sequence_stabilises(entries):
    e = DefiningVector(2, 3, entries)
    st0 = IS_sequence(e, 0)
    q = st0.params['q']
    for i in range(0, 3):
        st = IS_sequence(e, i)
        assert psi_matches(st.element, st.closed_form, 4) is None
        if pow(q, 2 * i + 1, e.m) == 0:
            assert st.single_coordinate(4)
    G = e.group
    i = next(i for i in range(5) if pow(q, 2 * i + 1, e.m) == 0)
    assert equal_at_depth(section(IS_sequence(e, i).element, (1,)), commutator(G.a, G.b, G.a), 3)


def test_IS_sequence_preconditions():
    with pytest.raises(NotApplicable):
        IS_sequence(V(2, 2, 1, 0, 0), 0)  # not symmetric
    with pytest.raises(NotApplicable):
        IS_sequence(V(3, 1, 1, 2), 0)  # Y maximal


def test_lift_to_section():
    e = V(3, 1, 1, 2)
    G = e.group
    for word in [(('a', 1),), (('b', 1),), (('a', 2), ('b', -1))]:
        h = lift_to_section(e, word, 1)
        assert psi_matches(h, {1: word_element(G, word)}, 4, positions=(1,), strict_others=False) is None


def test_verify_branch_examples():
    rep = verify_branch_over(V(2, 2, 1, 0, 0), 'G1', 3)
    assert rep.verdict == Verdict.PASS and rep.containment['holds']
    assert rep.note == 'hypothesis verified; conclusion cited'
    assert verify_branch_over(V(3, 1, 1, 2), 'GAMMA3', 3).verdict == Verdict.PASS
    assert verify_branch_over(V(2, 2, 2, 0, 2), 'GAMMA3', 3).verdict == Verdict.NOT_APPLICABLE
    assert verify_branch_over(V(3, 1, 1, 2), 'G1', 3).verdict == Verdict.NOT_APPLICABLE
    with pytest.raises(ValueError):
        verify_branch_over(V(3, 1, 1, 2), 'G7', 3)


@pytest.mark.parametrize('entries,p,n,target', [
    ((1, 0, 1), 2, 2, 'GAMMA3'), ((0, 1, 0), 2, 2, 'GAMMA3'), ((1, 0, 0), 2, 2, 'G2'),
    ((0, 2, 0, 1), 5, 1, 'G1'), ((1, 2, 4, 3), 5, 1, 'G2'),
])
def test_verify_branch_over_more_routes(entries, p, n, target):
    rep = verify_branch_over(DefiningVector(p, n, entries), target, 3)
    assert rep.verdict == Verdict.PASS, rep.to_dict()


def test_containment_check_can_fail():
    # The infinite dihedral group is not branch over its derived subgroup: at depth 3
    # the embedded copies of G' do not all lie in st(1)'.
    e = V(2, 1, 1)
    upper, lower = build_quotient(e, 3), build_quotient(e, 2)
    inner = upper.stabilizer_subgroup(1).derived()
    gens = lower.group.derived().gens
    assert not all(inner.contains(embed_at(s, x, 2, 3)) for x in (1, 2) for s in gens)


def test_truncated_rigid_stabilizer():
    q = build_quotient(V(2, 1, 1), 3)
    elems = [np.frombuffer(x, dtype=np.int64) for x in closure_by_bfs([q.a, q.b])]
    rist = truncated_rigid_stabilizer(q, (1,))
    assert rist.contains(q.identity_perm())
    brute = [x for x in elems if (x[4:] == np.arange(4, 8)).all()]
    assert rist.order() == len(brute)
    with pytest.raises(ValueError):
        truncated_rigid_stabilizer(q, (1, 1))


def test_truncated_rigid_stabilizer_contains_embedded_derived_subgroup():
    e = V(2, 2, 1, 0, 0)
    q, lower = build_quotient(e, 3), build_quotient(e, 2)
    gens = lower.group.derived().gens
    for x in range(1, 5):
        rist = truncated_rigid_stabilizer(q, (x,))
        assert all(rist.contains(embed_at(s, x, 4, 3)) for s in gens)


def test_b9_tuples_on_constant_vector():
    rows = [r for r in identity_battery(V(2, 2, 1, 1, 1), 3) if r.key == 'B9']
    assert rows and all(r.verdict == Verdict.PASS for r in rows)


def test_power_reduction_keeps_identities():
    G = V(3, 1, 1, 2).group
    assert equal_at_depth(power(G.b, 4), G.b, 4)
