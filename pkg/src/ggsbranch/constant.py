"""The GGS-group with constant defining vector (1, ..., 1).

``K`` is the normal closure of ``y0 = b a^-1`` and ``y_i = y0^(a^i)``.
Finite quotients ``Q_l = G / K' st_G(l)`` are realised as ``G_l / (K_l)'``
where ``G_l`` is the depth-``l`` congruence quotient and ``K_l`` the image
of ``K`` in it.  The companion-matrix model ``<x> |x Z^(p^n - 1)`` uses
right actions, ``v -> v M``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .intmat import IntegerMatrix, companion_matrix
from .permgroups import TreeChain
from .quotient import (DEFAULT_DEGREE_CAP, LevelQuotient, SubgroupHandle, embed_at,
                       restrict_to)
from .tree import (Element, commutator, conjugate, equal_at_depth, invert, power, product,
                   root_permutation, section)
from .vectors import DefiningVector, NotApplicable, is_constant

__all__ = [
    'ConstantGroup', 'PreconditionError', 'pi_product', 'verify_prop_products',
    'stab1_derived_equals_stab2', 'QuotientData', 'q_order', 'model_matrix', 'model_lcs_index',
    'structure_crosscheck', 'not_branch_report', 'b9_kernel_check', 'ConstantQuotient',
]


class PreconditionError(ValueError):
    pass


class ConstantGroup:
    def __init__(self, p: int, n: int):
        self.vector = DefiningVector(p, n, (1,) * (p ** n - 1))
        self.p, self.n, self.m = p, n, p ** n
        self.G = self.vector.group
        self.a, self.b = self.G.a, self.G.b
        self.y0 = self.b * invert(self.a)

    def y(self, i: int) -> Element:
        """``y_i = y0^(a^i)``, indices mod p^n."""
        return conjugate(self.y0, power(self.a, i % self.m))

    def ys(self) -> list[Element]:
        return [self.y(i) for i in range(self.m)]

    def y_product(self) -> Element:
        """``y_{m-1} ... y_1 y_0``, which is trivial."""
        return product(*[self.y(i) for i in reversed(range(self.m))])


def pi_product(h: Element) -> Element:
    """Ordered product of the first-level sections of ``h``, which must fix the first level."""
    m = h.shape.m
    if root_permutation(h) != tuple(range(m)):
        raise PreconditionError('pi_product needs an element of the first-level stabilizer')
    return product(*[section(h, (j,)) for j in range(1, m + 1)])


class ConstantQuotient:
    """Depth-``l`` data: ``G_l``, the image ``K_l`` and its derived subgroup."""

    def __init__(self, p: int, n: int, depth: int, cap: int = DEFAULT_DEGREE_CAP):
        self.C = ConstantGroup(p, n)
        self.q = LevelQuotient(self.C.vector, depth, cap)
        self.depth = depth
        self.K = self.q.group.normal_closure([self.q.image(self.C.y0)])
        self.Kd = self.K.derived()

    def in_Kd(self, f: Element) -> bool:
        return self.Kd.contains(self.q.image(f))

    def product_with_Kd(self, h: SubgroupHandle) -> SubgroupHandle:
        q = self.q
        chain = TreeChain(q.p, q.n, q.depth, list(h.gens) + list(self.Kd.gens))
        return SubgroupHandle(q, chain.strong_generators(), chain)


def _random_word(C: ConstantGroup, rng: random.Random, length: int) -> Element:
    letters = [C.a, C.b, invert(C.a), invert(C.b)]
    return product(*[rng.choice(letters) for _ in range(length)]) if length else C.G.identity


def _random_derived(C: ConstantGroup, rng: random.Random) -> Element:
    ab = commutator(C.a, C.b)
    parts = [power(conjugate(ab, _random_word(C, rng, rng.randint(0, 4))), rng.choice((1, -1)))
             for _ in range(rng.randint(1, 3))]
    return product(*parts)


def _random_K_derived(C: ConstantGroup, rng: random.Random) -> Element:
    parts = []
    for _ in range(rng.randint(1, 2)):
        i, j = rng.randrange(C.m), rng.randrange(C.m)
        c = commutator(C.y(i), C.y(j) * C.y(rng.randrange(C.m)))
        parts.append(conjugate(c, _random_word(C, rng, rng.randint(0, 3))))
    return product(*parts)


def _twisted_product(g: Element, a: Element) -> Element:
    """``prod_{i=1}^{m-1} g_i^a g_i^(a^2) ... g_i^(a^i)`` over the first-level sections of g."""
    m = g.shape.m
    parts = []
    for i in range(1, m):
        gi = section(g, (i,))
        parts.extend(conjugate(gi, power(a, j)) for j in range(1, i + 1))
    return product(*parts)


@dataclass
class Verdict:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {'name': self.name, 'verdict': 'PASS' if self.passed else 'FAIL', 'detail': self.detail}


def verify_prop_products(p: int, n: int, depth: int, samples: int = 6, seed: int = 0,
                         cap: int = DEFAULT_DEGREE_CAP) -> Verdict:
    """Section products of elements of G' and K' land in K' (checked in the depth-``l`` quotient).

    Also checks the consequence for elements of K' st(l) with only the
    first and last section non-trivial: those sections lie in K' st(l-1).
    """
    if depth < 2:
        raise ValueError('depth must be at least 2')
    data = ConstantQuotient(p, n, depth, cap)
    C = data.C
    rng = random.Random(seed)
    part_i = [data.in_Kd(pi_product(g)) for g in
              [commutator(C.a, C.b)] + [_random_derived(C, rng) for _ in range(samples)]]
    part_ii = [data.in_Kd(_twisted_product(g, C.a)) for g in
               [commutator(C.y(0), C.y(1))] + [_random_K_derived(C, rng) for _ in range(samples)]]
    lower = ConstantQuotient(p, n, depth - 1, cap)
    part_cor = []
    for i in range(1, depth + 1):
        g = commutator(C.b, C.a, *([C.b] * i))
        if not data.in_Kd(g):
            continue
        x, y = section(g, (1,)), section(g, (C.m,))
        part_cor.append(lower.in_Kd(x) and lower.in_Kd(y))
    ok = all(part_i) and all(part_ii) and all(part_cor) and bool(part_cor)
    return Verdict('section products', ok, {
        'depth': depth, 'derived_samples': len(part_i), 'K_derived_samples': len(part_ii),
        'corollary_samples': len(part_cor),
        'i_holds': all(part_i), 'ii_holds': all(part_ii), 'corollary_holds': all(part_cor),
    })


def stab1_derived_equals_stab2(p: int, n: int, depth: int = 3, cap: int = DEFAULT_DEGREE_CAP) -> Verdict:
    """Compare the derived subgroup of st(1) with st(2) in the depth-``l`` quotient."""
    if depth < 3:
        raise ValueError('st(2) is only visible from depth 3')
    C = ConstantGroup(p, n)
    q = LevelQuotient(C.vector, depth, cap)
    d = q.stabilizer_subgroup(1).derived()
    s2 = q.stabilizer_subgroup(2)
    ok = d.equals(s2)
    return Verdict("st(1)' = st(2)", ok, {'depth': depth, 'order_derived': str(d.order()),
                                         'order_st2': str(s2.order())})


@dataclass
class QuotientData:
    p: int
    n: int
    depth: int
    order: int
    expected: int
    lcs_indices: list[int]
    nilpotency_class: int

    def to_dict(self) -> dict:
        return {'p': self.p, 'n': self.n, 'depth': self.depth, 'order': str(self.order),
                'expected': str(self.expected), 'lcs_indices': [str(x) for x in self.lcs_indices],
                'nilpotency_class': self.nilpotency_class}


def q_order(p: int, n: int, depth: int, cap: int = DEFAULT_DEGREE_CAP) -> QuotientData:
    """Order, lower central indices and class of ``Q_l = G_l / (K_l)'``.

    ``lcs_indices[i-1]`` is ``|Q_l : gamma_i(Q_l)|`` for i = 1, 2, ...
    until the series of ``Q_l`` reaches 1.
    """
    if depth < 2:
        raise ValueError('depth must be at least 2')
    data = ConstantQuotient(p, n, depth, cap)
    full = data.q.group.order()
    kd = data.Kd.order()
    order = full // kd
    indices = []
    term = data.q.group
    i = 1
    while True:
        covered = data.product_with_Kd(term).order()
        indices.append(full // covered)
        if covered == kd:
            break
        i += 1
        term = data.q.group.lower_central_term(i)
    return QuotientData(p, n, depth, order, p ** ((depth + 1) * n), indices, len(indices) - 1)


def model_matrix(p: int, n: int) -> IntegerMatrix:
    """Companion matrix of ``X^(p^n-1) + ... + X + 1`` (right action)."""
    return companion_matrix(p ** n - 1)


def model_lcs_index(p: int, n: int, i: int, method: str = 'det') -> int:
    """``|P : gamma_i(P)| = p^n |det (M - I)^(i-1)|`` in the companion-matrix model.

    ``method='snf'`` computes the lattice index from the Smith normal form
    of the rows of ``(M - I)^(i-1)`` instead of the determinant.
    """
    if i < 1:
        raise ValueError('i must be at least 1')
    M = model_matrix(p, n)
    A = (M - IntegerMatrix.identity(M.nrows)) ** (i - 1)
    if method == 'det':
        lattice = abs(A.det())
    elif method == 'snf':
        lattice = 1
        for d in A.smith_diagonal():
            lattice *= d
    else:
        raise ValueError(f'unknown method {method!r}')
    return p ** n * lattice


def structure_crosscheck(p: int, n: int, depth: int, cap: int = DEFAULT_DEGREE_CAP) -> Verdict:
    """Compare lower central indices of ``Q_l`` with the model and check the model relators."""
    if depth < 2:
        raise ValueError('depth must be at least 2')
    qd = q_order(p, n, depth, cap)
    m = p ** n
    compared = {}
    for i in range(2, depth + 2):
        got = qd.lcs_indices[i - 1] if i - 1 < len(qd.lcs_indices) else qd.order
        compared[i] = (got, model_lcs_index(p, n, i))
    data = ConstantQuotient(p, n, depth, cap)
    C = data.C
    ys = C.ys()
    # exact relation y_{m-2}^a = y_0^-1 ... y_{m-2}^-1
    exact = equal_at_depth(conjugate(ys[m - 2], C.a), product(*[invert(y) for y in ys[:m - 1]]),
                           depth, cap=depth)
    relators = [power(C.a, m)]
    relators += [commutator(ys[i], ys[j]) for i in range(m - 1) for j in range(i + 1, m - 1)]
    relators += [conjugate(ys[i], C.a) * invert(ys[i + 1]) for i in range(m - 2)]
    relators.append(conjugate(ys[m - 2], C.a) * product(*ys[:m - 1]))
    relators_ok = all(data.in_Kd(r) for r in relators)
    indices_ok = all(got == want for got, want in compared.values())
    return Verdict('structure crosscheck', indices_ok and exact and relators_ok, {
        'depth': depth,
        'indices': {str(i): {'quotient': str(g), 'model': str(w)} for i, (g, w) in compared.items()},
        'relation_y_exact': exact, 'relators_trivial': relators_ok, 'relator_count': len(relators),
    })


def b9_kernel_check(p: int, n: int) -> Verdict:
    """``b_1^k1 ... b_m^km`` fixes level 2 exactly when every k_i is 0 mod p^n (all tuples)."""
    from itertools import product as tuples
    from .battery import b9_element

    C = ConstantGroup(p, n)
    m = C.m
    mismatches = []
    count = 0
    for ks in tuples(range(m), repeat=m):
        count += 1
        h = b9_element(C.G, ks)
        in_st2 = equal_at_depth(h, C.G.identity, 2)
        if in_st2 != (not any(ks)):
            mismatches.append(ks)
    return Verdict('b-product kernel', not mismatches, {'tuples': count, 'mismatches': mismatches[:5]})


def not_branch_report(e_or_shape, depth: int = 3, lcs_bound: int = 6,
                      cap: int = DEFAULT_DEGREE_CAP) -> dict:
    """Checkable evidence for the constant-vector group not being branch.

    Accepts a :class:`DefiningVector` (which must be constant) or a pair
    ``(p, n)``.  The verdict is a citation supported by finite-level
    checks and the exact model, not a proof.
    """
    if isinstance(e_or_shape, DefiningVector):
        if not is_constant(e_or_shape):
            raise NotApplicable('not_branch_report needs a constant defining vector')
        p, n = e_or_shape.p, e_or_shape.n
    else:
        p, n = e_or_shape
    items = []
    m = p ** n
    # (1) sandwich inclusions on generators
    upper = ConstantQuotient(p, n, depth, cap)
    lower = ConstantQuotient(p, n, depth - 1, cap)
    q = upper.q
    derived = q.group.derived()
    kd_embedded = all(upper.Kd.contains(embed_at(s, x, m, depth))
                      for x in range(1, m + 1) for s in lower.Kd.gens)
    kd_in_derived = upper.Kd.is_subgroup_of(derived)
    derived_sections = all(lower.K.contains(restrict_to(g, x, m, depth))
                           for x in range(1, m + 1) for g in derived.gens)
    items.append(Verdict('sandwich inclusions', kd_embedded and kd_in_derived and derived_sections, {
        'depth': depth, "K' x ... x K' in psi(K')": kd_embedded, "K' <= G'": kd_in_derived,
        "psi(G') in K x ... x K": derived_sections,
    }))
    # (2) order growth of Q_l
    orders = {}
    for lv in range(2, depth + 1):
        qd = q_order(p, n, lv, cap)
        orders[str(lv)] = {'order': str(qd.order), 'expected': str(qd.expected),
                           'class': qd.nilpotency_class}
    ok2 = all(v['order'] == v['expected'] and v['class'] == int(lv) for lv, v in orders.items())
    items.append(Verdict('quotient orders', ok2, orders))
    # (3) the model's lower central indices grow without bound
    model = {str(i): str(model_lcs_index(p, n, i)) for i in range(1, lcs_bound + 1)}
    ok3 = all(int(model[str(i)]) == p ** (i * n) for i in range(1, lcs_bound + 1))
    det = model_matrix(p, n) - IntegerMatrix.identity(m - 1)
    ok3 = ok3 and abs(det.det()) == m
    items.append(Verdict('model lower central indices', ok3, {'indices': model, 'det(M-I)': det.det()}))
    passed = all(it.passed for it in items)
    return {
        'p': p, 'n': n, 'depth': depth,
        'items': [it.to_dict() for it in items],
        'verdict': 'PASS' if passed else 'FAIL',
        'conclusion': 'not a branch group (cited); finite-level evidence + exact model',
    }
