"""Congruence quotients G/st_G(l) as permutation groups on the leaves of level l.

The quotient of a GGS-group at depth ``l`` is generated by the level
permutations of ``a`` and ``b``.  Subgroups are :class:`SubgroupHandle`
objects holding generators and a lazily built :class:`TreeChain`.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .intmat import IntegerMatrix, elementary_divisors
from .permgroups import PermGroup, TreeChain, comm, inv, is_identity, mul, perm_power
from .tree import Element, level_permutation, section
from .vectors import DefiningVector, NotApplicable

__all__ = [
    'DEFAULT_DEGREE_CAP', 'DegreeCapExceeded', 'ContainmentError', 'LevelQuotient',
    'SubgroupHandle', 'build_quotient', 'index', 'level_transitive', 'fractal_check',
    'embed_at', 'restrict_to', 'rigid_schedule',
]

DEFAULT_DEGREE_CAP = 10 ** 4


class DegreeCapExceeded(RuntimeError):
    pass


class ContainmentError(ValueError):
    pass


class SubgroupHandle:
    """A subgroup of a :class:`LevelQuotient` given by generating permutations."""

    def __init__(self, quotient: LevelQuotient, gens: Iterable[np.ndarray],
                 chain: TreeChain | None = None):
        self.quotient = quotient
        self.gens = [np.asarray(g, dtype=np.int64) for g in gens]
        self._chain = chain

    @property
    def chain(self) -> TreeChain:
        if self._chain is None:
            q = self.quotient
            self._chain = TreeChain(q.p, q.n, q.depth, self.gens)
        return self._chain

    def order(self) -> int:
        return self.chain.order()

    def contains(self, perm: np.ndarray) -> bool:
        return self.chain.contains(np.asarray(perm, dtype=np.int64))

    def contains_all(self, perms: Iterable[np.ndarray]) -> bool:
        return all(self.contains(x) for x in perms)

    def is_subgroup_of(self, other: SubgroupHandle) -> bool:
        return other.contains_all(self.gens)

    def equals(self, other: SubgroupHandle) -> bool:
        return self.order() == other.order() and self.is_subgroup_of(other)

    def is_trivial(self) -> bool:
        return all(is_identity(g) for g in self.gens)

    def normal_closure(self, perms: Iterable[np.ndarray]) -> SubgroupHandle:
        """Smallest subgroup containing ``perms`` and normalised by this subgroup."""
        q = self.quotient
        chain = TreeChain(q.p, q.n, q.depth)
        pending = []
        for x in perms:
            if chain.add(x):
                pending.append(np.asarray(x, dtype=np.int64))
        while pending:
            s = pending.pop()
            for g in self.gens:
                c = mul(inv(g), s, g)
                if chain.add(c):
                    pending.append(c)
        return SubgroupHandle(q, chain.strong_generators(), chain)

    def derived(self) -> SubgroupHandle:
        gens = self.gens
        comms = [comm(x, y) for i, x in enumerate(gens) for y in gens[i + 1:]]
        return self.normal_closure(comms)

    def lower_central_term(self, i: int) -> SubgroupHandle:
        """gamma_i of this subgroup, with gamma_1 the subgroup itself."""
        if i < 1:
            raise ValueError('lower central series starts at 1')
        term = self
        for _ in range(i - 1):
            if term.is_trivial():
                break
            term = self.normal_closure(comm(x, g) for x in term.gens for g in self.gens)
        return term

    def lower_central_series(self) -> list[SubgroupHandle]:
        """gamma_1, gamma_2, ... down to the first trivial term (included)."""
        out = [self]
        while not out[-1].is_trivial() and out[-1].order() > 1:
            nxt = self.normal_closure(comm(x, g) for x in out[-1].gens for g in self.gens)
            if nxt.order() == out[-1].order():
                raise ValueError('lower central series does not reach 1: not nilpotent')
            out.append(nxt)
        return out

    def nilpotency_class(self) -> int:
        return len(self.lower_central_series()) - 1

    def abelian_relations(self, kernel: SubgroupHandle | None = None) -> IntegerMatrix:
        """Relation matrix of ``self / kernel`` on the generators of ``self``.

        ``kernel`` defaults to the derived subgroup and must be a normal
        subgroup containing it.  Coset representatives are enumerated one
        generator at a time, so the cost is linear in the quotient size.
        """
        if kernel is None:
            kernel = self.derived()
        gens = self.gens
        r = len(gens)
        reps: list[tuple[tuple[int, ...], np.ndarray]] = [((0,) * r, self.quotient.identity_perm())]
        rows = []

        def locate(y):
            for vec, rep in reps:
                if kernel.contains(mul(y, inv(rep))):
                    return vec
            return None

        for j, g in enumerate(gens):
            power = g
            o = 1
            while True:
                hit = locate(power)
                if hit is not None:
                    break
                power = mul(power, g)
                o += 1
            row = [-x for x in hit]
            row[j] += o
            rows.append(row)
            new = []
            for c in range(1, o):
                gc = perm_power(g, c)
                for vec, rep in reps:
                    v2 = list(vec)
                    v2[j] = c
                    new.append((tuple(v2), mul(rep, gc)))
            reps.extend(new)
        expected = self.order() // kernel.order()
        if len(reps) != expected:
            raise AssertionError(f'enumerated {len(reps)} cosets, expected {expected}')
        return IntegerMatrix(rows)

    def abelian_invariants(self) -> list[int]:
        """Elementary divisors (prime powers, descending) of the abelianisation."""
        if not self.gens:
            return []
        diag = self.abelian_relations().smith_diagonal()
        return elementary_divisors([d for d in diag if d != 1])

    def schreier_sims(self) -> PermGroup:
        """Independent stabilizer chain, for cross-checks."""
        return PermGroup(self.gens, self.quotient.degree)


class LevelQuotient:
    """The image of a GGS-group on the leaves of level ``depth``."""

    def __init__(self, vector: DefiningVector, depth: int, cap: int = DEFAULT_DEGREE_CAP):
        if depth < 1:
            raise ValueError('depth must be at least 1')
        degree = vector.m ** depth
        if degree > cap:
            raise DegreeCapExceeded(
                f'{vector.m}^{depth} = {degree} leaves exceeds the degree cap {cap}')
        self.vector = vector
        self.p, self.n, self.m = vector.p, vector.n, vector.m
        self.depth = depth
        self.degree = degree
        self.G = vector.group
        self.a = self.image(self.G.a)
        self.b = self.image(self.G.b)
        self.group = SubgroupHandle(self, [self.a, self.b])

    def identity_perm(self) -> np.ndarray:
        return np.arange(self.degree, dtype=np.int64)

    def image(self, f: Element) -> np.ndarray:
        return level_permutation(f, self.depth, cap=self.depth)

    def subgroup(self, gens: Iterable) -> SubgroupHandle:
        perms = [self.image(g) if isinstance(g, Element) else g for g in gens]
        return SubgroupHandle(self, perms)

    def order(self) -> int:
        return self.group.order()

    def stabilizer_subgroup(self, j: int) -> SubgroupHandle:
        """Image of st_G(j): elements of the quotient fixing every vertex of level ``j``."""
        if not 1 <= j < self.depth:
            raise ValueError(f'need 1 <= j < depth={self.depth}, got {j}')
        tail = self.group.chain.tail(j)
        return SubgroupHandle(self, tail.strong_generators(), tail)

    def b_conjugates(self) -> SubgroupHandle:
        """The subgroup generated by the images of ``b_i = b^(a^i)``, i = 0..m-1."""
        return self.subgroup([self.G.b_(i) for i in range(self.m)])

    def truncated_rigid_stabilizer(self, letter: int) -> SubgroupHandle:
        """Elements of the quotient fixing every leaf outside the subtree of ``letter``.

        This can be larger than the image of the rigid stabilizer of the
        vertex, since a quotient element may lift to elements acting
        outside the subtree below the cutoff.
        """
        if self.depth < 2:
            raise ValueError('truncated rigid stabilizers need depth >= 2')
        schedule = rigid_schedule(self.m, self.depth, letter)
        chain = TreeChain(self.p, self.n, self.depth, self.group.gens, schedule=schedule)
        tail = chain.tail(self.depth)
        return SubgroupHandle(self, tail.strong_generators(), tail)

    def embed(self, perm_below: np.ndarray, letter: int) -> np.ndarray:
        return embed_at(perm_below, letter, self.m, self.depth)


def rigid_schedule(m: int, depth: int, letter: int) -> list[tuple[int, np.ndarray]]:
    """Stages listing vertices outside the subtree of ``letter`` first, then inside it.

    Rows at stages ``>= depth`` of a chain built with this schedule generate
    the elements that act only inside the subtree.
    """
    outside, inside = [], []
    for j in range(depth):
        cols = np.arange(m ** j)
        if j == 0:
            outside.append((0, cols))
            continue
        block = m ** (j - 1)
        mask = (cols >= (letter - 1) * block) & (cols < letter * block)
        outside.append((j, cols[~mask]))
        inside.append((j, cols[mask]))
    return outside + inside


def embed_at(perm_below: np.ndarray, letter: int, m: int, depth: int) -> np.ndarray:
    """Level-``depth`` permutation acting as ``perm_below`` under ``letter`` and trivially elsewhere."""
    block = m ** (depth - 1)
    if perm_below.size != block:
        raise ValueError('sub-permutation has the wrong degree')
    out = np.arange(m ** depth, dtype=np.int64)
    lo = (letter - 1) * block
    out[lo:lo + block] = lo + perm_below
    return out


def restrict_to(perm: np.ndarray, letter: int, m: int, depth: int) -> np.ndarray:
    """Section at ``letter`` of a level-``depth`` permutation fixing that first-level vertex."""
    block = m ** (depth - 1)
    lo = (letter - 1) * block
    part = perm[lo:lo + block]
    if part.size and not np.all((part >= lo) & (part < lo + block)):
        raise ValueError(f'permutation moves the vertex {letter}')
    return part - lo


def build_quotient(e: DefiningVector, depth: int, cap: int = DEFAULT_DEGREE_CAP) -> LevelQuotient:
    return LevelQuotient(e, depth, cap)


def index(g: SubgroupHandle, h: SubgroupHandle) -> int:
    """|g : h|, after checking that h is contained in g."""
    if not h.is_subgroup_of(g):
        raise ContainmentError('second argument is not a subgroup of the first')
    return g.order() // h.order()


def _orbit_size(gens: Sequence[np.ndarray], start: int = 0) -> int:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for g in gens:
            y = int(g[x])
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen)


def level_transitive(q: LevelQuotient) -> bool:
    """Whether the group acts transitively on every level up to the quotient's depth."""
    for j in range(1, q.depth + 1):
        gens = [level_permutation(q.G.a, j, cap=j), level_permutation(q.G.b, j, cap=j)]
        if _orbit_size(gens) != q.m ** j:
            return False
    return True


def fractal_check(e: DefiningVector, depth: int, cap: int = DEFAULT_DEGREE_CAP) -> bool:
    """Whether the first-vertex sections of st_G(1) generate the whole group at ``depth - 1``.

    st_G(1) is the stabilizer of the vertex ``x1`` (a acts regularly on
    the first level) and is generated by ``b_0, ..., b_{m-1}``; their
    sections at ``x1`` are compared with ``G`` in the quotient of depth
    ``depth - 1``.
    """
    if depth < 2:
        raise NotApplicable('fractal_check needs depth >= 2')
    G = e.group
    q = LevelQuotient(e, depth - 1, cap)
    sections = q.subgroup([section(G.b_(i), (1,)) for i in range(e.m)])
    return sections.equals(q.group)
